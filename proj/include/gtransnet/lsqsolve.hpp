#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/assembly.hpp"

namespace gtransnet {

/// QR: rank-revealing complete orthogonal factorization (xGELSY).
/// SVD: divide-and-conquer SVD with truncation (xGELSD).
enum class SolveMethod { QR, SVD };

std::string_view to_string(SolveMethod method);
SolveMethod solve_method_from_string(std::string_view name);

struct SolverOptions {
  SolveMethod method = SolveMethod::QR;
  /// Relative rank tolerance. Negative selects eps for the QR rank test and
  /// eps * max(rows, cols) for SVD truncation.
  double rcond = -1.0;
  /// Scale every column to unit max-abs before solving.
  bool equilibrate = false;
  /// Re-solve with SVD when the QR rank estimate is below min(rows, cols).
  /// Off by default: saturated feature matrices are numerically rank
  /// deficient, and truncated SVD is far less accurate on them than QR.
  bool svd_fallback = false;
};

struct SolveDiagnostics {
  double residual_norm = 0;
  Eigen::Index rank_estimate = 0;
  /// sigma_max / sigma_min over the retained spectrum; NaN on the QR path.
  double condition_estimate = 0;
  double wall_time = 0;
  SolveMethod method = SolveMethod::QR;  // the path that produced alpha
  bool fell_back = false;
  bool rank_deficient = false;
  double rcond = 0;
  bool equilibrated = false;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

struct SolveResult {
  Eigen::VectorXd coefficients;
  SolveDiagnostics diagnostics;
};

/// Least-squares minimizer of |A x - b|. Throws NumericalError on non-finite
/// input or factorization failure.
SolveResult solve_least_squares(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                                const SolverOptions& options = {});

/// Factorization of one matrix, reused across right-hand sides. Follows the
/// same rules as solve_least_squares: pivoted QR with the gelsy rank test and
/// complete orthogonal step, or truncated SVD, including the fallback.
class LeastSquaresFactorization {
 public:
  explicit LeastSquaresFactorization(const Eigen::MatrixXd& matrix, const SolverOptions& options = {});

  SolveResult solve(const Eigen::VectorXd& rhs) const;

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// Seconds spent factoring.
  double factor_time() const { return factor_time_; }

 private:
  Eigen::MatrixXd matrix_;  // unscaled, for residuals and reuse checks
  Eigen::VectorXd col_scale_;
  SolveDiagnostics base_;
  double factor_time_ = 0;
  // QR path: Householder data of A P, rank-reducing reflectors of the leading rows.
  Eigen::MatrixXd qr_;
  Eigen::VectorXd tau_;
  Eigen::VectorXd tau_rz_;
  std::vector<int> perm_;
  // SVD path.
  Eigen::MatrixXd u_;
  Eigen::VectorXd inv_sigma_;
  Eigen::MatrixXd vt_;
};

/// Solves an assembled system; alpha is reshaped to N_L x fields.
struct SystemSolution {
  Eigen::MatrixXd alpha;
  SolveDiagnostics diagnostics;
};
SystemSolution solve(const LeastSquaresSystem& system, const SolverOptions& options = {});

}  // namespace gtransnet
