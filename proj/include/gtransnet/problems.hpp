#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/assembly.hpp"
#include "gtransnet/featurenet.hpp"
#include "gtransnet/geometry.hpp"
#include "gtransnet/lsqsolve.hpp"

namespace gtransnet {

/// Closed-form exact solution of one unknown field.
struct ExactField {
  std::function<double(const double*)> value;
  std::function<void(const double*, double*)> gradient;
  std::function<double(const double*)> laplacian;
};

using ProblemParams = std::map<std::string, double>;

/// Fixed-point scheme for a nonlinear problem. The iterate holds the tracked
/// fields at the interior collocation points, one column per tracked field.
struct PicardScheme {
  std::vector<int> tracked_fields;
  std::function<Eigen::MatrixXd(const PointMatrix& interior)> initial;
  std::function<LinearProblem(const Eigen::MatrixXd& iterate)> linearize;
  double tolerance = 1e-12;
  int max_iterations = 50;
  /// Stop early once the difference exceeds this multiple of the first one.
  double divergence_ratio = 1e6;
};

struct PdeProblem {
  std::string name;
  ProblemParams params;
  Domain domain{DomainKind::UnitSquare};
  std::vector<std::string> field_names;
  std::vector<ExactField> exact;  // one per field
  /// Fields pooled into the relative L2 error.
  std::vector<int> error_fields;
  /// Used directly when `picard` is empty.
  LinearProblem linear;
  std::optional<PicardScheme> picard;
  /// Collocation counts and shape parameter of the reference experiments.
  CollocationCounts reference_counts;
  double reference_gamma = 2.0;
  /// Free-form facts recorded in run reports (e.g. the pressure pin).
  std::vector<std::pair<std::string, std::string>> notes;

  int dim() const { return domain.dim(); }
  int num_fields() const { return static_cast<int>(field_names.size()); }
  bool nonlinear() const { return picard.has_value(); }
  /// The linear problem, or the Picard linearization at the exact solution
  /// sampled on `interior`.
  LinearProblem linear_problem_at_exact(const PointMatrix& interior) const;
};

/// Names accepted by make_problem.
std::vector<std::string> problem_names();

/// Builds a catalogued problem. Unknown names or parameters throw
/// InvalidArgument.
PdeProblem make_problem(const std::string& name, const ProblemParams& params = {});

/// Helmholtz wavenumber k = 2 pi nu / c with c = 340 m/s.
double helmholtz_wavenumber(double frequency);

/// Max-abs residual of every equation when the exact solution is inserted,
/// using its closed-form derivatives. Rows are evaluated at the collocation
/// points of `colloc`; periodic rows compare y with its periodic image.
std::vector<std::pair<std::string, double>> manufactured_residual(const PdeProblem& problem,
                                                                  const CollocationSet& colloc);

/// Exact values of `field` at `points`.
Eigen::VectorXd exact_values(const PdeProblem& problem, const PointMatrix& points, int field = 0);

struct FitResult {
  Eigen::VectorXd alpha;
  double relative_l2 = 0;
  SolveDiagnostics diagnostics;
};

/// Least-squares fit of a 1D target by values only. Trains on
/// colloc.interior, reports the error on colloc.test and stores alpha in `net`.
FitResult fit_function(const std::function<double(double)>& target, const Domain& interval,
                       FeatureNetwork& net, const CollocationSet& colloc,
                       const SolverOptions& solver = {});

/// Fit of sin(frequency pi x) on (-1, 1) by a single-layer network with
/// half-uniform offsets in the interval's default ball; training points on a
/// uniform grid, test points random from test_seed.
struct SineFitSetup {
  double frequency = 30;
  int width = 1000;
  double gamma = 14;
  std::size_t points = 1000;
  std::size_t test_points = 10000;
  std::uint64_t seed = 0;
  std::uint64_t test_seed = 20240601;
};

struct SineFit {
  FitResult result;
  FeatureNetwork net;
  CollocationSet colloc;
};

SineFit fit_sine(const SineFitSetup& setup, const SolverOptions& solver = {});

}  // namespace gtransnet
