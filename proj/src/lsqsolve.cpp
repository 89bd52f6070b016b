#include "gtransnet/lsqsolve.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <lapacke.h>

#ifdef GTRANSNET_SCIPY_OPENBLAS
#define GTRANSNET_LAPACKE(fn) scipy_LAPACKE_##fn
#define GTRANSNET_FORTRAN(fn) scipy_##fn##_
#else
#define GTRANSNET_LAPACKE(fn) LAPACKE_##fn
#define GTRANSNET_FORTRAN(fn) fn##_
#endif

// Incremental condition estimation step used by xGELSY; not wrapped by LAPACKE.
extern "C" void GTRANSNET_FORTRAN(dlaic1)(const lapack_int* job, const lapack_int* j, const double* x,
                                          const double* sest, const double* w, const double* gamma,
                                          double* sestpr, double* s, double* c);

#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

struct RawSolve {
  Eigen::VectorXd x;
  Eigen::Index rank = 0;
  double condition = std::numeric_limits<double>::quiet_NaN();
};

// Both drivers overwrite A and expect b padded to max(m, n) rows.
RawSolve run_driver(SolveMethod method, Eigen::MatrixXd a, const Eigen::VectorXd& b, double rcond) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd work = Eigen::VectorXd::Zero(std::max(m, n));
  work.head(m) = b;
  lapack_int rank = 0;
  lapack_int info = 0;
  RawSolve out;
  if (method == SolveMethod::QR) {
    std::vector<lapack_int> jpvt(static_cast<std::size_t>(n), 0);
    info = GTRANSNET_LAPACKE(dgelsy)(LAPACK_COL_MAJOR, m, n, 1, a.data(), m, work.data(), work.size(),
                          jpvt.data(), rcond, &rank);
  } else {
    Eigen::VectorXd s(std::min(m, n));
    info = GTRANSNET_LAPACKE(dgelsd)(LAPACK_COL_MAJOR, m, n, 1, a.data(), m, work.data(), work.size(),
                          s.data(), rcond, &rank);
    if (info == 0 && rank > 0) out.condition = s[0] / s[rank - 1];
  }
  if (info < 0) throw InvalidArgument("least-squares driver rejected argument " + std::to_string(-info));
  if (info > 0) throw NumericalError("least-squares factorization did not converge");
  out.x = work.head(n);
  out.rank = rank;
  return out;
}

void check_input(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs) {
  if (matrix.size() == 0) throw InvalidArgument("least-squares matrix is empty");
  if (matrix.rows() != rhs.size()) throw InvalidArgument("rhs length differs from the row count");
  if (!matrix.allFinite() || !rhs.allFinite()) {
    throw NumericalError("least-squares input contains non-finite entries");
  }
}

// Default tolerances: eps for the QR rank test, eps * max(m, n) for SVD truncation.
double effective_rcond(const SolverOptions& options, SolveMethod method, Eigen::Index m, Eigen::Index n) {
  if (options.rcond >= 0) return options.rcond;
  const double eps = std::numeric_limits<double>::epsilon();
  return method == SolveMethod::QR ? eps : eps * static_cast<double>(std::max(m, n));
}

Eigen::VectorXd column_scale(const Eigen::MatrixXd& matrix, bool equilibrate) {
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(matrix.cols());
  if (!equilibrate) return scale;
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const double c = matrix.col(j).cwiseAbs().maxCoeff();
    if (c > 0) scale[j] = 1.0 / c;
  }
  return scale;
}

// Rank of the pivoted triangle R by the incremental estimate of xGELSY.
lapack_int incremental_rank(const Eigen::MatrixXd& r, lapack_int mn, double rcond) {
  if (mn == 0 || r(0, 0) == 0.0) return 0;
  const lapack_int imax = 1, imin = 2;
  Eigen::VectorXd xmin = Eigen::VectorXd::Zero(mn), xmax = Eigen::VectorXd::Zero(mn);
  xmin[0] = xmax[0] = 1.0;
  double smax = std::abs(r(0, 0)), smin = smax;
  lapack_int rank = 1;
  while (rank < mn) {
    const lapack_int i = rank;
    double sminpr = 0, smaxpr = 0, s1 = 0, c1 = 0, s2 = 0, c2 = 0;
    GTRANSNET_FORTRAN(dlaic1)(&imin, &rank, xmin.data(), &smin, &r(0, i), &r(i, i), &sminpr, &s1, &c1);
    GTRANSNET_FORTRAN(dlaic1)(&imax, &rank, xmax.data(), &smax, &r(0, i), &r(i, i), &smaxpr, &s2, &c2);
    if (!(smaxpr * rcond <= sminpr)) break;
    xmin.head(rank) *= s1;
    xmax.head(rank) *= s2;
    xmin[rank] = c1;
    xmax[rank] = c2;
    smin = sminpr;
    smax = smaxpr;
    ++rank;
  }
  return rank;
}

}  // namespace

std::string_view to_string(SolveMethod method) { return method == SolveMethod::QR ? "qr" : "svd"; }

SolveMethod solve_method_from_string(std::string_view name) {
  if (name == "qr" || name == "QR") return SolveMethod::QR;
  if (name == "svd" || name == "SVD") return SolveMethod::SVD;
  throw InvalidArgument("unknown solve method '" + std::string(name) + "'");
}

SolveResult solve_least_squares(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs,
                                const SolverOptions& options) {
  check_input(matrix, rhs);
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index m = matrix.rows();
  const Eigen::Index n = matrix.cols();

  SolveDiagnostics diag;
  diag.rows = m;
  diag.cols = n;
  diag.rcond = effective_rcond(options, options.method, m, n);
  diag.equilibrated = options.equilibrate;

  const Eigen::VectorXd col_scale = column_scale(matrix, options.equilibrate);
  auto scaled = [&]() -> Eigen::MatrixXd {
    if (!options.equilibrate) return matrix;
    return matrix * col_scale.asDiagonal();
  };

  RawSolve raw = run_driver(options.method, scaled(), rhs, diag.rcond);
  diag.method = options.method;
  const Eigen::Index full = std::min(m, n);
  diag.rank_deficient = raw.rank < full;
  if (options.method == SolveMethod::QR && diag.rank_deficient && options.svd_fallback) {
    diag.rcond = effective_rcond(options, SolveMethod::SVD, m, n);
    raw = run_driver(SolveMethod::SVD, scaled(), rhs, diag.rcond);
    diag.method = SolveMethod::SVD;
    diag.fell_back = true;
  }
  diag.rank_estimate = raw.rank;
  diag.condition_estimate = raw.condition;

  SolveResult result;
  result.coefficients = col_scale.cwiseProduct(raw.x);
  if (!result.coefficients.allFinite()) throw NumericalError("least-squares solution is not finite");
  diag.residual_norm = (matrix * result.coefficients - rhs).norm();
  diag.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.diagnostics = diag;
  return result;
}

LeastSquaresFactorization::LeastSquaresFactorization(const Eigen::MatrixXd& matrix,
                                                     const SolverOptions& options)
    : matrix_(matrix) {
  check_input(matrix, Eigen::VectorXd::Zero(matrix.rows()));
  const auto start = std::chrono::steady_clock::now();
  const lapack_int m = static_cast<lapack_int>(matrix.rows());
  const lapack_int n = static_cast<lapack_int>(matrix.cols());
  const lapack_int mn = std::min(m, n);
  base_.rows = m;
  base_.cols = n;
  base_.rcond = effective_rcond(options, options.method, m, n);
  base_.equilibrated = options.equilibrate;
  base_.condition_estimate = std::numeric_limits<double>::quiet_NaN();
  col_scale_ = column_scale(matrix, options.equilibrate);
  const Eigen::MatrixXd scaled = matrix * col_scale_.asDiagonal();

  auto factor_svd = [&] {
    Eigen::MatrixXd a = scaled;
    Eigen::VectorXd s(mn);
    u_.resize(m, mn);
    vt_.resize(mn, n);
    const lapack_int info = GTRANSNET_LAPACKE(dgesdd)(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m, s.data(),
                                                      u_.data(), m, vt_.data(), mn);
    if (info < 0) throw InvalidArgument("SVD driver rejected argument " + std::to_string(-info));
    if (info > 0) throw NumericalError("SVD did not converge");
    Eigen::Index rank = 0;
    inv_sigma_ = Eigen::VectorXd::Zero(mn);
    for (Eigen::Index i = 0; i < mn; ++i) {
      if (s[i] > base_.rcond * s[0]) {
        inv_sigma_[i] = 1.0 / s[i];
        rank = i + 1;
      }
    }
    base_.method = SolveMethod::SVD;
    base_.rank_estimate = rank;
    if (rank > 0) base_.condition_estimate = s[0] / s[rank - 1];
  };

  if (options.method == SolveMethod::SVD) {
    factor_svd();
    base_.rank_deficient = base_.rank_estimate < mn;
  } else {
    qr_ = scaled;
    std::vector<lapack_int> jpvt(static_cast<std::size_t>(n), 0);
    tau_.resize(mn);
    lapack_int info = GTRANSNET_LAPACKE(dgeqp3)(LAPACK_COL_MAJOR, m, n, qr_.data(), m, jpvt.data(), tau_.data());
    if (info != 0) throw NumericalError("pivoted QR failed");
    const lapack_int rank = incremental_rank(qr_, mn, base_.rcond);
    base_.method = SolveMethod::QR;
    base_.rank_estimate = rank;
    base_.rank_deficient = rank < mn;
    if (base_.rank_deficient && options.svd_fallback) {
      qr_.resize(0, 0);
      tau_.resize(0);
      base_.rcond = effective_rcond(options, SolveMethod::SVD, m, n);
      factor_svd();
      base_.fell_back = true;
    } else {
      perm_.assign(jpvt.begin(), jpvt.end());
      if (rank > 0 && rank < n) {
        tau_rz_.resize(rank);
        info = GTRANSNET_LAPACKE(dtzrzf)(LAPACK_COL_MAJOR, rank, n, qr_.data(), m, tau_rz_.data());
        if (info != 0) throw NumericalError("complete orthogonal step failed");
      }
    }
  }
  factor_time_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SolveResult LeastSquaresFactorization::solve(const Eigen::VectorXd& rhs) const {
  check_input(matrix_, rhs);
  const auto start = std::chrono::steady_clock::now();
  const lapack_int m = static_cast<lapack_int>(matrix_.rows());
  const lapack_int n = static_cast<lapack_int>(matrix_.cols());
  const lapack_int mn = std::min(m, n);
  Eigen::VectorXd x;
  if (base_.method == SolveMethod::SVD) {
    x = vt_.transpose() * inv_sigma_.cwiseProduct(u_.transpose() * rhs);
  } else {
    const lapack_int rank = static_cast<lapack_int>(base_.rank_estimate);
    const lapack_int ld = std::max(m, n);
    Eigen::VectorXd work = Eigen::VectorXd::Zero(ld);
    work.head(m) = rhs;
    lapack_int info = GTRANSNET_LAPACKE(dormqr)(LAPACK_COL_MAJOR, 'L', 'T', m, 1, mn, qr_.data(), m, tau_.data(),
                                               work.data(), ld);
    if (info != 0) throw NumericalError("applying Q failed");
    qr_.topLeftCorner(rank, rank).triangularView<Eigen::Upper>().solveInPlace(work.head(rank));
    work.segment(rank, n - rank).setZero();
    if (rank > 0 && rank < n) {
      info = GTRANSNET_LAPACKE(dormrz)(LAPACK_COL_MAJOR, 'L', 'T', n, 1, rank, n - rank, qr_.data(), m,
                                       tau_rz_.data(), work.data(), ld);
      if (info != 0) throw NumericalError("applying Z failed");
    }
    x.resize(n);
    for (lapack_int i = 0; i < n; ++i) x[perm_[static_cast<std::size_t>(i)] - 1] = work[i];
  }
  SolveResult result;
  result.coefficients = col_scale_.cwiseProduct(x);
  if (!result.coefficients.allFinite()) throw NumericalError("least-squares solution is not finite");
  result.diagnostics = base_;
  result.diagnostics.residual_norm = (matrix_ * result.coefficients - rhs).norm();
  result.diagnostics.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SystemSolution solve(const LeastSquaresSystem& system, const SolverOptions& options) {
  SolveResult r = solve_least_squares(system.matrix, system.rhs, options);
  SystemSolution out;
  out.alpha = Eigen::Map<const Eigen::MatrixXd>(r.coefficients.data(), system.field_columns,
                                                system.num_fields);
  out.diagnostics = r.diagnostics;
  return out;
}

}  // namespace gtransnet
