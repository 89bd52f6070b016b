#include "gtransnet/picard.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SolveOutcome picard_solve(const PdeProblem& problem, FeatureNetwork& net,
                          const CollocationSet& colloc, const SolverOptions& solver,
                          const AssemblyOptions& assembly) {
  if (!problem.picard) throw InvalidArgument(problem.name + " has no Picard scheme");
  const PicardScheme& scheme = *problem.picard;
  if (!(scheme.tolerance > 0) || scheme.max_iterations < 1) {
    throw InvalidArgument("Picard scheme needs a positive tolerance and cap");
  }
  SolveOutcome out;
  out.nonlinear = true;
  FeatureCache cache;
  Eigen::MatrixXd iterate = scheme.initial(colloc.interior);
  const auto tracked = static_cast<Eigen::Index>(scheme.tracked_fields.size());
  if (iterate.rows() != colloc.interior.rows() || iterate.cols() != tracked) {
    throw InvalidArgument("initial iterate has the wrong shape");
  }

  // When the linearization leaves the matrix unchanged (only the rhs moves),
  // one factorization serves every later iteration.
  Eigen::MatrixXd previous_matrix;
  std::optional<LeastSquaresFactorization> factor;

  for (int k = 1; k <= scheme.max_iterations; ++k) {
    auto t0 = Clock::now();
    const LinearProblem lp = scheme.linearize(iterate);
    const LeastSquaresSystem sys = assemble(lp, net, colloc, problem.domain, assembly, &cache);
    out.assemble_seconds += seconds_since(t0);
    SystemSolution sol;
    if (factor && factor->matrix() == sys.matrix) {
      SolveResult r = factor->solve(sys.rhs);
      sol.alpha = Eigen::Map<const Eigen::MatrixXd>(r.coefficients.data(), sys.field_columns, sys.num_fields);
      sol.diagnostics = r.diagnostics;
    } else if (k > 1 && previous_matrix.size() && previous_matrix == sys.matrix) {
      factor.emplace(sys.matrix, solver);
      previous_matrix.resize(0, 0);
      out.solve_seconds += factor->factor_time();
      SolveResult r = factor->solve(sys.rhs);
      sol.alpha = Eigen::Map<const Eigen::MatrixXd>(r.coefficients.data(), sys.field_columns, sys.num_fields);
      sol.diagnostics = r.diagnostics;
    } else {
      factor.reset();
      previous_matrix = sys.matrix;
      sol = solve(sys, solver);
    }
    out.solve_seconds += sol.diagnostics.wall_time;
    out.alpha = std::move(sol.alpha);
    out.diagnostics = sol.diagnostics;
    out.penalties = sys.penalties;
    out.rows = sys.matrix.rows();
    out.cols = sys.matrix.cols();

    Eigen::MatrixXd next(iterate.rows(), tracked);
    for (Eigen::Index c = 0; c < tracked; ++c) {
      next.col(c).noalias() = cache.interior->values * out.alpha.col(scheme.tracked_fields[c]);
    }
    const double diff = tracked ? (next - iterate).cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(diff)) throw NumericalError("Picard iterate became non-finite");
    out.trace.differences.push_back(diff);
    out.trace.iterations = k;
    iterate = std::move(next);
    if (diff < scheme.tolerance) {
      out.trace.converged = true;
      break;
    }
    if (k > 1 && diff > scheme.divergence_ratio * out.trace.differences.front()) {
      out.trace.diverged = true;
      break;
    }
  }
  if (out.trace.diverged) {
    std::ostringstream msg;
    msg << problem.name << ": Picard iteration diverged after " << out.trace.iterations
        << " iterations with difference " << out.trace.differences.back();
    log_warning(msg.str());
  } else if (!out.trace.converged) {
    std::ostringstream msg;
    msg << problem.name << ": Picard iteration hit the cap of " << scheme.max_iterations
        << " with difference " << out.trace.differences.back();
    log_warning(msg.str());
  }
  net.set_output_weights(out.alpha);
  return out;
}

SolveOutcome solve_problem(const PdeProblem& problem, FeatureNetwork& net,
                           const CollocationSet& colloc, const SolverOptions& solver,
                           const AssemblyOptions& assembly) {
  if (problem.nonlinear()) return picard_solve(problem, net, colloc, solver, assembly);
  SolveOutcome out;
  auto t0 = Clock::now();
  const LeastSquaresSystem sys = assemble(problem.linear, net, colloc, problem.domain, assembly);
  out.assemble_seconds = seconds_since(t0);
  SystemSolution sol = solve(sys, solver);
  out.solve_seconds = sol.diagnostics.wall_time;
  out.alpha = std::move(sol.alpha);
  out.diagnostics = sol.diagnostics;
  out.penalties = sys.penalties;
  out.rows = sys.matrix.rows();
  out.cols = sys.matrix.cols();
  out.trace.converged = true;
  out.trace.iterations = 1;
  net.set_output_weights(out.alpha);
  return out;
}

}  // namespace gtransnet
