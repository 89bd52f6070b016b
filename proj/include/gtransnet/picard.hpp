#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gtransnet/assembly.hpp"
#include "gtransnet/featurenet.hpp"
#include "gtransnet/lsqsolve.hpp"
#include "gtransnet/problems.hpp"

namespace gtransnet {

struct PicardTrace {
  /// Max-norm difference of consecutive iterates at the interior points.
  std::vector<double> differences;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

/// Outcome of one solve of a catalogued problem, linear or not.
struct SolveOutcome {
  Eigen::MatrixXd alpha;        // N_L x fields
  SolveDiagnostics diagnostics; // last linear solve
  Penalties penalties;          // last assembly
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  double assemble_seconds = 0;
  double solve_seconds = 0;
  bool nonlinear = false;
  PicardTrace trace;
};

/// Repeats assemble -> solve on the scheme's linearization at the current
/// iterate until the iterate difference drops below the tolerance, the cap is
/// hit, or the difference has grown past the divergence ratio. Hidden-layer features are evaluated once and reused. Stores the
/// final alpha in `net`.
SolveOutcome picard_solve(const PdeProblem& problem, FeatureNetwork& net,
                          const CollocationSet& colloc, const SolverOptions& solver = {},
                          const AssemblyOptions& assembly = {});

/// One assemble -> solve for linear problems, picard_solve otherwise.
SolveOutcome solve_problem(const PdeProblem& problem, FeatureNetwork& net,
                           const CollocationSet& colloc, const SolverOptions& solver = {},
                           const AssemblyOptions& assembly = {});

}  // namespace gtransnet
