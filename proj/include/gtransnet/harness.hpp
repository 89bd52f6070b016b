#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/assembly.hpp"
#include "gtransnet/featurenet.hpp"
#include "gtransnet/geometry.hpp"
#include "gtransnet/lsqsolve.hpp"
#include "gtransnet/metrics.hpp"
#include "gtransnet/picard.hpp"
#include "gtransnet/problems.hpp"

namespace gtransnet {

struct ExperimentConfig {
  std::string problem = "s1-poisson2d";
  ProblemParams params;

  int layers = 2;
  /// N_1..N_L. A two-entry list with layers > 2 repeats the last width; a
  /// single-layer run uses the last entry.
  std::vector<int> widths = {800, 600};
  std::vector<double> gammas;  // empty: the problem's reference value
  double delta = 0.5;
  /// Empty: half-uniform for one layer, symmetric-uniform otherwise.
  std::optional<OffsetLaw> offset_law;
  bool allow_asymmetric_deep = false;

  std::optional<Eigen::VectorXd> ball_center;  // empty: domain default
  double ball_radius = 0.8;

  std::optional<CollocationCounts> counts;  // empty: the problem's reference counts
  SamplingMode interior_mode = SamplingMode::Random;
  SamplingMode boundary_mode = SamplingMode::Random;

  SolverOptions solver;
  Eigen::Index block_size = kDefaultBlockSize;

  /// Last-layer widths N swept by `run_sweep`; empty means widths.back().
  std::vector<int> sweep_widths;

  int repeats = 1;
  std::uint64_t seed = 0;
  std::uint64_t test_seed = 20240601;

  std::string out_dir = "out";
  bool write_points = false;
  bool write_solution = false;

  void validate() const;
};

/// Parses the key-value (YAML) configuration. A saved report.json is also
/// accepted: its "config" object is read back.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_string(const std::string& text);

/// Widths N_1..N_L for a run with last-layer width `last` (or the configured
/// widths when `last` is 0).
std::vector<int> resolve_widths(const ExperimentConfig& config, int last = 0);
OffsetLaw resolve_offset_law(const ExperimentConfig& config);

struct RepeatRecord {
  std::uint64_t seed = 0;
  std::string status = "ok";  // ok | not-converged | failed
  std::string error;
  ErrorMetric relative_l2;
  double median_abs_error = 0;
  double max_abs_error = 0;
  double residual_norm = 0;
  SolveDiagnostics diagnostics;
  Penalties penalties;
  PicardTrace trace;
  bool nonlinear = false;
  double build_seconds = 0;
  double assemble_seconds = 0;
  double solve_seconds = 0;
  double total_seconds = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t interior_points = 0;
  std::size_t boundary_points = 0;
};

struct CellReport {
  double gamma = 0;
  std::vector<int> widths;
  std::vector<RepeatRecord> repeats;
  // Aggregates over repeats that produced a solution.
  double median_error = 0;
  double min_error = 0;
  double max_error = 0;
  double median_abs_error = 0;
  double mean_time_s = 0;
  int failures = 0;
  // Test-point data of the first repeat, kept when solution output is on.
  PointMatrix test_points;
  Eigen::MatrixXd predicted;
  Eigen::MatrixXd exact;

  int last_width() const { return widths.empty() ? 0 : widths.back(); }
};

struct SolveReport {
  ExperimentConfig config;
  std::string problem;
  ProblemParams params;
  std::vector<std::pair<std::string, std::string>> notes;
  std::vector<std::string> error_fields;
  std::vector<CellReport> cells;
  std::string started_at;
  unsigned hardware_threads = 0;
};

/// Seeded repeats of one (gamma, widths) cell. Failures are recorded, not thrown.
CellReport run_cell(const PdeProblem& problem, const ExperimentConfig& config, double gamma,
                    const std::vector<int>& widths);

/// One cell at the first configured gamma and the configured widths.
SolveReport run_experiment(const ExperimentConfig& config);

/// The gamma x N grid.
SolveReport run_sweep(const ExperimentConfig& config);

std::string report_to_json(const SolveReport& report);
void write_summary_csv(std::ostream& out, const SolveReport& report);
void write_solution_csv(std::ostream& out, const SolveReport& report, int dim);

/// Writes report.json and summary.csv (plus solution.csv and points.csv when
/// enabled) into config.out_dir.
void emit_report(const SolveReport& report);

}  // namespace gtransnet
