#include "gtransnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json config_json(const ExperimentConfig& c) {
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  json out;
  out["problem"] = c.problem;
  out["params"] = params;
  out["network"] = {{"layers", c.layers},
                    {"widths", c.widths},
                    {"gamma", c.gammas},
                    {"delta", c.delta},
                    {"offsets", c.offset_law ? json(std::string(to_string(*c.offset_law))) : json(nullptr)},
                    {"allow_asymmetric_deep", c.allow_asymmetric_deep}};
  json center = nullptr;
  if (c.ball_center) center = std::vector<double>(c.ball_center->data(), c.ball_center->data() + c.ball_center->size());
  out["ball"] = {{"center", center}, {"radius", c.ball_radius}};
  json colloc = {{"interior_mode", std::string(to_string(c.interior_mode))},
                 {"boundary_mode", std::string(to_string(c.boundary_mode))}};
  if (c.counts) {
    colloc["interior"] = c.counts->interior;
    colloc["boundary"] = c.counts->boundary;
    colloc["test"] = c.counts->test;
  }
  out["collocation"] = colloc;
  out["solver"] = {{"method", std::string(to_string(c.solver.method))},
                   {"rcond", c.solver.rcond},
                   {"equilibrate", c.solver.equilibrate},
                   {"svd_fallback", c.solver.svd_fallback}};
  out["sweep"] = {{"widths", c.sweep_widths}};
  out["repeats"] = c.repeats;
  out["seed"] = c.seed;
  out["test_seed"] = c.test_seed;
  out["block_size"] = c.block_size;
  out["output"] = {{"dir", c.out_dir}, {"points", c.write_points}, {"solution", c.write_solution}};
  return out;
}

json diagnostics_json(const SolveDiagnostics& d) {
  return {{"method", std::string(to_string(d.method))},
          {"fell_back", d.fell_back},
          {"rank_estimate", d.rank_estimate},
          {"rank_deficient", d.rank_deficient},
          {"condition_estimate", std::isfinite(d.condition_estimate) ? json(d.condition_estimate) : json(nullptr)},
          {"rcond", d.rcond},
          {"equilibrated", d.equilibrated},
          {"residual_norm", d.residual_norm},
          {"wall_time", d.wall_time},
          {"rows", d.rows},
          {"cols", d.cols}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CollocationCounts effective_counts(const PdeProblem& problem, const ExperimentConfig& config) {
  return config.counts ? *config.counts : problem.reference_counts;
}

EnclosingBall effective_ball(const PdeProblem& problem, const ExperimentConfig& config) {
  EnclosingBall ball = problem.domain.default_ball();
  if (config.ball_center) {
    if (config.ball_center->size() != problem.dim()) throw InvalidArgument("ball centre has the wrong dimension");
    ball.center = *config.ball_center;
  }
  ball.radius = config.ball_radius;
  return ball;
}

}  // namespace

std::vector<int> resolve_widths(const ExperimentConfig& config, int last) {
  std::vector<int> w = config.widths;
  if (last > 0) w.back() = last;
  if (config.layers == 1) return {w.back()};
  if (static_cast<int>(w.size()) == config.layers) return w;
  if (w.size() == 2 && config.layers > 2) {
    std::vector<int> out = {w[0]};
    out.insert(out.end(), config.layers - 1, w[1]);
    return out;
  }
  throw InvalidArgument("widths list does not match the number of layers");
}

OffsetLaw resolve_offset_law(const ExperimentConfig& config) {
  if (config.offset_law) return *config.offset_law;
  return config.layers == 1 ? OffsetLaw::HalfUniform : OffsetLaw::SymmetricUniform;
}

CellReport run_cell(const PdeProblem& problem, const ExperimentConfig& config, double gamma,
                    const std::vector<int>& widths) {
  CellReport cell;
  cell.gamma = gamma;
  cell.widths = widths;
  const CollocationCounts counts = effective_counts(problem, config);
  const EnclosingBall ball = effective_ball(problem, config);
  const int nfields = static_cast<int>(problem.error_fields.size());

  for (int r = 0; r < config.repeats; ++r) {
    RepeatRecord rec;
    rec.seed = config.seed + static_cast<std::uint64_t>(r);
    const auto start = Clock::now();
    try {
      const CollocationSet colloc = make_collocation(problem.domain, counts, rec.seed, config.test_seed,
                                                     config.interior_mode, config.boundary_mode);
      rec.interior_points = static_cast<std::size_t>(colloc.interior.rows());
      rec.boundary_points = static_cast<std::size_t>(colloc.boundary.rows());
      NetworkConfig nc;
      nc.dim = problem.dim();
      nc.widths = widths;
      nc.gamma = gamma;
      nc.delta = config.delta;
      nc.ball = ball;
      nc.policy.offset_law = resolve_offset_law(config);
      nc.policy.seed = rec.seed;
      nc.policy.allow_asymmetric_deep = config.allow_asymmetric_deep;
      const auto t_build = Clock::now();
      FeatureNetwork net = build_network(nc);
      rec.build_seconds = std::chrono::duration<double>(Clock::now() - t_build).count();

      AssemblyOptions assembly;
      assembly.block_size = config.block_size;
      const SolveOutcome outcome = solve_problem(problem, net, colloc, config.solver, assembly);
      rec.assemble_seconds = outcome.assemble_seconds;
      rec.solve_seconds = outcome.solve_seconds;
      rec.diagnostics = outcome.diagnostics;
      rec.residual_norm = outcome.diagnostics.residual_norm;
      rec.penalties = outcome.penalties;
      rec.trace = outcome.trace;
      rec.nonlinear = outcome.nonlinear;
      rec.rows = outcome.rows;
      rec.cols = outcome.cols;
      if (!outcome.trace.converged) rec.status = "not-converged";

      Eigen::MatrixXd predicted(colloc.test.rows(), nfields), exact(colloc.test.rows(), nfields);
      for (int f = 0; f < nfields; ++f) {
        predicted.col(f) = predict(net, colloc.test, problem.error_fields[f], config.block_size);
        exact.col(f) = exact_values(problem, colloc.test, problem.error_fields[f]);
      }
      rec.relative_l2 = relative_l2(predicted, exact);
      const Eigen::ArrayXXd abs_err = (predicted - exact).array().abs();
      std::vector<double> errs(abs_err.data(), abs_err.data() + abs_err.size());
      rec.max_abs_error = abs_err.maxCoeff();
      rec.median_abs_error = median(std::move(errs));
      if (r == 0 && config.write_solution) {
        cell.test_points = colloc.test;
        cell.predicted = predicted;
        cell.exact = exact;
      }
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.error = e.what();
      log_warning(problem.name + ": repeat with seed " + std::to_string(rec.seed) + " failed: " + e.what());
    }
    rec.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    cell.repeats.push_back(std::move(rec));
  }

  std::vector<double> errors, abs_errors, times;
  for (const auto& rec : cell.repeats) {
    if (rec.status == "failed") {
      ++cell.failures;
      continue;
    }
    errors.push_back(rec.relative_l2.value);
    abs_errors.push_back(rec.median_abs_error);
    times.push_back(rec.build_seconds + rec.assemble_seconds + rec.solve_seconds);
  }
  if (!errors.empty()) {
    cell.median_error = median(errors);
    cell.min_error = *std::min_element(errors.begin(), errors.end());
    cell.max_error = *std::max_element(errors.begin(), errors.end());
    cell.median_abs_error = median(abs_errors);
    cell.mean_time_s = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  } else {
    cell.median_error = cell.min_error = cell.max_error = cell.median_abs_error =
        std::numeric_limits<double>::quiet_NaN();
    cell.mean_time_s = std::numeric_limits<double>::quiet_NaN();
  }
  return cell;
}

namespace {

SolveReport report_shell(const ExperimentConfig& config, const PdeProblem& problem) {
  SolveReport report;
  report.config = config;
  report.problem = problem.name;
  report.params = problem.params;
  report.notes = problem.notes;
  for (int f : problem.error_fields) report.error_fields.push_back(problem.field_names[f]);
  report.started_at = timestamp();
  report.hardware_threads = std::thread::hardware_concurrency();
  return report;
}

double first_gamma(const ExperimentConfig& config, const PdeProblem& problem) {
  return config.gammas.empty() ? problem.reference_gamma : config.gammas.front();
}

}  // namespace

SolveReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const PdeProblem problem = make_problem(config.problem, config.params);
  SolveReport report = report_shell(config, problem);
  report.cells.push_back(run_cell(problem, config, first_gamma(config, problem), resolve_widths(config)));
  return report;
}

SolveReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  const PdeProblem problem = make_problem(config.problem, config.params);
  SolveReport report = report_shell(config, problem);
  std::vector<double> gammas = config.gammas;
  if (gammas.empty()) gammas = {problem.reference_gamma};
  std::vector<int> ns = config.sweep_widths;
  if (ns.empty()) ns = {config.widths.back()};
  for (double g : gammas) {
    for (int n : ns) report.cells.push_back(run_cell(problem, config, g, resolve_widths(config, n)));
  }
  return report;
}

std::string report_to_json(const SolveReport& report) {
  json out;
  out["format"] = "gtransnet-report";
  out["version"] = 1;
  out["started_at"] = report.started_at;
  out["hardware_threads"] = report.hardware_threads;
  out["config"] = config_json(report.config);
  out["problem"] = report.problem;
  json params = json::object();
  for (const auto& [k, v] : report.params) params[k] = v;
  out["effective_params"] = params;
  json notes = json::object();
  for (const auto& [k, v] : report.notes) notes[k] = v;
  out["notes"] = notes;
  out["error_fields"] = report.error_fields;
  out["offset_law"] = std::string(to_string(resolve_offset_law(report.config)));
  json cells = json::array();
  for (const auto& c : report.cells) {
    json reps = json::array();
    for (const auto& r : c.repeats) {
      json rep = {{"seed", r.seed}, {"status", r.status}};
      if (!r.error.empty()) rep["error"] = r.error;
      if (r.status != "failed") {
        rep["relative_l2"] = r.relative_l2.value;
        rep["error_is_absolute"] = r.relative_l2.absolute;
        rep["median_abs_error"] = r.median_abs_error;
        rep["max_abs_error"] = r.max_abs_error;
        rep["residual_norm"] = r.residual_norm;
        rep["penalties"] = {{"interior", r.penalties.interior}, {"boundary", r.penalties.boundary}};
        rep["solver"] = diagnostics_json(r.diagnostics);
        rep["system"] = {{"rows", r.rows}, {"cols", r.cols},
                         {"interior_points", r.interior_points}, {"boundary_points", r.boundary_points}};
        if (r.nonlinear) {
          rep["picard"] = {{"iterations", r.trace.iterations},
                           {"converged", r.trace.converged},
                           {"diverged", r.trace.diverged},
                           {"differences", r.trace.differences}};
        }
      }
      rep["timings"] = {{"build", r.build_seconds},
                        {"assemble", r.assemble_seconds},
                        {"solve", r.solve_seconds},
                        {"total", r.total_seconds}};
      reps.push_back(rep);
    }
    cells.push_back({{"gamma", c.gamma},
                     {"widths", c.widths},
                     {"N", c.last_width()},
                     {"median_error", finite_or_null(c.median_error)},
                     {"min_error", finite_or_null(c.min_error)},
                     {"max_error", finite_or_null(c.max_error)},
                     {"median_abs_error", finite_or_null(c.median_abs_error)},
                     {"mean_time_s", finite_or_null(c.mean_time_s)},
                     {"failures", c.failures},
                     {"repeats", reps}});
  }
  out["cells"] = cells;
  return out.dump(2);
}

void write_summary_csv(std::ostream& out, const SolveReport& report) {
  out << "problem,gamma,N,median_error,min_error,max_error,mean_time_s\n";
  out << std::setprecision(10);
  for (const auto& c : report.cells) {
    out << report.problem << ',' << c.gamma << ',' << c.last_width() << ',' << c.median_error << ','
        << c.min_error << ',' << c.max_error << ',' << c.mean_time_s << '\n';
  }
}

void write_solution_csv(std::ostream& out, const SolveReport& report, int dim) {
  static const char* axes[] = {"x", "y", "z"};
  if (report.cells.empty() || report.cells.front().predicted.size() == 0) {
    throw InvalidArgument("report holds no solution data");
  }
  const CellReport& c = report.cells.front();
  for (int p = 0; p < dim; ++p) out << axes[p] << ',';
  for (std::size_t f = 0; f < report.error_fields.size(); ++f) {
    const auto& n = report.error_fields[f];
    out << "predicted_" << n << ",exact_" << n << ",abs_error_" << n << (f + 1 < report.error_fields.size() ? "," : "\n");
  }
  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < c.test_points.rows(); ++k) {
    for (int p = 0; p < dim; ++p) out << c.test_points(k, p) << ',';
    for (Eigen::Index f = 0; f < c.predicted.cols(); ++f) {
      out << c.predicted(k, f) << ',' << c.exact(k, f) << ',' << std::abs(c.predicted(k, f) - c.exact(k, f))
          << (f + 1 < c.predicted.cols() ? "," : "\n");
    }
  }
}

void emit_report(const SolveReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir = report.config.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.json");
    f << report_to_json(report) << '\n';
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, report);
  }
  const PdeProblem problem = make_problem(report.config.problem, report.config.params);
  if (report.config.write_solution && !report.cells.empty() && report.cells.front().predicted.size()) {
    auto f = open("solution.csv");
    write_solution_csv(f, report, problem.dim());
  }
  if (report.config.write_points) {
    const CollocationCounts counts = report.config.counts ? *report.config.counts : problem.reference_counts;
    const CollocationSet colloc = make_collocation(problem.domain, counts, report.config.seed,
                                                   report.config.test_seed, report.config.interior_mode,
                                                   report.config.boundary_mode);
    auto f = open("points.csv");
    write_points_csv(f, colloc);
  }
}

}  // namespace gtransnet
