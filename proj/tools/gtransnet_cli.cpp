// Command-line front end: solve, sweep, diagnose and fit.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/diagnostics.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/harness.hpp"

namespace fs = std::filesystem;
using namespace gtransnet;
using json = nlohmann::ordered_json;

namespace {

// Flags shared by every subcommand; unset values leave the config alone.
struct CommonFlags {
  std::string config;
  std::string problem;
  std::vector<double> gamma;
  std::optional<int> layers;
  std::vector<int> widths;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::string out;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_problem = true) {
  app->add_option("--config", f.config, "YAML configuration file (or a saved report.json)");
  if (with_problem) app->add_option("--problem", f.problem, "problem name");
  app->add_option("--gamma", f.gamma, "shape parameter(s), comma separated")->delimiter(',');
  app->add_option("--layers", f.layers, "number of hidden layers L");
  app->add_option("--widths", f.widths, "hidden widths N_1,...,N_L")->delimiter(',');
  app->add_option("--delta", f.delta, "variance control parameter in (0,1]");
  app->add_option("--seed", f.seed, "base seed; repeat r uses seed + r");
  app->add_option("--repeats", f.repeats, "number of seeded repeats");
  app->add_option("--out", f.out, "output directory");
}

struct ExtraFlags {
  std::vector<std::string> params;
  std::vector<int> sweep_widths;
  std::string method;
  std::optional<bool> fallback;
  bool equilibrate = false;
  bool solution = false;
  bool points = false;
  std::string interior_mode;
};

void add_extra(CLI::App* app, ExtraFlags& e, bool points_flag = true) {
  app->add_option("--param", e.params, "problem parameter key=value (repeatable)");
  app->add_option("--sweep-widths", e.sweep_widths, "last-layer widths N to sweep")->delimiter(',');
  app->add_option("--method", e.method, "least-squares method: qr or svd");
  app->add_option("--svd-fallback", e.fallback, "re-solve with SVD when QR is rank deficient");
  app->add_flag("--equilibrate", e.equilibrate, "scale columns to unit max-abs before solving");
  app->add_flag("--solution", e.solution, "write solution.csv");
  if (points_flag) app->add_flag("--points", e.points, "write points.csv");
  app->add_option("--interior-mode", e.interior_mode, "interior sampling: random or grid");
}

ExperimentConfig build_config(const CommonFlags& f, const ExtraFlags& e) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (!f.problem.empty() && f.problem != c.problem) {
    c.problem = f.problem;
    c.params.clear();
    c.counts.reset();
  }
  for (const auto& kv : e.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--param expects key=value, got '" + kv + "'");
    c.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  if (!f.gamma.empty()) c.gammas = f.gamma;
  if (f.layers) c.layers = *f.layers;
  if (!f.widths.empty()) c.widths = f.widths;
  if (f.delta) c.delta = *f.delta;
  if (f.seed) c.seed = *f.seed;
  if (f.repeats) c.repeats = *f.repeats;
  if (!f.out.empty()) c.out_dir = f.out;
  if (!e.sweep_widths.empty()) c.sweep_widths = e.sweep_widths;
  if (!e.method.empty()) c.solver.method = solve_method_from_string(e.method);
  if (e.fallback) c.solver.svd_fallback = *e.fallback;
  if (e.equilibrate) c.solver.equilibrate = true;
  if (e.solution) c.write_solution = true;
  if (e.points) c.write_points = true;
  if (!e.interior_mode.empty()) c.interior_mode = sampling_mode_from_string(e.interior_mode);
  c.validate();
  return c;
}

void print_cells(const SolveReport& report) {
  std::cout << "problem " << report.problem << "\n";
  for (const auto& c : report.cells) {
    std::cout << "  gamma=" << c.gamma << " N=" << c.last_width() << " median_error=" << c.median_error
              << " min=" << c.min_error << " max=" << c.max_error << " mean_time_s=" << c.mean_time_s;
    if (c.failures) std::cout << " failures=" << c.failures;
    std::cout << "\n";
  }
  std::cout << "wrote " << (fs::path(report.config.out_dir) / "report.json").string() << "\n";
}

std::ofstream open_out(const fs::path& dir, const char* name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw Error("cannot write " + (dir / name).string());
  return f;
}

struct DiagnoseFlags {
  std::string study = "all";
  int points = 500;
  int resamples = 1;
  int bins = 40;
  std::vector<double> taus = {0.1, 0.25};
  std::size_t neurons = 1000000;
  std::size_t density_points = 100;
  std::size_t moment_resamples = 100000;
  int moment_width = 32;
};

int run_diagnose(const CommonFlags& f, const DiagnoseFlags& d) {
  const int layers = f.layers.value_or(3);
  std::vector<int> widths = f.widths.empty() ? std::vector<int>{2000, 1000, 1000} : f.widths;
  ExperimentConfig tmp;
  tmp.layers = layers;
  tmp.widths = widths;
  widths = resolve_widths(tmp);
  const double gamma = f.gamma.empty() ? 2.0 : f.gamma.front();
  const double delta = f.delta.value_or(0.5);
  const std::uint64_t seed = f.seed.value_or(0);
  const fs::path out = f.out.empty() ? fs::path("out") : fs::path(f.out);
  const bool all = d.study == "all";
  json report = {{"format", "gtransnet-diagnostics"}, {"gamma", gamma}, {"delta", delta}, {"seed", seed}};

  NetworkConfig nc;
  nc.dim = 2;
  nc.gamma = gamma;
  nc.delta = delta;
  nc.ball.center = Eigen::Vector2d::Zero();
  nc.ball.radius = 1.5;
  nc.policy.seed = seed;
  nc.policy.offset_law = layers == 1 ? OffsetLaw::HalfUniform : OffsetLaw::SymmetricUniform;

  if (all || d.study == "histogram") {
    nc.widths = widths;
    auto rng = make_stream(seed, "interior");
    PointMatrix pts(d.points, 2);
    for (Eigen::Index k = 0; k < pts.size(); ++k) pts.data()[k] = 2 * rng.uniform() - 1;
    const auto studies = activation_histogram(nc, pts, d.resamples, d.bins);
    auto file = open_out(out, "histogram.csv");
    write_histogram_csv(file, studies);
    json layers_json = json::array();
    for (const auto& s : studies) {
      layers_json.push_back({{"layer", s.layer}, {"saturation_fraction", s.saturation_fraction},
                             {"mean", s.mean}, {"variance", s.variance}, {"samples", s.histogram.total()}});
      std::cout << "histogram layer " << s.layer << ": saturation " << s.saturation_fraction
                << " variance " << s.variance << "\n";
    }
    report["histogram"] = {{"widths", widths}, {"points", d.points}, {"offsets", std::string(to_string(nc.policy.offset_law))},
                           {"layers", layers_json}};
  }
  if (all || d.study == "density") {
    std::vector<DensityEstimate> est;
    json rows = json::array();
    for (double tau : d.taus) {
      est.push_back(density_study(2, d.neurons, tau, d.density_points, seed));
      const auto& e = est.back();
      rows.push_back({{"tau", tau}, {"M", e.neurons}, {"estimate", e.estimate}, {"stderr", e.std_error}, {"pass", e.pass}});
      std::cout << "density tau=" << tau << ": " << e.estimate << " +- " << e.std_error << (e.pass ? " pass" : " FAIL") << "\n";
    }
    auto file = open_out(out, "density.csv");
    write_density_csv(file, est);
    report["density"] = rows;
  }
  if (all || d.study == "moment") {
    NetworkConfig mc = nc;
    mc.policy.offset_law = OffsetLaw::SymmetricUniform;
    mc.widths.assign(std::max(layers, 2), d.moment_width);
    const Eigen::Vector2d x(0.3, -0.2);
    const MomentStudy study = moment_test(mc, x, d.moment_resamples);
    auto file = open_out(out, "moments.csv");
    write_moment_csv(file, study);
    json rows = json::array();
    for (const auto& m : study.layers) {
      if (m.layer == 1) continue;
      rows.push_back({{"layer", m.layer}, {"mean", m.mean}, {"stderr", m.std_error}, {"variance", m.variance},
                      {"bound", m.bound}, {"mean_pass", m.mean_pass}, {"variance_pass", m.variance_pass}});
      std::cout << "moment layer " << m.layer << ": mean " << m.mean << " variance " << m.variance
                << " bound " << m.bound << "\n";
    }
    report["moments"] = {{"sigma0_sq", study.sigma0_sq}, {"resamples", study.resamples}, {"layers", rows}};
  }
  if (!all && d.study != "histogram" && d.study != "density" && d.study != "moment") {
    throw InvalidArgument("unknown study '" + d.study + "'");
  }
  auto file = open_out(out, "report.json");
  file << report.dump(2) << "\n";
  return 0;
}


struct FitFlags {
  double frequency = 30;
  std::size_t points = 1000;
};

int run_fit(const CommonFlags& f, const FitFlags& ff, const ExtraFlags& e) {
  const double gamma = f.gamma.empty() ? 14.0 : f.gamma.front();
  const int width = f.widths.empty() ? 1000 : f.widths.back();
  const int repeats = f.repeats.value_or(1);
  const std::uint64_t seed = f.seed.value_or(0);
  const fs::path out = f.out.empty() ? fs::path("out") : fs::path(f.out);
  SolverOptions solver;
  if (!e.method.empty()) solver.method = solve_method_from_string(e.method);
  if (e.fallback) solver.svd_fallback = *e.fallback;

  json reps = json::array();
  std::vector<double> errors;
  double time_sum = 0;
  CollocationSet first;
  Eigen::VectorXd first_pred;
  for (int r = 0; r < repeats; ++r) {
    SineFitSetup setup;
    setup.frequency = ff.frequency;
    setup.width = width;
    setup.gamma = gamma;
    setup.points = ff.points;
    setup.seed = seed + r;
    SineFit run = fit_sine(setup, solver);
    const FitResult& fit = run.result;
    errors.push_back(fit.relative_l2);
    time_sum += fit.diagnostics.wall_time;
    reps.push_back({{"seed", seed + r}, {"relative_l2", fit.relative_l2},
                    {"rank", fit.diagnostics.rank_estimate}, {"solve_time", fit.diagnostics.wall_time}});
    if (r == 0) {
      first = run.colloc;
      first_pred = predict(run.net, run.colloc.test);
    }
  }
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                       : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  json report = {{"format", "gtransnet-fit"},
                 {"target", "sin(" + std::to_string(ff.frequency) + " pi x)"},
                 {"interval", {-1, 1}},
                 {"ball_radius", Domain::interval(-1, 1).default_ball().radius},
                 {"gamma", gamma},
                 {"M", width},
                 {"points", ff.points},
                 {"median_error", med},
                 {"repeats", reps}};
  {
    auto file = open_out(out, "report.json");
    file << report.dump(2) << "\n";
  }
  {
    auto file = open_out(out, "summary.csv");
    file << "problem,gamma,N,median_error,min_error,max_error,mean_time_s\n";
    file << "fit-sine," << gamma << ',' << width << ',' << med << ',' << sorted.front() << ',' << sorted.back()
         << ',' << time_sum / repeats << '\n';
  }
  if (e.solution) {
    auto file = open_out(out, "solution.csv");
    file << "x,predicted_u,exact_u,abs_error_u\n";
    file.precision(17);
    for (Eigen::Index k = 0; k < first.test.rows(); ++k) {
      const double x = first.test(k, 0), u = std::sin(ff.frequency * std::numbers::pi * x);
      file << x << ',' << first_pred[k] << ',' << u << ',' << std::abs(first_pred[k] - u) << '\n';
    }
  }
  std::cout << "fit sin(" << ff.frequency << " pi x): M=" << width << " gamma=" << gamma
            << " median relative L2 " << med << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized-feature (G)TransNet PDE solver"};
  app.require_subcommand(1);

  CommonFlags solve_f, sweep_f, diag_f, fit_f;
  ExtraFlags solve_e, sweep_e, fit_e;
  DiagnoseFlags diag_d;
  FitFlags fit_ff;

  auto* solve_cmd = app.add_subcommand("solve", "run one experiment (seeded repeats)");
  add_common(solve_cmd, solve_f);
  add_extra(solve_cmd, solve_e);

  auto* sweep_cmd = app.add_subcommand("sweep", "run a gamma x N grid");
  add_common(sweep_cmd, sweep_f);
  add_extra(sweep_cmd, sweep_e);

  auto* diag_cmd = app.add_subcommand("diagnose", "neuron statistics: histograms, density, moments");
  add_common(diag_cmd, diag_f, false);
  diag_cmd->add_option("--study", diag_d.study, "histogram, density, moment or all");
  diag_cmd->add_option("--points", diag_d.points, "input points for histograms");
  diag_cmd->add_option("--resamples", diag_d.resamples, "resampled networks for histograms");
  diag_cmd->add_option("--bins", diag_d.bins, "histogram bins");
  diag_cmd->add_option("--tau", diag_d.taus, "density thresholds")->delimiter(',');
  diag_cmd->add_option("--neurons", diag_d.neurons, "neurons M for the density study");
  diag_cmd->add_option("--density-points", diag_d.density_points, "evaluation points for the density study");
  diag_cmd->add_option("--moment-resamples", diag_d.moment_resamples, "resampled networks for the moment test");
  diag_cmd->add_option("--moment-width", diag_d.moment_width, "layer width for the moment test");

  auto* fit_cmd = app.add_subcommand("fit", "fit sin(k pi x) on (-1,1) with a single-layer network");
  add_common(fit_cmd, fit_f, false);
  fit_cmd->add_option("--frequency", fit_ff.frequency, "k in sin(k pi x)");
  fit_cmd->add_option("--points", fit_ff.points, "uniform training points");
  add_extra(fit_cmd, fit_e, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve_cmd->parsed()) {
      const SolveReport report = run_experiment(build_config(solve_f, solve_e));
      emit_report(report);
      print_cells(report);
      for (const auto& c : report.cells) if (c.failures == static_cast<int>(c.repeats.size())) return 2;
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const SolveReport report = run_sweep(build_config(sweep_f, sweep_e));
      emit_report(report);
      print_cells(report);
      return 0;
    }
    if (diag_cmd->parsed()) return run_diagnose(diag_f, diag_d);
    if (fit_cmd->parsed()) return run_fit(fit_f, fit_ff, fit_e);
  } catch (const Error& e) {
    std::cerr << "gtransnet: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gtransnet: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
