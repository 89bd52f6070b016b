// Acceptance checks: one PASS or FAIL line per criterion.
//
// Usage: acceptance [--out DIR] [criterion ...]   (no criteria: run 1-11)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fd_oracle.hpp"
#include "gtransnet/diagnostics.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/harness.hpp"

using namespace gtransnet;

namespace {

std::string out_root;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Runs a config and keeps its report under out_root/<tag> when requested.
SolveReport run(ExperimentConfig c, const std::string& tag, bool sweep = false) {
  if (!out_root.empty()) {
    c.out_dir = (std::filesystem::path(out_root) / tag).string();
    c.write_solution = false;
  }
  SolveReport r = sweep ? run_sweep(c) : run_experiment(c);
  if (!out_root.empty()) emit_report(r);
  return r;
}

// Median over repeats of the median pointwise absolute error.
double median_pointwise(const CellReport& cell) { return cell.median_abs_error; }

ExperimentConfig s1_config(int layers, std::vector<int> sweep, int repeats) {
  ExperimentConfig c;
  c.problem = "s1-poisson2d";
  c.layers = layers;
  c.widths = layers == 1 ? std::vector<int>{600} : std::vector<int>{800, 600};
  c.gammas = {2.0};
  c.sweep_widths = std::move(sweep);
  c.repeats = repeats;
  return c;
}

Verdict derivative_oracle() {
  double worst_j = 0, worst_l = 0;
  for (int L : {1, 2, 3}) {
    for (int d : {1, 2, 3}) {
      NetworkConfig c;
      c.dim = d;
      c.widths = std::vector<int>(L, 64);
      c.gamma = 2.0;
      c.ball.center = Eigen::VectorXd::Zero(d);
      c.ball.radius = 1.0;
      c.policy.seed = 10 * L + d;
      c.policy.offset_law = L == 1 ? OffsetLaw::HalfUniform : OffsetLaw::SymmetricUniform;
      const FeatureNetwork net = build_network(c);
      auto rng = make_stream(c.policy.seed, "acceptance-points");
      PointMatrix x(50, d);
      for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = 1.2 * rng.uniform() - 0.6;
      const auto [je, le] = testing::fd_errors(net, x, 1e-5, 1e-4);
      worst_j = std::max(worst_j, je);
      worst_l = std::max(worst_l, le);
    }
  }
  return {worst_j < 1e-6 && worst_l < 1e-5,
          "worst Jacobian rel err " + fmt(worst_j) + " (< 1e-6), Laplacian " + fmt(worst_l) +
              " (< 1e-5) over L,d in {1,2,3}, 50 points each"};
}

Verdict density_check() {
  Verdict v{true, ""};
  for (double tau : {0.1, 0.25}) {
    const DensityEstimate e = density_study(2, 1000000, tau, 100, 7);
    v.pass = v.pass && e.pass;
    v.detail += "tau " + fmt(tau) + ": E[D_M] " + fmt(e.estimate) + " +- " + fmt(e.std_error) + "; ";
  }
  v.detail += "M = 1e6, 100 points, 3 stderr";
  return v;
}

Verdict moment_check() {
  Verdict v{true, ""};
  for (double delta : {0.5, 0.8}) {
    NetworkConfig c;
    c.widths = {32, 32, 32};
    c.gamma = 2.0;
    c.delta = delta;
    c.ball.center = Eigen::Vector2d::Zero();
    c.ball.radius = 1.5;
    c.policy.seed = 11;
    const MomentStudy m = moment_test(c, Eigen::Vector2d(0.3, -0.2), 100000);
    for (std::size_t l = 1; l < m.layers.size(); ++l) {
      const MomentLayer& ml = m.layers[l];
      v.pass = v.pass && ml.mean_pass && ml.variance_pass;
      v.detail += "delta " + fmt(delta) + " l" + std::to_string(ml.layer) + ": mean/stderr " +
                  fmt(ml.mean / ml.std_error) + ", var " + fmt(ml.variance) + " <= " + fmt(ml.bound * 1.1) + "; ";
    }
  }
  v.detail += "1e5 resamples";
  return v;
}

Verdict smooth_poisson() {
  const std::vector<int> ns = {200, 400, 600};
  const SolveReport g = run(s1_config(2, ns, 5), "c4-gtransnet", true);
  const SolveReport t = run(s1_config(1, ns, 5), "c4-transnet", true);
  Verdict v{true, ""};
  double at600 = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double ge = g.cells[i].median_error, te = t.cells[i].median_error;
    const double ratio = te / ge;
    v.pass = v.pass && ratio >= 10.0;
    v.detail += "N=" + std::to_string(ns[i]) + " G " + fmt(ge) + " T " + fmt(te) + " ratio " + fmt(ratio) + "; ";
    if (ns[i] == 600) at600 = ge;
  }
  v.pass = v.pass && at600 < 1e-6;
  v.detail += "need median(N=600) < 1e-6 and every ratio >= 10";
  return v;
}

Verdict case1_reduced() {
  ExperimentConfig c;
  c.problem = "poisson2d-case1";
  c.layers = 2;
  c.widths = {3000, 2000};
  c.gammas = {8.0};
  c.counts = CollocationCounts{5000, 400, 10000};
  c.repeats = 5;
  const SolveReport g = run(c, "c5-gtransnet");
  c.layers = 1;
  c.widths = {2000};
  const SolveReport t = run(c, "c5-transnet");
  const double ge = g.cells[0].median_error, te = t.cells[0].median_error;
  return {ge < 1e-3 && te / ge >= 10.0, "GTransNet median " + fmt(ge) + " (< 1e-3), TransNet " + fmt(te) +
                                            ", ratio " + fmt(te / ge) + " (>= 10)"};
}

Verdict helmholtz_paper() {
  ExperimentConfig c;
  c.problem = "helmholtz";
  c.params = {{"nu", 4000}};
  c.layers = 2;
  c.widths = {6000, 4000};
  c.gammas = {6.0};
  const SolveReport r = run(c, "c6-helmholtz");
  const double e = median_pointwise(r.cells[0]);
  return {r.cells[0].failures == 0 && e < 1e-6,
          "median pointwise abs error " + fmt(e) + " (< 1e-6), relative L2 " + fmt(r.cells[0].median_error)};
}

Verdict multiscale_paper() {
  ExperimentConfig c;
  c.problem = "multiscale";
  c.params = {{"epsilon", 0.5}};
  c.layers = 2;
  c.widths = {6000, 4000};
  c.gammas = {6.0};
  const SolveReport r = run(c, "c7-multiscale");
  const double e = median_pointwise(r.cells[0]);
  return {r.cells[0].failures == 0 && e < 1e-10,
          "median pointwise abs error " + fmt(e) + " (< 1e-10), relative L2 " + fmt(r.cells[0].median_error)};
}

Verdict navier_stokes() {
  ExperimentConfig c;
  c.problem = "s3-navier-stokes";
  c.params = {{"nu", 0.1}, {"max_iterations", 50}};
  c.layers = 2;
  c.widths = {800, 600};
  c.gammas = {1.0};
  const SolveReport r = run(c, "c8-navier-stokes");
  const RepeatRecord& rec = r.cells[0].repeats[0];
  const double e = rec.relative_l2.value;
  const bool ok = rec.status == "ok" && rec.trace.converged && rec.trace.iterations <= 50 && e < 1e-5;
  return {ok, "Picard " + std::string(rec.trace.converged ? "converged" : "did not converge") + " in " +
                  std::to_string(rec.trace.iterations) + " iterations (last difference " +
                  fmt(rec.trace.differences.empty() ? NAN : rec.trace.differences.back()) +
                  "), velocity relative L2 " + fmt(e) + " (< 1e-5)"};
}

Verdict allen_cahn_reduced() {
  ExperimentConfig c;
  c.problem = "allen-cahn";
  c.params = {{"stabilization", 2}, {"initial_value", 1}};
  c.layers = 2;
  c.widths = {6000, 3000};
  c.gammas = {6.0};
  c.counts = CollocationCounts{8000, 2400, 10000};
  const SolveReport r = run(c, "c9-allen-cahn");
  const RepeatRecord& rec = r.cells[0].repeats[0];
  const double e = r.cells[0].median_error;
  const std::string state = rec.trace.converged ? "converged"
                            : rec.trace.diverged ? "diverged"
                                                 : "hit the cap";
  return {rec.trace.converged && e < 1e-2,
          "Picard " + state + " after " + std::to_string(rec.trace.iterations) + " iterations (last difference " +
              fmt(rec.trace.differences.empty() ? NAN : rec.trace.differences.back()) + "), relative L2 " +
              fmt(e) + " (< 1e-2)"};
}

Verdict fitting_demo() {
  std::map<std::pair<int, double>, double> err;
  for (int m : {1000, 200}) {
    for (double gamma : {14.0, 2.0}) {
      SineFitSetup s;
      s.width = m;
      s.gamma = gamma;
      err[{m, gamma}] = fit_sine(s).result.relative_l2;
    }
  }
  const bool good = err[{1000, 14.0}] < 1e-2;
  const bool poor = err[{200, 14.0}] > 0.5 && err[{1000, 2.0}] > 0.5 && err[{200, 2.0}] > 0.5;
  return {good && poor, "M=1000 g=14: " + fmt(err[{1000, 14.0}]) + " (< 1e-2); M=200 g=14: " +
                            fmt(err[{200, 14.0}]) + ", M=1000 g=2: " + fmt(err[{1000, 2.0}]) +
                            ", M=200 g=2: " + fmt(err[{200, 2.0}]) + " (each > 0.5)"};
}

Verdict timing_trend() {
  const std::vector<int> ns = {200, 400, 600};
  const SolveReport g = run(s1_config(2, ns, 3), "c11-gtransnet", true);
  const SolveReport t = run(s1_config(1, ns, 3), "c11-transnet", true);
  Verdict v{true, ""};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double gt = g.cells[i].mean_time_s, tt = t.cells[i].mean_time_s;
    v.pass = v.pass && gt > tt;
    if (i > 0) v.pass = v.pass && gt > g.cells[i - 1].mean_time_s && tt > t.cells[i - 1].mean_time_s;
    v.detail += "N=" + std::to_string(ns[i]) + " G " + fmt(gt) + "s T " + fmt(tt) + "s; ";
  }
  v.detail += "need both increasing in N and G > T";
  return v;
}

const std::map<int, std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Verdict()>>> table = {
      {1, {"derivative oracle", derivative_oracle}},
      {2, {"hyperplane density", density_check}},
      {3, {"deep-layer moments", moment_check}},
      {4, {"smooth Poisson S1", smooth_poisson}},
      {5, {"high-frequency Poisson case 1, reduced", case1_reduced}},
      {6, {"Helmholtz nu=4000, full size", helmholtz_paper}},
      {7, {"multiscale eps=0.5, full size", multiscale_paper}},
      {8, {"Navier-Stokes Picard", navier_stokes}},
      {9, {"Allen-Cahn 3D, reduced", allen_cahn_reduced}},
      {10, {"1D fitting demo", fitting_demo}},
      {11, {"timing trend", timing_trend}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      out_root = argv[++i];
    } else {
      try {
        selected.push_back(std::stoi(a));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [--out DIR] [criterion ...]\n";
        return 2;
      }
    }
  }
  if (selected.empty()) {
    for (const auto& [k, _] : criteria()) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    const auto it = criteria().find(k);
    if (it == criteria().end()) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << it->second.first << "): " << v.detail
              << std::endl;
  }
  return failures ? 1 : 0;
}
