#include "gtransnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/rng.hpp"

namespace gtransnet {
namespace {

void check_ball_point(const Eigen::VectorXd& y, double tau) {
  if (!(tau > 0 && tau < 1)) throw InvalidArgument("tau must lie in (0, 1)");
  if (y.norm() > 1 - tau) throw InvalidArgument("evaluation point violates |y| <= 1 - tau");
}

// Uniform points in the d-ball of the given radius.
PointMatrix ball_points(int dim, std::size_t count, double radius, PhiloxEngine& rng) {
  std::normal_distribution<double> normal;
  PointMatrix out(static_cast<Eigen::Index>(count), dim);
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    Eigen::VectorXd z(dim);
    do {
      for (int p = 0; p < dim; ++p) z[p] = normal(rng);
    } while (z.norm() < 1e-300);
    const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
    out.row(k) = (r / z.norm()) * z.transpose();
  }
  return out;
}

}  // namespace

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram make_histogram(const Eigen::Ref<const Eigen::ArrayXXd>& values, int bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = -1.0 + 2.0 * b / bins;
  h.counts.assign(bins, 0);
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const int b = static_cast<int>(std::floor((values(i, j) + 1.0) * 0.5 * bins));
      ++h.counts[std::clamp(b, 0, bins - 1)];
    }
  }
  return h;
}

std::vector<ActivationStudy> activation_histogram(const NetworkConfig& config,
                                                  const PointMatrix& points, int resamples,
                                                  int bins, double threshold) {
  if (resamples < 1) throw InvalidArgument("resamples must be at least 1");
  const int depth = static_cast<int>(config.widths.size());
  std::vector<ActivationStudy> studies(depth);
  std::vector<double> sum(depth, 0), sum_sq(depth, 0);
  std::vector<std::size_t> saturated(depth, 0);
  for (int l = 0; l < depth; ++l) {
    studies[l].layer = l + 1;
    studies[l].histogram = make_histogram(Eigen::ArrayXXd(0, 0), bins);
    studies[l].points = static_cast<std::size_t>(points.rows());
    studies[l].neurons = static_cast<std::size_t>(config.widths[l]);
    studies[l].resamples = static_cast<std::size_t>(resamples);
  }
  for (int r = 0; r < resamples; ++r) {
    NetworkConfig cfg = config;
    cfg.policy.seed = config.policy.seed + static_cast<std::uint64_t>(r);
    const FeatureNetwork net = build_network(cfg);
    const auto layers = evaluate_layers(net, points);
    for (int l = 0; l < depth; ++l) {
      const Eigen::ArrayXXd a = layers[l].array();
      const Histogram h = make_histogram(a, bins);
      for (int b = 0; b < bins; ++b) studies[l].histogram.counts[b] += h.counts[b];
      saturated[l] += static_cast<std::size_t>((a.abs() > threshold).count());
      sum[l] += a.sum();
      sum_sq[l] += a.square().sum();
    }
  }
  for (int l = 0; l < depth; ++l) {
    const double n = static_cast<double>(studies[l].histogram.total());
    studies[l].saturation_fraction = saturated[l] / n;
    studies[l].mean = sum[l] / n;
    studies[l].variance = sum_sq[l] / n - studies[l].mean * studies[l].mean;
  }
  return studies;
}

double decile_asymmetry_z(const Eigen::MatrixXd& activations) {
  const Eigen::Index k = activations.rows();
  const Eigen::Index n = activations.cols();
  if (k == 0 || n < 2) throw InvalidArgument("need at least one point and two neurons");
  Eigen::ArrayXd diff(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto col = activations.col(j).array();
    diff[j] = static_cast<double>((col < -0.8).count() - (col > 0.8).count()) / static_cast<double>(k);
  }
  const double mean = diff.mean();
  const double var = (diff - mean).square().sum() / static_cast<double>(n - 1);
  if (var == 0) return 0.0;
  return mean / std::sqrt(var / static_cast<double>(n));
}

double density_function(const Eigen::MatrixXd& directions, const Eigen::VectorXd& offsets,
                        double tau, const Eigen::VectorXd& y) {
  check_ball_point(y, tau);
  if (directions.rows() != offsets.size() || directions.cols() != y.size()) {
    throw InvalidArgument("directions, offsets and y have inconsistent shapes");
  }
  if (offsets.size() == 0) throw InvalidArgument("density needs at least one neuron");
  if (offsets.minCoeff() < 0 || offsets.maxCoeff() > 1) {
    throw InvalidArgument("density function assumes offsets in [0, 1]");
  }
  const Eigen::ArrayXd dist = ((directions * y) - offsets).array().abs();
  return static_cast<double>((dist < tau).count()) / static_cast<double>(offsets.size());
}

DensityEstimate density_study(int dim, std::size_t neurons, double tau, std::size_t points,
                              std::uint64_t seed) {
  if (!(tau > 0 && tau < 1)) throw InvalidArgument("tau must lie in (0, 1)");
  if (neurons < 2 || points < 1) throw InvalidArgument("density study needs neurons and points");
  auto dir_rng = make_stream(seed, "directions");
  auto off_rng = make_stream(seed, "offsets");
  auto pt_rng = make_stream(seed, "test");
  const int m = static_cast<int>(neurons);
  const Eigen::MatrixXd a = sample_directions(m, dim, dir_rng);
  const Eigen::VectorXd r = sample_offsets(m, OffsetLaw::HalfUniform, off_rng);
  const PointMatrix y = ball_points(dim, points, 1 - tau, pt_rng);

  // Per-neuron share of evaluation points within tau; i.i.d. over neurons.
  Eigen::ArrayXd share(m);
  constexpr Eigen::Index kBlock = 1 << 16;
  for (Eigen::Index start = 0; start < m; start += kBlock) {
    const Eigen::Index rows = std::min<Eigen::Index>(kBlock, m - start);
    Eigen::MatrixXd proj = a.middleRows(start, rows) * y.transpose();
    proj.colwise() -= r.segment(start, rows);
    share.segment(start, rows) =
        (proj.array().abs() < tau).cast<double>().rowwise().sum() / static_cast<double>(points);
  }
  DensityEstimate out;
  out.tau = tau;
  out.neurons = neurons;
  out.points = points;
  out.estimate = share.mean();
  const double var = (share - out.estimate).square().sum() / static_cast<double>(m - 1);
  out.std_error = std::sqrt(var / static_cast<double>(m));
  out.pass = std::abs(out.estimate - tau) < kDensitySigmas * out.std_error;
  return out;
}

MomentStudy moment_test(const NetworkConfig& config, const Eigen::VectorXd& x,
                        std::size_t resamples, double mean_sigmas, double slack) {
  const int depth = static_cast<int>(config.widths.size());
  if (depth < 2) throw InvalidArgument("moment test needs at least two hidden layers");
  if (config.policy.offset_law != OffsetLaw::SymmetricUniform) {
    throw InvalidArgument("moment test needs symmetric-uniform offsets");
  }
  if (resamples < 2) throw InvalidArgument("moment test needs at least two resamples");
  if (x.size() != config.dim) throw InvalidArgument("x has the wrong dimension");

  std::vector<Eigen::ArrayXd> sum(depth), sum_sq(depth);
  std::vector<double> avg_sum(depth, 0), avg_sum_sq(depth, 0);
  for (int l = 0; l < depth; ++l) {
    sum[l] = Eigen::ArrayXd::Zero(config.widths[l]);
    sum_sq[l] = Eigen::ArrayXd::Zero(config.widths[l]);
  }
  const PointMatrix point = x.transpose();
  for (std::size_t r = 0; r < resamples; ++r) {
    NetworkConfig cfg = config;
    cfg.policy.seed = config.policy.seed + r;
    const FeatureNetwork net = build_network(cfg);
    const auto layers = evaluate_layers(net, point);
    for (int l = 0; l < depth; ++l) {
      const Eigen::ArrayXd v = layers[l].row(0).transpose().array();
      sum[l] += v;
      sum_sq[l] += v.square();
      const double avg = v.mean();
      avg_sum[l] += avg;
      avg_sum_sq[l] += avg * avg;
    }
  }
  const double n = static_cast<double>(resamples);
  MomentStudy study;
  study.resamples = resamples;
  for (int l = 0; l < depth; ++l) {
    MomentLayer row;
    row.layer = l + 1;
    const Eigen::ArrayXd mean = sum[l] / n;
    const Eigen::ArrayXd var = (sum_sq[l] - n * mean.square()) / (n - 1);
    row.mean = avg_sum[l] / n;
    const double avg_var = (avg_sum_sq[l] - n * row.mean * row.mean) / (n - 1);
    row.std_error = std::sqrt(std::max(avg_var, 0.0) / n);
    row.variance = var.maxCoeff();
    if (l == 0) study.sigma0_sq = row.variance;
    row.bound = std::pow(config.delta, l) * study.sigma0_sq;
    row.mean_pass = std::abs(row.mean) <= mean_sigmas * row.std_error;
    row.variance_pass = l == 0 || row.variance <= row.bound * (1 + slack);
    study.layers.push_back(row);
  }
  return study;
}

void write_histogram_csv(std::ostream& out, const std::vector<ActivationStudy>& studies) {
  out << "layer,bin_left,bin_right,count\n";
  for (const auto& s : studies) {
    for (std::size_t b = 0; b < s.histogram.counts.size(); ++b) {
      out << s.layer << ',' << s.histogram.edges[b] << ',' << s.histogram.edges[b + 1] << ','
          << s.histogram.counts[b] << '\n';
    }
  }
}

void write_density_csv(std::ostream& out, const std::vector<DensityEstimate>& estimates) {
  out << "tau,M,estimate,stderr\n";
  out.precision(12);
  for (const auto& e : estimates) {
    out << e.tau << ',' << e.neurons << ',' << e.estimate << ',' << e.std_error << '\n';
  }
}

void write_moment_csv(std::ostream& out, const MomentStudy& study) {
  out << "layer,mean,stderr,variance,bound,pass\n";
  out.precision(12);
  for (const auto& m : study.layers) {
    if (m.layer == 1) continue;
    out << m.layer << ',' << m.mean << ',' << m.std_error << ',' << m.variance << ',' << m.bound << ','
        << (m.mean_pass && m.variance_pass ? "true" : "false") << '\n';
  }
}

}  // namespace gtransnet
