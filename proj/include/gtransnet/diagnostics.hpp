#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/featurenet.hpp"

namespace gtransnet {

inline constexpr double kSaturationThreshold = 0.99;
inline constexpr double kMeanSigmas = 4.0;
inline constexpr double kVarianceSlack = 0.10;
inline constexpr double kDensitySigmas = 3.0;

struct Histogram {
  std::vector<double> edges;         // bins + 1 edges spanning [-1, 1]
  std::vector<std::size_t> counts;
  std::size_t total() const;
};

Histogram make_histogram(const Eigen::Ref<const Eigen::ArrayXXd>& values, int bins);

struct ActivationStudy {
  int layer = 1;
  Histogram histogram;
  double saturation_fraction = 0;  // share with |psi| > threshold
  double mean = 0;
  double variance = 0;
  std::size_t points = 0;
  std::size_t neurons = 0;
  std::size_t resamples = 0;
};

/// Pools the activations of every hidden layer over (points x neurons x
/// resampled networks). Resample r uses policy seed config.policy.seed + r.
std::vector<ActivationStudy> activation_histogram(const NetworkConfig& config,
                                                  const PointMatrix& points, int resamples = 1,
                                                  int bins = 40,
                                                  double threshold = kSaturationThreshold);

/// Symmetry of one layer's activations (points x neurons): per neuron, the
/// share of points in the lowest decile bin [-1, -0.8) minus the share in the
/// highest (0.8, 1]. Neurons are independent, so the mean difference over
/// neurons divided by its standard error is approximately standard normal.
double decile_asymmetry_z(const Eigen::MatrixXd& activations);

/// D_M(y) = (1/M) sum_m 1{ |a_m . y - r_m| < tau } for unit directions a_m
/// and offsets in [0, 1]. Requires |y| <= 1 - tau and tau in (0, 1).
double density_function(const Eigen::MatrixXd& directions, const Eigen::VectorXd& offsets,
                        double tau, const Eigen::VectorXd& y);

struct DensityEstimate {
  double tau = 0;
  std::size_t neurons = 0;
  std::size_t points = 0;
  double estimate = 0;  // mean of D_M(y) over the evaluation points
  double std_error = 0;  // from the per-neuron indicator averages
  bool pass = false;    // |estimate - tau| < kDensitySigmas * stderr
};

/// Monte-Carlo check of E[D_M(y)] = tau with half-uniform offsets and
/// evaluation points drawn uniformly from the ball of radius 1 - tau.
DensityEstimate density_study(int dim, std::size_t neurons, double tau, std::size_t points,
                              std::uint64_t seed);

struct MomentLayer {
  int layer = 1;
  double mean = 0;      // pooled over components and networks
  double std_error = 0;  // over per-network component averages
  double variance = 0;  // largest per-component variance
  double bound = 0;     // delta^(l-1) sigma0^2
  bool mean_pass = false;
  bool variance_pass = false;
};

struct MomentStudy {
  double sigma0_sq = 0;  // largest per-component first-layer variance
  std::size_t resamples = 0;
  std::vector<MomentLayer> layers;  // first layer included, bound unused there
};

/// Resamples whole networks, evaluates every layer at `x` and tests the
/// zero-mean and variance-bound properties of layers 2..L.
MomentStudy moment_test(const NetworkConfig& config, const Eigen::VectorXd& x,
                        std::size_t resamples, double mean_sigmas = kMeanSigmas,
                        double slack = kVarianceSlack);

void write_histogram_csv(std::ostream& out, const std::vector<ActivationStudy>& studies);
void write_density_csv(std::ostream& out, const std::vector<DensityEstimate>& estimates);
void write_moment_csv(std::ostream& out, const MomentStudy& study);

}  // namespace gtransnet
