#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/featurenet.hpp"
#include "gtransnet/rng.hpp"

namespace testing {

inline gtransnet::FeatureNetwork small_net(int dim, std::vector<int> widths, double gamma,
                                           std::uint64_t seed, double delta = 0.5) {
  gtransnet::NetworkConfig c;
  c.dim = dim;
  c.widths = std::move(widths);
  c.gamma = gamma;
  c.delta = delta;
  c.ball.center = Eigen::VectorXd::Constant(dim, 0.1);
  c.ball.radius = 0.8;
  c.policy.seed = seed;
  c.policy.offset_law = c.widths.size() == 1 ? gtransnet::OffsetLaw::HalfUniform
                                             : gtransnet::OffsetLaw::SymmetricUniform;
  return gtransnet::build_network(c);
}

inline gtransnet::PointMatrix random_points(int count, int dim, std::uint64_t seed, double lo = -0.5,
                                            double hi = 0.5) {
  auto rng = gtransnet::make_stream(seed, "test-points");
  gtransnet::PointMatrix p(count, dim);
  for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] = lo + (hi - lo) * rng.uniform();
  return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
