#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gtransnet/geometry.hpp"
#include "gtransnet/rng.hpp"

namespace gtransnet {

/// Law for the first-layer offsets r_m.
enum class OffsetLaw {
  HalfUniform,       // U[0, 1], the classic single-layer choice
  SymmetricUniform,  // U[-1, 1], centrally symmetric; required for depth >= 2
};

std::string_view to_string(OffsetLaw law);
OffsetLaw offset_law_from_string(std::string_view name);

struct SamplingPolicy {
  OffsetLaw offset_law = OffsetLaw::SymmetricUniform;
  std::uint64_t seed = 0;
  /// Allow half-uniform offsets in deep networks (ablation only; warns).
  bool allow_asymmetric_deep = false;
};

struct NetworkConfig {
  int dim = 2;
  std::vector<int> widths;  // N_1 .. N_L
  double gamma = 2.0;       // broadcast to every first-layer neuron
  double delta = 0.5;       // variance control for layers 2..L
  EnclosingBall ball;
  SamplingPolicy policy;
};

/// Unit directions a_m = z / |z| with z standard Gaussian; one per row.
Eigen::MatrixXd sample_directions(int count, int dim, PhiloxEngine& rng);

Eigen::VectorXd sample_offsets(int count, OffsetLaw law, PhiloxEngine& rng);

/// W_l with i.i.d. N(0, delta / N_{l-1}) entries, shape N_l x N_{l-1}, for
/// l = 2..L. Each layer draws from its own stream so layers are independent.
std::vector<Eigen::MatrixXd> sample_deep_weights(const std::vector<int>& widths,
                                                 double delta,
                                                 std::uint64_t seed);

/// Standard deviation of layer-l weights: sqrt(delta / N_{l-1}).
double deep_weight_stddev(double delta, int fan_in);

/// Hidden layers of a (G)TransNet with every parameter fixed in advance;
/// only the output weights are learned.
class FeatureNetwork {
 public:
  FeatureNetwork(int dim, std::vector<int> widths, Eigen::MatrixXd directions,
                 Eigen::VectorXd offsets, Eigen::VectorXd shapes,
                 EnclosingBall ball, std::vector<Eigen::MatrixXd> deep_weights,
                 double delta, SamplingPolicy policy);

  int dim() const { return dim_; }
  int depth() const { return static_cast<int>(widths_.size()); }
  const std::vector<int>& widths() const { return widths_; }
  int first_width() const { return widths_.front(); }
  int last_width() const { return widths_.back(); }

  const Eigen::MatrixXd& directions() const { return directions_; }  // N_1 x d
  const Eigen::VectorXd& offsets() const { return offsets_; }
  const Eigen::VectorXd& shapes() const { return shapes_; }
  const EnclosingBall& ball() const { return ball_; }
  const std::vector<Eigen::MatrixXd>& deep_weights() const { return deep_weights_; }
  double delta() const { return delta_; }
  const SamplingPolicy& policy() const { return policy_; }

  bool has_output_weights() const { return output_weights_.has_value(); }
  /// N_L x fields; one column per unknown field.
  const Eigen::MatrixXd& output_weights() const;
  void set_output_weights(Eigen::MatrixXd alpha);

  /// Same sampled parameters, different ball centre.
  FeatureNetwork with_center(const Eigen::VectorXd& center) const;

  bool operator==(const FeatureNetwork& other) const;

 private:
  int dim_;
  std::vector<int> widths_;
  Eigen::MatrixXd directions_;
  Eigen::VectorXd offsets_;
  Eigen::VectorXd shapes_;
  EnclosingBall ball_;
  std::vector<Eigen::MatrixXd> deep_weights_;
  double delta_;
  SamplingPolicy policy_;
  std::optional<Eigen::MatrixXd> output_weights_;
};

FeatureNetwork build_network(const NetworkConfig& config);

// Snapshots of every parameter plus seed and policy.
std::string to_json(const FeatureNetwork& net);
FeatureNetwork network_from_json(std::string_view text);
void save_binary(std::ostream& out, const FeatureNetwork& net);
FeatureNetwork load_binary(std::istream& in);

}  // namespace gtransnet
