#include "gtransnet/featurenet.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "gtransnet/errors.hpp"

namespace gtransnet {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

constexpr char kMagic[4] = {'G', 'T', 'N', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated network snapshot");
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0) throw Error("corrupt network snapshot");
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw Error("truncated network snapshot");
  return m;
}

}  // namespace

std::string_view to_string(OffsetLaw law) {
  return law == OffsetLaw::HalfUniform ? "half-uniform" : "symmetric-uniform";
}

OffsetLaw offset_law_from_string(std::string_view name) {
  if (name == "half-uniform") return OffsetLaw::HalfUniform;
  if (name == "symmetric-uniform") return OffsetLaw::SymmetricUniform;
  throw InvalidArgument("unknown offset law '" + std::string(name) + "'");
}

Eigen::MatrixXd sample_directions(int count, int dim, PhiloxEngine& rng) {
  if (count < 1 || dim < 1) throw InvalidArgument("sample_directions requires count, dim >= 1");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(count, dim);
  Eigen::VectorXd z(dim);
  for (int m = 0; m < count; ++m) {
    double norm = 0;
    int redraws = 0;
    do {
      if (redraws++ > 100) throw NumericalError("direction sampler keeps producing zero vectors");
      for (int i = 0; i < dim; ++i) z[i] = normal(rng);
      norm = z.norm();
    } while (norm < 1e-300);
    a.row(m) = (z / norm).transpose();
  }
  return a;
}

Eigen::VectorXd sample_offsets(int count, OffsetLaw law, PhiloxEngine& rng) {
  if (count < 1) throw InvalidArgument("sample_offsets requires count >= 1");
  Eigen::VectorXd r(count);
  for (int m = 0; m < count; ++m) {
    const double u = rng.uniform();
    r[m] = law == OffsetLaw::HalfUniform ? u : 2.0 * u - 1.0;
  }
  return r;
}

double deep_weight_stddev(double delta, int fan_in) {
  return std::sqrt(delta / fan_in);
}

std::vector<Eigen::MatrixXd> sample_deep_weights(const std::vector<int>& widths,
                                                 double delta, std::uint64_t seed) {
  if (widths.size() < 2) throw InvalidArgument("deep weights need at least two layers");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidArgument("variance control delta must lie in (0, 1], got " +
                          std::to_string(delta));
  }
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const int rows = widths[l];
    const int cols = widths[l - 1];
    if (rows < 1 || cols < 1) throw InvalidArgument("layer widths must be positive");
    PhiloxEngine rng = make_stream(seed, "weights", l + 1);
    std::normal_distribution<double> normal(0.0, deep_weight_stddev(delta, cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = normal(rng);
    out.push_back(std::move(w));
  }
  return out;
}

FeatureNetwork::FeatureNetwork(int dim, std::vector<int> widths,
                               Eigen::MatrixXd directions, Eigen::VectorXd offsets,
                               Eigen::VectorXd shapes, EnclosingBall ball,
                               std::vector<Eigen::MatrixXd> deep_weights,
                               double delta, SamplingPolicy policy)
    : dim_(dim),
      widths_(std::move(widths)),
      directions_(std::move(directions)),
      offsets_(std::move(offsets)),
      shapes_(std::move(shapes)),
      ball_(std::move(ball)),
      deep_weights_(std::move(deep_weights)),
      delta_(delta),
      policy_(policy) {
  if (widths_.empty()) throw InvalidArgument("network needs at least one hidden layer");
  const int n1 = widths_.front();
  if (directions_.rows() != n1 || directions_.cols() != dim_ || offsets_.size() != n1 ||
      shapes_.size() != n1) {
    throw InvalidArgument("first-layer parameter shapes do not match N_1");
  }
  if (ball_.center.size() != dim_ || !(ball_.radius > 0)) {
    throw InvalidArgument("enclosing ball must match the dimension and have R > 0");
  }
  if ((shapes_.array() <= 0).any()) throw InvalidArgument("shape parameters must be positive");
  if (deep_weights_.size() + 1 != widths_.size()) {
    throw InvalidArgument("expected one weight matrix per layer beyond the first");
  }
  for (std::size_t l = 0; l < deep_weights_.size(); ++l) {
    if (deep_weights_[l].rows() != widths_[l + 1] || deep_weights_[l].cols() != widths_[l]) {
      throw InvalidArgument("deep weight matrix shape does not match widths");
    }
  }
}

const Eigen::MatrixXd& FeatureNetwork::output_weights() const {
  if (!output_weights_) throw Error("output weights have not been solved for");
  return *output_weights_;
}

void FeatureNetwork::set_output_weights(Eigen::MatrixXd alpha) {
  if (alpha.rows() != last_width() || alpha.cols() < 1) {
    throw InvalidArgument("output weights must have N_L rows");
  }
  output_weights_ = std::move(alpha);
}

FeatureNetwork FeatureNetwork::with_center(const Eigen::VectorXd& center) const {
  FeatureNetwork copy = *this;
  if (center.size() != dim_) throw InvalidArgument("centre dimension mismatch");
  copy.ball_.center = center;
  return copy;
}

bool FeatureNetwork::operator==(const FeatureNetwork& o) const {
  if (dim_ != o.dim_ || widths_ != o.widths_ || delta_ != o.delta_ ||
      directions_ != o.directions_ || offsets_ != o.offsets_ || shapes_ != o.shapes_ ||
      ball_.center != o.ball_.center || ball_.radius != o.ball_.radius ||
      deep_weights_.size() != o.deep_weights_.size() ||
      output_weights_.has_value() != o.output_weights_.has_value()) {
    return false;
  }
  for (std::size_t l = 0; l < deep_weights_.size(); ++l) {
    if (deep_weights_[l] != o.deep_weights_[l]) return false;
  }
  return !output_weights_ || *output_weights_ == *o.output_weights_;
}

FeatureNetwork build_network(const NetworkConfig& config) {
  if (config.widths.empty()) throw InvalidArgument("network needs at least one hidden layer");
  for (int w : config.widths) {
    if (w < 1) throw InvalidArgument("layer widths must be positive");
  }
  if (!(config.gamma > 0)) throw InvalidArgument("shape parameter gamma must be positive");
  const bool deep = config.widths.size() >= 2;
  if (deep && config.policy.offset_law != OffsetLaw::SymmetricUniform) {
    if (!config.policy.allow_asymmetric_deep) {
      throw InvalidArgument("networks with two or more hidden layers require symmetric-uniform offsets");
    }
    log_warning("deep network built with half-uniform offsets; first-layer activations are not zero-mean");
  }
  const int n1 = config.widths.front();
  PhiloxEngine dir_rng = make_stream(config.policy.seed, "directions");
  PhiloxEngine off_rng = make_stream(config.policy.seed, "offsets");
  Eigen::MatrixXd directions = sample_directions(n1, config.dim, dir_rng);
  Eigen::VectorXd offsets = sample_offsets(n1, config.policy.offset_law, off_rng);
  std::vector<Eigen::MatrixXd> weights;
  if (deep) weights = sample_deep_weights(config.widths, config.delta, config.policy.seed);
  return FeatureNetwork(config.dim, config.widths, std::move(directions), std::move(offsets),
                        Eigen::VectorXd::Constant(n1, config.gamma), config.ball,
                        std::move(weights), config.delta, config.policy);
}

std::string to_json(const FeatureNetwork& net) {
  json j;
  j["format"] = "gtransnet-network";
  j["dim"] = net.dim();
  j["widths"] = net.widths();
  j["delta"] = net.delta();
  j["seed"] = net.policy().seed;
  j["offset_law"] = std::string(to_string(net.policy().offset_law));
  j["allow_asymmetric_deep"] = net.policy().allow_asymmetric_deep;
  j["ball"] = {{"center", vector_to_json(net.ball().center)}, {"radius", net.ball().radius}};
  j["directions"] = matrix_to_json(net.directions());
  j["offsets"] = vector_to_json(net.offsets());
  j["shapes"] = vector_to_json(net.shapes());
  j["deep_weights"] = json::array();
  for (const auto& w : net.deep_weights()) j["deep_weights"].push_back(matrix_to_json(w));
  if (net.has_output_weights()) j["output_weights"] = matrix_to_json(net.output_weights());
  return j.dump();
}

FeatureNetwork network_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "gtransnet-network") throw Error("not a network snapshot");
  SamplingPolicy policy;
  policy.seed = j.at("seed").get<std::uint64_t>();
  policy.offset_law = offset_law_from_string(j.at("offset_law").get<std::string>());
  policy.allow_asymmetric_deep = j.value("allow_asymmetric_deep", false);
  EnclosingBall ball{vector_from_json(j.at("ball").at("center")),
                     j.at("ball").at("radius").get<double>()};
  std::vector<Eigen::MatrixXd> weights;
  for (const auto& w : j.at("deep_weights")) weights.push_back(matrix_from_json(w));
  FeatureNetwork net(j.at("dim").get<int>(), j.at("widths").get<std::vector<int>>(),
                     matrix_from_json(j.at("directions")), vector_from_json(j.at("offsets")),
                     vector_from_json(j.at("shapes")), std::move(ball), std::move(weights),
                     j.at("delta").get<double>(), policy);
  if (j.contains("output_weights")) net.set_output_weights(matrix_from_json(j["output_weights"]));
  return net;
}

void save_binary(std::ostream& out, const FeatureNetwork& net) {
  out.write(kMagic, 4);
  put(out, kBinaryVersion);
  put<std::int32_t>(out, net.dim());
  put<std::int32_t>(out, static_cast<std::int32_t>(net.widths().size()));
  for (int w : net.widths()) put<std::int32_t>(out, w);
  put(out, net.delta());
  put(out, net.policy().seed);
  put<std::int32_t>(out, static_cast<std::int32_t>(net.policy().offset_law));
  put<std::uint8_t>(out, net.policy().allow_asymmetric_deep ? 1 : 0);
  put_matrix(out, net.ball().center);
  put(out, net.ball().radius);
  put_matrix(out, net.directions());
  put_matrix(out, net.offsets());
  put_matrix(out, net.shapes());
  for (const auto& w : net.deep_weights()) put_matrix(out, w);
  put<std::uint8_t>(out, net.has_output_weights() ? 1 : 0);
  if (net.has_output_weights()) put_matrix(out, net.output_weights());
  if (!out) throw Error("failed to write network snapshot");
}

FeatureNetwork load_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("not a binary network snapshot");
  if (get<std::uint32_t>(in) != kBinaryVersion) throw Error("unsupported snapshot version");
  const int dim = get<std::int32_t>(in);
  const int depth = get<std::int32_t>(in);
  if (depth < 1) throw Error("corrupt network snapshot");
  std::vector<int> widths(depth);
  for (auto& w : widths) w = get<std::int32_t>(in);
  const double delta = get<double>(in);
  SamplingPolicy policy;
  policy.seed = get<std::uint64_t>(in);
  policy.offset_law = static_cast<OffsetLaw>(get<std::int32_t>(in));
  policy.allow_asymmetric_deep = get<std::uint8_t>(in) != 0;
  EnclosingBall ball;
  ball.center = get_matrix(in);
  ball.radius = get<double>(in);
  Eigen::MatrixXd directions = get_matrix(in);
  Eigen::VectorXd offsets = get_matrix(in);
  Eigen::VectorXd shapes = get_matrix(in);
  std::vector<Eigen::MatrixXd> weights;
  for (int l = 1; l < depth; ++l) weights.push_back(get_matrix(in));
  FeatureNetwork net(dim, std::move(widths), std::move(directions), std::move(offsets),
                     std::move(shapes), std::move(ball), std::move(weights), delta, policy);
  if (get<std::uint8_t>(in) != 0) net.set_output_weights(get_matrix(in));
  return net;
}

}  // namespace gtransnet
