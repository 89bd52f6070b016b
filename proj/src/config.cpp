#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gtransnet/errors.hpp"
#include "gtransnet/harness.hpp"

namespace gtransnet {
namespace {

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw InvalidArgument("config: '" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw InvalidArgument("config: unknown key '" + key + "' in " + where);
  }
}

bool present(const YAML::Node& node, const char* key) { return node[key] && !node[key].IsNull(); }

template <typename T>
void read(const YAML::Node& node, const char* key, T& target) {
  if (!present(node, key)) return;
  try {
    target = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

std::vector<double> scalar_or_list(const YAML::Node& node) {
  if (node.IsSequence()) return node.as<std::vector<double>>();
  return {node.as<double>()};
}

ExperimentConfig from_node(const YAML::Node& root_in) {
  YAML::Node root = root_in;
  if (root.IsMap() && root["config"] && root["cells"]) root = root["config"];  // a saved report
  ExperimentConfig c;
  if (!root || root.IsNull()) return c;
  check_keys(root, {"problem", "params", "network", "ball", "collocation", "solver", "sweep", "repeats",
                    "seed", "test_seed", "block_size", "output"},
             "top level");
  read(root, "problem", c.problem);
  if (present(root, "params")) {
    for (const auto& kv : root["params"]) c.params[kv.first.as<std::string>()] = kv.second.as<double>();
  }
  if (present(root, "network")) {
    const auto n = root["network"];
    check_keys(n, {"layers", "widths", "gamma", "delta", "offsets", "allow_asymmetric_deep"}, "network");
    read(n, "layers", c.layers);
    read(n, "widths", c.widths);
    if (present(n, "gamma")) c.gammas = scalar_or_list(n["gamma"]);
    read(n, "delta", c.delta);
    if (present(n, "offsets")) c.offset_law = offset_law_from_string(n["offsets"].as<std::string>());
    read(n, "allow_asymmetric_deep", c.allow_asymmetric_deep);
  }
  if (present(root, "ball")) {
    const auto b = root["ball"];
    check_keys(b, {"center", "radius"}, "ball");
    if (present(b, "center")) {
      const auto v = b["center"].as<std::vector<double>>();
      c.ball_center = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    read(b, "radius", c.ball_radius);
  }
  if (present(root, "collocation")) {
    const auto k = root["collocation"];
    check_keys(k, {"interior", "boundary", "test", "interior_mode", "boundary_mode"}, "collocation");
    if (present(k, "interior") || present(k, "boundary") || present(k, "test")) {
      CollocationCounts counts = make_problem(c.problem, c.params).reference_counts;
      read(k, "interior", counts.interior);
      read(k, "boundary", counts.boundary);
      read(k, "test", counts.test);
      c.counts = counts;
    }
    if (present(k, "interior_mode")) c.interior_mode = sampling_mode_from_string(k["interior_mode"].as<std::string>());
    if (present(k, "boundary_mode")) c.boundary_mode = sampling_mode_from_string(k["boundary_mode"].as<std::string>());
  }
  if (present(root, "solver")) {
    const auto s = root["solver"];
    check_keys(s, {"method", "rcond", "equilibrate", "svd_fallback"}, "solver");
    if (present(s, "method")) c.solver.method = solve_method_from_string(s["method"].as<std::string>());
    read(s, "rcond", c.solver.rcond);
    read(s, "equilibrate", c.solver.equilibrate);
    read(s, "svd_fallback", c.solver.svd_fallback);
  }
  if (present(root, "sweep")) {
    const auto s = root["sweep"];
    check_keys(s, {"widths", "gammas"}, "sweep");
    read(s, "widths", c.sweep_widths);
    if (present(s, "gammas")) c.gammas = scalar_or_list(s["gammas"]);
  }
  read(root, "repeats", c.repeats);
  read(root, "seed", c.seed);
  read(root, "test_seed", c.test_seed);
  read(root, "block_size", c.block_size);
  if (present(root, "output")) {
    const auto o = root["output"];
    check_keys(o, {"dir", "points", "solution"}, "output");
    read(o, "dir", c.out_dir);
    read(o, "points", c.write_points);
    read(o, "solution", c.write_solution);
  }
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig config_from_string(const std::string& text) {
  try {
    return from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_string(buffer.str());
}

void ExperimentConfig::validate() const {
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (layers < 1) throw InvalidArgument("layers must be at least 1");
  if (widths.empty()) throw InvalidArgument("widths must not be empty");
  for (int w : widths) if (w < 1) throw InvalidArgument("widths must be positive");
  for (int w : sweep_widths) if (w < 1) throw InvalidArgument("sweep widths must be positive");
  for (double g : gammas) if (!(g > 0)) throw InvalidArgument("gamma values must be positive");
  if (layers > 1 && !(delta > 0 && delta <= 1)) throw InvalidArgument("delta must lie in (0, 1]");
  if (!(ball_radius > 0)) throw InvalidArgument("ball radius must be positive");
  if (counts && (counts->interior < 1 || counts->boundary < 1 || counts->test < 1)) {
    throw InvalidArgument("collocation counts must be positive");
  }
  if (block_size < 1) throw InvalidArgument("block size must be positive");
}

}  // namespace gtransnet
