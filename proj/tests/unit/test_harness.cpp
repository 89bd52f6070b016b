#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gtransnet/errors.hpp"
#include "gtransnet/harness.hpp"

using namespace gtransnet;

namespace {

ExperimentConfig tiny_s1() {
  return config_from_string(R"(
problem: s1-poisson2d
network: {layers: 2, widths: [300, 200], gamma: 2}
collocation: {interior: 400, boundary: 120, test: 300}
repeats: 2
seed: 5
)");
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing and strictness") {
    const auto c = tiny_s1();
    CHECK(c.widths == std::vector<int>{300, 200});
    CHECK(c.gammas == std::vector<double>{2.0});
    CHECK(c.counts->interior == 400);
    CHECK(c.repeats == 2);
    CHECK_THROWS_AS(config_from_string("problme: s1-poisson2d"), InvalidArgument);
    CHECK_THROWS_AS(config_from_string("network: {width: [3]}"), InvalidArgument);
    CHECK_THROWS_AS(config_from_string("repeats: 0"), InvalidArgument);
    CHECK_THROWS_AS(config_from_string("network: {delta: 2}"), InvalidArgument);
    CHECK_THROWS_AS(config_from_string("network: {offsets: sideways}"), InvalidArgument);
    CHECK_THROWS_AS(config_from_string("repeats: [1"), InvalidArgument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), InvalidArgument);
    CHECK(config_from_string("").problem == "s1-poisson2d");
  }

  TEST_CASE("width resolution") {
    ExperimentConfig c;
    c.layers = 4;
    c.widths = {500, 300};
    CHECK(resolve_widths(c) == std::vector<int>{500, 300, 300, 300});
    CHECK(resolve_widths(c, 100) == std::vector<int>{500, 100, 100, 100});
    c.layers = 1;
    CHECK(resolve_widths(c) == std::vector<int>{300});
    CHECK(resolve_offset_law(c) == OffsetLaw::HalfUniform);
    c.layers = 3;
    c.widths = {1, 2, 3, 4};
    CHECK_THROWS_AS(resolve_widths(c), InvalidArgument);
  }

  TEST_CASE("runs are deterministic and reports round-trip") {
    const auto c = tiny_s1();
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    REQUIRE(a.cells.size() == 1);
    REQUIRE(a.cells[0].repeats.size() == 2);
    CHECK(a.cells[0].repeats[0].seed == 5);
    CHECK(a.cells[0].repeats[1].seed == 6);
    CHECK(a.cells[0].repeats[0].relative_l2.value == b.cells[0].repeats[0].relative_l2.value);
    CHECK(a.cells[0].repeats[0].relative_l2.value != a.cells[0].repeats[1].relative_l2.value);
    CHECK(a.cells[0].median_error < 1e-2);
    CHECK(a.cells[0].failures == 0);

    const auto j = nlohmann::json::parse(report_to_json(a));
    CHECK(j["format"] == "gtransnet-report");
    CHECK(j["cells"][0]["repeats"].size() == 2);
    CHECK(j["config"]["seed"] == 5);
    const auto back = config_from_string(report_to_json(a));
    CHECK(back.widths == c.widths);
    CHECK(back.seed == c.seed);
    CHECK(back.counts->test == 300);
  }

  TEST_CASE("sweep grid and summary rows") {
    auto c = tiny_s1();
    c.repeats = 1;
    c.gammas = {1.0, 2.0};
    c.sweep_widths = {50, 100};
    const auto r = run_sweep(c);
    CHECK(r.cells.size() == 4);
    std::ostringstream csv;
    write_summary_csv(csv, r);
    std::istringstream in(csv.str());
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == "problem,gamma,N,median_error,min_error,max_error,mean_time_s");
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
  }

  TEST_CASE("failed repeats are recorded, not thrown") {
    auto c = tiny_s1();
    c.repeats = 1;
    // Half-uniform offsets in a deep network are rejected when the network is built.
    c.offset_law = OffsetLaw::HalfUniform;
    const auto r = run_experiment(c);
    CHECK(r.cells[0].failures == 1);
    CHECK(r.cells[0].repeats[0].status == "failed");
  }

  TEST_CASE("emit_report writes the output files") {
    auto c = tiny_s1();
    c.repeats = 1;
    c.write_points = true;
    c.write_solution = true;
    const auto dir = std::filesystem::temp_directory_path() / "gtransnet-harness-test";
    std::filesystem::remove_all(dir);
    c.out_dir = dir.string();
    emit_report(run_experiment(c));
    for (const char* f : {"report.json", "summary.csv", "points.csv", "solution.csv"}) {
      CHECK(std::filesystem::exists(dir / f));
    }
    std::ifstream sol(dir / "solution.csv");
    std::string header;
    std::getline(sol, header);
    CHECK(header == "x,y,predicted_u,exact_u,abs_error_u");
    std::filesystem::remove_all(dir);
  }
  TEST_CASE("shipped configs parse and name valid problems") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(GTRANSNET_CONFIG_DIR)) {
      if (entry.path().extension() != ".yaml") continue;
      CAPTURE(entry.path().string());
      const ExperimentConfig c = load_config(entry.path().string());
      CHECK_NOTHROW(make_problem(c.problem, c.params));
      CHECK_NOTHROW(resolve_widths(c));
      ++seen;
    }
    CHECK(seen >= 10);
  }
}
