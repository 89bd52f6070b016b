#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/featurenet.hpp"
#include "helpers.hpp"

using namespace gtransnet;
using std::numbers::pi;

TEST_SUITE("featurenet") {
  TEST_CASE("directions are unit vectors") {
    for (int d : {1, 2, 3}) {
      auto rng = make_stream(1, "directions");
      const auto a = sample_directions(5000, d, rng);
      for (Eigen::Index m = 0; m < a.rows(); ++m) REQUIRE(std::abs(a.row(m).norm() - 1) < 1e-12);
    }
  }

  TEST_CASE("2D directions are isotropic (chi-square over 36 angle bins)") {
    auto rng = make_stream(2, "directions");
    const int n = 100000, bins = 36;
    const auto a = sample_directions(n, 2, rng);
    std::vector<double> counts(bins, 0);
    for (int m = 0; m < n; ++m) {
      double t = std::atan2(a(m, 1), a(m, 0));
      if (t < 0) t += 2 * pi;
      counts[std::min(bins - 1, static_cast<int>(t / (2 * pi) * bins))] += 1;
    }
    double chi2 = 0;
    const double e = static_cast<double>(n) / bins;
    for (double c : counts) chi2 += (c - e) * (c - e) / e;
    // p = 0.001 critical value of chi-square with 35 degrees of freedom.
    CHECK(chi2 < 66.62);
    CHECK(a.colwise().mean().norm() < 0.02);
  }

  TEST_CASE("offset laws") {
    auto r1 = make_stream(3, "offsets");
    const auto h = sample_offsets(100000, OffsetLaw::HalfUniform, r1);
    CHECK(h.minCoeff() >= 0.0);
    CHECK(h.maxCoeff() <= 1.0);
    auto r2 = make_stream(3, "offsets");
    const auto s = sample_offsets(100000, OffsetLaw::SymmetricUniform, r2);
    CHECK(std::abs(s.mean()) < 0.011);
    const double var = (s.array() - s.mean()).square().sum() / (s.size() - 1);
    CHECK(std::abs(var - 1.0 / 3) < 0.05 / 3);
  }

  TEST_CASE("deep weight scale") {
    CHECK(deep_weight_stddev(0.5, 800) == 0.025);
    const auto w = sample_deep_weights({2000, 1000}, 0.5, 4);
    REQUIRE(w.size() == 1);
    CHECK(w[0].rows() == 1000);
    CHECK(w[0].cols() == 2000);
    const double var = w[0].array().square().mean() - std::pow(w[0].mean(), 2);
    CHECK(std::abs(var - 2.5e-4) < 0.03 * 2.5e-4);
    const auto u = sample_deep_weights({500, 500}, 1.0, 5);
    CHECK(std::abs(u[0].rowwise().squaredNorm().mean() - 1.0) < 0.02);
    CHECK_THROWS_AS(sample_deep_weights({10, 10}, 1.5, 0), InvalidArgument);
    CHECK_THROWS_AS(sample_deep_weights({10, 10}, 0.0, 0), InvalidArgument);
  }

  TEST_CASE("layers draw from independent streams") {
    const auto a = sample_deep_weights({50, 40, 30}, 0.5, 9);
    const auto b = sample_deep_weights({50, 40, 20}, 0.5, 9);
    CHECK(a[0] == b[0]);
    NetworkConfig c;
    c.widths = {100, 50};
    c.ball.center = Eigen::Vector2d::Zero();
    const auto n1 = build_network(c);
    c.widths = {100, 70};
    const auto n2 = build_network(c);
    CHECK(n1.directions() == n2.directions());
    CHECK(n1.offsets() == n2.offsets());
  }

  TEST_CASE("build_network shapes and invariants") {
    NetworkConfig c;
    c.dim = 2;
    c.widths = {60, 40};
    c.ball.center = Eigen::Vector2d::Zero();
    const auto net = build_network(c);
    CHECK(net.depth() == 2);
    REQUIRE(net.deep_weights().size() == 1);
    CHECK(net.deep_weights()[0].rows() == 40);
    CHECK(net.deep_weights()[0].cols() == 60);
    CHECK((net.shapes().array() == 2.0).all());
    CHECK_FALSE(net.has_output_weights());
    CHECK(build_network(c) == net);

    c.widths = {30};
    c.policy.offset_law = OffsetLaw::HalfUniform;
    const auto t = build_network(c);
    CHECK(t.deep_weights().empty());
    CHECK(t.offsets().minCoeff() >= 0);

    c.widths = {30, 20};
    CHECK_THROWS_AS(build_network(c), InvalidArgument);
    c.policy.allow_asymmetric_deep = true;
    CHECK_NOTHROW(build_network(c));
  }

  TEST_CASE("paper-size deep matrix shape") {
    const auto w = sample_deep_weights({6000, 4000}, 0.5, 1);
    CHECK(w[0].rows() == 4000);
    CHECK(w[0].cols() == 6000);
  }

  TEST_CASE("hyperplane-through-point identity") {
    const auto net = testing::small_net(3, {50, 20}, 5.0, 3);
    const auto& a = net.directions();
    for (int m = 0; m < 50; ++m) {
      const Eigen::VectorXd x =
          net.ball().center - net.ball().radius * net.offsets()[m] * a.row(m).transpose();
      const auto b = eval_layer1(net, x.transpose(), EvalFlags::Values);
      CHECK(std::abs(b.values(0, m)) < 1e-12);
    }
  }

  TEST_CASE("single-layer network matches a direct TransNet evaluation") {
    const auto net = testing::small_net(2, {200}, 3.0, 8);
    const auto x = testing::random_points(1000, 2, 1);
    const auto b = evaluate(net, x, EvalFlags::Values);
    double worst = 0;
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      for (int m = 0; m < 200; ++m) {
        double s = 0;
        for (int p = 0; p < 2; ++p) s += net.directions()(m, p) * (x(k, p) - net.ball().center[p]);
        const double ref = std::tanh(3.0 * (s + net.ball().radius * net.offsets()[m]));
        worst = std::max(worst, std::abs(ref - b.values(k, m)));
      }
    }
    CHECK(worst < 1e-15);
  }

  TEST_CASE("output weights") {
    auto net = testing::small_net(2, {10}, 2.0, 0);
    CHECK_THROWS_AS(net.output_weights(), Error);
    CHECK_THROWS_AS(net.set_output_weights(Eigen::MatrixXd::Zero(9, 1)), InvalidArgument);
    net.set_output_weights(Eigen::MatrixXd::Ones(10, 1));
    CHECK(net.output_weights().sum() == 10);
  }

  TEST_CASE("snapshots round-trip exactly") {
    auto net = testing::small_net(3, {40, 30, 20}, 4.0, 12);
    net.set_output_weights(Eigen::MatrixXd::Random(20, 2));
    const auto j = network_from_json(to_json(net));
    CHECK(j == net);
    CHECK(j.output_weights() == net.output_weights());
    std::stringstream buf;
    save_binary(buf, net);
    const auto b = load_binary(buf);
    CHECK(b == net);
    CHECK(b.policy().seed == 12);
  }
}
