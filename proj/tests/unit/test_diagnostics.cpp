#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gtransnet/diagnostics.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/metrics.hpp"
#include "helpers.hpp"

using namespace gtransnet;

TEST_SUITE("metrics") {
  TEST_CASE("relative L2") {
    Eigen::VectorXd u(3), v(3);
    u << 3, 0, 4;
    v << 3, 0, 3;
    const auto e = relative_l2(v, u);
    CHECK(e.value == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_FALSE(e.absolute);
    CHECK(relative_l2(u, u).value == 0.0);
    const auto z = relative_l2(u, Eigen::VectorXd::Zero(3));
    CHECK(z.absolute);
    CHECK(z.value == doctest::Approx(5.0));
  }

  TEST_CASE("fields are pooled") {
    Eigen::MatrixXd exact(2, 2), pred(2, 2);
    exact << 1, 0, 0, 1;
    pred << 1, 0, 0, 0;
    CHECK(relative_l2(pred, exact).value == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(relative_l2(pred, Eigen::MatrixXd::Zero(3, 2)), InvalidArgument);
  }
}

TEST_SUITE("diagnostics") {
  TEST_CASE("histogram counts everything once") {
    Eigen::ArrayXXd v(2, 3);
    v << -1, -0.5, 0, 0.5, 0.999, 1;
    const auto h = make_histogram(v, 4);
    CHECK(h.edges.size() == 5);
    CHECK(h.total() == 6);
    CHECK(h.counts.front() == 1);
    CHECK(h.counts.back() == 3);
  }

  TEST_CASE("activation study reports saturation per layer") {
    NetworkConfig c;
    c.widths = {200, 100};
    c.gamma = 20.0;
    c.ball.center = Eigen::Vector2d::Zero();
    c.ball.radius = 1.5;
    const auto pts = testing::random_points(200, 2, 1, -1, 1);
    const auto studies = activation_histogram(c, pts, 2, 20);
    REQUIRE(studies.size() == 2);
    CHECK(studies[0].histogram.total() == 200 * 200 * 2);
    CHECK(studies[0].saturation_fraction > 0.8);
    CHECK(studies[1].saturation_fraction < studies[0].saturation_fraction);
    c.gamma = 0.1;
    CHECK(activation_histogram(c, pts, 1)[0].saturation_fraction == 0.0);
  }

  TEST_CASE("symmetric activations have small decile asymmetry") {
    NetworkConfig c;
    c.widths = {400};
    c.gamma = 3.0;
    c.ball.center = Eigen::Vector2d::Zero();
    c.ball.radius = 1.5;
    c.policy.offset_law = OffsetLaw::SymmetricUniform;
    const auto net = build_network(c);
    const auto pts = testing::random_points(300, 2, 2, -1, 1);
    const auto a = evaluate(net, pts, EvalFlags::Values).values;
    CHECK(std::abs(decile_asymmetry_z(a)) < 4.0);
    c.policy.offset_law = OffsetLaw::HalfUniform;
    const auto b = evaluate(build_network(c), pts, EvalFlags::Values).values;
    CHECK(decile_asymmetry_z(b) < -4.0);
  }

  TEST_CASE("density function by hand") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, 0, 1;
    Eigen::VectorXd r(2);
    r << 0.5, 0.9;
    Eigen::VectorXd y(2);
    y << 0.45, 0.0;
    CHECK(density_function(a, r, 0.1, y) == 0.5);
    CHECK_THROWS_AS(density_function(a, r, 0.1, Eigen::Vector2d(0.95, 0)), InvalidArgument);
  }

  TEST_CASE("density study matches tau") {
    for (double tau : {0.1, 0.25}) {
      const auto e = density_study(2, 100000, tau, 50, 3);
      CHECK(e.pass);
      CHECK(std::abs(e.estimate - tau) < 0.01);
    }
  }

  TEST_CASE("moment test on a small deep network") {
    NetworkConfig c;
    c.widths = {64, 32, 32};
    c.gamma = 2.0;
    c.delta = 0.5;
    c.ball.center = Eigen::Vector2d::Zero();
    c.ball.radius = 1.5;
    const auto m = moment_test(c, Eigen::Vector2d(0.3, -0.2), 2000);
    REQUIRE(m.layers.size() == 3);
    CHECK(m.resamples == 2000);
    CHECK(m.sigma0_sq > 0);
    for (std::size_t l = 1; l < m.layers.size(); ++l) {
      CHECK(m.layers[l].mean_pass);
      CHECK(m.layers[l].variance_pass);
      CHECK(m.layers[l].bound == doctest::Approx(std::pow(0.5, static_cast<double>(l)) * m.sigma0_sq));
    }
  }

  TEST_CASE("CSV writers") {
    std::ostringstream d;
    write_density_csv(d, {density_study(2, 1000, 0.1, 5, 1)});
    CHECK(d.str().find('\n') != std::string::npos);
    std::ostringstream h;
    NetworkConfig c;
    c.widths = {10, 10};
    c.ball.center = Eigen::Vector2d::Zero();
    write_histogram_csv(h, activation_histogram(c, testing::random_points(5, 2, 1), 1, 4));
    int lines = 0;
    for (char ch : h.str()) lines += ch == '\n';
    CHECK(lines == 1 + 2 * 4);
  }
}
