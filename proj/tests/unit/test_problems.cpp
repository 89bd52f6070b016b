#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gtransnet/errors.hpp"
#include "gtransnet/picard.hpp"
#include "gtransnet/problems.hpp"
#include "helpers.hpp"

using namespace gtransnet;
using std::numbers::pi;

TEST_SUITE("problems") {
  TEST_CASE("every catalogued problem satisfies its own equations") {
    for (const auto& name : problem_names()) {
      const PdeProblem p = make_problem(name);
      const auto colloc = make_collocation(p.domain, {300, 120, 10}, 3, 4);
      for (const auto& [eq, r] : manufactured_residual(p, colloc)) {
        CAPTURE(name);
        CAPTURE(eq);
        CHECK(r < 1e-8);
      }
    }
  }

  TEST_CASE("exact derivatives match finite differences") {
    for (const auto& name : problem_names()) {
      const PdeProblem p = make_problem(name);
      const int d = p.dim();
      const auto pts = sample_interior(p.domain, 20, 5);
      const double h = 1e-4;
      for (int f = 0; f < p.num_fields(); ++f) {
        const ExactField& e = p.exact[f];
        for (Eigen::Index k = 0; k < pts.rows(); ++k) {
          Eigen::VectorXd x = pts.row(k).transpose(), g(d);
          e.gradient(x.data(), g.data());
          double lap = 0;
          const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
          for (int q = 0; q < d; ++q) {
            Eigen::VectorXd xp = x, xm = x;
            xp[q] += h;
            xm[q] -= h;
            const double up = e.value(xp.data()), um = e.value(xm.data()), u0 = e.value(x.data());
            const double fd = (up - um) / (2 * h);
            CHECK(std::abs(fd - g[q]) < 1e-3 * gscale);
            lap += (up - 2 * u0 + um) / (h * h);
          }
          CAPTURE(name);
          CHECK(std::abs(lap - e.laplacian(x.data())) <
                1e-3 * std::max(1.0, std::abs(e.laplacian(x.data()))) + 1e-4 * gscale * gscale);
        }
      }
    }
  }

  TEST_CASE("reference values") {
    const PdeProblem s1 = make_problem("s1-poisson2d");
    const double x[2] = {4.5, 7.5};
    CHECK(s1.exact[0].value(x) == doctest::Approx(std::exp(-12.0)).epsilon(1e-12));
    CHECK(s1.domain.kind() == DomainKind::ShiftedSquare);
    CHECK(s1.reference_counts.interior == 900);
    CHECK(s1.reference_counts.boundary == 200);

    CHECK(helmholtz_wavenumber(4000) == doctest::Approx(73.9198).epsilon(1e-6));
    const PdeProblem h = make_problem("helmholtz");
    CHECK(h.params.at("nu") == 4000);

    const PdeProblem ns = make_problem("s3-navier-stokes");
    CHECK(ns.num_fields() == 3);
    CHECK(ns.error_fields == std::vector<int>{0, 1});
    CHECK(ns.nonlinear());

    const PdeProblem ac = make_problem("allen-cahn");
    CHECK(ac.domain.kind() == DomainKind::Box3D);
    CHECK(ac.picard->max_iterations == 200);
    const double c[3] = {0, 0, 0};
    CHECK(ac.exact[0].value(c) == 1.0);
  }

  TEST_CASE("multiscale coefficient and decomposition") {
    const PdeProblem p = make_problem("multiscale");
    const Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, 2);
    const auto coeffs = p.linear.equations[0].terms[0].op.coefficients(
        PointBlock{origin, PointRole::Interior, 0});
    // -div(A grad u) with A(0) = 1 / (4 + cos 0) = 0.2 gives c2 = -0.2.
    CHECK(coeffs.laplacian[0] == doctest::Approx(-0.2).epsilon(1e-15));
    // u = s^2/4 + small oscillation; check the homogenised part dominates.
    const double x[2] = {0.6, 0.3};
    const double s = 0.45;
    const double eps = 0.5, w = 2 * pi / eps;
    const double ref = s * s / 4 + eps / (16 * pi) * s * std::sin(w * s) +
                       eps * eps / (32 * pi * pi) * std::cos(w * s);
    CHECK(p.exact[0].value(x) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(make_problem("multiscale", {{"epsilon", 0.1}}).reference_gamma == 8.0);
  }

  TEST_CASE("helmholtz rhs is zero") {
    const PdeProblem p = make_problem("helmholtz");
    const auto pts = sample_interior(p.domain, 10, 1);
    CHECK(p.linear.equations[0].rhs(PointBlock{pts, PointRole::Interior, 0}).isZero(0));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_problem("nope"), InvalidArgument);
    CHECK_THROWS_AS(make_problem("s1-poisson2d", {{"nu", 1}}), InvalidArgument);
    CHECK_THROWS_AS(make_problem("helmholtz", {{"nu", -1}}), InvalidArgument);
    CHECK_THROWS_AS(make_problem("allen-cahn", {{"stabilization", -1}}), InvalidArgument);
    CHECK(make_problem("allen-cahn", {{"periodic_derivative", 0}}).params.at("periodic_derivative") == 0);
  }

  TEST_CASE("Picard stops after one step when started at a fixed point") {
    PdeProblem p = make_problem("s3-navier-stokes", {{"max_iterations", 5}});
    const auto colloc = make_collocation(p.domain, {100, 60, 100}, 0, 1);
    NetworkConfig c;
    c.widths = {80, 60};
    c.ball = p.domain.default_ball();
    c.gamma = 1.0;
    auto net = build_network(c);
    // An iterate that cannot change: the linearisation ignores it entirely.
    const auto base = p.picard->linearize(Eigen::MatrixXd::Zero(colloc.interior.rows(), 2));
    p.picard->linearize = [base](const Eigen::MatrixXd&) { return base; };
    const auto out = picard_solve(p, net, colloc);
    CHECK(out.trace.converged);
    // Iteration 2 switches to the reused factorization, which may differ from
    // the direct driver by rounding; from then on the iterate is frozen.
    CHECK(out.trace.iterations <= 3);
    CHECK(out.trace.differences.back() == 0.0);
    CHECK(out.nonlinear);
  }

  TEST_CASE("Picard hits the cap and reports it") {
    const PdeProblem p = make_problem("s3-navier-stokes", {{"max_iterations", 2}});
    const auto colloc = make_collocation(p.domain, {100, 60, 100}, 0, 1);
    NetworkConfig c;
    c.widths = {60, 40};
    c.ball = p.domain.default_ball();
    c.gamma = 1.0;
    auto net = build_network(c);
    const auto out = solve_problem(p, net, colloc);
    CHECK(out.trace.iterations == 2);
    CHECK_FALSE(out.trace.converged);
    CHECK(net.has_output_weights());
    CHECK(net.output_weights().cols() == 3);
  }

  TEST_CASE("fitting the zero function gives zero weights") {
    const Domain d = Domain::interval(-1, 1);
    NetworkConfig c;
    c.dim = 1;
    c.widths = {50};
    c.gamma = 2.0;
    c.ball = d.default_ball();
    c.policy.offset_law = OffsetLaw::HalfUniform;
    auto net = build_network(c);
    CollocationSet colloc;
    colloc.interior = sample_interior(d, 200, 0);
    colloc.test = sample_interior(d, 100, 1);
    const auto zero = fit_function([](double) { return 0.0; }, d, net, colloc);
    CHECK(zero.alpha.isZero(0));
    const auto smooth = fit_function([](double t) { return std::sin(pi * t); }, d, net, colloc);
    CHECK(smooth.relative_l2 < 1e-6);
  }
}

TEST_SUITE("problems") {
  TEST_CASE("Picard stops early on divergence") {
    PdeProblem p = make_problem("s3-navier-stokes", {{"max_iterations", 20}, {"divergence_ratio", 10}});
    const auto colloc = make_collocation(p.domain, {100, 60, 100}, 0, 1);
    NetworkConfig c;
    c.widths = {60, 40};
    c.ball = p.domain.default_ball();
    c.gamma = 1.0;
    auto net = build_network(c);
    // A linearization whose data grows geometrically with the iteration count.
    auto base = p.picard->linearize;
    int calls = 0;
    p.picard->linearize = [base, &calls](const Eigen::MatrixXd& it) {
      LinearProblem lp = base(it);
      const double scale = std::pow(100.0, calls++);
      for (auto& eq : lp.equations) {
        auto rhs = eq.rhs;
        eq.rhs = [rhs, scale](const PointBlock& b) -> Eigen::VectorXd { return scale * rhs(b); };
      }
      return lp;
    };
    const auto out = picard_solve(p, net, colloc);
    CHECK(out.trace.diverged);
    CHECK_FALSE(out.trace.converged);
    CHECK(out.trace.iterations < 20);
  }
}
