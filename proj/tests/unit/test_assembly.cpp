#include <doctest.h>

#include <cmath>

#include "gtransnet/assembly.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/problems.hpp"
#include "helpers.hpp"

using namespace gtransnet;

namespace {

LinearProblem identity_problem(int dim, ScalarField rhs) {
  LinearProblem lp;
  lp.dim = dim;
  Equation eq;
  eq.name = "values";
  eq.role = PointRole::Interior;
  eq.terms = {Term{0, OperatorDescriptor::identity()}};
  eq.rhs = std::move(rhs);
  lp.equations.push_back(eq);
  return lp;
}

CollocationSet interior_only(const Domain& d, std::size_t count, std::uint64_t seed = 1) {
  CollocationSet c;
  c.interior = sample_interior(d, count, seed);
  return c;
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("penalty examples") {
    Eigen::MatrixXd fi(2, 2), fb(1, 2);
    fi << 0.5, -1.0, 0.25, 0.0;
    fb << 0.1, 0.2;
    Eigen::VectorXd ri(2), rb(1);
    ri << 0.0, 0.0;
    rb << 200.0;
    const Penalties p = compute_penalties(fi, ri, fb, rb);
    CHECK(p.interior == 1.0);
    CHECK(p.boundary == doctest::Approx(1.0 / 200).epsilon(1e-15));
    CHECK_FALSE(p.interior_degenerate);

    const Penalties z = compute_penalties(Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), fb, rb);
    CHECK(z.interior == 1.0);
    CHECK(z.interior_degenerate);
  }

  TEST_CASE("identity operator returns the feature matrix") {
    const Domain d(DomainKind::UnitSquare);
    const auto net = testing::small_net(2, {30, 20}, 2.0, 1);
    const auto colloc = interior_only(d, 40);
    AssemblyOptions opt;
    opt.apply_penalties = false;
    const auto sys = assemble(identity_problem(2, constant_field(0.0)), net, colloc, d, opt);
    const auto psi = evaluate(net, colloc.interior, EvalFlags::Values);
    CHECK((sys.matrix - psi.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.rhs.isZero(0));
  }

  TEST_CASE("operator rows match derivative bundles") {
    const auto net = testing::small_net(2, {25, 15}, 2.0, 2);
    const auto pts = testing::random_points(20, 2, 3);
    const auto b = evaluate(net, pts);
    const PointBlock block{pts, PointRole::Interior, 0};
    const double k = 7.0;
    const auto h = apply_operator(OperatorDescriptor::helmholtz(k), b, block);
    CHECK((h - (-b.laplacian - k * k * b.values)).cwiseAbs().maxCoeff() < 1e-12);
    const auto gx = apply_operator(OperatorDescriptor::gradient_component(1), b, block);
    CHECK((gx - b.jacobian[1]).cwiseAbs().maxCoeff() == 0.0);
    const auto vel = pointwise_vector_field(2, [](const double* x, double* g) {
      g[0] = x[1];
      g[1] = -x[0];
    });
    const auto cd = apply_operator(OperatorDescriptor::convection_diffusion(0.1, vel), b, block);
    Eigen::MatrixXd ref = -0.1 * b.laplacian;
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      ref.row(r) += pts(r, 1) * b.jacobian[0].row(r) - pts(r, 0) * b.jacobian[1].row(r);
    }
    CHECK((cd - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(OperatorDescriptor::identity().required_flags() == EvalFlags::Values);
    CHECK(has(OperatorDescriptor::negative_laplacian().required_flags(), EvalFlags::Laplacian));
    CHECK_FALSE(has(OperatorDescriptor::negative_laplacian().required_flags(), EvalFlags::Jacobian));
  }

  TEST_CASE("S1 system shape and penalty-scaled rows") {
    const PdeProblem p = make_problem("s1-poisson2d");
    const auto colloc = make_collocation(p.domain, p.reference_counts, 0, 1);
    NetworkConfig c;
    c.widths = {80, 60};
    c.ball = p.domain.default_ball();
    const auto net = build_network(c);
    const auto sys = assemble(p.linear, net, colloc, p.domain);
    CHECK(sys.matrix.rows() == 1100);
    CHECK(sys.matrix.cols() == 60);
    CHECK(sys.rows.size() == 1100);
    CHECK(sys.rows[900].equation == 1);
    CHECK(sys.rows[900].point == 0);
    // Each scaled group has max-abs entry exactly 1 over matrix and rhs.
    auto group_max = [&](Eigen::Index first, Eigen::Index count) {
      return std::max(sys.matrix.middleRows(first, count).cwiseAbs().maxCoeff(),
                      sys.rhs.segment(first, count).cwiseAbs().maxCoeff());
    };
    CHECK(group_max(0, 900) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(group_max(900, 200) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sys.penalties.interior < 1.0);
  }

  TEST_CASE("zero data gives zero coefficients") {
    const PdeProblem p = make_problem("s1-poisson2d");
    LinearProblem lp = p.linear;
    for (auto& eq : lp.equations) eq.rhs = constant_field(0.0);
    const auto colloc = make_collocation(p.domain, {100, 40, 10}, 0, 1);
    NetworkConfig c;
    c.widths = {30, 20};
    c.ball = p.domain.default_ball();
    const auto sys = assemble(lp, build_network(c), colloc, p.domain);
    CHECK(sys.rhs.isZero(0));
  }

  TEST_CASE("assembly is linear in the rhs") {
    const Domain d(DomainKind::UnitSquare);
    const auto net = testing::small_net(2, {30, 20}, 2.0, 4);
    const auto colloc = interior_only(d, 40);
    AssemblyOptions opt;
    opt.apply_penalties = false;
    auto f = pointwise_field([](const double* x) { return x[0] + 2 * x[1]; });
    auto g = pointwise_field([](const double* x) { return std::sin(x[0]); });
    auto fg = pointwise_field([](const double* x) { return 3 * (x[0] + 2 * x[1]) + std::sin(x[0]); });
    const auto a = assemble(identity_problem(2, f), net, colloc, d, opt);
    const auto b = assemble(identity_problem(2, g), net, colloc, d, opt);
    const auto c = assemble(identity_problem(2, fg), net, colloc, d, opt);
    CHECK((c.rhs - (3 * a.rhs + b.rhs)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("cache and block size leave the system unchanged") {
    const PdeProblem p = make_problem("s1-poisson2d");
    const auto colloc = make_collocation(p.domain, {150, 60, 10}, 0, 1);
    NetworkConfig c;
    c.widths = {30, 20};
    c.ball = p.domain.default_ball();
    const auto net = build_network(c);
    AssemblyOptions small;
    small.block_size = 17;
    const auto a = assemble(p.linear, net, colloc, p.domain);
    const auto b = assemble(p.linear, net, colloc, p.domain, small);
    FeatureCache cache;
    const auto c1 = assemble(p.linear, net, colloc, p.domain, {}, &cache);
    CHECK(cache.interior.has_value());
    const auto c2 = assemble(p.linear, net, colloc, p.domain, {}, &cache);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(a.matrix == c1.matrix);
    CHECK(a.matrix == c2.matrix);
  }

  TEST_CASE("multi-field column layout and pin rows") {
    const PdeProblem p = make_problem("s3-navier-stokes");
    const auto colloc = make_collocation(p.domain, {50, 20, 10}, 0, 1);
    NetworkConfig c;
    c.widths = {30, 20};
    c.ball = p.domain.default_ball();
    const auto net = build_network(c);
    const auto sys = assemble(p.linear_problem_at_exact(colloc.interior), net, colloc, p.domain);
    CHECK(sys.matrix.cols() == 60);
    CHECK(sys.matrix.rows() == 3 * 50 + 2 * 20 + 1);
    // Continuity rows have no pressure columns.
    CHECK(sys.matrix.block(100, 40, 50, 20).isZero(0));
    // The pin row touches only the pressure block.
    CHECK(sys.matrix.block(sys.matrix.rows() - 1, 0, 1, 40).isZero(0));
  }

  TEST_CASE("periodic rows vanish for periodic features") {
    const PdeProblem p = make_problem("allen-cahn");
    const auto colloc = make_collocation(p.domain, {30, 60, 10}, 0, 1);
    const auto images = periodic_images(p.domain, colloc);
    for (Eigen::Index k = 0; k < images.rows(); ++k) {
      const int face = colloc.boundary_faces[k];
      const int axis = face / 2;
      CHECK(std::abs(std::abs(images(k, axis) - colloc.boundary(k, axis)) - 1.0) < 1e-15);
    }
    // Value and normal-derivative periodicity by default; value only on request.
    CHECK(p.linear_problem_at_exact(colloc.interior).equations.size() == 3);
    CHECK(make_problem("allen-cahn", {{"periodic_derivative", 0}})
              .linear_problem_at_exact(colloc.interior).equations.size() == 2);
    CHECK_THROWS_AS(assemble(p.linear_problem_at_exact(colloc.interior),
                             testing::small_net(2, {10}, 1.0, 0), colloc, p.domain),
                    InvalidArgument);
  }

  TEST_CASE("invalid problems throw") {
    const Domain d(DomainKind::UnitSquare);
    const auto net = testing::small_net(2, {10}, 1.0, 0);
    const auto colloc = interior_only(d, 10);
    auto lp = identity_problem(2, ScalarField{});
    CHECK_THROWS_AS(assemble(lp, net, colloc, d), InvalidArgument);
    lp = identity_problem(2, constant_field(std::nan("")));
    CHECK_THROWS_AS(assemble(lp, net, colloc, d), NumericalError);
  }
}
