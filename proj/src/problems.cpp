#include "gtransnet/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/metrics.hpp"

namespace gtransnet {
namespace {

using std::numbers::pi;
using Fn = std::function<double(const double*)>;

Term term(int field, OperatorDescriptor op) { return Term{field, std::move(op)}; }

Equation interior_equation(std::string name, std::vector<Term> terms, ScalarField rhs) {
  Equation eq;
  eq.name = std::move(name);
  eq.role = PointRole::Interior;
  eq.terms = std::move(terms);
  eq.rhs = std::move(rhs);
  return eq;
}

Equation dirichlet(std::string name, int field, Fn g) {
  Equation eq;
  eq.name = std::move(name);
  eq.role = PointRole::Boundary;
  eq.terms = {term(field, OperatorDescriptor::identity())};
  eq.rhs = pointwise_field(std::move(g));
  return eq;
}

// Per-point vector data on the interior set, e.g. a frozen velocity.
VectorField interior_vector_data(Eigen::MatrixXd values) {
  return [values = std::move(values)](const PointBlock& b) -> Eigen::MatrixXd {
    if (b.role != PointRole::Interior || b.offset + b.points.rows() > values.rows()) {
      throw InvalidArgument("interior vector data evaluated outside the interior set");
    }
    return values.middleRows(b.offset, b.points.rows());
  };
}

class ParamReader {
 public:
  ParamReader(std::string problem, const ProblemParams& params)
      : problem_(std::move(problem)), params_(params) {}

  double get(const std::string& key, double fallback) {
    auto it = params_.find(key);
    const double v = it == params_.end() ? fallback : it->second;
    effective_[key] = v;
    return v;
  }

  double positive(const std::string& key, double fallback) {
    const double v = get(key, fallback);
    if (!(v > 0) || !std::isfinite(v)) {
      throw InvalidArgument(problem_ + ": parameter '" + key + "' must be positive");
    }
    return v;
  }

  // Rejects keys the family does not read; returns every effective value.
  ProblemParams finish() const {
    for (const auto& [k, v] : params_) {
      if (!effective_.count(k)) throw InvalidArgument(problem_ + ": unknown parameter '" + k + "'");
    }
    return effective_;
  }

 private:
  std::string problem_;
  const ProblemParams& params_;
  ProblemParams effective_;
};

PdeProblem scalar_shell(std::string name, DomainKind kind, ExactField exact,
                        CollocationCounts counts, double gamma) {
  PdeProblem p;
  p.name = std::move(name);
  p.domain = Domain(kind);
  p.field_names = {"u"};
  p.exact = {std::move(exact)};
  p.error_fields = {0};
  p.linear.dim = p.domain.dim();
  p.linear.num_fields = 1;
  p.reference_counts = counts;
  p.reference_gamma = gamma;
  return p;
}

// -lap u = f with Dirichlet data from the exact solution.
PdeProblem poisson(std::string name, DomainKind kind, ExactField exact, CollocationCounts counts,
                   double gamma) {
  PdeProblem p = scalar_shell(std::move(name), kind, exact, counts, gamma);
  Fn lap = exact.laplacian;
  p.linear.equations = {
      interior_equation("pde", {term(0, OperatorDescriptor::negative_laplacian())},
                        pointwise_field([lap](const double* x) { return -lap(x); })),
      dirichlet("dirichlet", 0, exact.value)};
  return p;
}

ExactField smooth_2d() {
  return {[](const double* x) {
            return std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]) + std::exp(-x[0] - x[1]);
          },
          [](const double* x, double* g) {
            const double e = std::exp(-x[0] - x[1]);
            g[0] = 2 * pi * std::cos(2 * pi * x[0]) * std::sin(2 * pi * x[1]) - e;
            g[1] = 2 * pi * std::sin(2 * pi * x[0]) * std::cos(2 * pi * x[1]) - e;
          },
          [](const double* x) {
            return -8 * pi * pi * std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]) +
                   2 * std::exp(-x[0] - x[1]);
          }};
}

ExactField smooth_3d() {
  return {[](const double* x) {
            return std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
          },
          [](const double* x, double* g) {
            const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
            g[0] = pi * std::cos(pi * x[0]) * sy * sz;
            g[1] = pi * sx * std::cos(pi * x[1]) * sz;
            g[2] = pi * sx * sy * std::cos(pi * x[2]);
          },
          [](const double* x) {
            return -3 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
          }};
}

ExactField kite_wave() {
  return {[](const double* x) { return std::sin(2 * pi * x[0]) * std::sin(30 * pi * x[1]); },
          [](const double* x, double* g) {
            g[0] = 2 * pi * std::cos(2 * pi * x[0]) * std::sin(30 * pi * x[1]);
            g[1] = 30 * pi * std::sin(2 * pi * x[0]) * std::cos(30 * pi * x[1]);
          },
          [](const double* x) {
            return -(4 + 900) * pi * pi * std::sin(2 * pi * x[0]) * std::sin(30 * pi * x[1]);
          }};
}

ExactField l_shape_wave() {
  return {[](const double* x) { return std::cos(100 * x[0]) * std::cos(100 * x[1]); },
          [](const double* x, double* g) {
            g[0] = -100 * std::sin(100 * x[0]) * std::cos(100 * x[1]);
            g[1] = -100 * std::cos(100 * x[0]) * std::sin(100 * x[1]);
          },
          [](const double* x) { return -20000 * std::cos(100 * x[0]) * std::cos(100 * x[1]); }};
}

ExactField ball_wave() {
  return {[](const double* x) { return std::sin(2 * x[0]) + std::cos(10 * x[1]) + std::sin(36 * x[2]); },
          [](const double* x, double* g) {
            g[0] = 2 * std::cos(2 * x[0]);
            g[1] = -10 * std::sin(10 * x[1]);
            g[2] = 36 * std::cos(36 * x[2]);
          },
          [](const double* x) {
            return -4 * std::sin(2 * x[0]) - 100 * std::cos(10 * x[1]) - 1296 * std::sin(36 * x[2]);
          }};
}

PdeProblem helmholtz(const ProblemParams& params) {
  ParamReader r("helmholtz", params);
  const double nu = r.positive("nu", 4000);
  const double k = helmholtz_wavenumber(nu);
  const double s = k / std::sqrt(2.0);
  ExactField exact{[s](const double* x) { return std::sin(s * x[0]) * std::sin(s * x[1]); },
                   [s](const double* x, double* g) {
                     g[0] = s * std::cos(s * x[0]) * std::sin(s * x[1]);
                     g[1] = s * std::sin(s * x[0]) * std::cos(s * x[1]);
                   },
                   [k, s](const double* x) { return -k * k * std::sin(s * x[0]) * std::sin(s * x[1]); }};
  PdeProblem p = scalar_shell("helmholtz", DomainKind::Flower, exact, {10800, 580, 10000},
                              nu <= 4000 ? 6.0 : 10.0);
  p.params = r.finish();
  p.linear.equations = {
      interior_equation("pde", {term(0, OperatorDescriptor::helmholtz(k))}, constant_field(0.0)),
      dirichlet("dirichlet", 0, exact.value)};
  p.notes.emplace_back("wavenumber", std::to_string(k));
  return p;
}

PdeProblem multiscale(const ProblemParams& params) {
  ParamReader r("multiscale", params);
  const double eps = r.positive("epsilon", 0.5);
  const double w = 2 * pi / eps;  // theta = w s with s = x^2 + y^2
  auto s_of = [](const double* x) { return x[0] * x[0] + x[1] * x[1]; };
  // du/ds = s (4 + cos theta) / 8, so A du/ds = s / 8 and -div(A grad u) = -s.
  auto du = [w](double s) { return s * (4 + std::cos(w * s)) / 8; };
  auto d2u = [w](double s) { return (4 + std::cos(w * s)) / 8 - s * w * std::sin(w * s) / 8; };
  ExactField exact{
      [=](const double* x) {
        const double s = s_of(x);
        return s * s / 4 + eps / (16 * pi) * s * std::sin(w * s) +
               eps * eps / (32 * pi * pi) * std::cos(w * s);
      },
      [=](const double* x, double* g) {
        const double d = du(s_of(x));
        g[0] = 2 * x[0] * d;
        g[1] = 2 * x[1] * d;
      },
      // lap u = 4 s u'' + 4 u' since |grad s|^2 = 4 s and lap s = 4.
      [=](const double* x) {
        const double s = s_of(x);
        return 4 * s * d2u(s) + 4 * du(s);
      }};
  PdeProblem p = scalar_shell("multiscale", DomainKind::UnitSquare, exact, {10000, 600, 10000},
                              eps >= 0.5 ? 6.0 : 8.0);
  p.params = r.finish();
  ScalarField coeff = pointwise_field([=](const double* x) { return 1 / (4 + std::cos(w * s_of(x))); });
  VectorField grad_coeff = pointwise_vector_field(2, [=](const double* x, double* g) {
    const double s = s_of(x);
    const double c = 4 + std::cos(w * s);
    const double scale = std::sin(w * s) / (c * c) * 2 * w;
    g[0] = scale * x[0];
    g[1] = scale * x[1];
  });
  p.linear.equations = {
      interior_equation("pde", {term(0, OperatorDescriptor::variable_diffusion(coeff, grad_coeff))},
                        pointwise_field([=](const double* x) { return -s_of(x); })),
      dirichlet("dirichlet", 0, exact.value)};
  return p;
}

PdeProblem navier_stokes(const ProblemParams& params) {
  ParamReader r("s3-navier-stokes", params);
  const double nu = r.positive("nu", 0.1);
  const double tol = r.positive("tolerance", 1e-12);
  const int cap = static_cast<int>(r.positive("max_iterations", 50));
  const double blowup = r.positive("divergence_ratio", 1e6);

  PdeProblem p;
  p.name = "s3-navier-stokes";
  p.domain = Domain(DomainKind::UnitSquare);
  p.field_names = {"u", "v", "p"};
  p.error_fields = {0, 1};
  p.reference_counts = {900, 200, 10000};
  p.reference_gamma = 1.0;
  p.params = r.finish();

  const double k2 = 1 - pi * pi;  // lap of e^x sin(pi y) and e^x cos(pi y)
  ExactField u{[](const double* x) { return std::exp(x[0]) * std::sin(pi * x[1]); },
               [](const double* x, double* g) {
                 g[0] = std::exp(x[0]) * std::sin(pi * x[1]);
                 g[1] = pi * std::exp(x[0]) * std::cos(pi * x[1]);
               },
               [k2](const double* x) { return k2 * std::exp(x[0]) * std::sin(pi * x[1]); }};
  ExactField v{[](const double* x) { return std::exp(x[0]) * std::cos(pi * x[1]); },
               [](const double* x, double* g) {
                 g[0] = std::exp(x[0]) * std::cos(pi * x[1]);
                 g[1] = -pi * std::exp(x[0]) * std::sin(pi * x[1]);
               },
               [k2](const double* x) { return k2 * std::exp(x[0]) * std::cos(pi * x[1]); }};
  ExactField pr{[](const double* x) { return std::sin(0.5 * pi * x[0]) * std::cos(0.5 * pi * x[1]); },
                [](const double* x, double* g) {
                  g[0] = 0.5 * pi * std::cos(0.5 * pi * x[0]) * std::cos(0.5 * pi * x[1]);
                  g[1] = -0.5 * pi * std::sin(0.5 * pi * x[0]) * std::sin(0.5 * pi * x[1]);
                },
                [](const double* x) {
                  return -0.5 * pi * pi * std::sin(0.5 * pi * x[0]) * std::cos(0.5 * pi * x[1]);
                }};
  p.exact = {u, v, pr};

  auto momentum = [=](int field) {
    return [=](const double* x) {
      double gu[2], gv[2], gp[2];
      u.gradient(x, gu);
      v.gradient(x, gv);
      pr.gradient(x, gp);
      const double uu = u.value(x), vv = v.value(x);
      if (field == 0) return -nu * u.laplacian(x) + uu * gu[0] + vv * gu[1] + gp[0];
      return -nu * v.laplacian(x) + uu * gv[0] + vv * gv[1] + gp[1];
    };
  };
  // The given velocity is not solenoidal, so continuity carries its divergence.
  Fn divergence = [](const double* x) { return (1 - pi) * std::exp(x[0]) * std::sin(pi * x[1]); };

  PointMatrix pin(1, 2);
  pin << 0.5, 0.5;
  const double pin_value = pr.value(pin.data());
  std::ostringstream note;
  note << "p(0.5, 0.5) = " << pin_value;
  p.notes.emplace_back("pressure_pin", note.str());
  p.notes.emplace_back("continuity_rhs", "divergence of the exact velocity");

  PicardScheme scheme;
  scheme.tracked_fields = {0, 1};
  scheme.tolerance = tol;
  scheme.max_iterations = cap;
  scheme.divergence_ratio = blowup;
  scheme.initial = [](const PointMatrix& interior) {
    return Eigen::MatrixXd::Ones(interior.rows(), 2).eval();
  };
  scheme.linearize = [=](const Eigen::MatrixXd& iterate) {
    const VectorField velocity = interior_vector_data(iterate);
    LinearProblem lp;
    lp.dim = 2;
    lp.num_fields = 3;
    lp.equations.push_back(interior_equation(
        "momentum_x",
        {term(0, OperatorDescriptor::convection_diffusion(nu, velocity)),
         term(2, OperatorDescriptor::gradient_component(0))},
        pointwise_field(momentum(0))));
    lp.equations.push_back(interior_equation(
        "momentum_y",
        {term(1, OperatorDescriptor::convection_diffusion(nu, velocity)),
         term(2, OperatorDescriptor::gradient_component(1))},
        pointwise_field(momentum(1))));
    lp.equations.push_back(interior_equation(
        "continuity",
        {term(0, OperatorDescriptor::gradient_component(0)),
         term(1, OperatorDescriptor::gradient_component(1))},
        pointwise_field(divergence)));
    lp.equations.push_back(dirichlet("dirichlet_u", 0, u.value));
    lp.equations.push_back(dirichlet("dirichlet_v", 1, v.value));
    Equation pin_eq;
    pin_eq.name = "pressure_pin";
    pin_eq.role = PointRole::Pin;
    pin_eq.terms = {term(2, OperatorDescriptor::identity())};
    pin_eq.rhs = constant_field(pin_value);
    pin_eq.pin_points = pin;
    lp.equations.push_back(std::move(pin_eq));
    return lp;
  };
  p.picard = std::move(scheme);
  p.linear.dim = 2;
  p.linear.num_fields = 3;
  return p;
}

PdeProblem allen_cahn(const ProblemParams& params) {
  ParamReader r("allen-cahn", params);
  const double stab = r.get("stabilization", 2.0);
  const double eps = r.positive("epsilon", 0.05);
  const double u0 = r.get("initial_value", 1.0);
  const double tol = r.positive("tolerance", 1e-12);
  const int cap = static_cast<int>(r.positive("max_iterations", 200));
  const double blowup = r.positive("divergence_ratio", 1e6);
  const bool derivative_rows = r.get("periodic_derivative", 1.0) != 0.0;
  if (stab < 0) throw InvalidArgument("allen-cahn: stabilization must be non-negative");

  // u = C(x) C(y) C(z) with C(t) = cos(g(t)), g = 36 t (1 - t).
  auto c0 = [](double t) { return std::cos(36 * t * (1 - t)); };
  auto c1 = [](double t) { return -std::sin(36 * t * (1 - t)) * (36 - 72 * t); };
  auto c2 = [](double t) {
    const double g = 36 * t * (1 - t), gp = 36 - 72 * t;
    return -std::cos(g) * gp * gp + 72 * std::sin(g);
  };
  ExactField exact{[=](const double* x) { return c0(x[0]) * c0(x[1]) * c0(x[2]); },
                   [=](const double* x, double* g) {
                     g[0] = c1(x[0]) * c0(x[1]) * c0(x[2]);
                     g[1] = c0(x[0]) * c1(x[1]) * c0(x[2]);
                     g[2] = c0(x[0]) * c0(x[1]) * c1(x[2]);
                   },
                   [=](const double* x) {
                     return c2(x[0]) * c0(x[1]) * c0(x[2]) + c0(x[0]) * c2(x[1]) * c0(x[2]) +
                            c0(x[0]) * c0(x[1]) * c2(x[2]);
                   }};
  PdeProblem p = scalar_shell("allen-cahn", DomainKind::Box3D, exact, {16000, 4800, 10000}, 6.0);
  p.params = r.finish();
  const double inv = 1 / (eps * eps);
  Fn source = [=](const double* x) {
    const double u = exact.value(x);
    return -exact.laplacian(x) + inv * (u * u * u - u);
  };
  const Domain box = p.domain;

  PicardScheme scheme;
  scheme.tracked_fields = {0};
  scheme.tolerance = tol;
  scheme.max_iterations = cap;
  scheme.divergence_ratio = blowup;
  scheme.initial = [u0](const PointMatrix& interior) {
    return Eigen::MatrixXd::Constant(interior.rows(), 1, u0).eval();
  };
  scheme.linearize = [=](const Eigen::MatrixXd& iterate) {
    const Eigen::ArrayXd uk = iterate.col(0).array();
    const Eigen::VectorXd explicit_part = (inv * (uk.cube() - (1 + stab) * uk)).matrix();
    const ScalarField f = pointwise_field(source);
    const ScalarField lagged = interior_data_field(explicit_part);
    LinearProblem lp;
    lp.dim = 3;
    lp.num_fields = 1;
    lp.equations.push_back(interior_equation(
        "pde", {term(0, OperatorDescriptor::reaction_shifted_laplacian(stab * inv))},
        [f, lagged](const PointBlock& b) -> Eigen::VectorXd { return f(b) - lagged(b); }));
    Equation periodic;
    periodic.name = "periodic_value";
    periodic.role = PointRole::Boundary;
    periodic.periodic = true;
    periodic.terms = {term(0, OperatorDescriptor::identity())};
    lp.equations.push_back(periodic);
    if (derivative_rows) {
      // Normal derivative along the axis of the face the point lies on.
      VectorField normal_axis = pointwise_vector_field(3, [box](const double* x, double* g) {
        const int face = box.face_of({x, 3});
        g[0] = g[1] = g[2] = 0;
        if (face >= 0) g[face / 2] = 1;
      });
      Equation dn;
      dn.name = "periodic_derivative";
      dn.role = PointRole::Boundary;
      dn.periodic = true;
      dn.terms = {term(0, OperatorDescriptor::directional(normal_axis))};
      lp.equations.push_back(dn);
    }
    return lp;
  };
  p.picard = std::move(scheme);
  p.notes.emplace_back("periodic_rows", derivative_rows ? "value and normal derivative" : "value");
  p.notes.emplace_back("stop_rule", "max-norm iterate difference on interior points");
  return p;
}

PdeProblem make_poisson(const std::string& name, const ProblemParams& params) {
  ParamReader r(name, params);
  PdeProblem p = [&] {
    if (name == "s1-poisson2d")
      return poisson(name, DomainKind::ShiftedSquare, smooth_2d(), {900, 200, 10000}, 2.0);
    if (name == "s2-poisson3d")
      return poisson(name, DomainKind::Ball3D, smooth_3d(), {2512, 532, 10000}, 1.0);
    if (name == "poisson2d-case1")
      return poisson(name, DomainKind::Kite, kite_wave(), {9256, 500, 10000}, 8.0);
    if (name == "poisson2d-case2")
      return poisson(name, DomainKind::LShape, l_shape_wave(), {10752, 500, 10000}, 10.0);
    return poisson(name, DomainKind::Ball3D, ball_wave(), {12712, 2500, 10000}, 4.0);
  }();
  p.params = r.finish();
  return p;
}

}  // namespace

LinearProblem PdeProblem::linear_problem_at_exact(const PointMatrix& interior) const {
  if (!picard) return linear;
  Eigen::MatrixXd iterate(interior.rows(), picard->tracked_fields.size());
  for (std::size_t c = 0; c < picard->tracked_fields.size(); ++c) {
    iterate.col(static_cast<Eigen::Index>(c)) =
        exact_values(*this, interior, picard->tracked_fields[c]);
  }
  return picard->linearize(iterate);
}

std::vector<std::string> problem_names() {
  return {"s1-poisson2d",    "s2-poisson3d", "s3-navier-stokes", "poisson2d-case1",
          "poisson2d-case2", "poisson3d-case3", "helmholtz",     "multiscale",
          "allen-cahn"};
}

double helmholtz_wavenumber(double frequency) { return 2 * pi * frequency / 340.0; }

PdeProblem make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "s1-poisson2d" || name == "s2-poisson3d" || name == "poisson2d-case1" ||
      name == "poisson2d-case2" || name == "poisson3d-case3") {
    return make_poisson(name, params);
  }
  if (name == "s3-navier-stokes") return navier_stokes(params);
  if (name == "helmholtz") return helmholtz(params);
  if (name == "multiscale") return multiscale(params);
  if (name == "allen-cahn") return allen_cahn(params);
  throw InvalidArgument("unknown problem '" + name + "'");
}

Eigen::VectorXd exact_values(const PdeProblem& problem, const PointMatrix& points, int field) {
  if (field < 0 || field >= problem.num_fields()) throw InvalidArgument("no such field");
  if (points.cols() != problem.dim()) throw InvalidArgument("points have the wrong dimension");
  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd x(points.cols());
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    x = points.row(k).transpose();
    out[k] = problem.exact[field].value(x.data());
  }
  return out;
}

std::vector<std::pair<std::string, double>> manufactured_residual(const PdeProblem& problem,
                                                                  const CollocationSet& colloc) {
  const LinearProblem lp = problem.linear_problem_at_exact(colloc.interior);
  bool any_periodic = false;
  for (const auto& eq : lp.equations) any_periodic |= eq.periodic;
  const PointMatrix images = any_periodic ? periodic_images(problem.domain, colloc) : PointMatrix();
  const int d = problem.dim();

  // sum over terms of c0 u + c1 . grad u + c2 lap u at every point.
  auto apply_exact = [&](const Equation& eq, const PointMatrix& pts, PointRole role) {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(pts.rows());
    const PointBlock block{pts, role, 0};
    Eigen::VectorXd x(d), g(d);
    for (const auto& t : eq.terms) {
      const OperatorCoefficients c = t.op.coefficients(block);
      const ExactField& f = problem.exact[t.field];
      for (Eigen::Index k = 0; k < pts.rows(); ++k) {
        x = pts.row(k).transpose();
        if (c.value.size()) total[k] += c.value[k] * f.value(x.data());
        if (c.gradient.size()) {
          f.gradient(x.data(), g.data());
          total[k] += c.gradient.row(k).dot(g);
        }
        if (c.laplacian.size()) total[k] += c.laplacian[k] * f.laplacian(x.data());
      }
    }
    return total;
  };

  std::vector<std::pair<std::string, double>> out;
  for (const auto& eq : lp.equations) {
    Eigen::VectorXd r;
    if (eq.periodic) {
      r = apply_exact(eq, colloc.boundary, PointRole::Boundary) -
          apply_exact(eq, images, PointRole::BoundaryImage);
    } else {
      const PointMatrix& pts = eq.role == PointRole::Interior ? colloc.interior
                               : eq.role == PointRole::Pin    ? eq.pin_points
                                                              : colloc.boundary;
      r = apply_exact(eq, pts, eq.role) - eq.rhs(PointBlock{pts, eq.role, 0});
    }
    out.emplace_back(eq.name, r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
  }
  return out;
}

FitResult fit_function(const std::function<double(double)>& target, const Domain& interval,
                       FeatureNetwork& net, const CollocationSet& colloc, const SolverOptions& solver) {
  if (interval.dim() != 1 || net.dim() != 1) throw InvalidArgument("fitting needs a 1D domain and network");
  LinearProblem lp;
  lp.dim = 1;
  lp.num_fields = 1;
  lp.equations.push_back(interior_equation("fit", {term(0, OperatorDescriptor::identity())},
                                           pointwise_field([&](const double* x) { return target(x[0]); })));
  const LeastSquaresSystem sys = assemble(lp, net, colloc, interval);
  SystemSolution sol = solve(sys, solver);
  net.set_output_weights(sol.alpha);

  FitResult out;
  out.alpha = sol.alpha.col(0);
  out.diagnostics = sol.diagnostics;
  const Eigen::VectorXd predicted = predict(net, colloc.test);
  Eigen::VectorXd exact(colloc.test.rows());
  for (Eigen::Index k = 0; k < exact.size(); ++k) exact[k] = target(colloc.test(k, 0));
  out.relative_l2 = relative_l2(predicted, exact).value;
  return out;
}

SineFit fit_sine(const SineFitSetup& setup, const SolverOptions& solver) {
  const Domain interval = Domain::interval(-1, 1);
  CollocationSet colloc;
  colloc.interior = sample_interior(interval, setup.points, setup.seed, {SamplingMode::Grid});
  colloc.test = sample_interior(interval, setup.test_points, setup.test_seed);
  NetworkConfig nc;
  nc.dim = 1;
  nc.widths = {setup.width};
  nc.gamma = setup.gamma;
  nc.ball = interval.default_ball();
  nc.policy.offset_law = OffsetLaw::HalfUniform;
  nc.policy.seed = setup.seed;
  FeatureNetwork net = build_network(nc);
  const double w = setup.frequency * pi;
  FitResult result = fit_function([w](double x) { return std::sin(w * x); }, interval, net, colloc, solver);
  return {std::move(result), std::move(net), std::move(colloc)};
}

}  // namespace gtransnet
