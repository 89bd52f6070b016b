#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gtransnet/derivprop.hpp"
#include "gtransnet/diagnostics.hpp"
#include "gtransnet/errors.hpp"
#include "gtransnet/harness.hpp"

namespace py = pybind11;
using namespace gtransnet;

namespace {

EvalFlags flags_from(bool jacobian, bool laplacian) {
  EvalFlags f = EvalFlags::Values;
  if (jacobian) f = f | EvalFlags::Jacobian;
  if (laplacian) f = f | EvalFlags::Laplacian;
  return f;
}

py::dict diagnostics_dict(const SolveDiagnostics& d) {
  py::dict out;
  out["method"] = std::string(to_string(d.method));
  out["fell_back"] = d.fell_back;
  out["rank_estimate"] = d.rank_estimate;
  out["rank_deficient"] = d.rank_deficient;
  out["condition_estimate"] = d.condition_estimate;
  out["residual_norm"] = d.residual_norm;
  out["rcond"] = d.rcond;
  out["wall_time"] = d.wall_time;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of gtransnet";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("problem_names", &problem_names);

  m.def(
      "sample_interior",
      [](const std::string& domain, std::size_t count, std::uint64_t seed, const std::string& mode) {
        SampleOptions o;
        o.mode = sampling_mode_from_string(mode);
        return sample_interior(Domain(domain_kind_from_string(domain)), count, seed, o);
      },
      py::arg("domain"), py::arg("count"), py::arg("seed") = 0, py::arg("mode") = "random");

  m.def(
      "contains",
      [](const std::string& domain, const Eigen::MatrixXd& points) {
        const Domain d(domain_kind_from_string(domain));
        std::vector<bool> out(static_cast<std::size_t>(points.rows()));
        Eigen::VectorXd x(points.cols());
        for (Eigen::Index k = 0; k < points.rows(); ++k) {
          x = points.row(k).transpose();
          out[static_cast<std::size_t>(k)] = d.contains(x);
        }
        return out;
      },
      py::arg("domain"), py::arg("points"));

  py::class_<FeatureNetwork>(m, "FeatureNetwork")
      .def_property_readonly("dim", &FeatureNetwork::dim)
      .def_property_readonly("widths", &FeatureNetwork::widths)
      .def_property_readonly("directions", &FeatureNetwork::directions)
      .def_property_readonly("offsets", &FeatureNetwork::offsets)
      .def_property_readonly("deep_weights", &FeatureNetwork::deep_weights)
      .def(
          "evaluate",
          [](const FeatureNetwork& net, const Eigen::MatrixXd& points, bool jacobian, bool laplacian) {
            const EvalBundle b = evaluate(net, points, flags_from(jacobian, laplacian));
            py::dict out;
            out["values"] = b.values;
            if (jacobian) out["jacobian"] = b.jacobian;
            if (laplacian) out["laplacian"] = b.laplacian;
            return out;
          },
          py::arg("points"), py::arg("jacobian") = true, py::arg("laplacian") = true)
      .def("set_output_weights", &FeatureNetwork::set_output_weights)
      .def(
          "predict",
          [](const FeatureNetwork& net, const Eigen::MatrixXd& points, int field) {
            return predict(net, points, field);
          },
          py::arg("points"), py::arg("field") = 0)
      .def("to_json", [](const FeatureNetwork& net) { return to_json(net); })
      .def_static("from_json", [](const std::string& text) { return network_from_json(text); });

  m.def(
      "build_network",
      [](int dim, std::vector<int> widths, double gamma, double delta, Eigen::VectorXd center,
         double radius, const std::string& offsets, std::uint64_t seed) {
        NetworkConfig c;
        c.dim = dim;
        c.widths = std::move(widths);
        c.gamma = gamma;
        c.delta = delta;
        c.ball.center = std::move(center);
        c.ball.radius = radius;
        c.policy.offset_law = offset_law_from_string(offsets);
        c.policy.seed = seed;
        return build_network(c);
      },
      py::arg("dim"), py::arg("widths"), py::arg("gamma") = 2.0, py::arg("delta") = 0.5,
      py::arg("center"), py::arg("radius") = 0.8, py::arg("offsets") = "symmetric-uniform",
      py::arg("seed") = 0);

  m.def(
      "solve_least_squares",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::string& method, double rcond,
         bool svd_fallback, bool equilibrate) {
        SolverOptions o;
        o.method = solve_method_from_string(method);
        o.rcond = rcond;
        o.svd_fallback = svd_fallback;
        o.equilibrate = equilibrate;
        const SolveResult r = solve_least_squares(a, b, o);
        return py::make_tuple(r.coefficients, diagnostics_dict(r.diagnostics));
      },
      py::arg("matrix"), py::arg("rhs"), py::arg("method") = "qr", py::arg("rcond") = -1.0,
      py::arg("svd_fallback") = false, py::arg("equilibrate") = false);

  // Experiments take a YAML (or JSON) config and return the report as JSON text.
  m.def(
      "run_experiment",
      [](const std::string& config) {
        const ExperimentConfig c = config_from_string(config);
        py::gil_scoped_release release;
        return report_to_json(run_experiment(c));
      },
      py::arg("config"));
  m.def(
      "run_sweep",
      [](const std::string& config) {
        const ExperimentConfig c = config_from_string(config);
        py::gil_scoped_release release;
        return report_to_json(run_sweep(c));
      },
      py::arg("config"));

  m.def(
      "fit_sine",
      [](int width, double gamma, double frequency, std::size_t points, std::uint64_t seed) {
        SineFitSetup s;
        s.width = width;
        s.gamma = gamma;
        s.frequency = frequency;
        s.points = points;
        s.seed = seed;
        const SineFit f = fit_sine(s);
        py::dict out;
        out["relative_l2"] = f.result.relative_l2;
        out["alpha"] = f.result.alpha;
        out["diagnostics"] = diagnostics_dict(f.result.diagnostics);
        return out;
      },
      py::arg("width") = 1000, py::arg("gamma") = 14.0, py::arg("frequency") = 30.0,
      py::arg("points") = 1000, py::arg("seed") = 0);

  m.def(
      "density_study",
      [](int dim, std::size_t neurons, double tau, std::size_t points, std::uint64_t seed) {
        const DensityEstimate e = density_study(dim, neurons, tau, points, seed);
        py::dict out;
        out["tau"] = e.tau;
        out["estimate"] = e.estimate;
        out["std_error"] = e.std_error;
        out["pass"] = e.pass;
        return out;
      },
      py::arg("dim"), py::arg("neurons"), py::arg("tau"), py::arg("points"), py::arg("seed") = 0);
}
