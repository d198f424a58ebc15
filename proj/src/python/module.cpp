#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "crisk/backend.hpp"
#include "crisk/error.hpp"
#include "crisk/experiments.hpp"
#include "crisk/report.hpp"
#include "crisk/risk.hpp"
#include "crisk/smoothing.hpp"
#include "crisk/wavelet.hpp"

namespace py = pybind11;
using namespace crisk;

namespace {

Distribution make_distribution(const std::string& family, double mean, std::optional<double> scale,
                               std::optional<double> df, const RiskSpec& risk) {
  if (family == "normal") {
    if (scale) return Normal{mean, *scale};
    return Normal{mean, resolve_normal_scale(mean, 3.0, risk, 15.5163, 14.5048).stddev};
  }
  if (family == "t") return ShiftedT{df.value_or(60.0), mean};
  if (family == "point") return PointMass{mean};
  fail(ErrorKind::BadParameters, "unknown distribution family '" + family + "'");
}

py::object json_to_python(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

std::string python_to_json(const py::object& obj) { return py::module_::import("json").attr("dumps")(obj).cast<std::string>(); }

}  // namespace

PYBIND11_MODULE(_crisk, m) {
  m.doc() = "Composite risk estimators with kernel and wavelet smoothing";

  static py::exception<Error> error(m, "CriskError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(to_string(e.kind()), e.what()).ptr());
    }
  });

  m.def(
      "oracle",
      [](const std::string& dist, double mean, std::optional<double> scale, std::optional<double> df, double alpha,
         double q) {
        const RiskSpec risk{HigherOrderInverse{q, alpha, 1.0}, Orientation::Losses};
        const Distribution d = make_distribution(dist, mean, scale, df, risk);
        const OracleValue v = true_value_oracle(d, risk);
        py::dict out;
        out["theta0"] = v.theta0;
        out["u_star"] = v.u_star;
        out["stddev"] = distribution_stddev(d);
        return out;
      },
      py::arg("dist") = "normal", py::arg("mean") = 10.0, py::arg("scale") = py::none(), py::arg("df") = py::none(),
      py::arg("alpha") = 0.05, py::arg("q") = 2.0);

  m.def(
      "estimate_risk",
      [](const std::vector<double>& data, const std::string& risk, const std::string& estimator, double opt_tol) {
        const Estimate e = estimate_risk(Sample::scalar(data), parse_risk_token(risk), parse_backend_token(estimator), opt_tol);
        py::dict out;
        out["theta"] = e.theta;
        out["u_star"] = e.u_star;
        out["bandwidth"] = e.bandwidth;
        out["resolution"] = e.resolution;
        return out;
      },
      py::arg("data"), py::arg("risk") = "hor:q=2,alpha=0.05", py::arg("estimator") = "plugin",
      py::arg("opt_tol") = 1e-8);

  m.def(
      "bandwidth_rule", [](const std::vector<double>& data) { return bandwidth_rule(Sample::scalar(data)); },
      py::arg("data"));

  m.def("resolution_rule", [](std::size_t n) { return resolution_rule(n); }, py::arg("n"));

  m.def(
      "kernel_density",
      [](const std::vector<double>& data, const std::vector<double>& points, const std::string& kernel,
         std::optional<double> bandwidth) {
        const Sample s = Sample::scalar(data);
        const Kernel k(kernel_family_from_string(kernel));
        const double h = bandwidth ? *bandwidth : bandwidth_rule(s);
        std::vector<double> out;
        out.reserve(points.size());
        for (double x : points) out.push_back(kernel_density(s, k, h, x));
        return out;
      },
      py::arg("data"), py::arg("points"), py::arg("kernel") = "gaussian", py::arg("bandwidth") = py::none());

  m.def(
      "wavelet_density",
      [](const std::vector<double>& data, const std::vector<double>& points, const std::string& family,
         std::optional<int> resolution) {
        const Sample s = Sample::scalar(data);
        const WaveletDensity d =
            wavelet_density(s, ScalingFunction(scaling_family_from_string(family)), resolution.value_or(resolution_rule(s.size())));
        std::vector<double> out;
        out.reserve(points.size());
        for (double x : points) out.push_back(d(x));
        return out;
      },
      py::arg("data"), py::arg("points"), py::arg("family") = "quadratic", py::arg("resolution") = py::none());

  m.def(
      "sample",
      [](const std::string& dist, std::size_t n, std::uint64_t seed, double mean, std::optional<double> scale,
         std::optional<double> df) {
        const RiskSpec risk{HigherOrderInverse{}, Orientation::Losses};
        const Sample s = sample_generator(make_distribution(dist, mean, scale, df, risk), n, seed);
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.at(i, 0);
        return out;
      },
      py::arg("dist"), py::arg("n"), py::arg("seed"), py::arg("mean") = 10.0, py::arg("scale") = py::none(),
      py::arg("df") = py::none());

  m.def(
      "bias_study",
      [](const py::object& config) {
        const ExperimentConfig c = config_from_json(python_to_json(config));
        BiasReport report;
        {
          py::gil_scoped_release release;
          report = run_bias_study(c);
        }
        return json_to_python(report_to_json(report, -1));
      },
      py::arg("config"));
}
