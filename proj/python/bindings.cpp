#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>

#include "taylorlaw/analysis.hpp"
#include "taylorlaw/error.hpp"
#include "taylorlaw/moments.hpp"
#include "taylorlaw/tailfit.hpp"

namespace py = pybind11;
using namespace taylorlaw;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw ParameterError("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_numpy(std::vector<double> v) {
  auto* heap = new std::vector<double>(std::move(v));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
  return py::array_t<double>(static_cast<py::ssize_t>(heap->size()), heap->data(), owner);
}

py::dict fit_dict(const FitResult& fit) {
  py::dict d;
  d["family"] = to_string(fit.family);
  d["params"] = fit.params;
  d["implied_tail_index"] = fit.implied_tail_index;
  d["objective"] = fit.objective;
  d["iterations"] = fit.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_taylorlaw, m) {
  m.doc() = "Heavy-tailed sample moments, Hill estimation and tail fits";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());

  m.def("sample_pareto", [](double x_min, double alpha, std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
    return to_numpy(sample_pareto(x_min, alpha, n, seed, replicate).values);
  }, py::arg("x_min"), py::arg("alpha"), py::arg("n"), py::arg("seed") = 0, py::arg("replicate") = 0);
  m.def("sample_f1", [](double alpha, std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
    return to_numpy(sample_f1(alpha, n, seed, replicate).values);
  }, py::arg("alpha"), py::arg("n"), py::arg("seed") = 0, py::arg("replicate") = 0);

  m.def("summarize", [](const Array& data) {
    const auto s = summarize(view(data));
    py::dict d;
    d["n"] = s.n;
    d["mean"] = s.mean;
    d["variance"] = s.variance;
    d["raw"] = s.m_raw;
    d["central"] = s.m_central;
    d["lower"] = s.m_lower;
    d["upper"] = s.m_upper;
    d["lower_local"] = s.m_lower_local;
    d["upper_local"] = s.m_upper_local;
    d["count_lower"] = s.count_lower;
    d["count_upper"] = s.count_upper;
    return d;
  }, py::arg("data"));

  m.def("iota", &iota, py::arg("h"), py::arg("k"), py::arg("alpha"));
  m.def("iota_plus", &iota_plus, py::arg("h"), py::arg("alpha"));
  m.def("implied_alpha", &implied_alpha, py::arg("variance_ratio"));
  m.def("variance_limit", [](double alpha) { return theoretical_limit({limit::Variance{}, alpha}); },
        py::arg("alpha"));

  m.def("hill", [](const Array& data, std::size_t k) { return hill(view(data), k); }, py::arg("data"), py::arg("k"));
  m.def("hill_k", &hill_k, py::arg("n"), py::arg("theta"));
  m.def("alt_hill_curve", [](const Array& data, std::vector<double> thetas, std::size_t bootstrap, double level,
                             std::uint64_t seed) {
    HillCurveOptions options;
    options.bootstrap_replicates = bootstrap;
    options.level = level;
    options.seed = seed;
    const auto c = alt_hill_curve(view(data), thetas, options);
    py::dict d;
    d["theta"] = c.thetas;
    d["k"] = c.ks;
    d["hill"] = c.estimates;
    d["smoothed"] = c.smoothed;
    d["ci_low"] = c.ci_low;
    d["ci_high"] = c.ci_high;
    return d;
  }, py::arg("data"), py::arg("thetas"), py::arg("bootstrap") = 0, py::arg("level") = 0.99, py::arg("seed") = 0);

  m.def("taylor_regression", [](const Array& data, std::vector<std::size_t> sizes, std::uint64_t seed,
                                double log_base) {
    const auto r = ols_fit(taylor_points(view(data), sizes, seed, log_base));
    py::dict d;
    d["slope"] = r.slope;
    d["intercept"] = r.intercept;
    d["slope_ci95"] = py::make_tuple(r.slope_ci95.low, r.slope_ci95.high);
    d["slope_ci99"] = py::make_tuple(r.slope_ci99.low, r.slope_ci99.high);
    d["r2"] = r.r2;
    d["adj_r2"] = r.adj_r2;
    d["implied_alpha"] = r.implied_alpha;
    d["points_used"] = r.points.size();
    d["skipped"] = r.skipped;
    return d;
  }, py::arg("data"), py::arg("sizes"), py::arg("seed") = 0, py::arg("log_base") = 10.0);

  m.def("fit_pareto_ls", [](const Array& data) { return fit_dict(fit_pareto_ls(view(data))); }, py::arg("data"));
  m.def("fit_gpd", [](const Array& data, double threshold) { return fit_dict(fit_gpd_mle(view(data), threshold)); },
        py::arg("data"), py::arg("threshold"));
  m.def("fit_negbinomial", [](const Array& counts) { return fit_dict(fit_negbinomial(view(counts))); },
        py::arg("counts"));
}
