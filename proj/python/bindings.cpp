#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <vector>

#include "vgfit/asymptotics.hpp"
#include "vgfit/gen_laplace.hpp"
#include "vgfit/mle.hpp"
#include "vgfit/mme.hpp"
#include "vgfit/simlab.hpp"
#include "vgfit/special_fn.hpp"

namespace py = pybind11;
using namespace vgfit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& xs) {
  if (xs.ndim() != 1) throw py::value_error("expected a 1-d array");
  return {xs.data(), static_cast<std::size_t>(xs.shape(0))};
}

py::array_t<double> to_array(std::vector<double> v) {
  auto* heap = new std::vector<double>(std::move(v));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
  const auto n = static_cast<py::ssize_t>(heap->size());
  return py::array_t<double>({n}, {static_cast<py::ssize_t>(sizeof(double))}, heap->data(), owner);
}

py::dict stats_dict(const ParamStats& s) {
  py::dict d;
  d["bias"] = s.bias;
  d["mse"] = s.mse;
  d["se"] = s.se;
  d["mse_se"] = s.mse_se;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symmetric variance-gamma distribution: sampling and estimation";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("log_gamma", &special::log_gamma, py::arg("x"));
  m.def("digamma", &special::digamma, py::arg("x"));
  m.def("log_bessel_k", &special::log_bessel_k, py::arg("nu"), py::arg("x"));

  py::class_<Params>(m, "Params")
      .def(py::init<double, double, double>(), py::arg("a"), py::arg("b"), py::arg("m") = 0.0)
      .def_readonly("a", &Params::a)
      .def_readonly("b", &Params::b)
      .def_readonly("m", &Params::m)
      .def("__repr__", [](const Params& p) {
        return "Params(a=" + py::repr(py::float_(p.a)).cast<std::string>() +
               ", b=" + py::repr(py::float_(p.b)).cast<std::string>() +
               ", m=" + py::repr(py::float_(p.m)).cast<std::string>() + ")";
      });

  py::class_<PopulationMoments>(m, "PopulationMoments")
      .def_readonly("V", &PopulationMoments::V)
      .def_readonly("K", &PopulationMoments::K)
      .def_readonly("A", &PopulationMoments::A)
      .def_readonly("T", &PopulationMoments::T)
      .def_readonly("M6", &PopulationMoments::M6)
      .def_readonly("M8", &PopulationMoments::M8);

  m.def("pdf", py::vectorize([](double a, double b, double mm, double x) { return pdf(Params(a, b, mm), x); }),
        py::arg("a"), py::arg("b"), py::arg("m"), py::arg("x"));
  m.def("log_pdf", py::vectorize([](double a, double b, double mm, double x) { return log_pdf(Params(a, b, mm), x); }),
        py::arg("a"), py::arg("b"), py::arg("m"), py::arg("x"));
  m.def("cf", [](const Params& p, double w) { return cf(p, w); }, py::arg("params"), py::arg("w"));
  m.def("population_moments", &population_moments, py::arg("params"));
  m.def(
      "sample",
      [](const Params& p, std::size_t n, std::uint64_t seed, unsigned threads) {
        std::vector<double> xs;
        {
          py::gil_scoped_release release;
          xs = sample(p, n, seed, threads);
        }
        return to_array(std::move(xs));
      },
      py::arg("params"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);

  py::class_<MomentSummary>(m, "MomentSummary")
      .def_readonly("n", &MomentSummary::n)
      .def_readonly("mean", &MomentSummary::mean)
      .def_readonly("v_hat", &MomentSummary::v_hat)
      .def_readonly("k_hat", &MomentSummary::k_hat)
      .def_readonly("a_hat_abs", &MomentSummary::a_hat_abs)
      .def_readonly("known_m", &MomentSummary::known_m)
      .def_property_readonly("V", &MomentSummary::V)
      .def_property_readonly("K", &MomentSummary::K)
      .def_property_readonly("A", &MomentSummary::A);
  m.def("summarize", [](const Array& xs, std::optional<double> known_m) { return summarize(view(xs), known_m); },
        py::arg("xs"), py::arg("known_m") = py::none());

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("feasible", &FitResult::feasible)
      .def_readonly("message", &FitResult::message)
      .def_readonly("diagnostics", &FitResult::diagnostics);
  m.def("classic_mme", &classic_mme, py::arg("summary"));
  m.def("modified_mme", &modified_mme, py::arg("summary"));

  py::class_<MleConfig>(m, "MleConfig")
      .def(py::init<>())
      .def_readwrite("max_iter", &MleConfig::max_iter)
      .def_readwrite("tol_value", &MleConfig::tol_value)
      .def_readwrite("tol_diameter", &MleConfig::tol_diameter)
      .def_readwrite("initial_step", &MleConfig::initial_step)
      .def_readwrite("init", &MleConfig::init)
      .def_readwrite("log_parameterized", &MleConfig::log_parameterized);
  m.def(
      "fit_mle",
      [](const Array& xs, const MleConfig& cfg, std::optional<double> known_m) {
        const auto v = view(xs);
        py::gil_scoped_release release;
        return fit_mle(v, cfg, known_m);
      },
      py::arg("xs"), py::arg("config") = MleConfig{}, py::arg("known_m") = py::none());
  m.def("neg_log_likelihood", [](const Params& p, const Array& xs) { return neg_log_likelihood(p, view(xs)); },
        py::arg("params"), py::arg("xs"));

  m.def("L", &L, py::arg("a"));
  m.def("L_prime", &L_prime, py::arg("a"));
  m.def("L_infinity", &L_infinity);
  m.def("ell", &ell, py::arg("u"));

  py::enum_<CovMode>(m, "CovMode").value("Paper", CovMode::Paper).value("Centered", CovMode::Centered);
  py::enum_<Estimator>(m, "Estimator").value("Classic", Estimator::Classic).value("Modified", Estimator::Modified);
  auto cov2 = [](const Cov2& c) { return std::vector<std::vector<double>>{{c.aa, c.ab}, {c.ab, c.bb}}; };
  m.def("classic_cov", [cov2](double a, double b) { return cov2(classic_cov(a, b)); }, py::arg("a"), py::arg("b"));
  m.def(
      "modified_cov", [cov2](double a, double b, CovMode mode) { return cov2(modified_cov(a, b, mode)); },
      py::arg("a"), py::arg("b"), py::arg("mode") = CovMode::Centered);
  m.def(
      "full_cov", [](double a, double b, Estimator e, CovMode mode) { return full_cov(a, b, e, mode).m; },
      py::arg("a"), py::arg("b"), py::arg("estimator"), py::arg("mode") = CovMode::Centered);

  m.def(
      "run_grid",
      [](std::vector<double> a_values, std::vector<double> b_values, std::size_t N, std::size_t k, bool m_known,
         std::vector<std::string> estimators, std::uint64_t seed, unsigned threads) {
        SimGrid g;
        g.a_values = std::move(a_values);
        g.b_values = std::move(b_values);
        g.N = N;
        g.k = k;
        g.m_known = m_known;
        g.seed = seed;
        g.threads = threads;
        std::vector<SimEstimator> ests;
        for (const auto& s : estimators) ests.push_back(sim_estimator_from_string(s));
        std::vector<SimRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_grid(g, ests);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["a"] = r.a;
          d["b"] = r.b;
          d["N"] = r.N;
          d["k"] = r.k;
          d["estimator"] = std::string(to_string(r.estimator));
          d["a_hat"] = stats_dict(r.a_hat);
          d["b_hat"] = stats_dict(r.b_hat);
          d["m_hat"] = stats_dict(r.m_hat);
          d["feasibility_rate"] = r.feasibility_rate;
          d["failure_count"] = r.failure_count;
          out.append(d);
        }
        return out;
      },
      py::arg("a_values"), py::arg("b_values"), py::arg("N") = 1000, py::arg("k") = 10000, py::arg("m_known") = true,
      py::arg("estimators") = std::vector<std::string>{"classic", "modified"}, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def(
      "feasibility_table",
      [](double a, double b, std::vector<std::size_t> Ns, std::size_t k, std::uint64_t seed, unsigned threads) {
        std::vector<FeasibilityRow> rows;
        {
          py::gil_scoped_release release;
          rows = feasibility_table(a, b, Ns, k, seed, threads);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["N"] = r.N;
          d["p_modified"] = r.p_modified;
          d["p_classic"] = r.p_classic;
          out.append(d);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("N_values"), py::arg("k") = 10000, py::arg("seed") = 0,
      py::arg("threads") = 1);
}
