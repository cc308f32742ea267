#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "likertlv/cutpoints.hpp"
#include "likertlv/io.hpp"
#include "likertlv/polychoric.hpp"
#include "likertlv/reconstruction.hpp"
#include "likertlv/stats.hpp"
#include "likertlv/stem.hpp"
#include "likertlv/study.hpp"

namespace py = pybind11;
using namespace likertlv;

namespace {

using IntCube = py::array_t<int, py::array::c_style | py::array::forcecast>;
using RealCube = py::array_t<double, py::array::c_style>;

// Python side uses (subject, item, time) arrays; the library uses one row per
// subject with column time * items + item.
LikertDataset to_dataset(const IntCube& responses, std::optional<int> num_categories) {
  if (responses.ndim() != 3) throw InputError("responses must be a 3-D array (subject, item, time)");
  const auto n = static_cast<int>(responses.shape(0));
  const auto items = static_cast<int>(responses.shape(1));
  const auto times = static_cast<int>(responses.shape(2));
  const auto r = responses.unchecked<3>();
  LikertDataset d{RowMatrixXi(n, items * times), items, times, 0};
  int highest = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < items; ++j)
      for (int t = 0; t < times; ++t) {
        d.responses(i, latent_index(j, t, items)) = r(i, j, t);
        highest = std::max(highest, r(i, j, t));
      }
  d.num_categories = num_categories.value_or(highest);
  d.validate();
  return d;
}

template <typename T, typename Matrix>
py::array_t<T> to_cube(const Matrix& m, int items, int times) {
  py::array_t<T> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(items),
                      static_cast<py::ssize_t>(times)});
  auto o = out.template mutable_unchecked<3>();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (int j = 0; j < items; ++j)
      for (int t = 0; t < times; ++t) o(i, j, t) = m(i, latent_index(j, t, items));
  return out;
}

ModelParams params(const Eigen::VectorXd& sigma, const Eigen::VectorXd& tau) {
  ModelParams p{sigma, tau};
  p.validate();
  return p;
}

CutPointSet cut_set(const RowMatrixXd& cuts) {
  CutPointSet c{cuts, static_cast<int>(cuts.cols()) + 1};
  c.validate();
  return c;
}

py::dict params_dict(const ModelParams& p) {
  py::dict d;
  d["sigma"] = p.sigma;
  d["tau"] = p.tau;
  d["gamma_sq"] = p.gamma_sq();
  return d;
}

py::dict report_dict(const RmseReport& r) {
  py::dict d;
  d["replicates"] = r.replicates;
  d["failures"] = r.failures;
  d["failure_messages"] = r.failure_messages;
  d["wall_seconds"] = r.wall_seconds;
  if (r.has_cr) {
    d["cr_sigma"] = r.cr_sigma;
    d["cr_tau"] = r.cr_tau;
  }
  if (r.has_stem) {
    d["stem_sigma"] = r.stem_sigma;
    d["stem_tau"] = r.stem_tau;
    d["stem_cuts"] = r.stem_cuts;
  }
  d["mm_cuts"] = r.mm_cuts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent-variable estimation for longitudinal Likert data";

  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("norm_cdf", py::vectorize(norm_cdf), py::arg("x"));
  m.def("norm_quantile", py::vectorize(norm_quantile), py::arg("p"));
  m.def("bivariate_norm_cdf", py::vectorize(bivariate_norm_cdf), py::arg("x"), py::arg("y"), py::arg("rho"));

  m.def(
      "build_covariance",
      [](const Eigen::VectorXd& sigma, const Eigen::VectorXd& tau, int times) {
        return build_covariance(params(sigma, tau), times);
      },
      py::arg("sigma"), py::arg("tau"), py::arg("times"));

  m.def(
      "canonicalize",
      [](const Eigen::VectorXd& sigma, const Eigen::VectorXd& tau) {
        const ModelParams c = canonicalize(params(sigma, tau));
        return py::make_tuple(c.sigma, c.tau);
      },
      py::arg("sigma"), py::arg("tau"));

  m.def(
      "simulate",
      [](const Eigen::VectorXd& sigma, const Eigen::VectorXd& tau, const RowMatrixXd& cuts, int subjects, int times,
         std::uint64_t seed) {
        const SimulatedData s = simulate(params(sigma, tau), cut_set(cuts), subjects, times, seed);
        return py::make_tuple(to_cube<double>(s.latent.latent, s.latent.items, times),
                              to_cube<int>(s.observed.responses, s.observed.items, times));
      },
      py::arg("sigma"), py::arg("tau"), py::arg("cuts"), py::arg("subjects"), py::arg("times"), py::arg("seed"),
      "Returns (latent, responses), both shaped (subject, item, time).");

  m.def(
      "estimate_cuts",
      [](const IntCube& responses, std::optional<int> num_categories) {
        const CutPointEstimate e = estimate_cuts(to_dataset(responses, num_categories));
        py::dict d;
        d["pooled"] = e.pooled.cuts;
        py::list per_time;
        for (const auto& c : e.per_time) per_time.append(c);
        d["per_time"] = per_time;
        d["warnings"] = e.warnings;
        return d;
      },
      py::arg("responses"), py::arg("num_categories") = py::none());

  m.def(
      "fit_pair",
      [](const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& counts,
         const std::vector<double>& cuts1, const std::vector<double>& cuts2) {
        if (counts.ndim() != 2 || counts.shape(0) != counts.shape(1))
          throw InputError("counts must be a square 2-D array");
        PairTable table(static_cast<int>(counts.shape(0)));
        const auto c = counts.unchecked<2>();
        for (int a = 1; a <= table.categories; ++a)
          for (int b = 1; b <= table.categories; ++b) table.at(a, b) = c(a - 1, b - 1);
        const PolychoricFit f = fit_pair(table, cuts1, cuts2);
        py::dict d;
        d["rho"] = f.rho;
        d["log_likelihood"] = f.log_likelihood;
        d["converged"] = f.converged;
        return d;
      },
      py::arg("counts"), py::arg("cuts1"), py::arg("cuts2"));

  m.def(
      "reconstruct",
      [](const IntCube& responses, std::optional<int> num_categories) {
        const LikertDataset data = to_dataset(responses, num_categories);
        return reconstruct(data, estimate_cuts(data)).matrix;
      },
      py::arg("responses"), py::arg("num_categories") = py::none());

  m.def(
      "fit_cr",
      [](const IntCube& responses, std::optional<int> num_categories) {
        const LikertDataset data = to_dataset(responses, num_categories);
        const CutPointEstimate mm = estimate_cuts(data);
        FitResult fit;
        {
          py::gil_scoped_release release;
          fit = fit_frobenius(reconstruct(data, mm.pooled));
        }
        py::dict d = params_dict(fit.params);
        d["objective"] = fit.objective;
        d["converged"] = fit.converged;
        d["cuts"] = mm.pooled.cuts;
        d["warnings"] = mm.warnings;
        return d;
      },
      py::arg("responses"), py::arg("num_categories") = py::none(),
      "Correlation reconstruction: method-of-moments cuts, polychoric matrix, Frobenius fit.");

  m.def(
      "run_stem",
      [](const IntCube& responses, std::optional<int> num_categories, int iterations, int burn_in, int gibbs_sweeps,
         std::uint64_t seed, int threads) {
        const LikertDataset data = to_dataset(responses, num_categories);
        StemConfig config;
        config.iterations = iterations;
        config.burn_in = burn_in;
        config.gibbs_sweeps = gibbs_sweeps;
        config.seed = seed;
        config.threads = threads;
        StemChain chain;
        {
          py::gil_scoped_release release;
          chain = run_stem(data, config);
        }
        py::dict d = params_dict(chain.final_params);
        d["cuts"] = chain.final_cuts.cuts;
        d["sigma_trace"] = chain.sigma_trace;
        d["tau_trace"] = chain.tau_trace;
        d["cut_trace"] = chain.cut_trace;
        d["burn_in"] = chain.burn_in;
        d["diagnostics"] = chain.diagnostics;
        return d;
      },
      py::arg("responses"), py::arg("num_categories") = py::none(), py::arg("iterations") = 1000,
      py::arg("burn_in") = -1, py::arg("gibbs_sweeps") = 10, py::arg("seed") = 1, py::arg("threads") = 1,
      "Stochastic EM. burn_in=-1 means a tenth of the iterations.");

  m.def(
      "run_study",
      [](const std::string& config_json) {
        const StudyConfig config = study_config_from_json(nlohmann::json::parse(config_json));
        RmseReport report;
        {
          py::gil_scoped_release release;
          report = run_study(config);
        }
        return report_dict(report);
      },
      py::arg("config_json"), "Monte Carlo RMSE study from a JSON config string.");

  m.def(
      "autocorrelation",
      [](const std::vector<double>& series, int max_lag) { return autocorrelation(series, max_lag); },
      py::arg("series"), py::arg("max_lag"));
}
