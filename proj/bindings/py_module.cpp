#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "uvstat/diagnostics.hpp"
#include "uvstat/experiment.hpp"
#include "uvstat/kernel.hpp"
#include "uvstat/limit_law.hpp"
#include "uvstat/ortho_basis.hpp"
#include "uvstat/process.hpp"
#include "uvstat/ustat_engine.hpp"

namespace py = pybind11;
using namespace uvstat;

namespace {

MarginalLaw marginal_from_name(const std::string& name) {
  if (name == "uniform_symmetric") return MarginalLaw::uniform_symmetric();
  if (name == "signed_geometric") return MarginalLaw::signed_geometric();
  throw std::invalid_argument("unknown marginal '" + name + "'");
}

EigenSeries series_from_arg(const py::object& arg) {
  if (py::isinstance<py::str>(arg)) {
    const std::string name = arg.cast<std::string>();
    if (name == "wiener") return EigenSeries::wiener();
    if (name == "one_over_k") return EigenSeries::one_over_k();
    throw std::invalid_argument("unknown eigenvalue formula '" + name + "'");
  }
  return EigenSeries::list(arg.cast<std::vector<double>>());
}

}  // namespace

PYBIND11_MODULE(_uvstat, m) {
  m.doc() = "U/V statistics of weakly dependent sequences and their limit laws";

  py::class_<BasisSpec>(m, "BasisSpec")
      .def_static("sine_wiener", &BasisSpec::sine_wiener,
                  py::arg("max_index") = 200)
      .def_static("discrete_signed", &BasisSpec::discrete_signed,
                  py::arg("max_index") = 40)
      .def_readonly("max_index", &BasisSpec::max_index)
      .def("describe", &BasisSpec::describe)
      .def("__repr__", &BasisSpec::describe);

  m.def("eval_basis", &eval_basis, py::arg("basis"), py::arg("k"),
        py::arg("t"));
  m.def(
      "gram_matrix",
      [](const BasisSpec& basis, uint32_t upto) {
        return gram_matrix(basis, upto);
      },
      py::arg("basis"), py::arg("upto"));
  m.def(
      "check_orthonormal",
      [](const BasisSpec& basis, uint32_t upto, double tol) {
        const OrthonormalityReport r = check_orthonormal(basis, upto, tol);
        py::dict d;
        d["upto"] = r.upto;
        d["tol"] = r.tol;
        d["max_abs_deviation"] = r.max_abs_deviation;
        d["pass"] = r.pass;
        return d;
      },
      py::arg("basis"), py::arg("upto"), py::arg("tol"));

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static(
          "eigen_diagonal",
          [](const BasisSpec& basis, const py::object& series, uint32_t order) {
            return KernelSpec::eigen_diagonal(basis, series_from_arg(series),
                                              order);
          },
          py::arg("basis"), py::arg("series"), py::arg("order") = 2)
      .def_static(
          "tensor",
          [](const BasisSpec& basis, uint32_t order,
             const std::map<MultiIndex, double>& coeffs) {
            return KernelSpec::tensor(basis, order, coeffs);
          },
          py::arg("basis"), py::arg("order"), py::arg("coeffs"))
      .def("with_diagonal", &KernelSpec::with_diagonal, py::arg("value"))
      .def_readonly("order", &KernelSpec::order)
      .def("is_eigen", &KernelSpec::is_eigen)
      .def("summable", &KernelSpec::summable)
      .def("describe", &KernelSpec::describe)
      .def("hash", &KernelSpec::hash)
      .def("__repr__", &KernelSpec::describe);

  m.def(
      "eval_kernel",
      [](const KernelSpec& k, const std::vector<double>& pts, uint32_t trunc) {
        return eval_kernel(k, pts, trunc);
      },
      py::arg("kernel"), py::arg("points"), py::arg("trunc"));
  m.def("degeneracy_defect", &degeneracy_defect, py::arg("kernel"),
        py::arg("slot"), py::arg("mc_size"), py::arg("seed"));
  m.def("symmetrize", &symmetrize, py::arg("kernel"));
  m.def("is_symmetric", &is_symmetric, py::arg("kernel"));
  m.def("tail_mass", &tail_mass, py::arg("kernel"), py::arg("trunc"));
  m.def("diagonal_expectation", &diagonal_expectation, py::arg("kernel"),
        py::arg("trunc"));
  m.def("signed_min_kernel", &signed_min_kernel, py::arg("t"), py::arg("s"));

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def_static(
          "iid",
          [](const std::string& marginal, uint64_t seed) {
            return ProcessSpec::iid(marginal_from_name(marginal), seed);
          },
          py::arg("marginal"), py::arg("seed"))
      .def_static(
          "one_dependent_shift",
          [](const std::string& marginal, uint64_t seed) {
            return ProcessSpec::one_dependent_shift(marginal_from_name(marginal),
                                                    seed);
          },
          py::arg("marginal"), py::arg("seed"))
      .def("describe", &ProcessSpec::describe)
      .def("hash", &ProcessSpec::hash)
      .def("__repr__", &ProcessSpec::describe);

  m.def("sample_path", &sample_path, py::arg("process"), py::arg("n"),
        py::arg("replicate_id"));
  m.def("lag_moment", &lag_moment, py::arg("process"), py::arg("basis"),
        py::arg("k"), py::arg("l"), py::arg("lag"), py::arg("mc_size") = 0,
        py::arg("replicate_id") = 0);

  m.def(
      "v_stat",
      [](const KernelSpec& k, const std::vector<double>& p, uint32_t trunc) {
        return v_stat_factored(k, p, trunc);
      },
      py::arg("kernel"), py::arg("path"), py::arg("trunc"));
  m.def(
      "u_stat",
      [](const KernelSpec& k, const std::vector<double>& p, uint32_t trunc) {
        return u_stat_factored(k, p, trunc);
      },
      py::arg("kernel"), py::arg("path"), py::arg("trunc"));
  m.def(
      "v_stat_naive",
      [](const KernelSpec& k, const std::vector<double>& p) {
        return v_stat_naive(k, p);
      },
      py::arg("kernel"), py::arg("path"));
  m.def(
      "u_stat_naive",
      [](const KernelSpec& k, const std::vector<double>& p) {
        return u_stat_naive(k, p);
      },
      py::arg("kernel"), py::arg("path"));
  m.def(
      "u0_stat_naive",
      [](const KernelSpec& k, const std::vector<double>& p, bool auto_sym) {
        return u0_stat_naive(k, p, auto_sym);
      },
      py::arg("kernel"), py::arg("path"), py::arg("auto_symmetrize") = false);
  m.def(
      "adjacent_diagonal_average",
      [](const KernelSpec& k, const std::vector<double>& p, uint32_t trunc) {
        return adjacent_diagonal_average(k, p, trunc);
      },
      py::arg("kernel"), py::arg("path"), py::arg("trunc"));
  m.def(
      "u_stat_offdiagonal",
      [](const KernelSpec& k, const std::vector<double>& p, uint32_t trunc) {
        return u_stat_offdiagonal(k, p, trunc);
      },
      py::arg("kernel"), py::arg("path"), py::arg("trunc"));

  m.def("hermite", &hermite, py::arg("k"), py::arg("x"));

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_readonly("sigma", &CovarianceModel::sigma)
      .def_readonly("factor", &CovarianceModel::factor)
      .def_readonly("stderr_map", &CovarianceModel::stderr_map)
      .def_readonly("psd_repaired", &CovarianceModel::psd_repaired)
      .def_readonly("repair_magnitude", &CovarianceModel::repair_magnitude)
      .def("dim", &CovarianceModel::dim)
      .def("hash", &CovarianceModel::hash)
      .def_static("identity", &CovarianceModel::identity, py::arg("n"))
      .def_static("scaled_identity", &CovarianceModel::scaled_identity,
                  py::arg("n"), py::arg("value"));

  m.def(
      "build_covariance",
      [](const ProcessSpec& process, const BasisSpec& basis, uint32_t N,
         uint32_t L, const std::string& mode, std::size_t mc_path_length) {
        return build_covariance(process, basis, N, L,
                                mode == "mc" ? CovarianceMode::kMonteCarlo
                                             : CovarianceMode::kAnalytic,
                                mc_path_length);
      },
      py::arg("process"), py::arg("basis"), py::arg("N"), py::arg("L") = 1,
      py::arg("mode") = "analytic", py::arg("mc_path_length") = 100000);

  m.def("sample_tau", &sample_tau, py::arg("model"), py::arg("master_seed"),
        py::arg("replicate_id"));
  m.def(
      "limit_u_given_tau",
      [](const KernelSpec& k, const std::vector<double>& tau, uint32_t trunc) {
        return limit_u_given_tau(k, tau, trunc);
      },
      py::arg("kernel"), py::arg("tau"), py::arg("trunc"));
  m.def(
      "limit_v_given_tau",
      [](const KernelSpec& k, const std::vector<double>& tau, uint32_t trunc) {
        return limit_v_given_tau(k, tau, trunc);
      },
      py::arg("kernel"), py::arg("tau"), py::arg("trunc"));
  m.def("limit_u_sample", &limit_u_sample, py::arg("kernel"), py::arg("model"),
        py::arg("trunc"), py::arg("master_seed"), py::arg("replicate_id"));
  m.def("limit_v_sample", &limit_v_sample, py::arg("kernel"), py::arg("model"),
        py::arg("trunc"), py::arg("master_seed"), py::arg("replicate_id"));
  m.def("prop2_limit_sample", &prop2_limit_sample, py::arg("kernel"),
        py::arg("model"), py::arg("trunc"), py::arg("master_seed"),
        py::arg("replicate_id"));
  m.def("claimed_quadratic_sample", &claimed_quadratic_sample,
        py::arg("kernel"), py::arg("model"), py::arg("trunc"),
        py::arg("master_seed"), py::arg("replicate_id"));
  m.def("centered_quadratic_sample", &centered_quadratic_sample,
        py::arg("kernel"), py::arg("model"), py::arg("trunc"),
        py::arg("master_seed"), py::arg("replicate_id"));

  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return ks_two_sample(std::span<const double>(a),
                             std::span<const double>(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "wasserstein1",
      [](const std::vector<double>& a, const std::vector<double>& b,
         uint64_t seed) {
        return wasserstein1(std::span<const double>(a),
                            std::span<const double>(b), seed);
      },
      py::arg("a"), py::arg("b"), py::arg("subsample_seed") = 0);

  m.def("list_scenarios", [] {
    py::list out;
    for (const ScenarioInfo& info : list_scenarios())
      out.append(py::make_tuple(info.name, info.summary));
    return out;
  });
  m.def(
      "run_config_file",
      [](const std::string& path, const std::optional<std::string>& scenario,
         const std::optional<uint64_t>& seed,
         const std::optional<std::string>& out,
         const std::optional<unsigned>& workers) {
        ExperimentConfig cfg = load_config_file(path, scenario);
        if (seed) cfg.master_seed = *seed;
        if (out) cfg.out_dir = *out;
        if (workers) cfg.workers = *workers;
        const RunResult r = run_experiment(cfg);
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["pass"] = r.pass;
        d["summary_json"] = r.summary_json;
        return d;
      },
      py::arg("path"), py::arg("scenario") = std::nullopt,
      py::arg("seed") = std::nullopt, py::arg("out") = std::nullopt,
      py::arg("workers") = std::nullopt);
  m.def(
      "run_scenario",
      [](const std::string& scenario, const std::optional<uint64_t>& seed,
         const std::optional<std::string>& out,
         const std::optional<unsigned>& workers) {
        ExperimentConfig cfg = default_config(scenario);
        if (seed) cfg.master_seed = *seed;
        if (out) cfg.out_dir = *out;
        if (workers) cfg.workers = *workers;
        const RunResult r = run_experiment(cfg);
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["pass"] = r.pass;
        d["summary_json"] = r.summary_json;
        return d;
      },
      py::arg("scenario"), py::arg("seed") = std::nullopt,
      py::arg("out") = std::nullopt, py::arg("workers") = std::nullopt);
  m.def("self_check", [] {
    std::ostringstream os;
    const int code = run_self_check(os);
    return py::make_tuple(code, os.str());
  });
}
