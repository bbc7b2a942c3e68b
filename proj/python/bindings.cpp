#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zerorank/are.hpp"
#include "zerorank/dispatch.hpp"
#include "zerorank/errors.hpp"
#include "zerorank/k_sample.hpp"
#include "zerorank/permutation.hpp"
#include "zerorank/rank_core.hpp"
#include "zerorank/twopart_sim.hpp"
#include "zerorank/workflow.hpp"

namespace py = pybind11;
using namespace zerorank;

namespace {

std::vector<GroupSample> to_groups(const std::vector<std::vector<double>>& raw) {
  return {raw.begin(), raw.end()};
}

TestOptions test_options(std::size_t mc_reps, std::uint64_t mc_seed) {
  TestOptions opt;
  opt.mc.replicates = mc_reps;
  opt.mc.seed = mc_seed;
  return opt;
}

py::dict outcome_dict(const TestOutcome& o) {
  py::dict d;
  d["method"] = std::string(to_string(o.method));
  d["statistic"] = o.statistic;
  d["df"] = o.df;
  d["p_value"] = o.p_value;
  d["retained"] = o.n_retained;
  d["notes"] = o.notes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero-truncated Wilcoxon and Kruskal-Wallis tests";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "ZeroRankError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type.get_stored(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def(
      "test",
      [](const std::string& method, const std::vector<std::vector<double>>& groups, std::size_t mc_reps,
         std::uint64_t mc_seed) {
        return outcome_dict(run_test(parse_method(method), to_groups(groups), test_options(mc_reps, mc_seed)));
      },
      py::arg("method"), py::arg("groups"), py::arg("mc_reps") = 10000, py::arg("mc_seed") = 20240601,
      "Run one of w, tw, kw, tkw on a list of groups; returns a dict with statistic, df and p_value.");

  m.def(
      "permutation_test",
      [](const std::string& method, const std::vector<std::vector<double>>& groups, std::size_t permutations,
         std::uint64_t seed, unsigned threads) {
        PermutationOptions opt;
        opt.permutations = permutations;
        opt.seed = seed;
        opt.threads = threads;
        const auto r = perm_test_groups(to_groups(groups), parse_method(method), opt);
        py::dict d;
        d["observed"] = r.observed;
        d["p_value"] = r.p_value;
        d["permutations"] = r.permutations;
        d["exceedances"] = r.exceedances;
        d["degenerate"] = r.degenerate;
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("method"), py::arg("groups"), py::arg("permutations") = 9999, py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def(
      "are_two_sample",
      [](double theta1, double theta2, double delta) { return are_two_sample({theta1, theta2, delta}); },
      py::arg("theta1"), py::arg("theta2"), py::arg("delta"));
  m.def(
      "are_k_sample",
      [](const std::vector<double>& thetas, const std::vector<std::vector<double>>& delta) {
        return are_k_sample({thetas, delta});
      },
      py::arg("thetas"), py::arg("delta_matrix"));
  m.def("delta_beta", &delta_beta, py::arg("alpha_i"), py::arg("alpha_k"),
        "Delta for Beta(alpha_i, 1) against Beta(alpha_k, 1).");
  m.def(
      "delta_matrix_beta", [](const std::vector<double>& alphas) { return delta_matrix_beta(alphas); },
      py::arg("alphas"));
  m.def(
      "delta_fg_mc",
      [](std::pair<double, double> f, std::pair<double, double> g, std::size_t draws, std::uint64_t seed) {
        const auto est = delta_fg_mc({f.first, f.second}, {g.first, g.second}, draws, seed);
        return std::make_pair(est.value, est.std_error);
      },
      py::arg("f"), py::arg("g"), py::arg("draws") = 1000000, py::arg("seed") = 1,
      "Monte Carlo Delta for Beta shapes (alpha, beta); returns (value, std_error).");

  m.def(
      "bh_fdr", [](const std::vector<std::optional<double>>& p) { return bh_fdr(p); }, py::arg("p_values"),
      "Benjamini-Hochberg q-values; None entries stay None.");

  m.def(
      "ranksum_moments_exact",
      [](std::size_t total, std::size_t subset) {
        const auto r = ranksum_moments_exact(total, subset);
        return std::make_pair(r.mean, r.variance);
      },
      py::arg("total"), py::arg("subset"));

  m.def(
      "estimate_var_u",
      [](const std::vector<std::size_t>& sizes, double theta, std::size_t contrast, std::size_t reps,
         std::uint64_t seed) {
        McVarianceConfig mc;
        mc.replicates = reps;
        mc.seed = seed;
        const auto e = estimate_var_U(sizes, theta, contrast, mc);
        py::dict d;
        d["variance"] = e.variance;
        d["mean_conditional_variance"] = e.mean_conditional_variance;
        d["mean_conditional_variance_se"] = e.mean_conditional_variance_se;
        d["variance_of_conditional_mean"] = e.variance_of_conditional_mean;
        return d;
      },
      py::arg("sizes"), py::arg("theta"), py::arg("contrast"), py::arg("replicates") = 10000,
      py::arg("seed") = 20240601);

  m.def(
      "sample_two_part",
      [](double theta, double alpha, double beta, std::size_t n, std::uint64_t seed) {
        auto rng = Rng::stream(seed, 0);
        const auto g = sample_two_part({theta, alpha, beta}, n, rng);
        return std::vector<double>(g.values().begin(), g.values().end());
      },
      py::arg("theta"), py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("seed") = 1);
}
