// zerorank command-line interface.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 nothing testable.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zerorank/are.hpp"
#include "zerorank/errors.hpp"
#include "zerorank/io.hpp"
#include "zerorank/twopart_sim.hpp"
#include "zerorank/workflow.hpp"

namespace {

using nlohmann::json;
using namespace zerorank;

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kDegenerate = 3;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to `path`, or stdout for "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::input, "cannot write " + path);
  write(out);
  if (!out) throw Error(ErrorKind::input, "failed writing " + path);
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Usage(std::string(flag) + ": not a number '" + item + "'");
    }
  }
  if (out.empty()) throw Usage(std::string(flag) + ": empty list");
  return out;
}

// ---------------------------------------------------------------------------
// test / test-longitudinal

struct TestArgs {
  std::string table, meta, method = "tw", fdr = "bh", out = "-";
  double alpha = 0.1;
  std::size_t permutations = 0;
  std::uint64_t seed = 1;
  std::size_t mc_reps = 10000;
  unsigned threads = 1;
  bool json = false;
};

int run_test_command(const TestArgs& a, bool longitudinal) {
  Method method;
  try {
    method = parse_method(a.method);
  } catch (const Error& e) {
    throw Usage(e.what());
  }
  if (a.fdr != "bh" && a.fdr != "none") throw Usage("--fdr must be bh or none");
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw Usage("--alpha must lie in (0, 1)");
  if (a.mc_reps < 100) throw Usage("--mc-reps must be >= 100");
  if (a.permutations > 0 && a.permutations < 99) throw Usage("--permutations must be 0 or >= 99");
  if (longitudinal && a.permutations == 0) throw Usage("test-longitudinal needs --permutations >= 99");

  const auto table = load_table(a.table);
  const auto meta = load_metadata(a.meta);

  AnalysisOptions opt;
  opt.permutations = a.permutations;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.fdr = a.fdr == "bh";
  opt.test.mc.replicates = a.mc_reps;
  opt.test.mc.seed = a.seed;

  const auto result = longitudinal ? run_longitudinal(table, meta, method, opt)
                                   : run_differential_abundance(table, meta, method, opt);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  emit(a.out, [&](std::ostream& os) {
    if (a.json) {
      write_results_json(os, result);
    } else {
      write_results_tsv(os, result);
    }
  });

  const auto testable = result.testable();
  std::size_t significant = 0;
  for (const auto& r : result.rows) {
    const auto& v = opt.fdr ? r.q_value : r.p_value;
    if (v && *v <= a.alpha) ++significant;
  }
  std::cerr << significant << " of " << testable << " testable taxa (" << result.rows.size()
            << " total) at " << (opt.fdr ? "q" : "p") << " <= " << a.alpha << '\n';
  if (testable == 0) {
    std::cerr << "error: the test is undefined for every taxon\n";
    return kDegenerate;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

TwoPartSpec spec_from(const json& j) {
  TwoPartSpec s;
  s.theta = j.at("theta").get<double>();
  s.alpha = j.at("alpha").get<double>();
  s.beta = j.at("beta").get<double>();
  return s;
}

BetaShape shape_from(const json& j) {
  return {j.at("alpha").get<double>(), j.at("beta").get<double>()};
}

// "sizes" is either a list of size vectors, or {"base": [...], "multipliers": [...]}
// giving N_k = round(base * multiplier_k) with the base reported as the grid N.
void sizes_from(const json& j, ExperimentConfig& c) {
  if (j.is_array()) {
    c.sizes = j.get<std::vector<std::vector<std::size_t>>>();
    return;
  }
  const auto base = j.at("base").get<std::vector<std::size_t>>();
  const auto mult = j.at("multipliers").get<std::vector<double>>();
  for (auto n : base) {
    std::vector<std::size_t> sz;
    for (double m : mult) {
      if (!(m > 0.0)) throw Error(ErrorKind::config, "multipliers must be positive");
      sz.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(n) * m)));
    }
    c.sizes.push_back(std::move(sz));
    c.grid_n.push_back(n);
  }
}

ExperimentConfig experiment_from(const json& j) {
  ExperimentConfig c;
  for (const auto& s : j.at("specs")) c.specs.push_back(spec_from(s));
  sizes_from(j.at("sizes"), c);
  c.replicates = j.at("replicates").get<std::size_t>();
  if (j.contains("alphas")) c.alphas = j["alphas"].get<std::vector<double>>();
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  c.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("depth_reduction") && !j["depth_reduction"].is_null()) {
    const auto& d = j["depth_reduction"];
    DepthReductionSpec spec;
    spec.zero_prob = d.value("zero_prob", spec.zero_prob);
    spec.target_fraction = d.value("target_fraction", spec.target_fraction);
    c.depth_reduction = spec;
  }
  c.mc.replicates = j.value("mc_reps", c.mc.replicates);
  c.mc.seed = j.value("mc_seed", c.mc.seed);
  c.threads = j.value("threads", 1u);
  return c;
}

// {"f": {...}, "g": {...}, "sizes": [n1, n2], "replicates": R, "seed": S,
//  "thetas": [...], "spread": d} runs theta1 = theta - d, theta2 = theta + d;
// alternatively "settings": [{"theta1": .., "theta2": ..}, ...].
// "delta" overrides the Monte Carlo effect size used for the theoretical value.
std::string run_are_simulation(const json& j) {
  const auto f = shape_from(j.at("f"));
  const auto g = shape_from(j.at("g"));
  std::vector<std::pair<double, double>> settings;
  if (j.contains("settings")) {
    for (const auto& s : j["settings"]) {
      settings.emplace_back(s.at("theta1").get<double>(), s.at("theta2").get<double>());
    }
  } else {
    const double spread = j.value("spread", 0.1);
    for (double t : j.at("thetas").get<std::vector<double>>()) {
      settings.emplace_back(t - spread, t + spread);
    }
  }
  std::size_t n1 = 40, n2 = 50;
  if (j.contains("sizes")) {
    const auto sz = j["sizes"].get<std::vector<std::size_t>>();
    if (sz.size() != 2) throw Error(ErrorKind::config, "ARE simulation needs two group sizes");
    n1 = sz[0];
    n2 = sz[1];
  }
  const auto seed = j.value("seed", std::uint64_t{1});
  double delta = 0.0;
  if (j.contains("delta")) {
    delta = j["delta"].get<double>();
  } else {
    delta = delta_fg_mc(f, g, j.value("delta_draws", std::size_t{1000000}), stream_key(seed, 0x64)).value;
  }

  std::ostringstream out;
  out << "method\tsetting\talpha_or_N\testimate\tstd_err\n";
  for (const auto& [t1, t2] : settings) {
    EmpiricalAreSetting s;
    s.theory = {t1, t2, delta};
    s.f = f;
    s.g = g;
    s.n1 = n1;
    s.n2 = n2;
    s.replicates = j.value("replicates", std::size_t{10000});
    s.seed = seed;
    s.threads = j.value("threads", 1u);
    const auto emp = run_empirical_are(s);
    const auto label = "theta1=" + format_double(t1) + ",theta2=" + format_double(t2);
    const auto total = std::to_string(n1 + n2);
    out << "ARE-empirical\t" << label << '\t' << total << '\t' << format_double(emp.value) << "\tNA\n";
    out << "ARE-theory\t" << label << '\t' << total << '\t'
        << format_double(are_two_sample(s.theory)) << "\tNA\n";
  }
  return out.str();
}

int run_simulate(const std::string& kind, const std::string& config_path, const std::string& out) {
  std::ifstream in(config_path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, config_path + ": " + e.what());
  }
  std::string text;
  try {
    if (kind == "are") {
      text = run_are_simulation(j);
    } else {
      const auto config = experiment_from(j);
      text = rate_table_tsv(kind == "type1" ? run_type1(config) : run_power(config));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, config_path + ": " + e.what());
  }
  emit(out, [&](std::ostream& os) { os << text; });
  return 0;
}

// ---------------------------------------------------------------------------
// are

std::vector<std::vector<double>> load_delta_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path);
  std::vector<std::vector<double>> m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& cell : split_tsv_line(line)) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": not a number '" +
                                          cell + "'");
      }
    }
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-truncated rank tests for zero-inflated data"};
  app.require_subcommand(1);

  TestArgs targs, largs;
  largs.method = "tkw";
  auto add_test_flags = [](CLI::App* cmd, TestArgs& targs) {
    cmd->add_option("--table", targs.table, "abundance table (TSV)")->required();
    cmd->add_option("--meta", targs.meta, "sample metadata (TSV)")->required();
    cmd->add_option("--method", targs.method, "w, tw, kw or tkw");
    cmd->add_option("--permutations", targs.permutations, "permutation count, 0 for asymptotic");
    cmd->add_option("--seed", targs.seed, "random seed");
    cmd->add_option("--mc-reps", targs.mc_reps, "Monte Carlo replicates for the unequal-size tKW variance");
    cmd->add_option("--out", targs.out, "output path, - for stdout");
    cmd->add_option("--threads", targs.threads, "worker threads, 0 for all cores");
    cmd->add_option("--alpha", targs.alpha, "significance level for the summary count");
    cmd->add_option("--fdr", targs.fdr, "bh or none");
    cmd->add_flag("--json", targs.json, "one JSON object per row");
  };
  auto* test = app.add_subcommand("test", "per-taxon test between sample groups");
  add_test_flags(test, targs);
  auto* longi = app.add_subcommand("test-longitudinal", "per-taxon test across timepoints with within-subject permutation");
  add_test_flags(longi, largs);

  std::string sim_kind, sim_config, sim_out = "-";
  auto* sim = app.add_subcommand("simulate", "Type I error, power or empirical ARE experiments");
  sim->add_option("kind", sim_kind, "type1, power or are")
      ->required()
      ->check(CLI::IsMember({"type1", "power", "are"}));
  sim->add_option("--config", sim_config, "experiment config (JSON)")->required();
  sim->add_option("--out", sim_out, "output path, - for stdout");

  auto* are = app.add_subcommand("are", "asymptotic relative efficiency");
  are->require_subcommand(1);
  double theta1 = 0, theta2 = 0, delta = 0;
  auto* two = are->add_subcommand("two-sample", "truncated vs standard Wilcoxon");
  two->add_option("--theta1", theta1)->required();
  two->add_option("--theta2", theta2)->required();
  two->add_option("--delta", delta, "P(x<y) + P(x=y)/2 - 1/2 of the continuous parts")->required();
  std::string thetas_text, alphas_text, matrix_path;
  auto* ks = are->add_subcommand("k-sample", "truncated vs standard Kruskal-Wallis");
  ks->add_option("--thetas", thetas_text, "comma-separated non-zero probabilities")->required();
  auto* alphas_opt = ks->add_option("--alphas", alphas_text, "Beta(alpha, 1) shapes, comma-separated");
  auto* matrix_opt = ks->add_option("--delta-matrix", matrix_path, "K x K effect-size matrix (TSV)");
  alphas_opt->excludes(matrix_opt);
  matrix_opt->excludes(alphas_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*test) return run_test_command(targs, false);
    if (*longi) return run_test_command(largs, true);
    if (*sim) return run_simulate(sim_kind, sim_config, sim_out);
    if (*two) {
      std::cout << format_double(are_two_sample({theta1, theta2, delta})) << '\n';
      return 0;
    }
    if (*ks) {
      KSampleAreInput in;
      in.thetas = parse_list(thetas_text, "--thetas");
      if (!alphas_text.empty()) {
        const auto alphas = parse_list(alphas_text, "--alphas");
        if (alphas.size() != in.thetas.size()) throw Usage("--alphas and --thetas differ in length");
        in.deltas = delta_matrix_beta(alphas);
      } else if (!matrix_path.empty()) {
        in.deltas = load_delta_matrix(matrix_path);
      } else {
        throw Usage("k-sample needs --alphas or --delta-matrix");
      }
      std::cout << format_double(are_k_sample(in)) << '\n';
      return 0;
    }
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.degenerate() || e.kind() == ErrorKind::undefined_are) return kDegenerate;
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
