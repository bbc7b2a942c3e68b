#include "zerorank/twopart_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "zerorank/dispatch.hpp"
#include "zerorank/errors.hpp"
#include "zerorank/parallel.hpp"
#include "zerorank/two_sample.hpp"

namespace zerorank {

namespace {

constexpr std::uint64_t kDepthStream = 0xdead'beefULL;

std::vector<GroupSample> draw_groups(const std::vector<TwoPartSpec>& specs,
                                     const std::vector<std::size_t>& sizes, Rng& rng) {
  std::vector<GroupSample> groups;
  groups.reserve(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    groups.push_back(sample_two_part(specs[k], sizes[k], rng));
  }
  return groups;
}

double binomial_se(double rate, std::size_t n) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

std::vector<RateRow> rates_for_setting(const ExperimentConfig& config, std::size_t setting,
                                       bool power, bool depth) {
  const auto p = simulate_p_values(config, setting, depth);
  std::vector<RateRow> rows;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    std::size_t degenerate = 0;
    for (double v : p[m]) degenerate += std::isnan(v) ? 1 : 0;
    for (double alpha : config.alphas) {
      std::size_t rejected = 0;
      for (double v : p[m]) rejected += (v <= alpha) ? 1 : 0;  // NaN compares false
      RateRow row;
      row.method = std::string(to_string(config.methods[m])) + (depth ? "+depth" : "");
      row.setting = format_sizes(config.sizes[setting]);
      if (power && config.alphas.size() > 1) {
        std::ostringstream tag;
        tag << ";alpha=" << alpha;
        row.setting += tag.str();
      }
      row.alpha = alpha;
      const auto& sz = config.sizes[setting];
      row.grid_n = config.grid_n.empty() ? *std::max_element(sz.begin(), sz.end())
                                         : config.grid_n[setting];
      row.power = power;
      row.estimate = static_cast<double>(rejected) / static_cast<double>(config.replicates);
      row.std_err = binomial_se(row.estimate, config.replicates);
      row.degenerate = degenerate;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

void TwoPartSpec::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorKind::input, "theta must lie in [0, 1]");
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorKind::input, "Beta shapes must be positive and finite");
  }
}

void DepthReductionSpec::validate() const {
  if (!(zero_prob > 0.0 && zero_prob < 1.0) && zero_prob != 1.0) {
    throw Error(ErrorKind::input, "depth reduction zero_prob must lie in (0, 1]");
  }
  if (!(target_fraction > 0.0 && target_fraction < 0.5)) {
    throw Error(ErrorKind::input, "depth reduction target_fraction must lie in (0, 0.5)");
  }
}

GroupSample sample_two_part(const TwoPartSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw Error(ErrorKind::input, "sample size must be >= 1");
  std::vector<double> values(n, 0.0);
  for (auto& v : values) {
    if (rng.uniform() < spec.theta) {
      // Beta draws of exactly 0 are possible only through underflow; keep
      // them non-zero so the two parts stay distinguishable.
      v = std::max(sample_beta(rng, spec.alpha, spec.beta), std::numeric_limits<double>::min());
    }
  }
  return GroupSample(std::move(values));
}

GroupSample apply_depth_reduction(const GroupSample& group, const DepthReductionSpec& spec,
                                  Rng& rng) {
  spec.validate();
  const auto values = group.values();
  std::vector<std::size_t> nonzero;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > 0.0) nonzero.push_back(j);
  }
  std::vector<double> out(values.begin(), values.end());
  if (nonzero.empty()) return GroupSample(std::move(out));
  std::stable_sort(nonzero.begin(), nonzero.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double q = 2.0 * spec.target_fraction;
  const auto cut = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(nonzero.size()) + 1e-9));
  for (std::size_t c = 0; c < cut; ++c) {
    if (spec.zero_prob >= 1.0 || rng.uniform() < spec.zero_prob) out[nonzero[c]] = 0.0;
  }
  return GroupSample(std::move(out));
}

void ExperimentConfig::validate() const {
  if (specs.empty()) throw Error(ErrorKind::config, "no group specs");
  for (const auto& s : specs) s.validate();
  if (sizes.empty()) throw Error(ErrorKind::config, "no group sizes");
  for (const auto& sz : sizes) {
    if (sz.size() != specs.size()) {
      throw Error(ErrorKind::config, "each size vector needs one entry per group spec");
    }
    for (auto n : sz) {
      if (n == 0) throw Error(ErrorKind::config, "group sizes must be >= 1");
    }
  }
  if (!grid_n.empty() && grid_n.size() != sizes.size()) {
    throw Error(ErrorKind::config, "grid_n must align with sizes");
  }
  if (replicates < 1) throw Error(ErrorKind::config, "replicates must be >= 1");
  if (alphas.empty()) throw Error(ErrorKind::config, "no alpha levels");
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw Error(ErrorKind::config, "alpha levels must lie in (0, 1]");
  }
  if (methods.empty()) throw Error(ErrorKind::config, "no methods");
  for (auto m : methods) {
    const bool two = m == Method::wilcoxon || m == Method::truncated_wilcoxon;
    if (two && specs.size() != 2) {
      throw Error(ErrorKind::config, "Wilcoxon methods need exactly two groups");
    }
  }
  if (depth_reduction) depth_reduction->validate();
}

std::vector<std::vector<double>> simulate_p_values(const ExperimentConfig& config,
                                                   std::size_t setting, bool depth_reduced) {
  config.validate();
  if (setting >= config.sizes.size()) throw Error(ErrorKind::config, "setting out of range");
  if (depth_reduced && !config.depth_reduction) {
    throw Error(ErrorKind::config, "no depth reduction configured");
  }
  const auto& sizes = config.sizes[setting];
  const std::size_t reps = config.replicates;
  std::vector<std::vector<double>> p(config.methods.size(), std::vector<double>(reps));
  VarUCache cache;
  TestOptions options;
  options.mc = config.mc;
  options.mc.threads = 1;  // replicates already run in parallel
  options.cache = &cache;

  parallel_for(reps, config.threads, [&](std::size_t rep) {
    auto rng = Rng::stream(config.seed, setting, rep);
    auto groups = draw_groups(config.specs, sizes, rng);
    if (depth_reduced) {
      auto depth_rng = Rng::stream(stream_key(config.seed, kDepthStream), setting, rep);
      for (auto& g : groups) g = apply_depth_reduction(g, *config.depth_reduction, depth_rng);
    }
    const auto lp = make_labeled_pool(groups);
    const auto t = tally(lp.ranks, lp.labels, lp.groups);
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      try {
        p[m][rep] = run_test(config.methods[m], lp.ranks, t, options).p_value;
      } catch (const Error& e) {
        if (!e.degenerate()) throw;
        p[m][rep] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return p;
}

std::vector<RateRow> run_type1(const ExperimentConfig& config) {
  config.validate();
  for (const auto& s : config.specs) {
    if (!(s == config.specs.front())) {
      throw Error(ErrorKind::config, "type1 experiments need identical group specs");
    }
  }
  std::vector<RateRow> rows;
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    auto r = rates_for_setting(config, s, false, false);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<RateRow> run_power(const ExperimentConfig& config) {
  config.validate();
  std::vector<RateRow> rows;
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    auto r = rates_for_setting(config, s, true, false);
    rows.insert(rows.end(), r.begin(), r.end());
    if (config.depth_reduction) {
      auto d = rates_for_setting(config, s, true, true);
      rows.insert(rows.end(), d.begin(), d.end());
    }
  }
  return rows;
}

EmpiricalAre run_empirical_are(const EmpiricalAreSetting& setting) {
  if (setting.replicates < 1000) throw Error(ErrorKind::input, "empirical ARE needs >= 1000 replicates");
  const TwoPartSpec alt1{setting.theory.theta1, setting.f.alpha, setting.f.beta};
  const TwoPartSpec alt2{setting.theory.theta2, setting.g.alpha, setting.g.beta};
  const double mean_theta = 0.5 * (setting.theory.theta1 + setting.theory.theta2);
  const TwoPartSpec null_spec{mean_theta, setting.f.alpha, setting.f.beta};
  alt1.validate();
  alt2.validate();

  const std::size_t reps = setting.replicates;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> alt_S(reps, nan), alt_s(reps, nan), null_S(reps, nan), null_s(reps, nan);

  parallel_for(reps, setting.threads, [&](std::size_t rep) {
    auto rng = Rng::stream(setting.seed, 0, rep);
    auto run = [&](const TwoPartSpec& a, const TwoPartSpec& b, double& S, double& s) {
      const auto x = sample_two_part(a, setting.n1, rng);
      const auto y = sample_two_part(b, setting.n2, rng);
      try {
        const auto st = two_sample_stats(x, y);
        S = st.S;
        s = st.s;
      } catch (const Error& e) {
        if (!e.degenerate()) throw;
      }
    };
    run(alt1, alt2, alt_S[rep], alt_s[rep]);
    run(null_spec, null_spec, null_S[rep], null_s[rep]);
  });

  EmpiricalAre out;
  std::vector<double> a_S, a_s, n_S, n_s;
  for (std::size_t r = 0; r < reps; ++r) {
    if (std::isnan(alt_S[r]) || std::isnan(null_S[r])) {
      ++out.skipped;
      continue;
    }
    a_S.push_back(alt_S[r]);
    a_s.push_back(alt_s[r]);
    n_S.push_back(null_S[r]);
    n_s.push_back(null_s[r]);
  }
  if (a_S.size() < 2) throw Error(ErrorKind::degenerate_variance, "too few usable replicates");
  auto mean_sq = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc / static_cast<double>(v.size());
  };
  out.alt_mean_S2 = mean_sq(a_S);
  out.alt_mean_s2 = mean_sq(a_s);
  out.null_var_S = sample_variance(n_S);
  out.null_var_s = sample_variance(n_s);
  if (!(out.null_var_S > 0.0) || !(out.null_var_s > 0.0)) {
    throw Error(ErrorKind::degenerate_variance, "null variance estimate is zero");
  }
  if (!(out.alt_mean_S2 > 0.0)) {
    throw Error(ErrorKind::degenerate_variance, "E1[S^2] estimate is zero");
  }
  out.value = (out.alt_mean_s2 / out.null_var_s) / (out.alt_mean_S2 / out.null_var_S);
  return out;
}

std::string format_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::string rate_table_tsv(const std::vector<RateRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "method\tsetting\talpha_or_N\testimate\tstd_err\n";
  for (const auto& r : rows) {
    os << r.method << '\t' << r.setting << '\t';
    if (r.power) {
      os << r.grid_n;
    } else {
      os << r.alpha;
    }
    os << '\t' << r.estimate << '\t' << r.std_err << '\n';
  }
  return os.str();
}

}  // namespace zerorank
