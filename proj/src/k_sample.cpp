#include "zerorank/k_sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zerorank/errors.hpp"
#include "zerorank/parallel.hpp"
#include "zerorank/random.hpp"

namespace zerorank {

namespace {

double as_double(std::size_t v) { return static_cast<double>(v); }

void require_groups(const GroupTallies& t) {
  if (t.size.size() < 2) throw Error(ErrorKind::input, "need at least two groups");
  for (auto n : t.size) {
    if (n == 0) throw Error(ErrorKind::input, "empty group");
  }
}

GroupTallies tally_groups(std::span<const GroupSample> groups, PooledRanks& pool_out) {
  auto lp = make_labeled_pool(groups);
  auto t = tally(lp.ranks, lp.labels, lp.groups);
  pool_out = std::move(lp.ranks);
  return t;
}

// Centred full-pool rank-sums S_k and the tie correction factor.
std::vector<double> centred_full_sums(const PooledRanks& pool, const GroupTallies& t) {
  const double m = as_double(pool.values.size());
  std::vector<double> S(t.size.size());
  for (std::size_t k = 0; k < S.size(); ++k) {
    S[k] = t.full_rank_sum[k] - (m + 1.0) * as_double(t.size[k]) / 2.0;
  }
  return S;
}

// Null variances of the size-weighted contrasts Y_i (tie-corrected).
std::vector<double> contrast_variances_full(const PooledRanks& pool, const GroupTallies& t) {
  const double m = as_double(pool.values.size());
  const double correction = 1.0 - pool.tie_sum / (m * m * m - m);
  std::vector<double> var(t.size.size() - 1);
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < t.size.size(); ++i) {
    head += as_double(t.size[i]);
    const double next = as_double(t.size[i + 1]);
    var[i] = (m + 1.0) * next * head * (head + next) * m * correction / 12.0;
  }
  return var;
}

struct Truncated {
  TruncationPlan plan;
  std::vector<double> r;
};

Truncated truncated_ascending(const PooledRanks& pool, const GroupTallies& t) {
  Truncated out{plan_truncation(t.size, t.nonzero), {}};
  for (auto keep : out.plan.keep) {
    if (keep == 0) {
      throw Error(ErrorKind::degenerate_all_zeros,
                  "a group retains no observations after truncation");
    }
  }
  if (out.plan.keep_total == pool.nonzero_total && pool.distinct_nonzero <= 1) {
    throw Error(ErrorKind::degenerate_constant, "truncated pool has a single distinct value");
  }
  out.r = truncated_rank_sums(t, out.plan, pool.nonzero_total, Direction::ascending);
  return out;
}

std::vector<double> centred_truncated_sums(const Truncated& tr) {
  std::vector<double> s(tr.r.size());
  const double centre = (as_double(tr.plan.floor_p_total) + 1.0) / 2.0;
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = tr.r[k] - centre * as_double(tr.plan.keep[k]);
  return s;
}

bool all_equal(std::span<const std::size_t> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::vector<double> equal_plugin_variances(const GroupTallies& t) {
  const double k = as_double(t.size.size());
  const double n = as_double(t.size[0]);
  double q = 0.0;
  for (std::size_t g = 0; g < t.size.size(); ++g) q += as_double(t.nonzero[g]) / n;
  q /= k;
  std::vector<double> var(t.size.size() - 1);
  for (std::size_t i = 1; i <= var.size(); ++i) {
    const double di = as_double(i);
    var[i - 1] = di * (di + 1.0) * k * k * n * n * n * q * q * q * (4.0 / 3.0 - q) / 4.0;
  }
  return var;
}

TestOutcome chi_square_sum(Method method, std::span<const double> contrasts,
                           std::span<const double> variances) {
  TestOutcome out;
  out.method = method;
  out.statistic = 0.0;
  for (std::size_t i = 0; i < contrasts.size(); ++i) {
    if (!(variances[i] > 0.0)) {
      throw Error(ErrorKind::degenerate_variance,
                  "null variance of contrast " + std::to_string(i + 1) + " is not positive");
    }
    out.statistic += contrasts[i] * contrasts[i] / variances[i];
  }
  out.df = contrasts.size();
  out.p_value = chisq_upper_tail(out.statistic, out.df);
  return out;
}

void check_contrast(std::span<const std::size_t> sizes, std::size_t contrast) {
  if (sizes.size() < 2) throw Error(ErrorKind::input, "need at least two groups");
  if (contrast < 1 || contrast >= sizes.size()) {
    throw Error(ErrorKind::input, "contrast index must lie in 1..K-1");
  }
}

std::string format_note(const char* key, double value) {
  std::ostringstream os;
  os << key << '=' << value;
  return os.str();
}

}  // namespace

std::vector<double> size_weighted_contrasts(std::span<const double> a,
                                            std::span<const std::size_t> sizes) {
  std::vector<double> out;
  if (a.size() < 2) return out;
  out.reserve(a.size() - 1);
  double sum_a = 0.0, sum_n = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    sum_a += a[i];
    sum_n += as_double(sizes[i]);
    out.push_back(as_double(sizes[i + 1]) * sum_a - sum_n * a[i + 1]);
  }
  return out;
}

std::vector<double> helmert_contrasts(std::span<const double> a) {
  std::vector<double> out;
  if (a.size() < 2) return out;
  double sum_a = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    sum_a += a[i];
    out.push_back(sum_a - as_double(i + 1) * a[i + 1]);
  }
  return out;
}

TestOutcome kruskal_wallis_standard(const PooledRanks& pool, const GroupTallies& t) {
  require_groups(t);
  if (pool.constant) throw Error(ErrorKind::degenerate_constant, "all pooled values are identical");
  const auto S = centred_full_sums(pool, t);
  const auto Y = size_weighted_contrasts(S, t.size);
  const auto var = contrast_variances_full(pool, t);
  auto out = chi_square_sum(Method::kruskal_wallis, Y, var);
  out.n_retained = t.size;
  return out;
}

TestOutcome kruskal_wallis_standard(std::span<const GroupSample> groups) {
  PooledRanks pool;
  const auto t = tally_groups(groups, pool);
  return kruskal_wallis_standard(pool, t);
}

TestOutcome kw_truncated_equal(const PooledRanks& pool, const GroupTallies& t) {
  require_groups(t);
  if (!all_equal(t.size)) {
    throw Error(ErrorKind::input, "equal-size truncated Kruskal-Wallis needs equal group sizes");
  }
  const auto tr = truncated_ascending(pool, t);
  const double k = as_double(t.size.size());
  const double n = as_double(tr.plan.keep[0]);
  std::vector<double> s(tr.r.size());
  for (std::size_t g = 0; g < s.size(); ++g) s[g] = tr.r[g] - n * (k * n + 1.0) / 2.0;
  const auto U = helmert_contrasts(s);
  auto out = chi_square_sum(Method::truncated_kw_equal, U, equal_plugin_variances(t));
  out.n_retained = tr.plan.keep;
  return out;
}

TestOutcome kw_truncated_equal(std::span<const GroupSample> groups) {
  PooledRanks pool;
  const auto t = tally_groups(groups, pool);
  return kw_truncated_equal(pool, t);
}

double theta_hat(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                 ThetaHatMode mode) {
  if (mode == ThetaHatMode::pooled) {
    return as_double(std::accumulate(nonzero.begin(), nonzero.end(), std::size_t{0})) /
           as_double(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  }
  double q = 0.0;
  for (std::size_t g = 0; g < sizes.size(); ++g) q += as_double(nonzero[g]) / as_double(sizes[g]);
  return q / as_double(sizes.size());
}

TestOutcome kw_truncated_unequal(const PooledRanks& pool, const GroupTallies& t,
                                 const McVarianceConfig& mc, VarUCache* cache) {
  require_groups(t);
  const auto tr = truncated_ascending(pool, t);
  const auto s = centred_truncated_sums(tr);
  const auto U = size_weighted_contrasts(s, t.size);
  const double th = theta_hat(t.size, t.nonzero, mc.theta_hat_mode);
  std::vector<double> var(U.size());
  std::size_t redrawn = 0;
  for (std::size_t i = 1; i <= U.size(); ++i) {
    if (cache) {
      var[i - 1] = cache->variance(t.size, th, i, mc);
    } else {
      const auto est = estimate_var_U(t.size, th, i, mc);
      var[i - 1] = est.variance;
      redrawn += est.redrawn;
    }
  }
  auto out = chi_square_sum(Method::truncated_kw_unequal, U, var);
  out.n_retained = tr.plan.keep;
  out.notes.push_back(format_note("theta_hat", th));
  out.notes.push_back(format_note("mc_replicates", as_double(mc.replicates)));
  if (redrawn > 0) out.notes.push_back(format_note("mc_redrawn", as_double(redrawn)));
  return out;
}

TestOutcome kw_truncated_unequal(std::span<const GroupSample> groups, const McVarianceConfig& mc,
                                 VarUCache* cache) {
  PooledRanks pool;
  const auto t = tally_groups(groups, pool);
  return kw_truncated_unequal(pool, t, mc, cache);
}

TestOutcome kw_truncated(const PooledRanks& pool, const GroupTallies& t,
                         const McVarianceConfig& mc, VarUCache* cache) {
  if (all_equal(t.size)) return kw_truncated_equal(pool, t);
  return kw_truncated_unequal(pool, t, mc, cache);
}

TestOutcome kw_truncated(std::span<const GroupSample> groups, const McVarianceConfig& mc,
                         VarUCache* cache) {
  PooledRanks pool;
  const auto t = tally_groups(groups, pool);
  return kw_truncated(pool, t, mc, cache);
}

KSampleStats k_sample_stats(std::span<const GroupSample> groups, const McVarianceConfig& mc) {
  PooledRanks pool;
  const auto t = tally_groups(groups, pool);
  require_groups(t);
  KSampleStats out;
  out.S = centred_full_sums(pool, t);
  out.Y = size_weighted_contrasts(out.S, t.size);
  out.var_Y = contrast_variances_full(pool, t);
  const auto tr = truncated_ascending(pool, t);
  if (all_equal(t.size)) {
    const double k = as_double(t.size.size());
    const double n = as_double(tr.plan.keep[0]);
    out.s.resize(tr.r.size());
    for (std::size_t g = 0; g < out.s.size(); ++g) out.s[g] = tr.r[g] - n * (k * n + 1.0) / 2.0;
    out.U = helmert_contrasts(out.s);
    out.var_U = equal_plugin_variances(t);
  } else {
    out.s = centred_truncated_sums(tr);
    out.U = size_weighted_contrasts(out.s, t.size);
    const double th = theta_hat(t.size, t.nonzero, mc.theta_hat_mode);
    for (std::size_t i = 1; i <= out.U.size(); ++i) {
      out.var_U.push_back(estimate_var_U(t.size, th, i, mc).variance);
    }
  }
  return out;
}

double conditional_var_U(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                         std::size_t contrast) {
  check_contrast(sizes, contrast);
  const std::size_t i = contrast;
  double head_n = 0.0, head_N = 0.0, total_n = 0.0;
  for (std::size_t j = 0; j < i; ++j) {
    head_n += as_double(nonzero[j]);
    head_N += as_double(sizes[j]);
  }
  for (auto v : nonzero) total_n += as_double(v);
  const double next_N = as_double(sizes[i]);
  const double next_n = as_double(nonzero[i]);
  const double cross = next_n * head_N - next_N * head_n;
  return (total_n + 1.0) / 12.0 *
         (total_n * (next_N * next_N * head_n + next_n * head_N * head_N) - cross * cross);
}

double conditional_mean_U(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                          std::size_t contrast) {
  check_contrast(sizes, contrast);
  const auto plan = plan_truncation(sizes, nonzero);
  const double zeros = as_double(plan.keep_total) -
                       as_double(std::accumulate(nonzero.begin(), nonzero.end(), std::size_t{0}));
  const double total = as_double(plan.keep_total);
  const double centre = (as_double(plan.floor_p_total) + 1.0) / 2.0;
  std::vector<double> es(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const double z = as_double(plan.keep[k] - nonzero[k]);
    const double n = as_double(nonzero[k]);
    const double er = z * (zeros + 1.0) / 2.0 + n * (zeros + 1.0 + total) / 2.0;
    es[k] = er - centre * as_double(plan.keep[k]);
  }
  const auto U = size_weighted_contrasts(es, sizes);
  return U[contrast - 1];
}

double expected_conditional_var_U(std::span<const std::size_t> sizes, double theta,
                                  std::size_t contrast) {
  check_contrast(sizes, contrast);
  double head = 0.0, total = 0.0;
  for (std::size_t j = 0; j < contrast; ++j) head += as_double(sizes[j]);
  for (auto v : sizes) total += as_double(v);
  const double next = as_double(sizes[contrast]);
  return theta * theta / 12.0 * next * head * (head + next) * total *
         (total * theta + 3.0 - 2.0 * theta);
}

VarUEstimate estimate_var_U(std::span<const std::size_t> sizes, double theta_hat,
                            std::size_t contrast, const McVarianceConfig& mc) {
  check_contrast(sizes, contrast);
  if (!(theta_hat > 0.0 && theta_hat <= 1.0)) {
    throw Error(ErrorKind::input, "theta_hat must lie in (0, 1]");
  }
  if (mc.replicates < 100) throw Error(ErrorKind::input, "need at least 100 MC replicates");

  const std::size_t reps = mc.replicates;
  const std::uint64_t contrast_seed = stream_key(mc.seed, contrast);
  std::vector<double> cond_var(reps), cond_mean(reps);
  std::vector<std::size_t> redraws(reps, 0);

  parallel_for(reps, mc.threads, [&](std::size_t rep) {
    auto rng = Rng::stream(contrast_seed, rep);
    std::vector<std::size_t> n(sizes.size());
    for (;;) {
      std::size_t any = 0;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        n[k] = sample_binomial(rng, sizes[k], theta_hat);
        any += n[k];
      }
      if (any > 0) break;
      if (++redraws[rep] > reps) break;  // hopeless; reported below
    }
    if (redraws[rep] > reps) return;
    cond_var[rep] = conditional_var_U(sizes, n, contrast);
    cond_mean[rep] = conditional_mean_U(sizes, n, contrast);
  });

  VarUEstimate est;
  est.replicates = reps;
  for (auto r : redraws) est.redrawn += r;
  if (est.redrawn > reps) {
    throw Error(ErrorKind::degenerate_variance,
                "more than half of the MC draws had no non-zero observations (theta_hat=" +
                    std::to_string(theta_hat) + ")");
  }

  // Shifted sums: exact zero spread when every replicate agrees.
  const double rd = as_double(reps);
  const double v0 = cond_var[0], m0 = cond_mean[0];
  double sv = 0.0, svv = 0.0, sm = 0.0, smm = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const double dv = cond_var[r] - v0;
    const double dm = cond_mean[r] - m0;
    sv += dv;
    svv += dv * dv;
    sm += dm;
    smm += dm * dm;
  }
  est.mean_conditional_variance = v0 + sv / rd;
  const double var_of_cv = std::max(0.0, (svv - sv * sv / rd) / (rd - 1.0));
  est.mean_conditional_variance_se = std::sqrt(var_of_cv / rd);
  est.variance_of_conditional_mean = std::max(0.0, (smm - sm * sm / rd) / (rd - 1.0));
  est.variance = est.mean_conditional_variance + est.variance_of_conditional_mean;
  if (!(est.variance > 0.0)) {
    throw Error(ErrorKind::degenerate_variance, "MC estimate of Var[U_" +
                                                    std::to_string(contrast) + "] is not positive");
  }
  return est;
}

double VarUCache::variance(std::span<const std::size_t> sizes, double theta_hat,
                           std::size_t contrast, const McVarianceConfig& mc) {
  Key key{std::vector<std::size_t>(sizes.begin(), sizes.end()), theta_hat, contrast,
          mc.replicates, mc.seed};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  const double v = estimate_var_U(sizes, theta_hat, contrast, mc).variance;
  std::lock_guard lock(mutex_);
  entries_.emplace(std::move(key), v);
  return v;
}

std::size_t VarUCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace zerorank
