#include "zerorank/two_sample.hpp"

#include <cmath>

#include "zerorank/errors.hpp"

namespace zerorank {

namespace {

void require_two_groups(const GroupTallies& t) {
  if (t.size.size() != 2) throw Error(ErrorKind::input, "two-sample test needs exactly two groups");
  if (t.size[0] == 0 || t.size[1] == 0) throw Error(ErrorKind::input, "empty group");
}

double mean_nonzero_fraction(const GroupTallies& t) {
  const double p1 = static_cast<double>(t.nonzero[0]) / static_cast<double>(t.size[0]);
  const double p2 = static_cast<double>(t.nonzero[1]) / static_cast<double>(t.size[1]);
  return 0.5 * (p1 + p2);
}

struct FullPart {
  double R, S, var;
};

FullPart full_part(const PooledRanks& pool, const GroupTallies& t, VarianceMode mode) {
  require_two_groups(t);
  if (pool.constant) {
    throw Error(ErrorKind::degenerate_constant, "all pooled values are identical");
  }
  const double n1 = static_cast<double>(t.size[0]);
  const double n2 = static_cast<double>(t.size[1]);
  const double m = n1 + n2;
  FullPart out{};
  out.R = t.full_rank_sum[0];
  out.S = out.R - (m + 1.0) * n1 / 2.0;
  if (mode == VarianceMode::tie_corrected) {
    out.var = n1 * n2 / 12.0 * ((m + 1.0) - pool.tie_sum / (m * (m - 1.0)));
  } else {
    const double q = mean_nonzero_fraction(t);
    out.var = n1 * n2 * m * q * (1.0 - q + q * q / 3.0) / 4.0;
  }
  if (!(out.var > 0.0)) throw Error(ErrorKind::degenerate_variance, "Var[S] is zero");
  return out;
}

struct TruncatedPart {
  double r, s, var;
  std::vector<std::size_t> retained;
};

TruncatedPart truncated_part(const PooledRanks& pool, const GroupTallies& t) {
  require_two_groups(t);
  const auto plan = plan_truncation(t.size, t.nonzero);
  if (plan.keep[0] == 0 || plan.keep[1] == 0) {
    throw Error(ErrorKind::degenerate_all_zeros, "a group retains no observations after truncation");
  }
  const bool zeros_kept = plan.keep_total > pool.nonzero_total;
  if (!zeros_kept && pool.distinct_nonzero <= 1) {
    throw Error(ErrorKind::degenerate_constant, "truncated pool has a single distinct value");
  }
  const auto sums = truncated_rank_sums(t, plan, pool.nonzero_total, Direction::descending);
  const double n1 = static_cast<double>(t.size[0]);
  const double n2 = static_cast<double>(t.size[1]);
  const double q = mean_nonzero_fraction(t);

  TruncatedPart out;
  out.r = sums[0];
  out.s = out.r -
          (static_cast<double>(plan.floor_p_total) + 1.0) / 2.0 * static_cast<double>(plan.keep[0]) -
          0.25 * q * (1.0 - q) * (n2 - n1);
  out.var = n1 * n2 * (n1 + n2) * q * q * q * (4.0 / 3.0 - q) / 4.0;
  if (!(out.var > 0.0)) throw Error(ErrorKind::degenerate_variance, "Var[s] plug-in is zero");
  out.retained = plan.keep;
  return out;
}

GroupTallies tally_pair(const GroupSample& x, const GroupSample& y, PooledRanks& pool_out) {
  std::vector<double> pooled(x.values().begin(), x.values().end());
  pooled.insert(pooled.end(), y.values().begin(), y.values().end());
  std::vector<std::uint32_t> labels(x.size(), 0);
  labels.resize(pooled.size(), 1);
  pool_out = rank_pool(pooled);
  return tally(pool_out, labels, 2);
}

}  // namespace

TwoSampleStats two_sample_stats(const PooledRanks& pool, const GroupTallies& t,
                                VarianceMode mode) {
  const auto full = full_part(pool, t, mode);
  auto trunc = truncated_part(pool, t);
  return {full.R, full.S, trunc.r, trunc.s, full.var, trunc.var, std::move(trunc.retained)};
}

TwoSampleStats two_sample_stats(const GroupSample& x, const GroupSample& y, VarianceMode mode) {
  PooledRanks pool;
  const auto t = tally_pair(x, y, pool);
  return two_sample_stats(pool, t, mode);
}

TestOutcome wilcoxon_standard(const PooledRanks& pool, const GroupTallies& t, VarianceMode mode) {
  const auto full = full_part(pool, t, mode);
  TestOutcome out;
  out.method = Method::wilcoxon;
  out.statistic = full.S * full.S / full.var;
  out.df = 1;
  out.p_value = chisq_upper_tail(out.statistic, 1);
  out.n_retained = t.size;
  return out;
}

TestOutcome wilcoxon_standard(const GroupSample& x, const GroupSample& y, VarianceMode mode) {
  PooledRanks pool;
  const auto t = tally_pair(x, y, pool);
  return wilcoxon_standard(pool, t, mode);
}

TestOutcome wilcoxon_truncated(const PooledRanks& pool, const GroupTallies& t) {
  const auto tr = truncated_part(pool, t);
  TestOutcome out;
  out.method = Method::truncated_wilcoxon;
  out.statistic = tr.s * tr.s / tr.var;
  out.df = 1;
  out.p_value = chisq_upper_tail(out.statistic, 1);
  out.n_retained = tr.retained;
  return out;
}

TestOutcome wilcoxon_truncated(const GroupSample& x, const GroupSample& y) {
  PooledRanks pool;
  const auto t = tally_pair(x, y, pool);
  return wilcoxon_truncated(pool, t);
}

}  // namespace zerorank
