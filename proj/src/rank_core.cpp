#include "zerorank/rank_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "zerorank/errors.hpp"

namespace zerorank {

GroupSample::GroupSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::input, "group has no observations");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::input, "non-finite observation at index " + std::to_string(i));
    }
    if (v < 0.0) {
      throw Error(ErrorKind::input, "negative observation at index " + std::to_string(i));
    }
    if (v > 0.0) ++nonzero_;
  }
}

namespace {

// Sorted order plus a callback per tie block [begin, end) of sorted positions.
template <typename F>
void for_each_tie_block(std::span<const double> values, const std::vector<std::size_t>& order,
                        F&& f) {
  std::size_t i = 0;
  const std::size_t m = order.size();
  while (i < m) {
    std::size_t j = i + 1;
    while (j < m && values[order[j]] == values[order[i]]) ++j;
    f(i, j);
    i = j;
  }
}

std::vector<std::size_t> sorted_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values, Direction direction) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::input, "midranks: non-finite value");
  }
  const auto order = sorted_order(values);
  const double m = static_cast<double>(values.size());
  std::vector<double> ranks(values.size());
  for_each_tie_block(values, order, [&](std::size_t b, std::size_t e) {
    // positions b..e-1 hold ranks b+1..e; their average
    double r = 0.5 * static_cast<double>(b + 1 + e);
    if (direction == Direction::descending) r = m + 1.0 - r;
    for (std::size_t k = b; k < e; ++k) ranks[order[k]] = r;
  });
  return ranks;
}

TruncationPlan plan_truncation(std::span<const std::size_t> sizes,
                               std::span<const std::size_t> nonzero) {
  if (sizes.size() != nonzero.size() || sizes.empty()) {
    throw Error(ErrorKind::input, "plan_truncation: size mismatch");
  }
  TruncationPlan plan;
  plan.p_num = 0;
  plan.p_den = 1;
  std::size_t total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || nonzero[i] > sizes[i]) {
      throw Error(ErrorKind::input, "plan_truncation: invalid group counts");
    }
    total += sizes[i];
    // n_i / N_i > p_num / p_den, compared without rounding
    if (nonzero[i] * plan.p_den > plan.p_num * sizes[i]) {
      plan.p_num = nonzero[i];
      plan.p_den = sizes[i];
    }
  }
  if (plan.p_num == 0) {
    throw Error(ErrorKind::degenerate_all_zeros, "every observation is zero");
  }
  plan.keep.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    plan.keep[i] = plan.p_num * sizes[i] / plan.p_den;
    plan.keep_total += plan.keep[i];
  }
  plan.floor_p_total = plan.p_num * total / plan.p_den;
  return plan;
}

TruncatedPool truncate(std::span<const GroupSample> groups, Direction direction) {
  std::vector<std::size_t> sizes, nonzero;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    nonzero.push_back(g.nonzero_count());
  }
  TruncatedPool out;
  out.plan = plan_truncation(sizes, nonzero);
  out.keep_counts = out.plan.keep;
  out.direction = direction;

  std::vector<double> pooled;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<double> v(groups[i].values().begin(), groups[i].values().end());
    std::sort(v.begin(), v.end(), std::greater<>());
    v.resize(out.keep_counts[i]);
    pooled.insert(pooled.end(), v.begin(), v.end());
    out.retained.push_back(std::move(v));
  }
  const auto ranks = midranks(pooled, direction);
  std::size_t offset = 0;
  for (const auto& v : out.retained) {
    std::vector<double> r(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                          ranks.begin() + static_cast<std::ptrdiff_t>(offset + v.size()));
    out.group_rank_sums.push_back(std::accumulate(r.begin(), r.end(), 0.0));
    out.midranks.push_back(std::move(r));
    offset += v.size();
  }
  return out;
}

RankSumMoments ranksum_moments_exact(std::size_t total, std::size_t subset) {
  if (subset < 1 || subset > total) {
    throw Error(ErrorKind::input, "ranksum_moments_exact: need 1 <= subset <= total");
  }
  const double n = static_cast<double>(total);
  const double k = static_cast<double>(subset);
  return {k * (n + 1.0) / 2.0, k * (n - k) * (n + 1.0) / 12.0};
}

PooledRanks rank_pool(std::span<const double> values) {
  PooledRanks pool;
  pool.values.assign(values.begin(), values.end());
  pool.full_rank = midranks(values, Direction::ascending);
  const auto order = sorted_order(values);
  std::size_t blocks = 0;
  for_each_tie_block(values, order, [&](std::size_t b, std::size_t e) {
    const double t = static_cast<double>(e - b);
    pool.tie_sum += t * t * t - t;
    ++blocks;
    if (values[order[b]] > 0.0) ++pool.distinct_nonzero;
  });
  pool.constant = blocks <= 1;
  const auto zeros = static_cast<double>(
      std::count(values.begin(), values.end(), 0.0));
  pool.nonzero_rank.assign(values.size(), 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] > 0.0) {
      pool.nonzero_rank[j] = pool.full_rank[j] - zeros;
      ++pool.nonzero_total;
    }
  }
  return pool;
}

GroupTallies tally(const PooledRanks& pool, std::span<const std::uint32_t> labels,
                   std::size_t groups) {
  GroupTallies t;
  t.size.assign(groups, 0);
  t.nonzero.assign(groups, 0);
  t.full_rank_sum.assign(groups, 0.0);
  t.nonzero_rank_sum.assign(groups, 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto g = labels[j];
    ++t.size[g];
    t.full_rank_sum[g] += pool.full_rank[j];
    if (pool.values[j] > 0.0) {
      ++t.nonzero[g];
      t.nonzero_rank_sum[g] += pool.nonzero_rank[j];
    }
  }
  return t;
}

LabeledPool make_labeled_pool(std::span<const GroupSample> groups) {
  LabeledPool out;
  out.groups = groups.size();
  std::vector<double> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    pooled.insert(pooled.end(), groups[g].values().begin(), groups[g].values().end());
    out.labels.insert(out.labels.end(), groups[g].size(), static_cast<std::uint32_t>(g));
  }
  out.ranks = rank_pool(pooled);
  return out;
}

std::vector<double> truncated_rank_sums(const GroupTallies& t, const TruncationPlan& plan,
                                        std::size_t nonzero_total, Direction direction) {
  const std::size_t k = t.size.size();
  double zeros_kept = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    zeros_kept += static_cast<double>(plan.keep[g] - t.nonzero[g]);
  }
  const double nz = static_cast<double>(nonzero_total);
  std::vector<double> r(k);
  for (std::size_t g = 0; g < k; ++g) {
    const double zg = static_cast<double>(plan.keep[g] - t.nonzero[g]);
    const double ng = static_cast<double>(t.nonzero[g]);
    if (direction == Direction::ascending) {
      // zeros occupy ranks 1..Z, non-zeros follow in order
      r[g] = zg * (zeros_kept + 1.0) / 2.0 + ng * zeros_kept + t.nonzero_rank_sum[g];
    } else {
      r[g] = ng * (nz + 1.0) - t.nonzero_rank_sum[g] + zg * (nz + (zeros_kept + 1.0) / 2.0);
    }
  }
  return r;
}

}  // namespace zerorank
