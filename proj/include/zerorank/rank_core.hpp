#pragma once

// Midranks, zero truncation, and the bookkeeping shared by every test.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace zerorank {

enum class Direction { ascending, descending };

/// One group's non-negative observations. Values are validated on
/// construction (finite, >= 0, non-empty).
class GroupSample {
 public:
  GroupSample() = default;
  explicit GroupSample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  /// N: group size.
  std::size_t size() const noexcept { return values_.size(); }
  /// n: number of strictly positive values.
  std::size_t nonzero_count() const noexcept { return nonzero_; }
  /// p = n / N.
  double nonzero_fraction() const noexcept {
    return static_cast<double>(nonzero_) / static_cast<double>(values_.size());
  }

 private:
  std::vector<double> values_;
  std::size_t nonzero_ = 0;
};

/// Ranks with ties averaged. Ascending gives rank 1 to the smallest value.
std::vector<double> midranks(std::span<const double> values,
                             Direction direction = Direction::ascending);

/// Exact rational p = max_i n_i / N_i and the per-group keep counts
/// floor(p N_i), computed in integer arithmetic.
struct TruncationPlan {
  std::size_t p_num = 0;  // n of the group attaining the maximum fraction
  std::size_t p_den = 1;  // N of that group
  std::vector<std::size_t> keep;
  std::size_t keep_total = 0;      // sum of keep
  std::size_t floor_p_total = 0;   // floor(p * sum N), may exceed keep_total

  double p() const noexcept {
    return static_cast<double>(p_num) / static_cast<double>(p_den);
  }
};

/// Throws DegenerateAllZeros when every n_i is zero.
TruncationPlan plan_truncation(std::span<const std::size_t> sizes,
                               std::span<const std::size_t> nonzero);

struct TruncatedPool {
  std::vector<std::vector<double>> retained;         // per group, descending values
  std::vector<std::size_t> keep_counts;
  std::vector<std::vector<double>> midranks;         // aligned with `retained`
  std::vector<double> group_rank_sums;               // r_i
  Direction direction = Direction::ascending;
  TruncationPlan plan;
};

/// Drops zeros so every group keeps floor(p N_i) of its largest values,
/// p = max_i p_i, then midranks the retained pool in `direction`.
TruncatedPool truncate(std::span<const GroupSample> groups,
                       Direction direction = Direction::ascending);

struct RankSumMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Null moments of the rank-sum of a random `subset` of ranks 1..total.
RankSumMoments ranksum_moments_exact(std::size_t total, std::size_t subset);

// ---------------------------------------------------------------------------
// Label-indexed pool. Ranking is done once; every statistic is then a
// function of per-group tallies, which lets permutation engines relabel in
// O(total) without re-sorting.

struct PooledRanks {
  std::vector<double> values;        // concatenated in group order
  std::vector<double> full_rank;     // ascending midranks over the whole pool
  std::vector<double> nonzero_rank;  // ascending midranks among non-zeros; 0 for zeros
  std::size_t nonzero_total = 0;
  std::size_t distinct_nonzero = 0;
  double tie_sum = 0.0;              // sum over tie blocks of t^3 - t
  bool constant = false;             // single distinct value
};

PooledRanks rank_pool(std::span<const double> values);

struct GroupTallies {
  std::vector<std::size_t> size;             // N_k
  std::vector<std::size_t> nonzero;          // n_k
  std::vector<double> full_rank_sum;         // R_k over the full pool
  std::vector<double> nonzero_rank_sum;      // sum of nonzero_rank in group k
};

GroupTallies tally(const PooledRanks& pool, std::span<const std::uint32_t> labels,
                   std::size_t groups);

/// Pool + labels for a list of groups, labels following concatenation order.
struct LabeledPool {
  PooledRanks ranks;
  std::vector<std::uint32_t> labels;
  std::size_t groups = 0;
};

LabeledPool make_labeled_pool(std::span<const GroupSample> groups);

/// Rank-sums of a zero-truncated pool reconstructed from tallies: retained
/// zeros share one midrank and non-zeros keep their order among non-zeros.
std::vector<double> truncated_rank_sums(const GroupTallies& t, const TruncationPlan& plan,
                                        std::size_t nonzero_total, Direction direction);

}  // namespace zerorank
