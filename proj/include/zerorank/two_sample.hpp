#pragma once

// Standard and zero-truncated Wilcoxon rank-sum tests.

#include "zerorank/outcome.hpp"
#include "zerorank/rank_core.hpp"

namespace zerorank {

enum class VarianceMode {
  tie_corrected,  // exact conditional variance given the tie pattern
  plug_in,        // N1 N2 (N1+N2) q (1 - q + q^2/3) / 4 with q the mean non-zero fraction
};

struct TwoSampleStats {
  double R = 0.0;      // rank-sum of group 1, full pool, ascending
  double S = 0.0;      // R - (N1+N2+1) N1 / 2
  double r = 0.0;      // rank-sum of group 1, truncated pool, descending
  double s = 0.0;      // centred truncated statistic with the size correction
  double var_S = 0.0;
  double var_s = 0.0;
  std::vector<std::size_t> retained;
};

/// Both statistics at once. Throws when either test is undefined.
TwoSampleStats two_sample_stats(const GroupSample& x, const GroupSample& y,
                                VarianceMode mode = VarianceMode::tie_corrected);
TwoSampleStats two_sample_stats(const PooledRanks& pool, const GroupTallies& t,
                                VarianceMode mode = VarianceMode::tie_corrected);

TestOutcome wilcoxon_standard(const GroupSample& x, const GroupSample& y,
                              VarianceMode mode = VarianceMode::tie_corrected);
TestOutcome wilcoxon_standard(const PooledRanks& pool, const GroupTallies& t,
                              VarianceMode mode = VarianceMode::tie_corrected);

/// Truncated Wilcoxon: both groups keep floor(p N_i) of their largest values,
/// p = max(p1, p2); the retained pool is ranked descending (zeros last).
TestOutcome wilcoxon_truncated(const GroupSample& x, const GroupSample& y);
TestOutcome wilcoxon_truncated(const PooledRanks& pool, const GroupTallies& t);

}  // namespace zerorank
