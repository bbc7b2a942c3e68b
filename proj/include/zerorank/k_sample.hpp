#pragma once

// Kruskal-Wallis and truncated Kruskal-Wallis tests for K >= 2 groups.

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "zerorank/outcome.hpp"
#include "zerorank/rank_core.hpp"

namespace zerorank {

enum class ThetaHatMode {
  pooled,     // sum n_i / sum N_i
  mean_of_p,  // unweighted mean of p_i
};

struct McVarianceConfig {
  std::size_t replicates = 10000;
  std::uint64_t seed = 20240601;
  ThetaHatMode theta_hat_mode = ThetaHatMode::pooled;
  unsigned threads = 1;  // 0 = hardware concurrency; results do not depend on it
};

struct KSampleStats {
  std::vector<double> S;      // centred full-pool rank-sums, one per group
  std::vector<double> Y;      // K-1 orthogonalised contrasts of S
  std::vector<double> s;      // centred truncated rank-sums
  std::vector<double> U;      // K-1 contrasts of s
  std::vector<double> var_Y;
  std::vector<double> var_U;
};

/// Contrasts sum_{j<=i} (N_{i+1} a_j - N_j a_{i+1}), i = 1..K-1.
std::vector<double> size_weighted_contrasts(std::span<const double> a,
                                            std::span<const std::size_t> sizes);
/// Contrasts sum_{j<=i} a_j - i a_{i+1}, i = 1..K-1.
std::vector<double> helmert_contrasts(std::span<const double> a);

/// Tie-corrected Kruskal-Wallis written through the size-weighted contrasts.
TestOutcome kruskal_wallis_standard(std::span<const GroupSample> groups);
TestOutcome kruskal_wallis_standard(const PooledRanks& pool, const GroupTallies& t);

/// Equal group sizes; closed-form variance plug-in.
TestOutcome kw_truncated_equal(std::span<const GroupSample> groups);
TestOutcome kw_truncated_equal(const PooledRanks& pool, const GroupTallies& t);

class VarUCache;

/// Arbitrary group sizes; contrast variances estimated by Monte Carlo.
TestOutcome kw_truncated_unequal(std::span<const GroupSample> groups,
                                 const McVarianceConfig& mc = {}, VarUCache* cache = nullptr);
TestOutcome kw_truncated_unequal(const PooledRanks& pool, const GroupTallies& t,
                                 const McVarianceConfig& mc = {}, VarUCache* cache = nullptr);

/// Routes to the equal-size variant when all N_i agree.
TestOutcome kw_truncated(std::span<const GroupSample> groups, const McVarianceConfig& mc = {},
                         VarUCache* cache = nullptr);
TestOutcome kw_truncated(const PooledRanks& pool, const GroupTallies& t,
                         const McVarianceConfig& mc = {}, VarUCache* cache = nullptr);

/// Intermediate quantities for the equal- or unequal-size truncated test.
/// var_U is filled from the plug-in (equal sizes) or the Monte Carlo
/// estimate (unequal); var_Y is the tie-corrected null variance.
KSampleStats k_sample_stats(std::span<const GroupSample> groups, const McVarianceConfig& mc = {});

double theta_hat(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                 ThetaHatMode mode);

// ---------------------------------------------------------------------------
// Null variance of U_i for unequal sizes.

/// Var[U_i | n] for contrast `contrast` (1-based).
double conditional_var_U(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                         std::size_t contrast);
/// E[U_i | n]; retained zeros tie at the bottom of an ascending ranking.
double conditional_mean_U(std::span<const std::size_t> sizes, std::span<const std::size_t> nonzero,
                          std::size_t contrast);
/// Closed form of E[Var(U_i | n)] with n_k ~ Binomial(N_k, theta).
double expected_conditional_var_U(std::span<const std::size_t> sizes, double theta,
                                  std::size_t contrast);

struct VarUEstimate {
  double variance = 0.0;                  // mean_conditional_variance + variance_of_conditional_mean
  double mean_conditional_variance = 0.0;
  double mean_conditional_variance_se = 0.0;
  double variance_of_conditional_mean = 0.0;
  std::size_t replicates = 0;
  std::size_t redrawn = 0;                // all-zero draws that were discarded
};

VarUEstimate estimate_var_U(std::span<const std::size_t> sizes, double theta_hat,
                            std::size_t contrast, const McVarianceConfig& mc = {});

/// Memoises estimate_var_U. The estimate is a deterministic function of its
/// arguments, so a cache hit returns exactly what a fresh call would.
class VarUCache {
 public:
  double variance(std::span<const std::size_t> sizes, double theta_hat, std::size_t contrast,
                  const McVarianceConfig& mc);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::vector<std::size_t>, double, std::size_t, std::size_t,
                         std::uint64_t>;
  mutable std::mutex mutex_;
  std::map<Key, double> entries_;
};

}  // namespace zerorank
