#pragma once

// Two-part model sampling and the Type I error / power / empirical ARE
// experiment harness.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zerorank/are.hpp"
#include "zerorank/k_sample.hpp"
#include "zerorank/outcome.hpp"
#include "zerorank/random.hpp"
#include "zerorank/rank_core.hpp"

namespace zerorank {

/// (1 - theta) * delta_0 + theta * Beta(alpha, beta).
struct TwoPartSpec {
  double theta = 0.5;
  double alpha = 2.0;
  double beta = 2.0;

  void validate() const;
  bool operator==(const TwoPartSpec&) const = default;
};

/// Zeroes small non-zero values with a fixed probability.
struct DepthReductionSpec {
  double zero_prob = 0.5;
  double target_fraction = 0.05;

  void validate() const;
};

GroupSample sample_two_part(const TwoPartSpec& spec, std::size_t n, Rng& rng);

/// Each non-zero value among the smallest floor(2 * target_fraction * n_nonzero)
/// is set to zero with probability zero_prob.
GroupSample apply_depth_reduction(const GroupSample& group, const DepthReductionSpec& spec,
                                  Rng& rng);

struct ExperimentConfig {
  std::vector<TwoPartSpec> specs;               // one per group
  std::vector<std::vector<std::size_t>> sizes;  // one size vector per setting
  std::vector<std::size_t> grid_n;              // base N per setting; defaults to the largest size
  std::size_t replicates = 1000;
  std::vector<double> alphas{0.05};
  std::vector<Method> methods;
  std::uint64_t seed = 1;
  std::optional<DepthReductionSpec> depth_reduction;
  McVarianceConfig mc;
  unsigned threads = 1;

  void validate() const;
};

struct RateRow {
  std::string method;   // method tag, "+depth" suffix for the reduced-depth arm
  std::string setting;  // group sizes, comma separated
  double alpha = 0.05;
  std::size_t grid_n = 0;
  bool power = false;   // decides whether alpha_or_N prints alpha or N
  double estimate = 0.0;
  double std_err = 0.0;
  std::size_t degenerate = 0;
};

/// p-values, one vector per configured method, for every replicate of one
/// setting. Degenerate replicates yield NaN.
std::vector<std::vector<double>> simulate_p_values(const ExperimentConfig& config,
                                                   std::size_t setting, bool depth_reduced = false);

/// Rejection rates under H0 (all group specs must agree).
std::vector<RateRow> run_type1(const ExperimentConfig& config);

/// Rejection rates over the size grid; adds a reduced-depth arm when configured.
std::vector<RateRow> run_power(const ExperimentConfig& config);

struct EmpiricalAreSetting {
  TwoSampleAreInput theory;  // theta1, theta2 (delta_fg is informational)
  BetaShape f;               // group 1 continuous part
  BetaShape g;               // group 2 continuous part
  std::size_t n1 = 40;
  std::size_t n2 = 50;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct EmpiricalAre {
  double value = 0.0;
  double alt_mean_s2 = 0.0;
  double null_var_s = 0.0;
  double alt_mean_S2 = 0.0;
  double null_var_S = 0.0;
  std::size_t skipped = 0;
};

/// (E1[s^2] / Var0[s]) / (E1[S^2] / Var0[S]) with H0 drawing both groups from
/// the mean non-zero probability and f.
EmpiricalAre run_empirical_are(const EmpiricalAreSetting& setting);

std::string format_sizes(const std::vector<std::size_t>& sizes);

/// TSV with header method, setting, alpha_or_N, estimate, std_err.
std::string rate_table_tsv(const std::vector<RateRow>& rows);

}  // namespace zerorank
