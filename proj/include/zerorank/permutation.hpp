#pragma once

// Permutation null distributions: free relabelling of independent groups and
// relabelling of timepoints within subjects.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zerorank/dispatch.hpp"

namespace zerorank {

struct PermutationResult {
  double observed = 0.0;
  double p_value = 1.0;          // (1 + exceedances) / (1 + permutations)
  std::size_t permutations = 0;
  std::size_t exceedances = 0;
  std::size_t degenerate = 0;    // permutations on which the statistic was undefined
  std::vector<std::string> warnings;
};

struct PermutationOptions {
  std::size_t permutations = 9999;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  TestOptions test;
};

/// Relabels pooled observations uniformly at random, keeping group sizes.
PermutationResult perm_test_groups(std::span<const GroupSample> groups, Method method,
                                   const PermutationOptions& options);

struct LongRecord {
  std::string subject;
  std::string timepoint;
  double value = 0.0;
};

/// Long-format repeated measurements.
using LongFormat = std::vector<LongRecord>;

/// Permutes timepoint labels independently inside each subject. Timepoint
/// groups follow first appearance order; subjects observed at fewer than two
/// timepoints are dropped with a warning.
PermutationResult perm_test_within_subject(const LongFormat& data, Method method,
                                           const PermutationOptions& options);

/// Timepoint groups built from `data` after dropping single-timepoint
/// subjects, in first-appearance order; exposed for reporting.
struct TimepointGroups {
  std::vector<std::string> timepoints;
  std::vector<GroupSample> groups;
  std::vector<std::vector<std::size_t>> blocks;  // pooled indices per subject
  std::vector<std::string> dropped_subjects;
};

TimepointGroups group_by_timepoint(const LongFormat& data);

}  // namespace zerorank
