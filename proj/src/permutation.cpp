#include "zerorank/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "zerorank/errors.hpp"
#include "zerorank/parallel.hpp"
#include "zerorank/random.hpp"

namespace zerorank {

namespace {

// Statistics equal up to rounding count as ties; ties count as exceedances.
bool at_least(double permuted, double observed) {
  return permuted >= observed - 1e-10 * std::max(1.0, std::abs(observed));
}

PermutationResult run_blocks(const LabeledPool& lp,
                             const std::vector<std::vector<std::size_t>>& blocks,
                             Method method, const PermutationOptions& options) {
  if (options.permutations < 99) throw Error(ErrorKind::input, "need at least 99 permutations");

  VarUCache cache;
  TestOptions test = options.test;
  test.mc.threads = 1;
  if (!test.cache) test.cache = &cache;

  PermutationResult out;
  out.permutations = options.permutations;
  {
    const auto t = tally(lp.ranks, lp.labels, lp.groups);
    out.observed = run_test(method, lp.ranks, t, test).statistic;
  }

  const std::size_t count = options.permutations;
  std::vector<signed char> hit(count, 0);  // 1 exceed, 0 below, -1 degenerate
  parallel_for(count, options.threads, [&](std::size_t b) {
    auto rng = Rng::stream(options.seed, b);
    auto labels = lp.labels;
    for (const auto& block : blocks) {
      for (std::size_t i = block.size(); i > 1; --i) {
        const auto j = rng.below(i);
        std::swap(labels[block[i - 1]], labels[block[j]]);
      }
    }
    const auto t = tally(lp.ranks, labels, lp.groups);
    try {
      hit[b] = at_least(run_test(method, lp.ranks, t, test).statistic, out.observed) ? 1 : 0;
    } catch (const Error& e) {
      if (!e.degenerate()) throw;
      hit[b] = -1;
    }
  });

  for (auto h : hit) {
    if (h == 1) ++out.exceedances;
    if (h == -1) ++out.degenerate;
  }
  if (out.degenerate * 100 > count) {
    out.warnings.push_back("statistic undefined on " + std::to_string(out.degenerate) + " of " +
                           std::to_string(count) + " permutations");
  }
  out.p_value = (1.0 + static_cast<double>(out.exceedances)) / (1.0 + static_cast<double>(count));
  return out;
}

}  // namespace

PermutationResult perm_test_groups(std::span<const GroupSample> groups, Method method,
                                   const PermutationOptions& options) {
  if (groups.size() < 2) throw Error(ErrorKind::input, "need at least two groups");
  const auto lp = make_labeled_pool(groups);
  std::vector<std::vector<std::size_t>> blocks(1);
  blocks[0].resize(lp.labels.size());
  for (std::size_t i = 0; i < lp.labels.size(); ++i) blocks[0][i] = i;
  return run_blocks(lp, blocks, method, options);
}

TimepointGroups group_by_timepoint(const LongFormat& data) {
  TimepointGroups out;
  std::map<std::string, std::size_t> time_index;
  std::vector<std::string> subjects;
  std::map<std::string, std::vector<std::size_t>> by_subject;
  std::set<std::pair<std::string, std::string>> seen;

  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto& rec = data[r];
    if (!std::isfinite(rec.value) || rec.value < 0.0) {
      throw Error(ErrorKind::input, "record " + std::to_string(r) + " has an invalid value");
    }
    if (!seen.emplace(rec.subject, rec.timepoint).second) {
      throw Error(ErrorKind::input, "duplicate (subject, timepoint) pair: " + rec.subject + ", " +
                                        rec.timepoint);
    }
    if (time_index.emplace(rec.timepoint, out.timepoints.size()).second) {
      out.timepoints.push_back(rec.timepoint);
    }
    auto [it, fresh] = by_subject.try_emplace(rec.subject);
    if (fresh) subjects.push_back(rec.subject);
    it->second.push_back(r);
  }

  std::vector<std::vector<double>> values(out.timepoints.size());
  std::vector<std::vector<std::size_t>> subject_records;
  for (const auto& s : subjects) {
    const auto& recs = by_subject[s];
    if (recs.size() < 2) {
      out.dropped_subjects.push_back(s);
      continue;
    }
    subject_records.push_back(recs);
  }
  if (subject_records.empty()) {
    throw Error(ErrorKind::input, "no subject is observed at two or more timepoints");
  }
  // record -> position in the pooled vector (timepoint-major order)
  std::map<std::size_t, std::size_t> slot;
  for (const auto& recs : subject_records) {
    for (auto r : recs) {
      const auto t = time_index[data[r].timepoint];
      slot[r] = values[t].size();
      values[t].push_back(data[r].value);
    }
  }
  std::vector<std::size_t> offset(values.size(), 0);
  std::vector<std::string> kept_times;
  std::size_t running = 0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    offset[t] = running;
    running += values[t].size();
    if (!values[t].empty()) {
      kept_times.push_back(out.timepoints[t]);
      out.groups.emplace_back(values[t]);
    }
  }
  if (out.groups.size() < 2) throw Error(ErrorKind::input, "need at least two timepoints");
  out.timepoints = std::move(kept_times);
  for (const auto& recs : subject_records) {
    std::vector<std::size_t> block;
    for (auto r : recs) block.push_back(offset[time_index[data[r].timepoint]] + slot[r]);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

PermutationResult perm_test_within_subject(const LongFormat& data, Method method,
                                           const PermutationOptions& options) {
  const auto tg = group_by_timepoint(data);
  const auto lp = make_labeled_pool(tg.groups);
  auto out = run_blocks(lp, tg.blocks, method, options);
  for (const auto& s : tg.dropped_subjects) {
    out.warnings.push_back("subject " + s + " observed at fewer than two timepoints; dropped");
  }
  return out;
}

}  // namespace zerorank
