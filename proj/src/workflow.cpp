#include "zerorank/workflow.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "zerorank/errors.hpp"
#include "zerorank/parallel.hpp"
#include "zerorank/permutation.hpp"
#include "zerorank/random.hpp"

namespace zerorank {

std::vector<std::optional<double>> bh_fdr(std::span<const std::optional<double>> p_values) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (!p_values[i]) continue;
    const double p = *p_values[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::input, "p-value outside [0, 1] at position " + std::to_string(i));
    }
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return *p_values[a] < *p_values[b]; });
  std::vector<std::optional<double>> q(p_values.size());
  const double m = static_cast<double>(order.size());
  double running = 1.0;
  for (std::size_t j = order.size(); j-- > 0;) {
    const double candidate = m * *p_values[order[j]] / static_cast<double>(j + 1);
    running = std::min(running, candidate);
    q[order[j]] = running;
  }
  return q;
}

std::size_t AnalysisResult::testable() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.p_value.has_value(); }));
}

namespace {

// Column indices of each group, plus group names, in table column order.
struct Layout {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> columns;
};

std::vector<std::size_t> metadata_rows(const AbundanceTable& table, const SampleMetadata& meta) {
  std::vector<std::size_t> rows(table.samples.size());
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < table.samples.size(); ++j) {
    rows[j] = meta.find(table.samples[j]);
    if (rows[j] == meta.samples.size()) missing.push_back(table.samples[j]);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
    throw Error(ErrorKind::input, "samples without metadata: " + list);
  }
  return rows;
}

Layout group_layout(const AbundanceTable& table, const SampleMetadata& meta) {
  if (!meta.has_groups()) throw Error(ErrorKind::input, "metadata has no 'group' column");
  const auto rows = metadata_rows(table, meta);
  Layout out;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& g = meta.groups[rows[j]];
    auto it = std::find(out.names.begin(), out.names.end(), g);
    if (it == out.names.end()) {
      out.names.push_back(g);
      out.columns.emplace_back();
      it = out.names.end() - 1;
    }
    out.columns[static_cast<std::size_t>(it - out.names.begin())].push_back(j);
  }
  if (out.names.size() < 2) throw Error(ErrorKind::input, "need at least two groups");
  return out;
}

void fill_descriptives(ResultRow& row, std::span<const GroupSample> groups) {
  for (const auto& g : groups) {
    row.zero_fractions.push_back(static_cast<double>(g.size() - g.nonzero_count()) / static_cast<double>(g.size()));
    row.retained.push_back(g.size());
  }
}

void fill_outcome(ResultRow& row, const TestOutcome& o) {
  row.statistic = o.statistic;
  row.df = o.df;
  row.p_asymptotic = o.p_value;
  row.p_value = o.p_value;
  row.retained = o.n_retained;
  row.notes = o.notes;
}

void adjust(AnalysisResult& result, bool fdr) {
  if (!fdr) return;
  std::vector<std::optional<double>> p;
  for (const auto& r : result.rows) p.push_back(r.p_value);
  const auto q = bh_fdr(p);
  for (std::size_t i = 0; i < q.size(); ++i) result.rows[i].q_value = q[i];
}

TestOptions shared_test_options(const AnalysisOptions& options, VarUCache& cache) {
  TestOptions t = options.test;
  t.mc.threads = 1;
  if (!t.cache) t.cache = &cache;
  return t;
}

}  // namespace

AnalysisResult run_differential_abundance(const AbundanceTable& table, const SampleMetadata& meta,
                                          Method method, const AnalysisOptions& options) {
  const auto layout = group_layout(table, meta);
  AnalysisResult result;
  result.groups = layout.names;
  result.rows.resize(table.taxa.size());

  VarUCache cache;
  const auto test = shared_test_options(options, cache);
  parallel_for(table.taxa.size(), options.threads, [&](std::size_t i) {
    auto& row = result.rows[i];
    row.taxon = table.taxa[i];
    row.method = method;
    std::vector<GroupSample> groups;
    for (const auto& cols : layout.columns) {
      std::vector<double> v;
      v.reserve(cols.size());
      for (auto c : cols) v.push_back(table.values[i][c]);
      groups.emplace_back(std::move(v));
    }
    fill_descriptives(row, groups);
    try {
      const auto lp = make_labeled_pool(groups);
      const auto t = tally(lp.ranks, lp.labels, lp.groups);
      fill_outcome(row, run_test(method, lp.ranks, t, test));
      if (options.permutations > 0) {
        PermutationOptions po;
        po.permutations = options.permutations;
        po.seed = stream_key(options.seed, i);
        po.test = test;
        const auto perm = perm_test_groups(groups, method, po);
        row.p_value = perm.p_value;
        for (const auto& w : perm.warnings) row.notes.push_back(w);
      }
    } catch (const Error& e) {
      if (!e.degenerate()) throw;
      row.statistic.reset();
      row.p_value.reset();
      row.p_asymptotic.reset();
      row.df = 0;
      row.status = to_string(e.kind());
    }
  });
  adjust(result, options.fdr);
  return result;
}

AnalysisResult run_longitudinal(const AbundanceTable& table, const SampleMetadata& meta,
                                Method method, const AnalysisOptions& options) {
  if (!meta.longitudinal()) {
    throw Error(ErrorKind::input, "metadata needs 'subject' and 'time' columns");
  }
  if (options.permutations < 99) {
    throw Error(ErrorKind::input, "within-subject testing needs at least 99 permutations");
  }
  const auto rows = metadata_rows(table, meta);

  auto long_format = [&](std::span<const double> values) {
    LongFormat data;
    data.reserve(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      data.push_back({meta.subjects[rows[j]], meta.times[rows[j]], values[j]});
    }
    return data;
  };

  AnalysisResult result;
  {
    const std::vector<double> zeros(rows.size(), 0.0);
    const auto shape = group_by_timepoint(long_format(zeros));
    result.groups = shape.timepoints;
    for (const auto& s : shape.dropped_subjects) {
      result.warnings.push_back("subject " + s + " observed at fewer than two timepoints; dropped");
    }
  }
  result.rows.resize(table.taxa.size());

  VarUCache cache;
  const auto test = shared_test_options(options, cache);
  parallel_for(table.taxa.size(), options.threads, [&](std::size_t i) {
    auto& row = result.rows[i];
    row.taxon = table.taxa[i];
    row.method = method;
    const auto data = long_format(table.values[i]);
    const auto tg = group_by_timepoint(data);
    fill_descriptives(row, tg.groups);
    try {
      fill_outcome(row, run_test(method, tg.groups, test));
      PermutationOptions po;
      po.permutations = options.permutations;
      po.seed = stream_key(options.seed, i);
      po.test = test;
      const auto perm = perm_test_within_subject(data, method, po);
      row.p_value = perm.p_value;
      for (const auto& w : perm.warnings) {
        if (w.rfind("subject ", 0) != 0) row.notes.push_back(w);
      }
    } catch (const Error& e) {
      if (!e.degenerate()) throw;
      row.statistic.reset();
      row.p_value.reset();
      row.p_asymptotic.reset();
      row.df = 0;
      row.status = to_string(e.kind());
    }
  });
  adjust(result, options.fdr);
  return result;
}

namespace {

std::string na_or(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

}  // namespace

void write_results_tsv(std::ostream& out, const AnalysisResult& result) {
  out << "taxon\tmethod\tstatistic\tdf\tp_value\tp_asymptotic\tq_value";
  for (const auto& g : result.groups) out << "\tzero_frac_" << g;
  for (const auto& g : result.groups) out << "\tretained_" << g;
  out << "\tstatus\n";
  for (const auto& r : result.rows) {
    out << r.taxon << '\t' << to_string(r.method) << '\t' << na_or(r.statistic) << '\t';
    if (r.statistic) {
      out << r.df;
    } else {
      out << "NA";
    }
    out << '\t' << na_or(r.p_value) << '\t' << na_or(r.p_asymptotic) << '\t' << na_or(r.q_value);
    for (double z : r.zero_fractions) out << '\t' << format_double(z);
    for (auto k : r.retained) out << '\t' << k;
    out << '\t' << r.status << '\n';
  }
}

void write_results_json(std::ostream& out, const AnalysisResult& result) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (const auto& r : result.rows) {
    nlohmann::json j;
    j["taxon"] = r.taxon;
    j["method"] = std::string(to_string(r.method));
    j["statistic"] = opt(r.statistic);
    j["df"] = r.statistic ? nlohmann::json(r.df) : nlohmann::json(nullptr);
    j["p_value"] = opt(r.p_value);
    j["p_asymptotic"] = opt(r.p_asymptotic);
    j["q_value"] = opt(r.q_value);
    nlohmann::json zf = nlohmann::json::object();
    nlohmann::json kept = nlohmann::json::object();
    for (std::size_t g = 0; g < result.groups.size() && g < r.zero_fractions.size(); ++g) {
      zf[result.groups[g]] = r.zero_fractions[g];
      if (g < r.retained.size()) kept[result.groups[g]] = r.retained[g];
    }
    j["zero_fractions"] = zf;
    j["retained"] = kept;
    j["status"] = r.status;
    j["notes"] = r.notes;
    out << j.dump() << '\n';
  }
}

}  // namespace zerorank
