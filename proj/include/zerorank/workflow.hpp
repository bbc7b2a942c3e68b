#pragma once

// Per-taxon differential abundance with Benjamini-Hochberg adjustment.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zerorank/dispatch.hpp"
#include "zerorank/io.hpp"

namespace zerorank {

/// Benjamini-Hochberg step-up q-values over the non-missing entries; missing
/// entries stay missing and do not count towards m.
std::vector<std::optional<double>> bh_fdr(std::span<const std::optional<double>> p_values);

struct ResultRow {
  std::string taxon;
  Method method = Method::wilcoxon;
  std::optional<double> statistic;    // missing when the test is undefined for the taxon
  std::size_t df = 0;
  std::optional<double> p_value;      // permutation p when permutations were run
  std::optional<double> p_asymptotic;
  std::optional<double> q_value;
  std::vector<double> zero_fractions;  // per group
  std::vector<std::size_t> retained;   // per group; full sizes for untruncated tests
  std::string status = "ok";           // error kind for undefined rows
  std::vector<std::string> notes;
};

struct AnalysisOptions {
  TestOptions test;
  std::size_t permutations = 0;  // 0: asymptotic p-values only
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool fdr = true;
};

struct AnalysisResult {
  std::vector<std::string> groups;  // group labels in column order
  std::vector<ResultRow> rows;      // table taxon order
  std::vector<std::string> warnings;

  std::size_t testable() const;
};

/// Splits samples by metadata group (first appearance in table column order)
/// and tests every taxon independently. Requires at least two groups.
AnalysisResult run_differential_abundance(const AbundanceTable& table, const SampleMetadata& meta,
                                          Method method, const AnalysisOptions& options);

/// Repeated measures: timepoints are the groups and labels are permuted within
/// subjects. Requires options.permutations >= 99.
AnalysisResult run_longitudinal(const AbundanceTable& table, const SampleMetadata& meta,
                                Method method, const AnalysisOptions& options);

/// Columns: taxon, method, statistic, df, p_value, p_asymptotic, q_value,
/// zero_frac_<group>..., retained_<group>..., status. Missing values print NA.
void write_results_tsv(std::ostream& out, const AnalysisResult& result);

/// One JSON object per line.
void write_results_json(std::ostream& out, const AnalysisResult& result);

}  // namespace zerorank
