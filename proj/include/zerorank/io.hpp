#pragma once

// Tab-separated abundance tables and sample metadata.

#include <iosfwd>
#include <string>
#include <vector>

namespace zerorank {

/// Taxa x samples matrix of non-negative values. Values may be counts or
/// relative abundances; nothing is normalised since every test is rank based.
struct AbundanceTable {
  std::string id_header = "taxon";  // first header cell, kept for round-trips
  std::vector<std::string> taxa;
  std::vector<std::string> samples;
  std::vector<std::vector<double>> values;  // values[taxon][sample]
};

/// Header: id column then sample ids. Each row: taxon id then one value per
/// sample. Errors carry `source` and the 1-based line number.
AbundanceTable parse_table(std::istream& in, const std::string& source = "<table>");
AbundanceTable load_table(const std::string& path);

/// Shortest round-trip formatting, so parse_table(write_table(t)) == t.
void write_table(std::ostream& out, const AbundanceTable& table);

struct SampleMetadata {
  std::vector<std::string> samples;
  std::vector<std::string> groups;    // empty when the file has no group column
  std::vector<std::string> subjects;  // empty when absent
  std::vector<std::string> times;     // empty when absent

  bool has_groups() const noexcept { return !groups.empty(); }
  bool longitudinal() const noexcept { return !subjects.empty() && !times.empty(); }
  /// Row index of `sample`, or samples.size() when missing.
  std::size_t find(const std::string& sample) const;
};

/// Header names the columns: sample (required), group, subject, time. Either
/// group or both subject and time must be present; column order is free.
SampleMetadata parse_metadata(std::istream& in, const std::string& source = "<metadata>");
SampleMetadata load_metadata(const std::string& path);

/// Splits on tabs, keeping empty fields; strips a trailing carriage return.
std::vector<std::string> split_tsv_line(const std::string& line);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace zerorank
