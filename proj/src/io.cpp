#include "zerorank/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "zerorank/errors.hpp"

namespace zerorank {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::parse, source + ":" + std::to_string(line) + ": " + msg);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line,
                  const std::string& taxon, const std::string& sample) {
  const auto where = " (taxon '" + taxon + "', sample '" + sample + "')";
  if (cell.empty()) fail(source, line, "blank cell" + where);
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(source, line, "not a number '" + cell + "'" + where);
  }
  if (v < 0.0) fail(source, line, "negative value '" + cell + "'" + where);
  return v == 0.0 ? 0.0 : v;  // folds -0
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path);
  return in;
}

}  // namespace

std::vector<std::string> split_tsv_line(const std::string& line) {
  std::string_view view(line);
  if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = view.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(view.substr(start));
      break;
    }
    fields.emplace_back(view.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

AbundanceTable parse_table(std::istream& in, const std::string& source) {
  AbundanceTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, source + ": empty table");
  ++lineno;
  auto header = split_tsv_line(line);
  if (header.size() < 2) fail(source, lineno, "header needs an id column and at least one sample");
  t.id_header = header[0];
  t.samples.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (const auto& s : t.samples) {
    if (s.empty()) fail(source, lineno, "blank sample id");
    if (!seen.insert(s).second) fail(source, lineno, "duplicate sample id '" + s + "'");
  }

  seen.clear();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") {
      // only trailing blank lines are tolerated
      std::string rest;
      while (std::getline(in, rest)) {
        ++lineno;
        if (!rest.empty() && rest != "\r") fail(source, lineno, "data after blank line");
      }
      break;
    }
    auto fields = split_tsv_line(line);
    if (fields.size() != header.size()) {
      fail(source, lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(source, lineno, "blank taxon id");
    if (!seen.insert(fields[0]).second) fail(source, lineno, "duplicate taxon id '" + fields[0] + "'");
    std::vector<double> row(t.samples.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = parse_cell(fields[j + 1], source, lineno, fields[0], t.samples[j]);
    }
    t.taxa.push_back(std::move(fields[0]));
    t.values.push_back(std::move(row));
  }
  return t;
}

AbundanceTable load_table(const std::string& path) {
  auto in = open(path);
  return parse_table(in, path);
}

void write_table(std::ostream& out, const AbundanceTable& table) {
  out << table.id_header;
  for (const auto& s : table.samples) out << '\t' << s;
  out << '\n';
  for (std::size_t i = 0; i < table.taxa.size(); ++i) {
    out << table.taxa[i];
    for (double v : table.values[i]) out << '\t' << format_double(v);
    out << '\n';
  }
}

std::size_t SampleMetadata::find(const std::string& sample) const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] == sample) return i;
  }
  return samples.size();
}

SampleMetadata parse_metadata(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, source + ": empty metadata");
  ++lineno;
  const auto header = split_tsv_line(line);
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::size_t c_sample = none, c_group = none, c_subject = none, c_time = none;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto& h = header[j];
    std::size_t* slot = h == "sample" ? &c_sample
                        : h == "group" ? &c_group
                        : h == "subject" ? &c_subject
                        : h == "time" ? &c_time
                                      : nullptr;
    if (slot == nullptr) continue;  // extra columns are ignored
    if (*slot != none) fail(source, lineno, "duplicate column '" + h + "'");
    *slot = j;
  }
  if (c_sample == none) fail(source, lineno, "missing 'sample' column");
  if ((c_subject == none) != (c_time == none)) {
    fail(source, lineno, "'subject' and 'time' columns must appear together");
  }
  if (c_group == none && c_subject == none) {
    fail(source, lineno, "need a 'group' column or 'subject' and 'time' columns");
  }

  SampleMetadata m;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_tsv_line(line);
    if (f.size() != header.size()) {
      fail(source, lineno, "expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(f.size()));
    }
    auto take = [&](std::size_t col, const char* name) {
      if (f[col].empty()) fail(source, lineno, std::string("blank ") + name);
      return f[col];
    };
    const auto sample = take(c_sample, "sample id");
    if (!seen.insert(sample).second) fail(source, lineno, "duplicate sample id '" + sample + "'");
    m.samples.push_back(sample);
    if (c_group != none) m.groups.push_back(take(c_group, "group"));
    if (c_subject != none) {
      m.subjects.push_back(take(c_subject, "subject"));
      m.times.push_back(take(c_time, "time"));
    }
  }
  return m;
}

SampleMetadata load_metadata(const std::string& path) {
  auto in = open(path);
  return parse_metadata(in, path);
}

}  // namespace zerorank
