#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zerorank {

enum class Method {
  wilcoxon,             // W
  truncated_wilcoxon,   // tW
  kruskal_wallis,       // KW
  truncated_kw,         // tKW, equal/unequal chosen from the group sizes
  truncated_kw_equal,
  truncated_kw_unequal,
};

std::string_view to_string(Method m);
/// Accepts the CLI spellings w, tw, kw, tkw (case-insensitive).
Method parse_method(std::string_view text);

struct TestOutcome {
  double statistic = 0.0;
  std::size_t df = 1;
  double p_value = 1.0;
  Method method = Method::wilcoxon;
  std::vector<std::size_t> n_retained;
  std::optional<double> permutation_p;
  std::vector<std::string> notes;
};

/// Upper tail of chi-square with `df` degrees of freedom.
double chisq_upper_tail(double statistic, std::size_t df);

}  // namespace zerorank
