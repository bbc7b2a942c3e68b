#include "zerorank/outcome.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cctype>
#include <string>

#include "zerorank/errors.hpp"

namespace zerorank {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::wilcoxon: return "W";
    case Method::truncated_wilcoxon: return "tW";
    case Method::kruskal_wallis: return "KW";
    case Method::truncated_kw: return "tKW";
    case Method::truncated_kw_equal: return "tKW-equal";
    case Method::truncated_kw_unequal: return "tKW-unequal";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "w") return Method::wilcoxon;
  if (s == "tw") return Method::truncated_wilcoxon;
  if (s == "kw") return Method::kruskal_wallis;
  if (s == "tkw") return Method::truncated_kw;
  if (s == "tkw-equal") return Method::truncated_kw_equal;
  if (s == "tkw-unequal") return Method::truncated_kw_unequal;
  throw Error(ErrorKind::input, "unknown method '" + std::string(text) + "'");
}

double chisq_upper_tail(double statistic, std::size_t df) {
  if (df == 0) throw Error(ErrorKind::input, "chi-square needs df >= 1");
  if (!(statistic > 0.0)) return 1.0;
  const double p = boost::math::gamma_q(0.5 * static_cast<double>(df), 0.5 * statistic);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace zerorank
