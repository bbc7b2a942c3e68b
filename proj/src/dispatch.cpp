#include "zerorank/dispatch.hpp"

#include "zerorank/errors.hpp"

namespace zerorank {

TestOutcome run_test(Method method, const PooledRanks& pool, const GroupTallies& t,
                     const TestOptions& options) {
  switch (method) {
    case Method::wilcoxon: return wilcoxon_standard(pool, t, options.variance_mode);
    case Method::truncated_wilcoxon: return wilcoxon_truncated(pool, t);
    case Method::kruskal_wallis: return kruskal_wallis_standard(pool, t);
    case Method::truncated_kw: return kw_truncated(pool, t, options.mc, options.cache);
    case Method::truncated_kw_equal: return kw_truncated_equal(pool, t);
    case Method::truncated_kw_unequal:
      return kw_truncated_unequal(pool, t, options.mc, options.cache);
  }
  throw Error(ErrorKind::input, "unknown method");
}

TestOutcome run_test(Method method, std::span<const GroupSample> groups,
                     const TestOptions& options) {
  const auto lp = make_labeled_pool(groups);
  const auto t = tally(lp.ranks, lp.labels, lp.groups);
  return run_test(method, lp.ranks, t, options);
}

}  // namespace zerorank
