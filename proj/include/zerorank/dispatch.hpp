#pragma once

#include <span>

#include "zerorank/k_sample.hpp"
#include "zerorank/outcome.hpp"
#include "zerorank/rank_core.hpp"
#include "zerorank/two_sample.hpp"

namespace zerorank {

struct TestOptions {
  VarianceMode variance_mode = VarianceMode::tie_corrected;
  McVarianceConfig mc;
  VarUCache* cache = nullptr;
};

TestOutcome run_test(Method method, const PooledRanks& pool, const GroupTallies& t,
                     const TestOptions& options = {});
TestOutcome run_test(Method method, std::span<const GroupSample> groups,
                     const TestOptions& options = {});

}  // namespace zerorank
