#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "zerorank/are.hpp"
#include "zerorank/errors.hpp"
#include "zerorank/two_sample.hpp"
#include "zerorank/twopart_sim.hpp"

using namespace zerorank;

namespace {

double binomial_se(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-4) / n); }

ExperimentConfig null_config(std::vector<std::size_t> sizes, Method m, std::size_t reps) {
  ExperimentConfig c;
  c.specs.assign(sizes.size(), TwoPartSpec{0.5, 2, 2});
  c.sizes = {std::move(sizes)};
  c.replicates = reps;
  c.alphas = {0.05, 0.1};
  c.methods = {m};
  c.seed = 9;
  c.mc.replicates = 2000;
  return c;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("two-part draws") {
  auto rng = Rng::stream(1, 0);
  const auto g = sample_two_part({0.3, 2, 5}, 100000, rng);
  const double se = std::sqrt(0.3 * 0.7 / 100000);
  CHECK(std::abs(g.nonzero_fraction() - 0.3) < 4 * se);
  for (double v : g.values()) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }

  const auto u = sample_two_part({1.0, 1, 1}, 100000, rng);
  CHECK(u.nonzero_count() == 100000);
  double mean = 0;
  for (double v : u.values()) mean += v;
  mean /= 100000;
  CHECK(std::abs(mean - 0.5) < 3 * std::sqrt(1.0 / 12 / 100000));

  CHECK(sample_two_part({0.0, 2, 2}, 50, rng).nonzero_count() == 0);
  CHECK_THROWS_AS((TwoPartSpec{1.2, 2, 2}.validate()), Error);
  CHECK_THROWS_AS((TwoPartSpec{0.5, 0, 2}.validate()), Error);
}

TEST_CASE("depth reduction touches only the smallest non-zeros") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  v.insert(v.end(), 20, 0.0);
  const GroupSample g(v);
  auto rng = Rng::stream(2, 0);
  const auto all = apply_depth_reduction(g, {1.0, 0.05}, rng);
  CHECK(all.nonzero_count() == 90);
  for (std::size_t i = 0; i < 100; ++i) CHECK(all.values()[i] == (i < 10 ? 0.0 : v[i]));

  std::vector<double> big(100000);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i + 1);
  const auto half = apply_depth_reduction(GroupSample(big), {0.5, 0.05}, rng);
  const double zeroed = static_cast<double>(100000 - half.nonzero_count());
  CHECK(std::abs(zeroed - 5000) < 3 * std::sqrt(10000 * 0.25));

  // never adds non-zeros
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 50; ++rep) {
    const GroupSample s(oracle::two_part(gen, 80, 0.6, 2, 2));
    CHECK(apply_depth_reduction(s, {0.5, 0.1}, rng).nonzero_count() <= s.nonzero_count());
  }
  CHECK_THROWS_AS((DepthReductionSpec{1.5, 0.05}.validate()), Error);
}

TEST_CASE("type I error of a small experiment") {
  auto cfg = null_config({30, 45}, Method::wilcoxon, 4000);
  cfg.methods = {Method::wilcoxon, Method::truncated_wilcoxon};
  const auto rows = run_type1(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.setting == "30,45");
    CHECK(r.std_err == doctest::Approx(binomial_se(r.estimate, 4000 - static_cast<double>(r.degenerate))).epsilon(0.01));
    if (r.method == "W") {
      CHECK(std::abs(r.estimate - r.alpha) < 4 * binomial_se(r.alpha, 4000));
    } else {
      // the plug-in variance is a leading-order term, so small samples run
      // anti-conservative
      CHECK(r.method == "tW");
      CHECK(r.estimate > r.alpha - 4 * binomial_se(r.alpha, 4000));
      CHECK(r.estimate < r.alpha + 0.04);
    }
  }
  const auto again = run_type1(cfg);
  CHECK(again[0].estimate == rows[0].estimate);

  auto bad = cfg;
  bad.specs[1].theta = 0.6;
  CHECK_THROWS_AS(run_type1(bad), Error);
}

TEST_CASE("unequal three-group tKW under the null") {
  const auto cfg = null_config({20, 30, 45}, Method::truncated_kw, 2000);
  const auto rows = run_type1(cfg);
  for (const auto& r : rows) CHECK(std::abs(r.estimate - r.alpha) < 4 * binomial_se(r.alpha, 2000));
}

TEST_CASE("simulated p-values do not depend on the thread count") {
  auto cfg = null_config({25, 25, 25}, Method::truncated_kw, 300);
  cfg.methods = {Method::kruskal_wallis, Method::truncated_kw};
  const auto one = simulate_p_values(cfg, 0);
  cfg.threads = 3;
  const auto many = simulate_p_values(cfg, 0);
  REQUIRE(one.size() == 2);
  for (std::size_t m = 0; m < 2; ++m) {
    REQUIRE(one[m].size() == 300);
    for (std::size_t i = 0; i < 300; ++i) {
      CHECK(((std::isnan(one[m][i]) && std::isnan(many[m][i])) || one[m][i] == many[m][i]));
    }
  }
}

TEST_CASE("power grid with a reduced-depth arm") {
  ExperimentConfig c;
  c.specs = {{0.5, 1.5, 2}, {0.5, 2, 2}, {0.5, 2.5, 2}};
  c.sizes = {{60, 60, 60}, {150, 150, 150}};
  c.replicates = 600;
  c.alphas = {0.05};
  c.methods = {Method::kruskal_wallis, Method::truncated_kw};
  c.depth_reduction = DepthReductionSpec{0.5, 0.05};
  const auto rows = run_power(c);
  REQUIRE(rows.size() == 8);
  int depth_rows = 0;
  for (const auto& r : rows) {
    CHECK(r.power);
    CHECK(r.grid_n == (r.setting == "60,60,60" ? 60u : 150u));
    if (r.method.find("+depth") != std::string::npos) ++depth_rows;
    CHECK(r.estimate > 0.05);
  }
  CHECK(depth_rows == 4);
  auto find = [&](const std::string& m, std::size_t n) {
    return std::find_if(rows.begin(), rows.end(), [&](const RateRow& r) { return r.method == m && r.grid_n == n; })->estimate;
  };
  CHECK(find("tKW", 150) > find("tKW", 60));
  CHECK(find("KW", 150) > find("KW", 60));

  const auto tsv = rate_table_tsv(rows);
  CHECK(tsv.rfind("method\tsetting\talpha_or_N\testimate\tstd_err\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 9);
}

TEST_CASE("no zeros: expected full-pool statistic is -N1 N2 Delta") {
  // E[S] = N1 N2 (P(X > Y) - 1/2) and Delta = P(X < Y) - 1/2 for X ~ f, Y ~ g.
  const BetaShape f{2, 2.75}, g{2, 2};
  const double delta = delta_fg_mc(f, g, 1000000, 5).value;
  auto rng = Rng::stream(6, 0);
  const std::size_t n1 = 40, n2 = 50;
  double sum_S = 0, sum_sq = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const auto x = sample_two_part({1.0, f.alpha, f.beta}, n1, rng);
    const auto y = sample_two_part({1.0, g.alpha, g.beta}, n2, rng);
    const auto st = two_sample_stats(x, y);
    CHECK(st.s == doctest::Approx(-st.S));
    sum_S += st.S;
    sum_sq += st.S * st.S;
  }
  const double mean = sum_S / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean + n1 * n2 * delta) < 4 * se + n1 * n2 * 0.002);
}

TEST_CASE("empirical ARE") {
  EmpiricalAreSetting s;
  s.theory = {1.0, 1.0, 0.1};
  s.f = {2, 2.75};
  s.g = {2, 2};
  s.replicates = 2000;
  const auto flat = run_empirical_are(s);
  CHECK(flat.value == doctest::Approx(1.0).epsilon(1e-9));  // s = -S when nothing is zero
  CHECK(flat.skipped == 0);

  s.theory = {0.4, 0.6, 0.1};
  const auto a = run_empirical_are(s);
  CHECK(a.value > 1.0);
  CHECK(a.null_var_s > 0);
  s.replicates = 999;
  CHECK_THROWS_AS(run_empirical_are(s), Error);
}

}  // TEST_SUITE
