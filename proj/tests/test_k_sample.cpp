#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "zerorank/errors.hpp"
#include "zerorank/k_sample.hpp"
#include "zerorank/random.hpp"
#include "zerorank/two_sample.hpp"

using namespace zerorank;

namespace {

using Groups = std::vector<std::vector<double>>;

// Literal equal-size construction with ranks in either direction.
double tkw_equal_oracle(const Groups& raw, bool descending) {
  const auto kept = oracle::truncate(raw);
  const std::size_t k = raw.size();
  const double N = static_cast<double>(raw[0].size());
  const double n = static_cast<double>(kept[0].size());
  std::vector<double> pool;
  for (const auto& g : kept) pool.insert(pool.end(), g.begin(), g.end());
  const auto r = oracle::midranks(pool, descending);
  std::vector<double> s(k);
  double q = 0;
  for (std::size_t g = 0; g < k; ++g) {
    double sum = 0;
    for (std::size_t j = 0; j < kept[g].size(); ++j) sum += r[g * kept[g].size() + j];
    s[g] = sum - n * (static_cast<double>(k) * n + 1) / 2;
    q += static_cast<double>(std::count_if(raw[g].begin(), raw[g].end(), [](double x) { return x > 0; })) / N;
  }
  q /= static_cast<double>(k);
  const double K = static_cast<double>(k);
  double t = 0;
  for (std::size_t i = 1; i < k; ++i) {
    double u = 0;
    for (std::size_t j = 0; j < i; ++j) u += s[j];
    u -= static_cast<double>(i) * s[i];
    const double di = static_cast<double>(i);
    t += u * u / (di * (di + 1) * K * K * N * N * N * q * q * q * (4.0 / 3 - q) / 4);
  }
  return t;
}

// Literal unequal-size contrasts U_i of the centred truncated rank-sums.
std::vector<double> unequal_U_oracle(const Groups& raw) {
  const auto kept = oracle::truncate(raw);
  std::vector<double> pool;
  std::size_t best_n = 0, best_N = 1, sum_N = 0;
  for (std::size_t g = 0; g < raw.size(); ++g) {
    const auto nz = static_cast<std::size_t>(std::count_if(raw[g].begin(), raw[g].end(), [](double x) { return x > 0; }));
    if (nz * best_N > best_n * raw[g].size()) {
      best_n = nz;
      best_N = raw[g].size();
    }
    sum_N += raw[g].size();
    pool.insert(pool.end(), kept[g].begin(), kept[g].end());
  }
  const double floor_total = static_cast<double>(best_n * sum_N / best_N);
  const auto r = oracle::midranks(pool);
  std::vector<double> s;
  std::size_t off = 0;
  for (const auto& g : kept) {
    double sum = 0;
    for (std::size_t j = 0; j < g.size(); ++j) sum += r[off + j];
    off += g.size();
    s.push_back(sum - (floor_total + 1) / 2 * static_cast<double>(g.size()));
  }
  std::vector<double> U;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    double u = 0;
    const double Ni1 = static_cast<double>(raw[i].size());
    for (std::size_t j = 0; j < i; ++j) u += Ni1 * s[j] - static_cast<double>(raw[j].size()) * s[i];
    U.push_back(u);
  }
  return U;
}

}  // namespace

TEST_SUITE("k_sample") {

TEST_CASE("identical groups give zero statistics") {
  const auto g = oracle::samples({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  const auto kw = kruskal_wallis_standard(g);
  CHECK(kw.statistic == doctest::Approx(0.0).scale(1));
  CHECK(kw.p_value == doctest::Approx(1.0));
  CHECK(kw.df == 2);
  CHECK(kw_truncated_equal(g).statistic == doctest::Approx(0.0).scale(1));
  CHECK(kw_truncated_unequal(g).statistic == doctest::Approx(0.0).scale(1));
}

TEST_CASE("Kruskal-Wallis matches the textbook H") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    Groups tie_free{std::vector<double>(4), std::vector<double>(5), std::vector<double>(6)};
    for (auto& grp : tie_free) {
      for (auto& v : grp) v = u(gen);
    }
    CHECK(kruskal_wallis_standard(oracle::samples(tie_free)).statistic ==
          doctest::Approx(oracle::kruskal_wallis_h(tie_free)).epsilon(1e-9));
    Groups tied{oracle::tied(gen, 7, 3, 0.4), oracle::tied(gen, 12, 3, 0.4), oracle::tied(gen, 9, 3, 0.4),
                oracle::tied(gen, 3, 3, 0.4)};
    tied[0][0] = 9;
    CHECK(kruskal_wallis_standard(oracle::samples(tied)).statistic ==
          doctest::Approx(oracle::kruskal_wallis_h(tied)).epsilon(1e-9));
  }
}

TEST_CASE("centred full rank-sums add to zero") {
  std::mt19937_64 gen(32);
  for (int rep = 0; rep < 50; ++rep) {
    const Groups raw{oracle::two_part(gen, 10 + rep, 0.5, 2, 2), oracle::two_part(gen, 20, 0.7, 2, 2),
                     oracle::two_part(gen, 15, 0.9, 2, 2)};
    McVarianceConfig mc;
    mc.replicates = 200;
    const auto st = k_sample_stats(oracle::samples(raw), mc);
    CHECK(std::accumulate(st.S.begin(), st.S.end(), 0.0) == doctest::Approx(0.0).scale(1e3));
    CHECK(st.Y.size() == 2);
    CHECK(st.U.size() == 2);
  }
}

TEST_CASE("equal-size truncated test reduces to the truncated Wilcoxon for K = 2") {
  std::mt19937_64 gen(33);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 10 + rep % 91;
    const double theta = 0.2 + 0.7 * (rep % 8) / 7.0;
    auto x = oracle::two_part(gen, n, theta, 2, 2);
    const auto y = oracle::two_part(gen, n, theta, 2, 2);
    x[0] = 0.25;
    const auto g = oracle::samples({x, y});
    CHECK(kw_truncated_equal(g).statistic ==
          doctest::Approx(wilcoxon_truncated(g[0], g[1]).statistic).epsilon(1e-9));
  }
}

TEST_CASE("equal-size truncated test matches the literal construction in both directions") {
  std::mt19937_64 gen(34);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + rep % 30;
    Groups raw;
    for (int g = 0; g < 2 + rep % 4; ++g) raw.push_back(oracle::tied(gen, n, 2 + rep % 6, 0.2 + 0.1 * g));
    raw[0][0] = 1;
    double got = 0;
    try {
      got = kw_truncated_equal(oracle::samples(raw)).statistic;
    } catch (const Error& e) {
      CHECK(e.degenerate());
      continue;
    }
    CHECK(got == doctest::Approx(tkw_equal_oracle(raw, false)).epsilon(1e-9));
    CHECK(got == doctest::Approx(tkw_equal_oracle(raw, true)).epsilon(1e-9));
  }
}

TEST_CASE("unequal-size contrasts match the literal construction") {
  std::mt19937_64 gen(35);
  McVarianceConfig mc;
  mc.replicates = 200;
  for (int rep = 0; rep < 150; ++rep) {
    Groups raw;
    for (int g = 0; g < 2 + rep % 3; ++g) raw.push_back(oracle::tied(gen, 3 + (rep + 11 * g) % 25, 6, 0.5));
    raw[0][0] = 3;
    raw[1][0] = 4;
    const auto st = k_sample_stats(oracle::samples(raw), mc);
    const auto U = unequal_U_oracle(raw);
    if (std::all_of(raw.begin(), raw.end(), [&](const auto& g) { return g.size() == raw[0].size(); })) continue;
    REQUIRE(st.U.size() == U.size());
    for (std::size_t i = 0; i < U.size(); ++i) CHECK(st.U[i] == doctest::Approx(U[i]).epsilon(1e-12));
  }
}

TEST_CASE("no zeros and no ties: unequal-size truncated test reproduces Kruskal-Wallis") {
  std::mt19937_64 gen(36);
  std::uniform_real_distribution<double> u(0.5, 2);
  for (int rep = 0; rep < 30; ++rep) {
    Groups raw{std::vector<double>(8 + rep), std::vector<double>(13), std::vector<double>(21)};
    for (auto& g : raw) {
      for (auto& v : g) v = u(gen);
    }
    const auto g = oracle::samples(raw);
    CHECK(kw_truncated_unequal(g).statistic ==
          doctest::Approx(kruskal_wallis_standard(g).statistic).epsilon(1e-6));
  }
}

TEST_CASE("theta_hat = 1 gives the exact conditional variance") {
  const std::vector<std::size_t> sizes{7, 11, 5, 9};
  for (std::size_t i = 1; i <= 3; ++i) {
    const auto est = estimate_var_U(sizes, 1.0, i);
    CHECK(est.variance_of_conditional_mean == 0.0);
    CHECK(est.variance == conditional_var_U(sizes, sizes, i));
    CHECK(est.redrawn == 0);
  }
}

TEST_CASE("conditional moments against enumeration of rank orders") {
  // Given n, every retained zero sits at one tied midrank and the non-zeros
  // take the ranks above in uniformly random order; enumerate those orders.
  const std::vector<std::size_t> sizes{3, 4, 2};
  const std::vector<std::size_t> nz{1, 2, 1};
  const auto plan = plan_truncation(sizes, nz);
  const std::size_t Z = plan.keep_total - 4;
  std::vector<int> owner{0, 1, 1, 2};
  std::sort(owner.begin(), owner.end());
  std::vector<double> u1, u2;
  do {
    std::vector<double> r(3, 0.0);
    for (int g = 0; g < 3; ++g) {
      r[g] = static_cast<double>(plan.keep[g] - nz[g]) * (static_cast<double>(Z) + 1) / 2;
    }
    for (std::size_t j = 0; j < owner.size(); ++j) r[owner[j]] += static_cast<double>(Z + j + 1);
    std::vector<double> s(3);
    for (int g = 0; g < 3; ++g) {
      s[g] = r[g] - (static_cast<double>(plan.floor_p_total) + 1) / 2 * static_cast<double>(plan.keep[g]);
    }
    const auto U = size_weighted_contrasts(s, sizes);
    u1.push_back(U[0]);
    u2.push_back(U[1]);
  } while (std::next_permutation(owner.begin(), owner.end()));
  auto moments = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - m) * (x - m);
    return std::pair{m, var / static_cast<double>(v.size())};
  };
  const auto [m1, v1] = moments(u1);
  const auto [m2, v2] = moments(u2);
  CHECK(conditional_mean_U(sizes, nz, 1) == doctest::Approx(m1).epsilon(1e-12));
  CHECK(conditional_mean_U(sizes, nz, 2) == doctest::Approx(m2).epsilon(1e-12));
  CHECK(conditional_var_U(sizes, nz, 1) == doctest::Approx(v1).epsilon(1e-12));
  CHECK(conditional_var_U(sizes, nz, 2) == doctest::Approx(v2).epsilon(1e-12));
}

TEST_CASE("mean conditional variance matches its closed-form expectation") {
  const std::vector<std::size_t> sizes{21, 30, 45};
  McVarianceConfig mc;
  mc.replicates = 20000;
  for (std::size_t i = 1; i <= 2; ++i) {
    const auto est = estimate_var_U(sizes, 0.5, i, mc);
    const double expect = expected_conditional_var_U(sizes, 0.5, i);
    CHECK(std::abs(est.mean_conditional_variance - expect) < 3 * est.mean_conditional_variance_se);
    CHECK(est.variance > est.mean_conditional_variance);
  }
}

TEST_CASE("estimate_var_U does not depend on the thread count") {
  const std::vector<std::size_t> sizes{70, 100, 150};
  McVarianceConfig one, many;
  one.replicates = many.replicates = 5000;
  many.threads = 3;
  for (std::size_t i = 1; i <= 2; ++i) {
    CHECK(estimate_var_U(sizes, 0.37, i, one).variance == estimate_var_U(sizes, 0.37, i, many).variance);
  }
}

TEST_CASE("cache hits equal fresh estimates") {
  VarUCache cache;
  McVarianceConfig mc;
  mc.replicates = 1000;
  const std::vector<std::size_t> sizes{5, 8, 13};
  const double fresh = estimate_var_U(sizes, 0.4, 2, mc).variance;
  CHECK(cache.variance(sizes, 0.4, 2, mc) == fresh);
  CHECK(cache.variance(sizes, 0.4, 2, mc) == fresh);
  CHECK(cache.size() == 1);
}

TEST_CASE("all-zero draws are redrawn, and too many are an error") {
  McVarianceConfig mc;
  mc.replicates = 2000;
  const std::vector<std::size_t> small{1, 2};
  const auto est = estimate_var_U(small, 0.3, 1, mc);
  CHECK(est.redrawn > 0);
  CHECK(est.replicates == 2000);
  CHECK_THROWS_AS(estimate_var_U(small, 0.01, 1, mc), Error);
  CHECK_THROWS_AS(estimate_var_U(small, 0.0, 1, mc), Error);
  mc.replicates = 50;
  CHECK_THROWS_AS(estimate_var_U(small, 0.5, 1, mc), Error);
}

TEST_CASE("unequal variant approaches the equal-size plug-in for large equal groups") {
  // The truncation drift makes the two variances differ by O(1/sqrt(N)):
  // about 7% at N = 400 and 1.5% at N = 20000 for theta = 0.5.
  std::mt19937_64 gen(37);
  McVarianceConfig mc;
  mc.replicates = 1000000;
  const Groups raw{oracle::two_part(gen, 20000, 0.5, 2, 2), oracle::two_part(gen, 20000, 0.5, 2, 2.05)};
  const auto g = oracle::samples(raw);
  const double eq = kw_truncated_equal(g).statistic;
  const double uneq = kw_truncated_unequal(g, mc).statistic;
  CHECK(uneq == doctest::Approx(eq).epsilon(0.02));

  double previous = 1e9;
  for (std::size_t n : {100, 1000, 10000}) {
    const std::vector<std::size_t> sizes{n, n};
    mc.replicates = 200000;
    const double nn = static_cast<double>(n);
    const double plug = 2 * nn * nn * nn * 0.125 * (4.0 / 3 - 0.5) * nn * nn;
    const double gap = std::abs(estimate_var_U(sizes, 0.5, 1, mc).variance / plug - 1);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(kw_truncated_equal(oracle::samples({{1, 0}, {2, 0, 1}})), Error);
  CHECK_THROWS_AS(kruskal_wallis_standard(oracle::samples({{1, 2}})), Error);
  try {
    kruskal_wallis_standard(oracle::samples({{0, 0}, {0}, {0, 0, 0}}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_constant);
  }
}

}  // TEST_SUITE
