#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <cmath>

#include "zerorank/are.hpp"
#include "zerorank/errors.hpp"

using namespace zerorank;

namespace {

// Delta_fg = integral of F(y) g(y) dy - 1/2 by composite Simpson.
double delta_quadrature(BetaShape f, BetaShape g) {
  const boost::math::beta_distribution<> F(f.alpha, f.beta), G(g.alpha, g.beta);
  const int n = 20000;
  const double h = 1.0 / n;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double y = i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    acc += w * boost::math::cdf(F, y) * boost::math::pdf(G, y);
  }
  return acc * h / 3 - 0.5;
}

}  // namespace

TEST_SUITE("are") {

TEST_CASE("two-sample values") {
  CHECK(are_two_sample({0.5, 0.5, 0.1}) == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(are_two_sample({0.3, 0.8, 0.1}) == doctest::Approx(1.5536140422).epsilon(1e-9));
}

TEST_CASE("no zeros means no efficiency change") {
  for (double d : {-0.4, -0.1, 0.05, 0.3}) CHECK(are_two_sample({1.0, 1.0, d}) == 1.0);
  for (std::size_t k = 2; k <= 6; ++k) {
    std::vector<double> alphas;
    for (std::size_t i = 0; i < k; ++i) alphas.push_back(0.5 + static_cast<double>(i));
    KSampleAreInput in{std::vector<double>(k, 1.0), delta_matrix_beta(alphas)};
    CHECK(are_k_sample(in) == 1.0);
  }
}

TEST_CASE("K = 2 k-sample ARE equals the two-sample ARE") {
  for (double t1 : {0.2, 0.5, 0.9}) {
    for (double t2 : {0.3, 0.6, 1.0}) {
      for (double d : {-0.2, 0.05, 0.25}) {
        const KSampleAreInput in{{t1, t2}, {{0.0, d}, {-d, 0.0}}};
        try {
          CHECK(are_k_sample(in) == doctest::Approx(are_two_sample({t1, t2, d})).epsilon(1e-12));
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::undefined_are);
        }
      }
    }
  }
}

TEST_CASE("equal thetas with increasing Beta shapes: ARE above 1 and falling to 1") {
  const std::vector<double> alphas{1, 2, 3, 4, 5};
  double previous = 1e300;
  for (double theta = 0.1; theta < 0.995; theta += 0.01) {
    const double a = are_k_sample({std::vector<double>(5, theta), delta_matrix_beta(alphas)});
    CHECK(a > 1.0);
    CHECK(a < previous);
    previous = a;
  }
  CHECK(previous == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("zero-Beta effect size") {
  CHECK(delta_beta(2, 2) == 0.0);
  CHECK(delta_beta(1, 3) == doctest::Approx(0.25));
  CHECK(delta_beta(3, 1) == doctest::Approx(-0.25));
  const auto est = delta_fg_mc({1.5, 1}, {2.5, 1}, 200000, 7);
  CHECK(std::abs(est.value - delta_beta(1.5, 2.5)) < 4 * est.std_error);
  const auto m = delta_matrix_beta(std::vector<double>{1, 2, 4});
  for (int i = 0; i < 3; ++i) {
    CHECK(m[i][i] == 0.0);
    for (int j = 0; j < 3; ++j) CHECK(m[i][j] == -m[j][i]);
  }
}

TEST_CASE("Monte Carlo effect size against quadrature") {
  const double exact = delta_quadrature({2, 2.75}, {2, 2});
  CHECK(exact == doctest::Approx(0.1013).epsilon(1e-3));
  const auto est = delta_fg_mc({2, 2.75}, {2, 2}, 1000000, 11);
  CHECK(std::abs(est.value - exact) < 4 * est.std_error);
  CHECK(est.std_error < 0.001);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(are_two_sample({0.0, 0.5, 0.1}), Error);
  CHECK_THROWS_AS(are_two_sample({0.5, 0.5, 0.7}), Error);
  try {
    are_two_sample({0.5, 0.5, 0.0});
    FAIL("expected UndefinedARE");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined_are);
  }
  CHECK_THROWS_AS(are_k_sample({{0.5, 0.5}, {{0.0, 0.1}, {0.1, 0.0}}}), Error);
  CHECK_THROWS_AS(are_k_sample({{0.5, 0.5}, {{0.1, 0.1}, {-0.1, 0.0}}}), Error);
  CHECK_THROWS_AS(are_k_sample({{0.5}, {{0.0}}}), Error);
  CHECK_THROWS_AS(delta_fg_mc({1, 1}, {1, 1}, 10, 1), Error);
}

}  // TEST_SUITE
