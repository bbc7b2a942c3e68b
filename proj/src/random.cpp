#include "zerorank/random.hpp"

#include <cmath>
#include <random>

#include "zerorank/errors.hpp"

namespace zerorank {

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double sample_standard_normal(Rng& rng) {
  // Marsaglia polar method; the second variate is discarded so the
  // generator carries no hidden state between calls.
  double u, v, s;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double sample_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorKind::input, "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    double u;
    do {
      u = rng.uniform();
    } while (u == 0.0);
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(Rng& rng, double a, double b) {
  for (;;) {
    const double x = sample_gamma(rng, a);
    const double y = sample_gamma(rng, b);
    const double total = x + y;
    // Both gammas can underflow for tiny shapes; redraw rather than divide 0/0.
    if (total > 0.0) return x / total;
  }
}

std::uint64_t sample_binomial(Rng& rng, std::uint64_t trials, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw Error(ErrorKind::input, "binomial probability outside [0, 1]");
  }
  if (prob == 0.0 || trials == 0) return 0;
  if (prob == 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(trials), prob);
  return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace zerorank
