#pragma once

// Independent reference implementations used as oracles. They follow the
// textbook definitions literally (sorting, subset enumeration, O(n^2) ranks)
// and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "zerorank/rank_core.hpp"

namespace oracle {

/// Midrank by counting: #(< x) + (#(== x) + 1) / 2.
inline std::vector<double> midranks(const std::vector<double>& v, bool descending = false) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (double w : v) {
      if (w == v[i]) {
        ++equal;
      } else if (descending ? w > v[i] : w < v[i]) {
        ++below;
      }
    }
    r[i] = below + (equal + 1.0) / 2.0;
  }
  return r;
}

/// Visits every size-k subset of {0..n-1}.
inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) idx.push_back(i);
    }
    f(idx);
  } while (std::prev_permutation(mask.begin(), mask.end()));
}

/// Literal zero truncation: group i keeps its floor(p N_i) largest values with
/// p = max n_i / N_i; the floor is taken in integer arithmetic.
inline std::vector<std::vector<double>> truncate(const std::vector<std::vector<double>>& groups) {
  std::size_t best_n = 0, best_N = 1;
  for (const auto& g : groups) {
    const auto n = static_cast<std::size_t>(std::count_if(g.begin(), g.end(), [](double x) { return x > 0; }));
    if (n * best_N > best_n * g.size()) {
      best_n = n;
      best_N = g.size();
    }
  }
  std::vector<std::vector<double>> out;
  for (const auto& g : groups) {
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t keep = best_n * g.size() / best_N;  // exact floor
    sorted.resize(keep);
    out.push_back(sorted);
  }
  return out;
}

/// Textbook Kruskal-Wallis H with the usual tie correction.
inline double kruskal_wallis_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const auto r = midranks(pooled);
  const double M = static_cast<double>(pooled.size());
  double h = 0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double sum = 0;
    for (std::size_t j = 0; j < g.size(); ++j) sum += r[offset + j];
    offset += g.size();
    h += sum * sum / static_cast<double>(g.size());
  }
  h = 12.0 / (M * (M + 1)) * h - 3.0 * (M + 1);
  auto sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  return h / (1.0 - ties / (M * M * M - M));
}

/// Two-part draws from std::mt19937_64 (independent of the library RNG).
inline std::vector<double> two_part(std::mt19937_64& gen, std::size_t n, double theta, double a,
                                    double b) {
  std::bernoulli_distribution nz(theta);
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) {
    if (nz(gen)) {
      const double u = ga(gen);
      x = u / (u + gb(gen));
      if (x <= 0) x = 1e-300;
    } else {
      x = 0.0;
    }
  }
  return v;
}

/// Small-integer data with many ties, including zeros.
inline std::vector<double> tied(std::mt19937_64& gen, std::size_t n, int levels, double zero_prob) {
  std::bernoulli_distribution zero(zero_prob);
  std::uniform_int_distribution<int> lvl(1, levels);
  std::vector<double> v(n);
  for (auto& x : v) x = zero(gen) ? 0.0 : lvl(gen);
  return v;
}

inline std::vector<zerorank::GroupSample> samples(const std::vector<std::vector<double>>& groups) {
  std::vector<zerorank::GroupSample> out;
  for (const auto& g : groups) out.emplace_back(g);
  return out;
}

/// One-sample Kolmogorov-Smirnov distance against Uniform(0, 1).
inline double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace oracle
