#pragma once

// Pitman asymptotic relative efficiency of the truncated tests against the
// standard ones under the two-part model.

#include <cstdint>
#include <span>
#include <vector>

namespace zerorank {

struct TwoSampleAreInput {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double delta_fg = 0.0;  // P(x < y) + P(x = y)/2 - 1/2, x ~ f, y ~ g
};

/// ARE(T_tW, T_W), leading term.
double are_two_sample(const TwoSampleAreInput& in);

struct KSampleAreInput {
  std::vector<double> thetas;
  std::vector<std::vector<double>> deltas;  // K x K, antisymmetric, zero diagonal
};

/// ARE(T_tKW, T_KW), leading term.
double are_k_sample(const KSampleAreInput& in);

/// Effect size between Beta(alpha_i, 1) and Beta(alpha_k, 1) continuous parts.
double delta_beta(double alpha_i, double alpha_k);

/// K x K effect-size matrix for Beta(alpha_k, 1) continuous parts.
std::vector<std::vector<double>> delta_matrix_beta(std::span<const double> alphas);

struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
};

struct DeltaEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of P(x < y) + P(x = y)/2 - 1/2 from paired draws.
DeltaEstimate delta_fg_mc(BetaShape f, BetaShape g, std::size_t draws, std::uint64_t seed);

}  // namespace zerorank
