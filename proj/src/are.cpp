#include "zerorank/are.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zerorank/errors.hpp"
#include "zerorank/random.hpp"

namespace zerorank {

namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::input, "non-zero probability must lie in (0, 1]");
  }
}

}  // namespace

double are_two_sample(const TwoSampleAreInput& in) {
  check_theta(in.theta1);
  check_theta(in.theta2);
  if (!(std::abs(in.delta_fg) <= 0.5)) throw Error(ErrorKind::input, "|delta_fg| must be <= 1/2");

  const double theta = 0.5 * (in.theta1 + in.theta2);
  const double theta_max = std::max(in.theta1, in.theta2);
  const double dtheta = in.theta2 - in.theta1;
  const double shift = in.theta1 * in.theta2 * in.delta_fg;

  const double denom = shift + dtheta / 2.0;
  if (denom == 0.0) throw Error(ErrorKind::undefined_are, "effects cancel; ARE undefined");
  const double ratio = (shift + dtheta * theta_max / 2.0) / denom;
  const double factor =
      (1.0 - theta + theta * theta / 3.0) / (theta * theta * (1.0 - theta + 1.0 / 3.0));
  return factor * ratio * ratio;
}

double are_k_sample(const KSampleAreInput& in) {
  const std::size_t k = in.thetas.size();
  if (k < 2) throw Error(ErrorKind::input, "need at least two groups");
  if (in.deltas.size() != k) throw Error(ErrorKind::input, "delta matrix must be K x K");
  for (std::size_t j = 0; j < k; ++j) {
    check_theta(in.thetas[j]);
    if (in.deltas[j].size() != k) throw Error(ErrorKind::input, "delta matrix must be K x K");
    if (in.deltas[j][j] != 0.0) throw Error(ErrorKind::input, "delta matrix diagonal must be 0");
    for (std::size_t l = 0; l < j; ++l) {
      if (std::abs(in.deltas[j][l] + in.deltas[l][j]) > 1e-12) {
        throw Error(ErrorKind::input, "delta matrix must be antisymmetric");
      }
    }
  }
  const auto& th = in.thetas;
  const auto& d = in.deltas;
  const double kd = static_cast<double>(k);
  double theta = 0.0;
  for (double t : th) theta += t;
  theta /= kd;
  const double theta_max = *std::max_element(th.begin(), th.end());

  // weighted effect of group a against everyone else
  auto row = [&](std::size_t a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (b != a) acc += th[b] * d[a][b];
    }
    return th[a] * acc;
  };

  double num = 0.0, den = 0.0, head_row = 0.0, head_theta = 0.0;
  bool any_signal = false;
  for (std::size_t i = 1; i < k; ++i) {
    const double di = static_cast<double>(i);
    head_row += row(i - 1);
    head_theta += th[i - 1];
    const double a = head_row - di * row(i);
    const double b = di * th[i] - head_theta;
    const double trunc = a + kd * theta_max * b / 2.0;
    const double full = a + kd * b / 2.0;
    if (full != 0.0) any_signal = true;
    num += trunc * trunc / (theta * theta * di * (di + 1.0) * (1.0 - theta + 1.0 / 3.0));
    den += full * full / (di * (di + 1.0) * (1.0 - theta + theta * theta / 3.0));
  }
  if (!any_signal) throw Error(ErrorKind::undefined_are, "no contrast carries signal; ARE undefined");
  return num / den;
}

double delta_beta(double alpha_i, double alpha_k) {
  if (!(alpha_i > 0.0) || !(alpha_k > 0.0) || !std::isfinite(alpha_i) || !std::isfinite(alpha_k)) {
    throw Error(ErrorKind::input, "Beta shapes must be positive");
  }
  return alpha_k / (alpha_i + alpha_k) - 0.5;
}

std::vector<std::vector<double>> delta_matrix_beta(std::span<const double> alphas) {
  const std::size_t k = alphas.size();
  std::vector<std::vector<double>> d(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      d[i][j] = delta_beta(alphas[i], alphas[j]);
      d[j][i] = -d[i][j];
    }
  }
  return d;
}

DeltaEstimate delta_fg_mc(BetaShape f, BetaShape g, std::size_t draws, std::uint64_t seed) {
  if (draws < 1000) throw Error(ErrorKind::input, "delta_fg_mc needs at least 1000 draws");
  auto rng = Rng::stream(seed, 0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = sample_beta(rng, f.alpha, f.beta);
    const double y = sample_beta(rng, g.alpha, g.beta);
    const double score = x < y ? 1.0 : (x == y ? 0.5 : 0.0);
    sum += score;
    sum_sq += score * score;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean - 0.5, std::sqrt(var / n)};
}

}  // namespace zerorank
