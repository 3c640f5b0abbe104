#include "tpnsi/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace tpnsi {

double erfcx(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("erfcx: requires x >= 0");
  if (x <= 6.0) {
    // erfc(6) ~ 2.2e-17 is still a normal double, so the direct product is
    // accurate here.
    return std::exp(x * x) * std::erfc(x);
  }
  // Asymptotic series erfcx(x) ~ (1/(x sqrt(pi))) sum_k (-1)^k (2k-1)!! /
  // (2x^2)^k; for x > 6 the terms drop below machine epsilon before the
  // divergent turn-around.
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 24; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  constexpr double inv_sqrt_pi = 0.564189583547756286948079451561;
  return inv_sqrt_pi * sum / x;
}

namespace {

// Asymptotic (Bernoulli) expansions, valid once the argument has been shifted
// above 8 by the recurrences psi_1(x) = psi_1(x+1) + 1/x^2 and
// psi_3(x) = psi_3(x+1) + 6/x^4.
double trigamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + 1/(6x^3) - 1/(30x^5) + 1/(42x^7) - 1/(30x^9)
  //   + 5/(66x^11) - 691/(2730x^13)
  double r = -691.0 / 2730.0;
  r = r * inv2 + 5.0 / 66.0;
  r = r * inv2 - 1.0 / 30.0;
  r = r * inv2 + 1.0 / 42.0;
  r = r * inv2 - 1.0 / 30.0;
  r = r * inv2 + 1.0 / 6.0;
  return inv + 0.5 * inv2 + r * inv2 * inv;
}

double polygamma3_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double inv3 = inv2 * inv;
  // 2/x^3 + 3/x^4 + 2/x^5 - 1/x^7 + 4/(3x^9) - 3/x^11 + 10/x^13
  //   - 691/(15x^15)
  double r = -691.0 / 15.0;
  r = r * inv2 + 10.0;
  r = r * inv2 - 3.0;
  r = r * inv2 + 4.0 / 3.0;
  r = r * inv2 - 1.0;
  r = r * inv2 + 2.0;
  return 2.0 * inv3 + 3.0 * inv2 * inv2 + r * inv2 * inv3;
}

}  // namespace

double trigamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("trigamma: requires x > 0");
  double acc = 0.0;
  while (x < 16.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  return acc + trigamma_asymptotic(x);
}

double polygamma3(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("polygamma3: requires x > 0");
  double acc = 0.0;
  while (x < 16.0) {
    const double x2 = x * x;
    acc += 6.0 / (x2 * x2);
    x += 1.0;
  }
  return acc + polygamma3_asymptotic(x);
}

double u_over_sinh(double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("u_over_sinh: requires u >= 0");
  if (u < 1e-3) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + 7.0 * u2 * u2 / 360.0;
  }
  if (u < 1.0) return u / std::sinh(u);
  const double e = std::exp(-u);
  return 2.0 * u * e / (1.0 - e * e);
}

}  // namespace tpnsi
