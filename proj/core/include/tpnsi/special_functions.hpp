#ifndef TPNSI_SPECIAL_FUNCTIONS_HPP
#define TPNSI_SPECIAL_FUNCTIONS_HPP

namespace tpnsi {

/**
 * @brief Scaled complementary error function e^{x^2} erfc(x).
 *
 * Keeps full relative accuracy for large x where erfc itself underflows;
 * valid for x >= 0.
 */
double erfcx(double x);

/**
 * @brief Trigamma function psi_1(x) = d^2/dx^2 log Gamma(x), for x > 0.
 *
 * Upward recurrence into the asymptotic (Bernoulli-series) regime.
 */
double trigamma(double x);

/**
 * @brief Third polygamma function psi_3(x) = d^4/dx^4 log Gamma(x), x > 0.
 */
double polygamma3(double x);

/**
 * @brief u / sinh(u), evaluated stably for all u >= 0.
 *
 * Removable singularity at 0 handled by its Taylor series; large u handled in
 * the overflow-free form 2 u e^{-u} / (1 - e^{-2u}).
 */
double u_over_sinh(double u);

}  // namespace tpnsi

#endif  // TPNSI_SPECIAL_FUNCTIONS_HPP
