#ifndef TPNSI_QUADRATURE_HPP
#define TPNSI_QUADRATURE_HPP

#include <functional>

namespace tpnsi {

/**
 * @brief Tolerances and switch-over thresholds for numerical evaluation.
 */
struct QuadratureSpec {
  /// Relative error target for integral evaluations.
  double rel_tol = 1e-10;
  /// Absolute error floor for integral and series evaluations.
  double abs_tol = 1e-14;
  /// Maximum interval-halving depth before giving up.
  int max_subdivisions = 48;
  /// Threshold on |w|/(m+1/2)^2 below which the analytic tail correction
  /// replaces explicit summation.
  double series_switch_eps = 1e-6;

  void validate() const;
};

/// Value and error estimate of one adaptive integration.
struct QuadratureResult {
  double value = 0.0;
  double est_abs_error = 0.0;
};

/**
 * @brief Adaptive interval-halving integration of f over [a, b].
 *
 * Uses a fixed-order (15-point) Gauss-Legendre panel rule; an interval is
 * accepted when the discrepancy between its single-panel value and the sum of
 * its two half-panel values falls under the interval's share of the error
 * budget. The budget is rel_tol * |integral| + abs_tol, with the integral
 * magnitude bootstrapped from a coarse composite pass.
 *
 * @throws quadrature_convergence_error if the depth limit is reached before
 *         the budget is met; the exception carries the partial value and a
 *         conservative error estimate.
 */
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    double abs_tol, int max_subdivisions);

/// Convenience overload pulling tolerances from a QuadratureSpec.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& quad);

/**
 * @brief Non-adaptive composite Gauss-Legendre rule with uniform panels.
 *
 * Exposed for oracle-style cross-checks in tests; not used by the production
 * evaluators.
 */
double composite_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels);

}  // namespace tpnsi

#endif  // TPNSI_QUADRATURE_HPP
