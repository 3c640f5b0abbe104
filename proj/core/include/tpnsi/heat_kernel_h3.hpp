#ifndef TPNSI_HEAT_KERNEL_H3_HPP
#define TPNSI_HEAT_KERNEL_H3_HPP

#include "tpnsi/quadrature.hpp"

namespace tpnsi {

/**
 * @brief Evaluation point for the Heisenberg heat traces: diffusion time t
 *        and fibre scale c (the scaling of the central direction).
 */
struct ScaledMetricPoint {
  double t = 1.0;
  double c = 1.0;

  void validate() const;

  /// Point on the power-law path c = t^zeta.
  static ScaledMetricPoint on_path(double t, double zeta);
};

/// One evaluated heat-trace value with its accumulated error estimate.
struct HeatTraceSample {
  ScaledMetricPoint point;
  int degree = 0;
  double theta = 0.0;
  double est_abs_error = 0.0;
};

/// Closed-form lower/upper sandwich for one integral component.
struct IntegralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Selects one of the two sign variants of the lattice-sum integrals.
enum class SeriesSign { plus, minus };

/**
 * @brief Heat trace on functions:
 *        theta_0(t) = (1/4pi^2) (1/(c t^2)) int_0^inf e^{-u^2/(c^2 t)}
 *        u/sinh(u) du.
 *
 * The integrand takes its limit value 1 at u = 0; the truncation point is
 * chosen from the exponential tail bound of u/sinh(u) so the reported error
 * estimate stays honest.
 */
HeatTraceSample eval_theta0(const ScaledMetricPoint& point,
                            const QuadratureSpec& quad);

/// Closed form c^2/(2t).
double eval_I2(const ScaledMetricPoint& point);

/**
 * @brief Closed form (c^2/2t) e^{-c^2 t} + sqrt(pi) (c^3/sqrt(t)) erfc(c
 *        sqrt(t)); evaluated through the scaled complementary error function
 *        once c sqrt(t) > 26 so relative accuracy survives the exponentially
 *        small regime.
 */
double eval_I3(const ScaledMetricPoint& point);

/**
 * @brief The lattice sum S(v) = sum_{m>=1} [1 - (1 + w/(m+1/2)^2)^{-1/2}]
 *        with w = v^2 - v (sign plus) or w = v^2 + v (sign minus).
 *
 * Explicit partial sum up to the first index where |w|/(m+1/2)^2 drops under
 * quad.series_switch_eps, plus the analytic polygamma tail correction
 * (w/2) psi_1(M+3/2) - (w^2/16) psi_3(M+3/2). With oracle_mode, the explicit
 * sum runs to M = 10^7 before the same correction is applied.
 */
double series_S(double v, SeriesSign sign, const QuadratureSpec& quad,
                bool oracle_mode = false);

/**
 * @brief The Gaussian-damped lattice-sum integrals of the degree-one trace.
 *
 * Sign minus evaluates c^4 int_0^vmax (v+1/2) e^{-t c^2 v^2} S_-(v) dv.
 * Sign plus evaluates the branch whose substitution image starts at v = 1,
 * c^4 int_1^vmax (v-1/2) e^{-t c^2 v^2} S_+(v) dv; the would-be [0,1) part of
 * that branch is empty, so the split contributes nothing below v = 1.
 * Both are computed in Gaussian-adapted variables so the panel count stays
 * flat as t grows. If est_abs_error is non-null it receives the error
 * estimate including truncation-tail bounds.
 */
double eval_I1(const ScaledMetricPoint& point, SeriesSign sign,
               const QuadratureSpec& quad, double* est_abs_error = nullptr);

/// Sandwich sqrt(pi) c/(4 sqrt(t^3)) + c^2/(4t) with exact lower/upper ratio 5.
IntegralBounds bounds_I1minus(const ScaledMetricPoint& point);

/// Sandwich [U/5, U] with U = -(c^2/4t) e^{-t c^2} + (sqrt(pi)/4)(c/sqrt(t^3)
/// + c^3/sqrt(t)) erfc(c sqrt(t)), evaluated cancellation-free via erfcx.
IntegralBounds bounds_I4(const ScaledMetricPoint& point);

/**
 * @brief Interval [-K ((c^2/2t) e^{-t c^2} - (sqrt(pi)/4)(c^3/sqrt(t))
 *        erfc(c sqrt(t))), 0] for the below-1 part of the plus-branch split.
 *
 * K is the caller-supplied absolute value of the convergent constant series
 * sum_m [1 - (1 - 1/(4(m+1/2)^2))^{-1/2}]; see constant_series_K().
 */
IntegralBounds bounds_I5(const ScaledMetricPoint& point, double K);

/// The constant |sum_m [1 - (1 - 1/(4(m+1/2)^2))^{-1/2}]| = |S_+(1/2)|.
double constant_series_K(const QuadratureSpec& quad, bool oracle_mode = false);

/**
 * @brief Heat trace on one-forms:
 *        theta_1(t) = (1/(2 pi^2 c)) [I_1^+ + I_1^- + I_2 + I_3].
 *
 * Component failures are propagated with the failing component named in the
 * exception message.
 */
HeatTraceSample eval_theta1(const ScaledMetricPoint& point,
                            const QuadratureSpec& quad);

}  // namespace tpnsi

#endif  // TPNSI_HEAT_KERNEL_H3_HPP
