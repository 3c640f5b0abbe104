#include "tpnsi/heat_kernel_h3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tpnsi/errors.hpp"
#include "tpnsi/special_functions.hpp"

namespace tpnsi {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrtPi = 1.77245385090551602729816748334114518;

}  // namespace

void ScaledMetricPoint::validate() const {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("ScaledMetricPoint: t must be finite and > 0");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("ScaledMetricPoint: c must be finite and > 0");
  }
}

ScaledMetricPoint ScaledMetricPoint::on_path(double t, double zeta) {
  ScaledMetricPoint p{t, std::pow(t, zeta)};
  p.validate();
  return p;
}

HeatTraceSample eval_theta0(const ScaledMetricPoint& point,
                            const QuadratureSpec& quad) {
  point.validate();
  quad.validate();

  const double t = point.t;
  const double c = point.c;
  const double sigma2 = c * c * t;  // Gaussian scale of e^{-u^2/(c^2 t)}
  const double pre = 1.0 / (4.0 * kPi * kPi * c * t * t);

  // Tail of int u/sinh(u) du beyond u_max, via u/sinh(u) <= 2u e^{-u} /
  // (1 - e^{-2 u_max}).
  auto tail_bound = [](double u) {
    const double e = std::exp(-u);
    return 2.0 * (1.0 + u) * e / (1.0 - e * e);
  };
  const double abs_target_integral = quad.abs_tol / pre;
  double u_max = 35.0;
  while (u_max < 760.0 && tail_bound(u_max) > 0.1 * abs_target_integral) {
    u_max += 5.0;
  }

  auto f = [sigma2](double u) {
    return std::exp(-u * u / sigma2) * u_over_sinh(u);
  };
  QuadratureResult res = integrate_adaptive(f, 0.0, u_max, quad.rel_tol,
                                            0.8 * abs_target_integral,
                                            quad.max_subdivisions);

  // Extend the truncation point if the exponential tail is not yet negligible
  // against the relative part of the budget.
  double tb = tail_bound(u_max);
  while (tb > 0.1 * (quad.rel_tol * std::abs(res.value) + abs_target_integral) &&
         u_max < 760.0) {
    u_max += 10.0;
    res = integrate_adaptive(f, 0.0, u_max, quad.rel_tol,
                             0.8 * abs_target_integral, quad.max_subdivisions);
    tb = tail_bound(u_max);
  }

  HeatTraceSample sample;
  sample.point = point;
  sample.degree = 0;
  sample.theta = pre * res.value;
  sample.est_abs_error = pre * (res.est_abs_error + tb);
  return sample;
}

double eval_I2(const ScaledMetricPoint& point) {
  point.validate();
  return 0.5 * point.c * point.c / point.t;
}

double eval_I3(const ScaledMetricPoint& point) {
  point.validate();
  const double t = point.t;
  const double c = point.c;
  const double x = c * std::sqrt(t);
  if (x <= 26.0) {
    return 0.5 * c * c / t * std::exp(-x * x) +
           kSqrtPi * c * c * c / std::sqrt(t) * std::erfc(x);
  }
  // Scaled form: the common factor e^{-x^2} is applied last so the bracket
  // keeps full relative accuracy until the final (possibly subnormal) scaling.
  const double bracket =
      0.5 * c * c / t + kSqrtPi * c * c * c / std::sqrt(t) * erfcx(x);
  return std::exp(-x * x) * bracket;
}

double series_S(double v, SeriesSign sign, const QuadratureSpec& quad,
                bool oracle_mode) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("series_S: requires finite v >= 0");
  }
  quad.validate();

  const double w = (sign == SeriesSign::plus) ? v * v - v : v * v + v;
  if (w == 0.0) return 0.0;

  long long M;
  if (oracle_mode) {
    M = 10'000'000LL;
  } else {
    M = std::max<long long>(
        10, static_cast<long long>(
                std::ceil(std::sqrt(std::abs(w) / quad.series_switch_eps))) +
                1);
  }

  // Summed descending so the small terms accumulate first.
  double sum = 0.0;
  for (long long m = M; m >= 1; --m) {
    const double denom = (static_cast<double>(m) + 0.5);
    const double x = w / (denom * denom);
    const double radicand = 1.0 + x;
    if (!(radicand > 0.0)) {
      throw std::domain_error(
          "series_S: non-positive radicand at m = " + std::to_string(m));
    }
    // 1 - 1/sqrt(1+x) in the cancellation-free form x/(sqrt(1+x)(1+sqrt(1+x))).
    const double s = std::sqrt(radicand);
    sum += x / (s * (1.0 + s));
  }

  const double xM = static_cast<double>(M) + 1.5;
  const double tail = 0.5 * w * trigamma(xM) - w * w / 16.0 * polygamma3(xM);
  return sum + tail;
}

namespace {

/// Shared plumbing for both sign branches of the Gaussian lattice-sum
/// integrals; returns the value and writes the accumulated error estimate.
double eval_I1_impl(const ScaledMetricPoint& point, SeriesSign sign,
                    const QuadratureSpec& quad, double* est_abs_error) {
  const double t = point.t;
  const double c = point.c;
  const double x = c * std::sqrt(t);
  const double c4 = c * c * c * c;

  if (sign == SeriesSign::minus) {
    // Substituted variable y = x v keeps the Gaussian window fixed:
    // I = (c^4/x) int_0^{y_max} (y/x + 1/2) e^{-y^2} S_-(y/x) dy.
    // With S_-(v) <= v the tail beyond y is below e^{-y^2} (y/x)^2, which
    // underflows to zero well before y = 45 for every representable x.
    const double y_max = 45.0;
    auto f = [&](double y) {
      const double v = y / x;
      return (v + 0.5) * std::exp(-y * y) * series_S(v, SeriesSign::minus, quad) /
             x;
    };
    QuadratureResult res =
        integrate_adaptive(f, 0.0, y_max, quad.rel_tol, 0.9 * quad.abs_tol / c4,
                           quad.max_subdivisions);
    const double tail =
        std::exp(-y_max * y_max) * (1.0 + y_max) * (1.0 + y_max) /
        std::max(x * x, 1e-300);
    if (est_abs_error) *est_abs_error = c4 * (res.est_abs_error + tail);
    return c4 * res.value;
  }

  // Sign plus: the substitution image starts at v = 1, so the integral runs
  // over [1, v_max]. In z = x^2 (v^2 - 1) the Gaussian becomes e^{-x^2} e^{-z}:
  // I = (c^4 e^{-x^2} / (2 x^2)) int_0^{z_max} ((v-1/2)/v) S_+(v) e^{-z} dz.
  const double gauss = std::exp(-x * x);
  const double prefactor = c4 * gauss / (2.0 * x * x);
  if (prefactor == 0.0 || !std::isfinite(prefactor)) {
    // Below the representable range; the true value is < 1e-300.
    if (est_abs_error) *est_abs_error = 1e-300;
    return 0.0;
  }
  const double z_max = 80.0;
  auto g = [&](double z) {
    const double v = std::sqrt(1.0 + z / (x * x));
    return (v - 0.5) / v * series_S(v, SeriesSign::plus, quad) * std::exp(-z);
  };
  const double abs_scaled =
      0.9 * quad.abs_tol / std::max(prefactor, 1e-290);
  QuadratureResult res = integrate_adaptive(g, 0.0, z_max, quad.rel_tol,
                                            abs_scaled, quad.max_subdivisions);
  const double v_end = std::sqrt(1.0 + z_max / (x * x));
  const double tail = std::exp(-z_max) * v_end * v_end;
  if (est_abs_error) *est_abs_error = prefactor * (res.est_abs_error + tail);
  return prefactor * res.value;
}

}  // namespace

double eval_I1(const ScaledMetricPoint& point, SeriesSign sign,
               const QuadratureSpec& quad, double* est_abs_error) {
  point.validate();
  quad.validate();
  return eval_I1_impl(point, sign, quad, est_abs_error);
}

IntegralBounds bounds_I1minus(const ScaledMetricPoint& point) {
  point.validate();
  const double t = point.t;
  const double c = point.c;
  const double upper =
      kSqrtPi * 0.25 * c / std::sqrt(t * t * t) + 0.25 * c * c / t;
  return {0.2 * upper, upper};
}

IntegralBounds bounds_I4(const ScaledMetricPoint& point) {
  point.validate();
  const double t = point.t;
  const double c = point.c;
  const double x = c * std::sqrt(t);
  // U = (c^2/4t) e^{-x^2} [sqrt(pi)(x + 1/x) erfcx(x) - 1]; the bracket stays
  // O(1/x^2) positive, so the cancellation lives far above the final scaling.
  const double bracket = kSqrtPi * (x + 1.0 / x) * erfcx(x) - 1.0;
  const double upper = 0.25 * c * c / t * std::exp(-x * x) * bracket;
  return {0.2 * upper, upper};
}

IntegralBounds bounds_I5(const ScaledMetricPoint& point, double K) {
  point.validate();
  if (!(K > 0.0)) throw std::invalid_argument("bounds_I5: requires K > 0");
  const double t = point.t;
  const double c = point.c;
  const double x = c * std::sqrt(t);
  // (c^2/2t) e^{-x^2} [1 - (sqrt(pi)/2) x erfcx(x)]; the bracket lies in (0,1].
  const double bracket = 1.0 - 0.5 * kSqrtPi * x * erfcx(x);
  const double lower = -K * 0.5 * c * c / t * std::exp(-x * x) * bracket;
  return {lower, 0.0};
}

double constant_series_K(const QuadratureSpec& quad, bool oracle_mode) {
  return -series_S(0.5, SeriesSign::plus, quad, oracle_mode);
}

HeatTraceSample eval_theta1(const ScaledMetricPoint& point,
                            const QuadratureSpec& quad) {
  point.validate();
  quad.validate();

  const double c = point.c;
  const double pre = 1.0 / (2.0 * kPi * kPi * c);

  // Split the absolute budget between the two quadrature components.
  QuadratureSpec part = quad;
  part.abs_tol = std::max(1e-300, 0.5 * quad.abs_tol * kPi * kPi * c);

  double est_minus = 0.0;
  double est_plus = 0.0;
  double i1_minus = 0.0;
  double i1_plus = 0.0;
  try {
    i1_minus = eval_I1(point, SeriesSign::minus, part, &est_minus);
  } catch (const quadrature_convergence_error& e) {
    throw quadrature_convergence_error(
        std::string("degree-one trace: minus-branch integral failed: ") +
            e.what(),
        e.partial_value(), e.est_abs_error());
  }
  try {
    i1_plus = eval_I1(point, SeriesSign::plus, part, &est_plus);
  } catch (const quadrature_convergence_error& e) {
    throw quadrature_convergence_error(
        std::string("degree-one trace: plus-branch integral failed: ") +
            e.what(),
        e.partial_value(), e.est_abs_error());
  }
  const double i2 = eval_I2(point);
  const double i3 = eval_I3(point);

  HeatTraceSample sample;
  sample.point = point;
  sample.degree = 1;
  sample.theta = pre * (i1_plus + i1_minus + i2 + i3);
  sample.est_abs_error =
      pre * (est_minus + est_plus + 4e-16 * (i2 + i3));
  return sample;
}

}  // namespace tpnsi
