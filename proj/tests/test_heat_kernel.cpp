#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "tpnsi/heat_kernel_h3.hpp"
#include "tpnsi/quadrature.hpp"
#include "tpnsi/special_functions.hpp"

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Independent evaluation of theta_0 by a non-adaptive composite rule.
double theta0_oracle(double t, double c) {
  auto f = [&](double u) {
    return std::exp(-u * u / (c * c * t)) * tpnsi::u_over_sinh(u);
  };
  const double integral = tpnsi::composite_gauss(f, 0.0, 60.0, 400);
  const double pi = 3.14159265358979323846;
  return integral / (4.0 * pi * pi * c * t * t);
}

const tpnsi::QuadratureSpec kDefault{};

}  // namespace

TEST_CASE("metric point validation") {
  CHECK_THROWS_AS(tpnsi::ScaledMetricPoint({0.0, 1.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(tpnsi::ScaledMetricPoint({1.0, -2.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      tpnsi::ScaledMetricPoint({std::nan(""), 1.0}).validate(),
      std::invalid_argument);
  const auto p = tpnsi::ScaledMetricPoint::on_path(100.0, 0.5);
  CHECK(p.t == 100.0);
  CHECK(close_rel(p.c, 10.0, 1e-15));
}

TEST_CASE("theta_0 matches an independent composite-rule oracle") {
  for (const auto& [t, c] : {std::pair{1.0, 1.0}, {10.0, 1.0}, {100.0, 0.5},
                             {1000.0, 2.0}}) {
    const auto sample = tpnsi::eval_theta0({t, c}, kDefault);
    CHECK(close_rel(sample.theta, theta0_oracle(t, c), 1e-9));
  }
}

TEST_CASE("theta_0 matches frozen high-precision values") {
  // Default tolerances promise 1e-10 relative; test at 1e-9.
  CHECK(close_rel(tpnsi::eval_theta0({1.0, 1.0}, kDefault).theta,
                  0.020840421885943145331, 1e-9));
  CHECK(close_rel(tpnsi::eval_theta0({1e4, 1.0}, kDefault).theta,
                  6.2469187884102475162e-10, 1e-9));
  CHECK(close_rel(tpnsi::eval_theta0({100.0, 10.0}, kDefault).theta,
                  6.2469187884102475162e-7, 1e-9));
}

TEST_CASE("theta_0 is positive and decreasing in t") {
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 1.0; t <= 1e6; t *= 10.0) {
    const double v = tpnsi::eval_theta0({t, 1.0}, kDefault).theta;
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("large-t limit of the theta_0 integral") {
  // 4 pi^2 c t^2 theta_0 -> integral of u/sinh(u) = pi^2/4 as t grows.
  const double pi = 3.14159265358979323846;
  const double J = pi * pi / 4.0;
  const double v = tpnsi::eval_theta0({1e8, 1.0}, kDefault).theta;
  CHECK(close_rel(4.0 * pi * pi * 1.0 * 1e16 * v, J, 1e-4));
}

TEST_CASE("tightening the tolerance moves theta_0 less than the error estimate") {
  tpnsi::QuadratureSpec loose;
  loose.rel_tol = 1e-6;
  tpnsi::QuadratureSpec tight;
  tight.rel_tol = 5e-7;
  const auto a = tpnsi::eval_theta0({3.0, 1.2}, loose);
  const auto b = tpnsi::eval_theta0({3.0, 1.2}, tight);
  CHECK(std::abs(a.theta - b.theta) <=
        std::max(a.est_abs_error, 1e-15) * 2.0);
}

TEST_CASE("I2 closed form") {
  CHECK(tpnsi::eval_I2({1.0, 1.0}) == 0.5);
  CHECK(close_rel(tpnsi::eval_I2({10.0, 2.0}), 0.2, 1e-15));
  CHECK(close_rel(tpnsi::eval_I2({4.0, 3.0}), 9.0 / 8.0, 1e-15));
}

TEST_CASE("I3 matches frozen values on both sides of the evaluation switch") {
  CHECK(close_rel(tpnsi::eval_I3({1.0, 1.0}), 0.4627453058663831373, 1e-12));
  // The two interior branches meet near c*sqrt(t) = 26; values straddling it
  // must both match the reference, far below double underflow of erfc alone.
  CHECK(close_rel(tpnsi::eval_I3({675.9, 1.0}), 6.4025758820853906445e-297,
                  1e-10));
  CHECK(close_rel(tpnsi::eval_I3({676.1, 1.0}), 5.2404358811102220086e-297,
                  1e-10));
}

TEST_CASE("series_S matches the brute-force oracle") {
  for (double v : {0.0, 0.5, 1.0, 2.0, 10.0}) {
    for (auto sign : {tpnsi::SeriesSign::plus, tpnsi::SeriesSign::minus}) {
      const double fast = tpnsi::series_S(v, sign, kDefault, false);
      const double brute = tpnsi::series_S(v, sign, kDefault, true);
      CHECK(std::abs(fast - brute) <= 1e-9);
    }
  }
}

TEST_CASE("series_S matches frozen high-precision values") {
  using tpnsi::SeriesSign;
  CHECK(tpnsi::series_S(0.0, SeriesSign::minus, kDefault) == 0.0);
  CHECK(tpnsi::series_S(1.0, SeriesSign::plus, kDefault) == 0.0);
  CHECK(close_rel(tpnsi::series_S(0.25, SeriesSign::minus, kDefault),
                  0.13825342748316890189, 1e-12));
  CHECK(close_rel(tpnsi::series_S(1.0, SeriesSign::minus, kDefault),
                  0.71639936705167985316, 1e-12));
  CHECK(close_rel(tpnsi::series_S(2.0, SeriesSign::minus, kDefault),
                  1.6322113782101997164, 1e-12));
  CHECK(close_rel(tpnsi::series_S(10.0, SeriesSign::minus, kDefault),
                  9.5317315969279487015, 1e-12));
  CHECK(close_rel(tpnsi::series_S(10.0, SeriesSign::plus, kDefault),
                  8.5350682181454990012, 1e-12));
}

TEST_CASE("the two series branches agree under the index shift") {
  // w is shared between S_+(v) and S_-(v-1), so the sums must coincide.
  for (double v : {1.5, 2.0, 3.25, 7.0}) {
    CHECK(close_rel(tpnsi::series_S(v, tpnsi::SeriesSign::plus, kDefault),
                    tpnsi::series_S(v - 1.0, tpnsi::SeriesSign::minus,
                                    kDefault),
                    1e-12));
  }
}

TEST_CASE("series_S bracketing on the minus branch") {
  for (double v : {1.0, 2.0, 5.0, 12.0}) {
    const double s = tpnsi::series_S(v, tpnsi::SeriesSign::minus, kDefault);
    CHECK(s <= v);
    CHECK(s >= v / 5.0);
  }
}

TEST_CASE("constant series K") {
  const double K = tpnsi::constant_series_K(kDefault);
  CHECK(close_rel(K, 0.12285384825734678187, 1e-12));
  CHECK(std::abs(K - tpnsi::constant_series_K(kDefault, true)) <= 1e-9);
  CHECK(close_rel(
      K, -tpnsi::series_S(0.5, tpnsi::SeriesSign::plus, kDefault), 1e-14));
}

TEST_CASE("I1 on the minus branch matches frozen values and its bounds") {
  const auto check_point = [&](double t, double c, double frozen) {
    const tpnsi::ScaledMetricPoint p{t, c};
    double err = 0.0;
    const double v = tpnsi::eval_I1(p, tpnsi::SeriesSign::minus, kDefault,
                                    &err);
    CHECK(close_rel(v, frozen, 1e-9));
    CHECK(std::abs(v - frozen) <= std::max(err, 1e-12 * std::abs(frozen)) * 10);
    const auto b = tpnsi::bounds_I1minus(p);
    CHECK(b.lower <= v);
    CHECK(v <= b.upper);
  };
  check_point(10.0, 1.0, 0.022124739226998297774);
  check_point(100.0, 0.5, 0.00045104171558089340945);
}

TEST_CASE("I1 on the plus branch matches frozen values and its bounds") {
  // The second point's magnitude (~1e-17) sits far below the default
  // absolute floor, so the frozen comparison pins the tolerances itself.
  tpnsi::QuadratureSpec tight = kDefault;
  tight.abs_tol = 1e-30;
  const auto check_point = [&](double t, double c, double frozen) {
    const tpnsi::ScaledMetricPoint p{t, c};
    const double v = tpnsi::eval_I1(p, tpnsi::SeriesSign::plus, tight);
    CHECK(close_rel(v, frozen, 1e-8));
    const double vd = tpnsi::eval_I1(p, tpnsi::SeriesSign::plus, kDefault);
    CHECK(close_rel(vd, frozen, 1e-6));
    const auto b = tpnsi::bounds_I4(p);
    CHECK(b.lower <= vd);
    CHECK(vd <= b.upper);
    CHECK(b.lower > 0.0);
  };
  check_point(10.0, 1.0, 2.9418603355754151898e-8);
  check_point(100.0, 0.5, 8.5074977738383825743e-17);
}

TEST_CASE("I1 bounds sandwich across a wide parameter sweep") {
  for (double zeta : {-0.4, 0.0, 0.5}) {
    for (double e = 2.0; e <= 7.0; e += 1.0) {
      const auto p = tpnsi::ScaledMetricPoint::on_path(std::pow(10.0, e),
                                                       zeta);
      const double slack = 1e-9;
      const double im = tpnsi::eval_I1(p, tpnsi::SeriesSign::minus, kDefault);
      const auto bm = tpnsi::bounds_I1minus(p);
      CHECK(bm.lower <= im * (1 + slack) + slack);
      CHECK(im <= bm.upper * (1 + slack) + slack);
      const double ip = tpnsi::eval_I1(p, tpnsi::SeriesSign::plus, kDefault);
      const auto bp = tpnsi::bounds_I4(p);
      CHECK(bp.lower * (1 - slack) - slack <= ip);
      CHECK(ip <= bp.upper * (1 + slack) + slack);
    }
  }
}

TEST_CASE("the residual-term bracket contains zero") {
  const double K = tpnsi::constant_series_K(kDefault);
  for (double t : {100.0, 1e4, 1e6}) {
    const auto b = tpnsi::bounds_I5({t, 1.0}, K);
    // The true magnitude of the lower endpoint decays like e^{-t}; past
    // t ~ 700 it drops below the subnormal range and -0.0 is the honest
    // double result, so only the moderate point is checked strictly.
    CHECK(b.lower <= 0.0);
    CHECK(b.upper == 0.0);
  }
  CHECK(tpnsi::bounds_I5({10.0, 1.0}, K).lower < 0.0);
  CHECK(tpnsi::bounds_I5({100.0, 1.0}, K).lower < 0.0);
}

TEST_CASE("theta_1 matches frozen high-precision values") {
  CHECK(close_rel(tpnsi::eval_theta1({10.0, 1.0}, kDefault).theta,
                  0.0036542183626243245319, 1e-9));
  CHECK(close_rel(tpnsi::eval_theta1({1e4, 1.0}, kDefault).theta,
                  3.1398270372242704051e-6, 1e-9));
}

TEST_CASE("theta_1 decays like 1/t on the unscaled path") {
  // Dominated by the c^2/(2t) term once t is large.
  const double a = tpnsi::eval_theta1({1e5, 1.0}, kDefault).theta;
  const double b = tpnsi::eval_theta1({2e5, 1.0}, kDefault).theta;
  CHECK(close_rel(a / b, 2.0, 1e-2));
}

TEST_CASE("degree fields are stamped on samples") {
  CHECK(tpnsi::eval_theta0({1.0, 1.0}, kDefault).degree == 0);
  CHECK(tpnsi::eval_theta1({1.0, 1.0}, kDefault).degree == 1);
}
