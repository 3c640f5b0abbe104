#include <stdexcept>

#include "doctest.h"
#include "tpnsi/rational_poly.hpp"

namespace {

using tpnsi::Rational;
using tpnsi::RationalMatrix;
using tpnsi::RationalPoly;

RationalPoly poly(std::initializer_list<long> ascending) {
  RationalPoly p;
  for (long c : ascending) p.push_back(Rational(c));
  return p;
}

}  // namespace

TEST_CASE("rational matrix arithmetic") {
  RationalMatrix a(2, 2);
  a(0, 0) = Rational(1);
  a(0, 1) = Rational(2);
  a(1, 0) = Rational(3);
  a(1, 1) = Rational(4);

  const auto id = RationalMatrix::identity(2);
  CHECK(a * id == a);
  CHECK(id * a == a);
  CHECK((a - a).is_zero());
  CHECK(a.trace() == Rational(5));
  CHECK(a.transpose()(0, 1) == Rational(3));
  CHECK(a.scaled(Rational(1, 2))(1, 1) == Rational(2));

  RationalMatrix b(2, 3);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
  CHECK_THROWS_AS(b * a, std::invalid_argument);
}

TEST_CASE("polynomial evaluation, derivative, division") {
  const auto p = poly({3, -4, 1});  // x^2 - 4x + 3 = (x-1)(x-3)
  CHECK(tpnsi::eval_poly(p, Rational(1)) == Rational(0));
  CHECK(tpnsi::eval_poly(p, Rational(3)) == Rational(0));
  CHECK(tpnsi::eval_poly(p, Rational(0)) == Rational(3));

  const auto dp = tpnsi::poly_derivative(p);
  CHECK(dp.size() == 2);
  CHECK(dp[0] == Rational(-4));
  CHECK(dp[1] == Rational(2));

  const auto [q, r] = tpnsi::poly_divmod(p, poly({-1, 1}));  // / (x-1)
  CHECK(r.empty());
  CHECK(q == poly({-3, 1}));

  const auto g = tpnsi::poly_gcd(p, poly({-1, 1}));
  CHECK(g.size() == 2);  // proportional to x-1
  CHECK(tpnsi::eval_poly(g, Rational(1)) == Rational(0));
}

TEST_CASE("square-free factorization separates multiplicities") {
  // (x-1)^2 (x+2): multiplicity-1 part x+2, multiplicity-2 part x-1.
  const auto p = poly({2, -3, 0, 1});
  const auto factors = tpnsi::square_free_factors(p);
  REQUIRE(factors.size() >= 2);
  CHECK(tpnsi::eval_poly(factors[0], Rational(-2)) == Rational(0));
  CHECK(tpnsi::eval_poly(factors[1], Rational(1)) == Rational(0));
  CHECK(factors[0].size() == 2);
  CHECK(factors[1].size() == 2);
}

TEST_CASE("sturm root counting is inclusive at the right endpoint") {
  const auto p = poly({-1, 0, 1});  // x^2 - 1
  CHECK(tpnsi::sturm_roots_leq(p, Rational(-2)) == 0);
  CHECK(tpnsi::sturm_roots_leq(p, Rational(-1)) == 1);
  CHECK(tpnsi::sturm_roots_leq(p, Rational(0)) == 1);
  CHECK(tpnsi::sturm_roots_leq(p, Rational(1)) == 2);
  CHECK(tpnsi::sturm_roots_leq(p, Rational(5)) == 2);
}

TEST_CASE("root counting respects multiplicities") {
  // x (x-1)^2: roots 0 (simple) and 1 (double).
  const auto p = poly({0, 1, -2, 1});
  CHECK(tpnsi::count_real_roots_leq(p, Rational(-1)) == 0);
  CHECK(tpnsi::count_real_roots_leq(p, Rational(0)) == 1);
  CHECK(tpnsi::count_real_roots_leq(p, Rational(1, 2)) == 1);
  CHECK(tpnsi::count_real_roots_leq(p, Rational(1)) == 3);
  CHECK(tpnsi::count_real_roots_leq(p, Rational(10)) == 3);
}

TEST_CASE("characteristic polynomial of small matrices") {
  RationalMatrix m(2, 2);
  m(0, 0) = Rational(2);
  m(0, 1) = Rational(1);
  m(1, 0) = Rational(1);
  m(1, 1) = Rational(2);
  const auto p = tpnsi::char_poly(m);  // (x-1)(x-3) = x^2 - 4x + 3
  REQUIRE(p.size() == 3);
  CHECK(p[0] == Rational(3));
  CHECK(p[1] == Rational(-4));
  CHECK(p[2] == Rational(1));
}

TEST_CASE("eigenvalue counting through the characteristic polynomial") {
  RationalMatrix d(3, 3);
  d(0, 0) = Rational(1);
  d(1, 1) = Rational(2);
  d(2, 2) = Rational(3);
  CHECK(tpnsi::count_eigenvalues_leq(d, Rational(0)) == 0);
  CHECK(tpnsi::count_eigenvalues_leq(d, Rational(1)) == 1);
  CHECK(tpnsi::count_eigenvalues_leq(d, Rational(2)) == 2);
  CHECK(tpnsi::count_eigenvalues_leq(d, Rational(5, 2)) == 2);
  CHECK(tpnsi::count_eigenvalues_leq(d, Rational(3)) == 3);

  // Repeated eigenvalues are counted with multiplicity.
  RationalMatrix r(3, 3);
  r(0, 0) = Rational(1);
  r(1, 1) = Rational(1);
  r(2, 2) = Rational(4);
  CHECK(tpnsi::count_eigenvalues_leq(r, Rational(1)) == 2);
  CHECK(tpnsi::count_eigenvalues_leq(r, Rational(4)) == 3);
}

TEST_CASE("characteristic polynomial rejects non-square input") {
  RationalMatrix m(2, 3);
  CHECK_THROWS_AS(tpnsi::char_poly(m), std::invalid_argument);
}
