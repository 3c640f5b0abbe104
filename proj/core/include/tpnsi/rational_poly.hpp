#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tpnsi {

/// Arbitrary-precision rational scalar used by the exact-arithmetic modules.
using Rational = boost::multiprecision::cpp_rational;

/**
 * @brief Dense matrix of exact rationals (row-major storage).
 *
 * Deliberately minimal: just the operations the exact verification paths
 * need, all in exact arithmetic.
 */
class RationalMatrix {
 public:
  RationalMatrix() = default;
  /// rows × cols zero matrix.
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j);
  const Rational& operator()(std::size_t i, std::size_t j) const;

  bool is_zero() const;
  RationalMatrix transpose() const;
  /// @throws std::invalid_argument when the matrix is not square.
  Rational trace() const;
  RationalMatrix scaled(const Rational& factor) const;

  friend RationalMatrix operator+(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend RationalMatrix operator*(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);
  friend bool operator!=(const RationalMatrix& a, const RationalMatrix& b) {
    return !(a == b);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/**
 * @brief Polynomial with rational coefficients, ascending degree order.
 *
 * The zero polynomial is the empty vector; otherwise the leading coefficient
 * is nonzero.
 */
using RationalPoly = std::vector<Rational>;

/// Drops trailing zero coefficients in place and returns the argument.
RationalPoly& trim_poly(RationalPoly& p);

Rational eval_poly(const RationalPoly& p, const Rational& x);

RationalPoly poly_derivative(const RationalPoly& p);

/// Quotient and remainder of a by b (exact division steps).
/// @throws std::invalid_argument when b is zero.
std::pair<RationalPoly, RationalPoly> poly_divmod(const RationalPoly& a,
                                                  const RationalPoly& b);

/// Monic greatest common divisor (a constant 1 when coprime).
RationalPoly poly_gcd(RationalPoly a, RationalPoly b);

/**
 * @brief Square-free decomposition p = c · Π factors[i]^(i+1) (Yun).
 *
 * factors[i] is the monic product of the roots of multiplicity i+1; entries
 * may be the constant 1.
 * @throws std::invalid_argument on the zero polynomial.
 */
std::vector<RationalPoly> square_free_factors(const RationalPoly& p);

/**
 * @brief Number of distinct real roots of a square-free polynomial in
 * (−∞, x], by Sturm's theorem with exact sign evaluations.
 */
long long sturm_roots_leq(const RationalPoly& square_free, const Rational& x);

/**
 * @brief Characteristic polynomial det(xI − M) by Faddeev–LeVerrier.
 * @throws std::invalid_argument when M is not square.
 */
RationalPoly char_poly(const RationalMatrix& m);

/**
 * @brief Multiplicity-weighted count of real roots of p in (−∞, x].
 *
 * Intended for characteristic polynomials of operators known to have real
 * spectrum; combines the square-free decomposition with Sturm counting.
 */
long long count_real_roots_leq(const RationalPoly& p, const Rational& x);

/**
 * @brief Eigenvalues of op that are ≤ lambda, counted with multiplicity.
 *
 * Exact: runs Sturm counting on the characteristic polynomial. The operator
 * must have real spectrum (e.g. self-adjoint with respect to some positive
 * inner product); this is not checked.
 */
long long count_eigenvalues_leq(const RationalMatrix& op,
                                const Rational& lambda);

}  // namespace tpnsi
