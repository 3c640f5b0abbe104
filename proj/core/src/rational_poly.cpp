#include "tpnsi/rational_poly.hpp"

#include <stdexcept>
#include <utility>

namespace tpnsi {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Rational& RationalMatrix::operator()(std::size_t i, std::size_t j) {
  return data_[i * cols_ + j];
}

const Rational& RationalMatrix::operator()(std::size_t i,
                                           std::size_t j) const {
  return data_[i * cols_ + j];
}

bool RationalMatrix::is_zero() const {
  for (const Rational& v : data_) {
    if (v != 0) return false;
  }
  return true;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Rational RationalMatrix::trace() const {
  if (rows_ != cols_) {
    throw std::invalid_argument("RationalMatrix::trace: matrix not square");
  }
  Rational s = 0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
  return s;
}

RationalMatrix RationalMatrix::scaled(const Rational& factor) const {
  RationalMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] * factor;
  return m;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
    throw std::invalid_argument("RationalMatrix: shape mismatch in +");
  }
  RationalMatrix m(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    m.data_[i] = a.data_[i] + b.data_[i];
  }
  return m;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
    throw std::invalid_argument("RationalMatrix: shape mismatch in -");
  }
  RationalMatrix m(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) {
    m.data_[i] = a.data_[i] - b.data_[i];
  }
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw std::invalid_argument("RationalMatrix: shape mismatch in *");
  }
  RationalMatrix m(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        if (b(k, j) == 0) continue;
        m(i, j) += aik * b(k, j);
      }
    }
  }
  return m;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

RationalPoly& trim_poly(RationalPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

Rational eval_poly(const RationalPoly& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

RationalPoly poly_derivative(const RationalPoly& p) {
  RationalPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) {
    d.push_back(p[i] * Rational(static_cast<long>(i)));
  }
  return trim_poly(d);
}

std::pair<RationalPoly, RationalPoly> poly_divmod(const RationalPoly& a,
                                                  const RationalPoly& b) {
  RationalPoly rem = a;
  trim_poly(rem);
  RationalPoly divisor = b;
  trim_poly(divisor);
  if (divisor.empty()) {
    throw std::invalid_argument("poly_divmod: division by the zero polynomial");
  }
  if (rem.size() < divisor.size()) return {RationalPoly{}, rem};
  RationalPoly quot(rem.size() - divisor.size() + 1, Rational(0));
  const Rational& lead = divisor.back();
  for (std::size_t k = quot.size(); k-- > 0;) {
    if (rem.size() < divisor.size() + k) continue;
    const Rational coef = rem[divisor.size() - 1 + k] / lead;
    quot[k] = coef;
    if (coef == 0) continue;
    for (std::size_t i = 0; i < divisor.size(); ++i) {
      rem[i + k] -= coef * divisor[i];
    }
  }
  rem.resize(divisor.size() - 1);
  return {trim_poly(quot), trim_poly(rem)};
}

namespace {

/// Scales to a monic polynomial (no-op on zero).
RationalPoly make_monic(RationalPoly p) {
  trim_poly(p);
  if (p.empty() || p.back() == 1) return p;
  const Rational lead = p.back();
  for (Rational& c : p) c /= lead;
  return p;
}

int sign_of(const Rational& v) { return v == 0 ? 0 : (v < 0 ? -1 : 1); }

/// Sign of p at −∞: leading sign flipped by odd degree.
int sign_at_minus_inf(const RationalPoly& p) {
  if (p.empty()) return 0;
  const int lead = sign_of(p.back());
  return (p.size() - 1) % 2 == 0 ? lead : -lead;
}

long long sign_variations(const std::vector<int>& signs) {
  long long v = 0;
  int prev = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

}  // namespace

RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  a = make_monic(std::move(a));
  b = make_monic(std::move(b));
  while (!b.empty()) {
    RationalPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = make_monic(std::move(r));
  }
  return a.empty() ? RationalPoly{} : a;
}

std::vector<RationalPoly> square_free_factors(const RationalPoly& p) {
  RationalPoly f = make_monic(p);
  if (f.empty()) {
    throw std::invalid_argument(
        "square_free_factors: the zero polynomial has no decomposition");
  }
  std::vector<RationalPoly> factors;
  if (f.size() == 1) return factors;

  RationalPoly fp = poly_derivative(f);
  RationalPoly a = poly_gcd(f, fp);
  RationalPoly b = poly_divmod(f, a).first;
  RationalPoly c = poly_divmod(fp, a).first;
  RationalPoly bp = poly_derivative(b);
  RationalPoly d = c;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (i < d.size()) {
      d[i] -= bp[i];
    } else {
      d.push_back(-bp[i]);
    }
  }
  trim_poly(d);

  while (b.size() > 1) {
    RationalPoly g = poly_gcd(b, d);
    factors.push_back(g.empty() ? RationalPoly{Rational(1)} : g);
    b = make_monic(poly_divmod(b, factors.back()).first);
    c = poly_divmod(d, factors.back()).first;
    bp = poly_derivative(b);
    d = c;
    for (std::size_t i = 0; i < bp.size(); ++i) {
      if (i < d.size()) {
        d[i] -= bp[i];
      } else {
        d.push_back(-bp[i]);
      }
    }
    trim_poly(d);
  }
  return factors;
}

long long sturm_roots_leq(const RationalPoly& square_free, const Rational& x) {
  RationalPoly f = make_monic(square_free);
  if (f.size() <= 1) return 0;

  std::vector<RationalPoly> chain;
  chain.push_back(f);
  chain.push_back(make_monic(poly_derivative(f)));
  while (chain.back().size() > 1) {
    RationalPoly r = poly_divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.empty()) break;  // not square-free; distinct-root count still valid
    for (Rational& c : r) c = -c;
    // A positive rescale keeps the sign pattern and tames coefficient growth.
    Rational lead = r.back();
    if (lead < 0) lead = -lead;
    for (Rational& c : r) c /= lead;
    chain.push_back(std::move(r));
  }

  std::vector<int> at_minus_inf, at_x;
  at_minus_inf.reserve(chain.size());
  at_x.reserve(chain.size());
  for (const RationalPoly& s : chain) {
    at_minus_inf.push_back(sign_at_minus_inf(s));
    at_x.push_back(sign_of(eval_poly(s, x)));
  }
  // With zero entries skipped, V(−∞) − V(x) counts roots in (−∞, x].
  return sign_variations(at_minus_inf) - sign_variations(at_x);
}

RationalPoly char_poly(const RationalMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("char_poly: matrix must be square");
  }
  const std::size_t n = m.rows();
  RationalPoly coeffs(n + 1, Rational(0));
  coeffs[n] = 1;
  RationalMatrix b = RationalMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const RationalMatrix mk = m * b;
    const Rational ck = -mk.trace() / Rational(static_cast<long>(k));
    coeffs[n - k] = ck;
    b = mk;
    for (std::size_t i = 0; i < n; ++i) b(i, i) += ck;
  }
  return coeffs;
}

long long count_real_roots_leq(const RationalPoly& p, const Rational& x) {
  const std::vector<RationalPoly> factors = square_free_factors(p);
  long long total = 0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].size() <= 1) continue;
    total += static_cast<long long>(i + 1) * sturm_roots_leq(factors[i], x);
  }
  return total;
}

long long count_eigenvalues_leq(const RationalMatrix& op,
                                const Rational& lambda) {
  return count_real_roots_leq(char_poly(op), lambda);
}

}  // namespace tpnsi
