#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace tpnsi {

/**
 * @brief A decay exponent that is either a finite real or the symbol ∞⁺.
 *
 * ∞⁺ marks decay faster than every power law (for example a spectral gap, or
 * a degree outside the range a profile describes). It is kept symbolic — never
 * a floating-point infinity — so profiles serialize and round-trip losslessly.
 * Arithmetic treats ∞⁺ as absorbing: ∞⁺ + x = ∞⁺ and c·∞⁺ = ∞⁺ for every
 * scalar c ≥ 0 (including c = 0, since the underlying decay stays
 * super-polynomial along a frozen axis).
 */
class AlphaValue {
 public:
  /// Finite value; requires a finite, non-negative double.
  explicit AlphaValue(double value);

  /// The symbol ∞⁺.
  static AlphaValue infinity();

  bool is_infinite() const { return infinite_; }

  /// The finite value; throws std::logic_error when called on ∞⁺.
  double value() const;

  /// Finite value, or @p fallback for ∞⁺ (plotting/diagnostic convenience).
  double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  friend AlphaValue operator+(const AlphaValue& a, const AlphaValue& b);
  friend bool operator==(const AlphaValue& a, const AlphaValue& b);
  friend bool operator!=(const AlphaValue& a, const AlphaValue& b) {
    return !(a == b);
  }
  /// Total order with every finite value below ∞⁺.
  friend bool operator<(const AlphaValue& a, const AlphaValue& b);

 private:
  AlphaValue() : infinite_(true), value_(0.0) {}
  bool infinite_;
  double value_;
};

/// c·a with c ≥ 0; ∞⁺ is absorbing even for c = 0.
AlphaValue scale_alpha(double c, const AlphaValue& a);

/// The smaller of the two under the order with ∞⁺ on top.
AlphaValue min_alpha(const AlphaValue& a, const AlphaValue& b);

/// "inf" for ∞⁺, otherwise a shortest round-trip decimal rendering.
std::string to_string(const AlphaValue& a);

std::ostream& operator<<(std::ostream& os, const AlphaValue& a);

/**
 * @brief Per-degree Novikov–Shubin exponents and L²-Betti numbers of a space.
 *
 * The algebraic input to the Künneth product formula. Exponents are defined
 * for degrees 0..top_degree−1; queries outside that range (and degrees with no
 * stored entry) answer ∞⁺. Betti numbers default to 0.
 */
struct NSProfile {
  int top_degree = 0;
  std::map<int, AlphaValue> alpha;
  std::map<int, double> betti;

  /// Stored exponent, or ∞⁺ for absent/out-of-range degrees.
  AlphaValue alpha_at(int k) const;

  /// Stored Betti number, or 0 when absent.
  double betti_at(int k) const;

  /// True when every stored Betti number is zero.
  bool betti_all_zero() const;

  /**
   * @brief Checks structural invariants.
   * @throws std::invalid_argument when top_degree < 0, an alpha key lies
   *   outside 0..top_degree−1, a finite alpha is not > 0, a betti key is
   *   negative, or a betti value is negative or non-finite.
   */
  void validate() const;
};

/**
 * @brief Renders a profile in the flat key=value text format.
 *
 * Lines: `top_degree = N`, then `degree.k.alpha = <number|inf>` for every
 * degree 0..top_degree−1 and `degree.k.betti = <number>` for every degree
 * 0..top_degree. Deterministic output: fixed ordering, shortest round-trip
 * numbers.
 */
std::string serialize_ns_profile(const NSProfile& profile);

/**
 * @brief Parses the flat key=value format produced by serialize_ns_profile.
 *
 * Blank lines and `#` comments are skipped. `inf` (any case) denotes ∞⁺.
 * A missing `top_degree` line is inferred from the largest degree mentioned.
 * @throws std::invalid_argument on malformed lines, duplicate keys, or when
 *   the parsed profile fails NSProfile::validate().
 */
NSProfile parse_ns_profile(const std::string& text);

}  // namespace tpnsi
