#ifndef TPNSI_ERRORS_HPP
#define TPNSI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tpnsi {

/**
 * @brief Adaptive quadrature failed to reach the requested tolerance.
 *
 * Carries the best value obtained so far together with its error estimate so
 * callers can decide whether the partial result is still usable.
 */
class quadrature_convergence_error : public std::runtime_error {
public:
  quadrature_convergence_error(const std::string& what, double partial_value,
                               double est_abs_error)
      : std::runtime_error(what),
        partial_value_(partial_value),
        est_abs_error_(est_abs_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double est_abs_error() const noexcept { return est_abs_error_; }

private:
  double partial_value_;
  double est_abs_error_;
};

/// A Lie-algebra presentation violates the Jacobi identity (message names the
/// failing index triple).
class invalid_presentation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested combination of inputs is outside the supported cases
/// (e.g. nonzero L2-Betti numbers in the product formula, or Harper blocks
/// requested for a perturbed operator).
class unsupported_case_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The computation would exceed a hard resource cap (e.g. dense eigensolve
/// beyond the supported quotient size).
class resource_cap_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The spectral-gap-clipped fit window contains too few usable points.
class window_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

}  // namespace tpnsi

#endif  // TPNSI_ERRORS_HPP
