#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tpnsi/heat_kernel_h3.hpp"
#include "tpnsi/ns_profile.hpp"
#include "tpnsi/quadrature.hpp"

namespace tpnsi {

/**
 * @brief Power-law scaling path μ(λ) = λʳ, ν(λ) = λˢ through metric space.
 *
 * The one-parameter family (λ, λ^{1+ζ}) used throughout the degree-wise
 * computations is (r, s) = (1, 1+ζ), so ζ = s − 1.
 */
struct ScalingPath {
  double r = 1.0;  ///< base exponent, μ(λ) = λʳ
  double s = 1.0;  ///< fibre exponent, ν(λ) = λˢ

  /// @throws std::invalid_argument unless r ≥ 0, s ≥ 0, and not both zero.
  void validate() const;

  /// s − 1, the fibre-vs-base offset exponent.
  double zeta() const { return s - 1.0; }
};

/**
 * @brief Result of the decay-exponent extraction from a heat-trace curve.
 *
 * beta_hat follows the liminf convention: the minimum of the per-window
 * secant slopes. ls_two_decades is the least-squares slope over the last two
 * decades (a smoother diagnostic), and corrected — present only when a
 * correction scale was supplied — is the least-squares slope after removing
 * the leading subpolynomial correction terms.
 */
struct DecayEstimate {
  double beta_hat = 0.0;
  std::vector<double> window_slopes;
  double max_residual = 0.0;
  double ls_two_decades = 0.0;
  std::optional<double> corrected;
};

/**
 * @brief A two-parameter counting function sampled on a log-uniform grid.
 *
 * values(i, j) holds the function at (mu_grid[i], nu_grid[j]). Counting
 * functions grow with the metric, so values must be monotone non-decreasing
 * along both axes.
 */
struct TwoParamFunction {
  std::vector<double> mu_grid;
  std::vector<double> nu_grid;
  Eigen::MatrixXd values;  ///< rows follow mu_grid, columns follow nu_grid

  /**
   * @brief Checks grid and monotonicity invariants.
   * @throws std::invalid_argument when a grid has fewer than 2 points, is not
   *   positive, strictly increasing, and log-uniform (constant ratio to
   *   relative tolerance 1e-9), when the value matrix shape mismatches the
   *   grids, or when values decrease along either axis beyond a 1e-12·scale
   *   slack.
   */
  void validate() const;

  double at(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
};

/// Outcome of the dilatational-equivalence comparison on shared grids.
struct DilatationalResult {
  bool admissible = false;
  /// Smallest admissible candidate when admissible is true.
  double C = 0.0;
  /// On failure: first violated grid point of the largest candidate.
  Eigen::Index fail_i = -1;
  Eigen::Index fail_j = -1;
  double fail_mu = 0.0;
  double fail_nu = 0.0;
  std::string detail;
};

/// n log-spaced points from lo to hi inclusive (n ≥ 2, 0 < lo < hi).
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/**
 * @brief Samples θ_degree(t, t^ζ) over an increasing t grid.
 *
 * Degree 0 requires ζ ≥ −1/2 and degree 1 requires −1/2 < ζ < 1 (the validity
 * ranges of the closed-form traces); degree 2 delegates to degree 0, the two
 * exponents being equal by Hodge duality on this 3-dimensional geometry.
 * Evaluation parallelizes over the grid points.
 *
 * @throws std::domain_error when zeta lies outside the degree's validity
 *   range (the message cites the range); std::invalid_argument for a bad
 *   degree or a non-increasing/non-positive grid.
 */
std::vector<HeatTraceSample> heat_trace_curve(int degree, double zeta,
                                              const std::vector<double>& t_grid,
                                              const QuadratureSpec& quad = {});

/**
 * @brief Extracts the decay exponent β of θ(t) ≈ A·t^{−β} from samples.
 *
 * Secant slopes −Δlogθ/Δlogt are computed over all sliding windows of width
 * @p window_decades anchored at the large-t end; beta_hat is their minimum
 * (liminf convention). The least-squares slope over the last two decades is
 * reported as ls_two_decades, with max_residual the largest absolute log₁₀
 * residual of that fit.
 *
 * When @p correction_scale = σ is supplied, the corrected field holds the
 * least-squares β from the model log θ = a − β log t + Σ_{j=1..3} bⱼ t^{−jσ}
 * over the full sample range (plain least squares when σ < 0.05, where the
 * correction terms degenerate into the power law itself).
 *
 * @throws std::invalid_argument with fewer than 8 samples, a span under 3
 *   decades, or a window wider than the span; std::domain_error when any
 *   theta ≤ 0.
 */
DecayEstimate fit_decay_exponent(
    const std::vector<HeatTraceSample>& samples, double window_decades = 1.0,
    std::optional<double> correction_scale = std::nullopt);

/**
 * @brief Converts a heat-trace decay exponent to a spectral one: β ↦ 2β.
 *
 * θ(t) ≍ t^{−α/2} as t → ∞ corresponds to spectral density ≍ λ^{α/2} near 0.
 * @throws std::invalid_argument when beta < 0 or non-finite.
 */
double alpha_from_beta(double beta);

/**
 * @brief Two-parameter decay exponent of degree k along (λ, λˢ).
 *
 * Composes heat_trace_curve over t ∈ [10³, 10⁷] (33 log-spaced points),
 * fit_decay_exponent, and alpha_from_beta. Degrees 0 and 2 use the
 * correction-aware estimate with σ = 2ζ+1; degree 1 uses the two-decade
 * least-squares slope. Degree 2 returns the degree-0 result (Hodge duality).
 *
 * @throws std::invalid_argument unless path.r = 1 (the normalization the
 *   closed-form traces assume); propagates component errors.
 */
double two_param_alpha(int degree, const ScalingPath& path,
                       const QuadratureSpec& quad = {});

/**
 * @brief Künneth product formula for two-parameter decay exponents.
 *
 * Returns min over p ∈ [0, k] of
 *   { s·α_p(F) + r·α_{k−p}(B),  s·α_{p+1}(F) + r·α_{k−p}(B) },
 * with ∞⁺ absorbing and the min of an all-∞⁺ set equal to ∞⁺.
 *
 * @throws unsupported_case_error when either profile carries a nonzero
 *   L²-Betti number (the formula assumes they all vanish);
 *   std::invalid_argument for k < 0 or invalid profiles/path.
 */
AlphaValue product_alpha(int k, const NSProfile& F, const NSProfile& B,
                         const ScalingPath& path);

/**
 * @brief Pointwise Künneth form Σ_{p+q=k} F_p(ν)·B_q(μ).
 *
 * Degrees beyond a vector's length contribute 0.
 * @throws std::invalid_argument for k < 0, non-finite or non-positive μ, ν,
 *   or when an evaluated factor is negative.
 */
double product_sdf_pointwise(
    int k, const std::vector<std::function<double(double)>>& F_sdf,
    const std::vector<std::function<double(double)>>& B_sdf, double mu,
    double nu);

/**
 * @brief Polynomial growth degree Σ i·rankᵢ of a graded nilpotent structure.
 * @throws std::invalid_argument when a weight is < 1 or a rank is negative.
 */
long long growth_degree(
    const std::vector<std::pair<int, long long>>& graded_ranks);

/**
 * @brief Degree-2 exponent from the degree-0 one on a 3-dimensional space.
 *
 * The top and bottom up-Laplacian exponents coincide by Hodge duality, so
 * this is the identity on finite inputs.
 * @throws std::invalid_argument on non-finite input.
 */
double hodge_dual_alpha(double alpha_0_value);

/**
 * @brief Tests one dilatational-equivalence constant on shared grids.
 *
 * C must shift by whole grid steps on both axes. The check requires
 *   G(C⁻¹μ, C⁻¹ν) ≤ H(μ, ν) ≤ G(Cμ, Cν)
 * at every grid point where both shifted lookups land on the grid, and the
 * same chain with G and H exchanged, so the verdict is symmetric in (G, H).
 * On failure the optional out-parameters receive the first violated indices.
 *
 * @throws std::invalid_argument when grids mismatch or C is not a whole
 *   power of the grid step on both axes.
 */
bool dilatational_admissible(const TwoParamFunction& G,
                             const TwoParamFunction& H, double C,
                             Eigen::Index* fail_i = nullptr,
                             Eigen::Index* fail_j = nullptr);

/**
 * @brief Finds the smallest admissible constant among candidates.
 *
 * Candidates must be increasing, positive, and whole powers of the grid step
 * (so shifted lookups are exact, never interpolated). When none is
 * admissible, the result records the first violated grid point of the
 * largest candidate.
 *
 * @throws std::invalid_argument for mismatched grids, an empty or
 *   non-increasing candidate list, or off-grid candidates.
 */
DilatationalResult dilatational_equiv_check(
    const TwoParamFunction& G, const TwoParamFunction& H,
    const std::vector<double>& C_candidates);

}  // namespace tpnsi
