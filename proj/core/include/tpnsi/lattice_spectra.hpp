#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tpnsi/rational_poly.hpp"
#include "tpnsi/spectral_asymptotics.hpp"

namespace tpnsi {

/// Largest side length for which dense eigensolves are used.
inline constexpr int kDenseSolveCap = 12;

/// Largest side length supported by the block-diagonalized path.
inline constexpr int kHarperCap = 64;

/// Frozen fit-window constants for lattice_alpha_along_path: the window is
/// [max(c1/n, (c1/n)^{1/(1+zeta)}), c2].
inline constexpr double kPathWindowC1 = 2.5 * 3.141592653589793238462643383279502884;
inline constexpr double kPathWindowC2 = 1.0;

/**
 * @brief Finite quotient of the discrete Heisenberg group with entries mod n.
 *
 * Elements are triples (x, y, z) with multiplication
 * (x, y, z)·(x', y', z') = (x + x', y + y', z + z' + x·y').
 */
struct HeisenbergQuotient {
  int n = 0;

  /// Number of group elements, n³.
  std::size_t size() const;

  /// Flattens (x, y, z) to a site index after reduction mod n.
  std::size_t index_of(int x, int y, int z) const;

  /// Inverse of index_of.
  std::array<int, 3> coords_of(std::size_t index) const;

  /// Right-translates a site by generator 0 (X), 1 (Y), or 2 (Z), or by the
  /// generator's inverse.
  std::size_t translated(std::size_t site, int generator,
                         bool inverse = false) const;

  void validate() const;
};

/// Builds and validates a quotient of side n >= 2.
HeisenbergQuotient build_heisenberg_quotient(int n);

/**
 * @brief Seeded random edge-weight perturbation with factors in [1/K, K].
 */
struct NoiseSpec {
  double strength = 1.0;  ///< K >= 1; factors are drawn from [1/K, K].
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws the per-edge factors in canonical order: sites ascending, and for
/// each site its outgoing X, Y, Z edges. The same spec always produces the
/// same factors regardless of the metric scales in use.
std::vector<double> noise_factors(const HeisenbergQuotient& q,
                                  const NoiseSpec& noise);

/**
 * @brief Anisotropic lattice Laplacian Δ^{μ,ν} = μ⁻²(L_X + L_Y) + ν⁻²L_Z.
 *
 * The dense matrix is materialized only for n <= kDenseSolveCap; larger
 * unperturbed operators are handled through their block diagonalization.
 */
struct AnisotropicLaplacian {
  int n = 0;
  double mu = 1.0;
  double nu = 1.0;
  std::optional<NoiseSpec> noise;
  Eigen::MatrixXd matrix;

  bool has_dense() const { return matrix.size() > 0; }
  void validate() const;
};

/// Assembles Δ^{μ,ν}, optionally with per-edge noise factors.
AnisotropicLaplacian anisotropic_laplacian(
    const HeisenbergQuotient& q, double mu, double nu,
    const std::optional<NoiseSpec>& noise = std::nullopt);

/// Exact-rational unperturbed Δ^{μ,ν} for scaling identities.
RationalMatrix anisotropic_laplacian_rational(const HeisenbergQuotient& q,
                                              const Rational& mu,
                                              const Rational& nu);

/// The n² momentum blocks (each n×n, ordered k·n + p) whose joint spectrum
/// equals the spectrum of the unperturbed Δ^{μ,ν}.
std::vector<Eigen::MatrixXd> harper_blocks(const HeisenbergQuotient& q,
                                           double mu = 1.0, double nu = 1.0);

/**
 * @brief Scale-independent spectral data of the block diagonalization.
 *
 * Block (k, p) stores the sorted eigenvalues of its hopping part together
 * with the centre weight b_k = 2 − 2cos(2πk/n); the eigenvalues of Δ^{μ,ν}
 * restricted to the block are μ⁻²a + ν⁻²b_k, so one decomposition serves
 * every (μ, ν, λ) query.
 */
struct HarperSpectrum {
  int n = 0;
  std::vector<std::vector<double>> block_eigenvalues;  ///< n² sorted lists.
  std::vector<double> centre_weight;                   ///< b_k per block.

  /// Number of eigenvalues of Δ^{μ,ν} that are <= lambda + tie tolerance.
  long long count(double mu, double nu, double lambda) const;
};

/// Precomputes the block eigendecompositions for an unperturbed quotient.
HarperSpectrum harper_spectrum(const HeisenbergQuotient& q);

/**
 * @brief Result of an eigenvalue-counting query.
 */
struct CountingResult {
  double lambda = 0.0;
  long long count = 0;
  double normalized = 0.0;  ///< count / n³.
  bool retried = false;     ///< factorization was nudged off a tie.
};

/// Counts eigenvalues of the operator that are <= lambda + 1e-12·‖op‖.
/// Dense eigensolve for n <= kDenseSolveCap, block path for unperturbed
/// larger n; perturbed operators beyond the dense cap raise
/// resource_cap_error.
CountingResult counting_function(const AnisotropicLaplacian& op,
                                 double lambda);

/// Same count through symmetric-indefinite factorization of op − λI; used to
/// cross-check the eigensolve paths. Requires the dense matrix.
CountingResult inertia_counting_function(const AnisotropicLaplacian& op,
                                         double lambda);

/// Sorted eigenvalues of a materialized operator.
std::vector<double> dense_eigenvalues(const AnisotropicLaplacian& op);

/// Normalized counts over a log-spaced (mu, nu) grid at threshold lambda0.
TwoParamFunction two_param_grid(int n, const std::vector<double>& mu_grid,
                                const std::vector<double>& nu_grid,
                                double lambda0 = 1.0);

/// Exact finite rescaling identity:
/// count(Δ^{μ,ν} <= λ₀) == count(Δ^{√λ₀μ,√λ₀ν} <= 1).
bool rescale_lemma_check(int n, double mu, double nu, double lambda0);

/**
 * @brief Outcome of the perturbation sandwich test.
 */
struct SandwichResult {
  bool ok = false;
  double witness = 1.0;  ///< scale factor C = √K realizing the sandwich.
  long long count_lower = 0;
  long long count_perturbed = 0;
  long long count_upper = 0;
};

/// Verifies that the eigenvalue count of the noise-perturbed operator lies
/// between the counts of the unperturbed operator at scales (μ/√K, ν/√K)
/// and (√Kμ, √Kν).
SandwichResult perturb_sandwich_check(int n, double K, std::uint64_t seed,
                                      double mu, double nu, double lambda0);

/**
 * @brief Log–log slope estimates of the counting function along the scaling
 * path (μ, ν) = (λ, λ^{1+ζ}) on a family of growing quotients.
 */
struct PathSlopeReport {
  double zeta = 0.0;
  double alpha_reference = 0.0;  ///< continuum exponent 4 + 2ζ.
  std::vector<int> n_values;
  std::vector<double> slopes;
  std::vector<double> deviations;  ///< slope − alpha_reference.
  std::vector<double> window_lo;
  std::vector<double> window_hi;
  std::vector<std::size_t> points_used;
  bool deviation_shrinks = false;   ///< |dev| at the last n < |dev| at the first.
  double extrapolated_alpha = 0.0;  ///< 1/n extrapolation across the last two n.
  double monotone_fraction = 1.0;   ///< diagnostic; see lattice_alpha_along_path.
};

/// For each n, fits the slope of log(normalized count − 1/n³) against log λ
/// over the resolvable window [max(c1/n, (c1/n)^{1/(1+ζ)}), c2], with counts
/// along (μ, ν) = (λ, λ^{1+ζ}) at threshold 1. An empty lambda_grid selects
/// 33 log-spaced points per n; a supplied grid is clipped per n. Fewer than
/// four usable points raise window_error. monotone_fraction reports how often
/// the normalized count at a shared λ is non-decreasing from one n to the
/// next (an approximation diagnostic, not an assertion).
PathSlopeReport lattice_alpha_along_path(
    const std::vector<int>& n_list, double zeta,
    const std::vector<double>& lambda_grid = {});

}  // namespace tpnsi
