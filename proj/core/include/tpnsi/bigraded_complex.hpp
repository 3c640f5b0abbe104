#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "tpnsi/rational_poly.hpp"

namespace tpnsi {

/**
 * @brief A finite-dimensional Lie algebra with a chosen vertical subspace.
 *
 * Structure constants c_{ij}^k define [e_i, e_j] = Σ_k c_{ij}^k e_k in the
 * basis e_0..e_{dim−1}; they are stored antisymmetrically in (i, j). The
 * vertical index set marks the fibre directions; the horizontal directions
 * are its complement. All indices are 0-based in code (presentation files
 * use 1-based indices).
 */
struct LieAlgebraPresentation {
  int dim = 0;
  std::vector<Rational> structure_constants;  ///< flat (i·dim + j)·dim + k
  std::vector<int> vertical;                  ///< sorted, unique, 0-based

  const Rational& structure_constant(int i, int j, int k) const;
  /// Sets c_{ij}^k and c_{ji}^k = −c_{ij}^k.
  void set_structure_constant(int i, int j, int k, const Rational& value);

  std::vector<int> horizontal() const;
  bool is_vertical(int index) const;

  /**
   * @brief Checks dimensions, index hygiene, antisymmetry, and the Jacobi
   * identity in exact arithmetic.
   * @throws invalid_presentation_error naming the first failing triple
   *   (i, j, k) when Jacobi fails; std::invalid_argument for structural
   *   problems (bad dim, bad vertical indices, antisymmetry violation).
   */
  void validate() const;

  /**
   * @brief True when the vertical directions span a subalgebra: c_{ij}^k = 0
   * whenever i, j are vertical and k is horizontal. This is what rules out a
   * (−1, 2) component of the differential.
   */
  bool vertical_is_subalgebra() const;
};

/// Exterior-algebra basis monomial: a strictly increasing index word with its
/// bidegree (p horizontal factors, q vertical factors).
struct BasisMonomial {
  std::vector<int> word;
  int p = 0;
  int q = 0;
};

/**
 * @brief The exterior basis of the dual algebra, graded by total degree and
 * tagged with bidegrees.
 *
 * Within each degree, monomials are ordered lexicographically on their sorted
 * index words; signs elsewhere follow transposition parity against this
 * ordering.
 */
struct BigradedBasis {
  int dim = 0;
  std::vector<int> vertical;
  std::vector<std::vector<BasisMonomial>> by_degree;  ///< [k][index]

  /// Index of a sorted word within its degree.
  /// @throws std::invalid_argument when the word is not a basis word.
  std::size_t index_of(const std::vector<int>& sorted_word) const;
};

BigradedBasis build_basis(const LieAlgebraPresentation& lie);

/**
 * @brief The Chevalley–Eilenberg complex: basis plus the differential per
 * degree, d[k] mapping degree-k coefficients to degree-(k+1) coefficients.
 *
 * d is the antiderivation extension of dξ^k = −Σ_{i<j} c_{ij}^k ξ^i∧ξ^j.
 */
struct CEComplex {
  LieAlgebraPresentation lie;
  BigradedBasis basis;
  std::vector<RationalMatrix> d;  ///< k = 0..dim−1

  const RationalMatrix& differential(int k) const;
};

/**
 * @brief Builds the complex and verifies d∘d = 0 exactly.
 * @throws invalid_presentation_error when the presentation fails validation;
 *   std::logic_error if d² ≠ 0 (cannot happen once Jacobi holds).
 */
CEComplex build_ce_complex(const LieAlgebraPresentation& lie);

/**
 * @brief The differential split by bidegree shift, per total degree.
 *
 * D01, D10, D2m1 collect the entries of d whose (Δp, Δq) is (0,1), (1,0),
 * (2,−1); residual collects everything else and is zero exactly when the
 * vertical directions span a subalgebra.
 */
struct DifferentialSplit {
  std::vector<RationalMatrix> D01, D10, D2m1, residual;  ///< per degree k

  bool residual_is_zero() const;
};

/**
 * @brief Splits every entry of d by the bidegree shift from source to target.
 * @throws invalid_presentation_error listing the offending entries when the
 *   residual is nonzero (the vertical directions do not span a subalgebra).
 */
DifferentialSplit split_differential(const CEComplex& complex);

/// Same split, but a nonzero residual is returned rather than thrown —
/// the inspection path for deliberately non-split examples.
DifferentialSplit split_differential_lenient(const CEComplex& complex);

/**
 * @brief The five graded components of d² = 0, per total degree:
 *   1. (d^{0,1})²
 *   2. d^{0,1}d^{1,0} + d^{1,0}d^{0,1}
 *   3. d^{0,1}d^{2,−1} + (d^{1,0})² + d^{2,−1}d^{0,1}
 *   4. d^{1,0}d^{2,−1} + d^{2,−1}d^{1,0}
 *   5. (d^{2,−1})²
 */
struct IdentityResiduals {
  std::array<std::vector<RationalMatrix>, 5> composites;

  bool all_zero() const;
};

/// Computes the five composite matrices for every total degree; each must be
/// exactly zero for a valid split.
IdentityResiduals verify_identities(const DifferentialSplit& split);

/**
 * @brief Diagonal Gram data of the (μ,ν)-scaled inner product.
 *
 * The monomial basis is orthonormal at (μ,ν) = (1,1); a bidegree-(p,q)
 * monomial has squared norm μ^{−2p} ν^{−2q}. Only the squares μ², ν² enter,
 * so the weights stay rational even when the scale itself is a square root.
 */
struct ScaledGram {
  Rational mu2, nu2;                           ///< squared scale factors
  std::vector<std::vector<Rational>> weights;  ///< [degree][basis index]
};

/// Gram data at scales (mu, nu); both must be positive.
ScaledGram scaled_gram(const BigradedBasis& basis, const Rational& mu,
                       const Rational& nu);

/// Gram data from squared scales directly (used for irrational scales whose
/// squares are rational, e.g. √λ₀·μ).
ScaledGram scaled_gram_from_squares(const BigradedBasis& basis,
                                    const Rational& mu2, const Rational& nu2);

/**
 * @brief Squared norm ⟨α, α⟩ of a degree-k coefficient vector under the gram.
 * @throws std::invalid_argument on degree/coefficient-size mismatch.
 */
Rational norm_of(const std::vector<Rational>& form_coeffs, int degree,
                 const ScaledGram& gram);

/**
 * @brief The up-Laplacian G_k^{−1} dᵀ G_{k+1} d in degree k.
 *
 * Self-adjoint with respect to the gram (not symmetric as a raw matrix);
 * its spectrum is real and non-negative. Degree dim yields the zero matrix.
 */
RationalMatrix up_laplacian(const CEComplex& complex, int k,
                            const ScaledGram& gram);

/**
 * @brief Parses the presentation text format.
 *
 * Lines (1-based indices): `dim = n`, `vertical = i,j,...`,
 * `bracket i j k = p/q` meaning c_{ij}^k = p/q. `#` starts a comment.
 * @throws std::invalid_argument on malformed input;
 *   invalid_presentation_error when the parsed algebra fails validation.
 */
LieAlgebraPresentation parse_presentation(const std::string& text);

/// Renders the format parse_presentation reads; exact round-trip.
std::string serialize_presentation(const LieAlgebraPresentation& lie);

/// Reads and parses a presentation file.
/// @throws std::runtime_error when the file cannot be read.
LieAlgebraPresentation load_presentation_file(const std::string& path);

/// Abelian ℝⁿ with the last direction vertical (n ≥ 1).
LieAlgebraPresentation abelian_presentation(int n);
/// ⟨X, Y, Z | [X,Y] = Z⟩ with Z vertical.
LieAlgebraPresentation h3_presentation();
/// ⟨X₁, X₂, Y₁, Y₂, Z | [Xᵢ,Yᵢ] = Z⟩ with Z vertical.
LieAlgebraPresentation h5_presentation();
/// Solvable ⟨X, Y, Z | [X,Z] = Z⟩ with Z vertical (D10 ≠ 0 example).
LieAlgebraPresentation solvable3_presentation();

}  // namespace tpnsi
