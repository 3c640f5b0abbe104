#include <random>
#include <stdexcept>

#include "doctest.h"
#include "tpnsi/bigraded_complex.hpp"
#include "tpnsi/errors.hpp"
#include "tpnsi/rational_poly.hpp"

namespace {

using tpnsi::Rational;

tpnsi::LieAlgebraPresentation broken_jacobi() {
  tpnsi::LieAlgebraPresentation lie;
  lie.dim = 3;
  lie.structure_constants.assign(27, Rational(0));
  lie.vertical = {2};
  lie.set_structure_constant(0, 1, 2, Rational(1));
  lie.set_structure_constant(0, 2, 0, Rational(1));
  return lie;
}

}  // namespace

TEST_CASE("presentation validation") {
  CHECK_NOTHROW(tpnsi::h3_presentation().validate());
  CHECK_NOTHROW(tpnsi::h5_presentation().validate());
  CHECK_NOTHROW(tpnsi::solvable3_presentation().validate());
  CHECK_NOTHROW(tpnsi::abelian_presentation(4).validate());

  CHECK_THROWS_AS(broken_jacobi().validate(),
                  tpnsi::invalid_presentation_error);

  tpnsi::LieAlgebraPresentation lie;
  lie.dim = 2;
  lie.structure_constants.assign(8, Rational(0));
  lie.vertical = {5};  // out of range
  CHECK_THROWS_AS(lie.validate(), std::invalid_argument);

  CHECK_THROWS_AS(lie.set_structure_constant(0, 0, 1, Rational(1)),
                  std::invalid_argument);
}

TEST_CASE("structure constants are stored antisymmetrically") {
  auto lie = tpnsi::h3_presentation();
  CHECK(lie.structure_constant(0, 1, 2) == Rational(1));
  CHECK(lie.structure_constant(1, 0, 2) == Rational(-1));
  CHECK(lie.is_vertical(2));
  CHECK(!lie.is_vertical(0));
  CHECK(lie.horizontal() == std::vector<int>{0, 1});
}

TEST_CASE("basis enumeration and bidegrees") {
  const auto basis = tpnsi::build_basis(tpnsi::h3_presentation());
  REQUIRE(basis.by_degree.size() == 4);
  CHECK(basis.by_degree[0].size() == 1);
  CHECK(basis.by_degree[1].size() == 3);
  CHECK(basis.by_degree[2].size() == 3);
  CHECK(basis.by_degree[3].size() == 1);

  // xi^X ∧ xi^Z has one horizontal and one vertical factor.
  const auto idx = basis.index_of({0, 2});
  const auto& mono = basis.by_degree[2][idx];
  CHECK(mono.p == 1);
  CHECK(mono.q == 1);
  // The top form on h3 is (2,1).
  CHECK(basis.by_degree[3][0].p == 2);
  CHECK(basis.by_degree[3][0].q == 1);
}

TEST_CASE("the differential of the three-dimensional nilpotent algebra") {
  const auto complex = tpnsi::build_ce_complex(tpnsi::h3_presentation());
  // d xi^Z = -xi^X ∧ xi^Y and the horizontal generators are closed.
  const auto& d1 = complex.differential(1);
  const auto xy = complex.basis.index_of({0, 1});
  CHECK(d1(xy, 2) == Rational(-1));
  CHECK(d1(complex.basis.index_of({0, 2}), 2) == Rational(0));
  for (int col = 0; col < 2; ++col) {
    for (std::size_t row = 0; row < complex.basis.by_degree[2].size(); ++row) {
      CHECK(d1(row, col) == Rational(0));
    }
  }
}

TEST_CASE("d squared vanishes for every library algebra") {
  for (const auto& lie :
       {tpnsi::abelian_presentation(2), tpnsi::abelian_presentation(3),
        tpnsi::abelian_presentation(4), tpnsi::h3_presentation(),
        tpnsi::h5_presentation(), tpnsi::solvable3_presentation()}) {
    const auto complex = tpnsi::build_ce_complex(lie);
    for (int k = 0; k + 1 < lie.dim; ++k) {
      CHECK((complex.differential(k + 1) * complex.differential(k)).is_zero());
    }
  }
}

TEST_CASE("bidegree split of the library algebras") {
  // h3: the single bracket lands in the (2,-1) component.
  const auto h3 = tpnsi::split_differential(
      tpnsi::build_ce_complex(tpnsi::h3_presentation()));
  CHECK(!h3.D2m1[1].is_zero());
  CHECK(h3.D01[1].is_zero());
  CHECK(h3.D10[1].is_zero());
  for (const auto& r : h3.residual) CHECK(r.is_zero());

  // The solvable algebra's bracket preserves the vertical letter: (1,0).
  const auto sv = tpnsi::split_differential(
      tpnsi::build_ce_complex(tpnsi::solvable3_presentation()));
  CHECK(!sv.D10[1].is_zero());
  CHECK(sv.D2m1[1].is_zero());
}

TEST_CASE("a non-subalgebra vertical distribution leaves a residual") {
  tpnsi::LieAlgebraPresentation lie;
  lie.dim = 3;
  lie.structure_constants.assign(27, Rational(0));
  lie.vertical = {1, 2};
  lie.set_structure_constant(1, 2, 0, Rational(1));  // [v1, v2] horizontal
  CHECK_NOTHROW(lie.validate());
  CHECK(!lie.vertical_is_subalgebra());

  const auto complex = tpnsi::build_ce_complex(lie);
  CHECK_THROWS_AS(tpnsi::split_differential(complex),
                  tpnsi::invalid_presentation_error);
  const auto lenient = tpnsi::split_differential_lenient(complex);
  bool any_residual = false;
  for (const auto& r : lenient.residual) any_residual |= !r.is_zero();
  CHECK(any_residual);
}

TEST_CASE("the five split identities hold exactly") {
  for (const auto& lie :
       {tpnsi::abelian_presentation(2), tpnsi::abelian_presentation(3),
        tpnsi::abelian_presentation(4), tpnsi::h3_presentation(),
        tpnsi::h5_presentation(), tpnsi::solvable3_presentation()}) {
    const auto split =
        tpnsi::split_differential(tpnsi::build_ce_complex(lie));
    const auto res = tpnsi::verify_identities(split);
    for (const auto& family : res.composites) {
      for (const auto& m : family) {
        CHECK(m.is_zero());
      }
    }
  }
}

TEST_CASE("gram weights on the three-dimensional nilpotent algebra") {
  const auto complex = tpnsi::build_ce_complex(tpnsi::h3_presentation());
  const auto gram =
      tpnsi::scaled_gram(complex.basis, Rational(2), Rational(3));

  // xi^X ∧ xi^Z sits in bidegree (1,1): weight 2^-2 · 3^-2 = 1/36, and the
  // norm reported for the unit coefficient vector is the squared one.
  std::vector<Rational> coeffs(3, Rational(0));
  coeffs[complex.basis.index_of({0, 2})] = Rational(1);
  CHECK(tpnsi::norm_of(coeffs, 2, gram) == Rational(1, 36));

  // Degree-0 weight is 1 regardless of the scales.
  CHECK(tpnsi::norm_of({Rational(5)}, 0, gram) == Rational(25));
}

TEST_CASE("gram norms scale uniformly in each degree") {
  const auto complex = tpnsi::build_ce_complex(tpnsi::h5_presentation());
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 6);
  for (int trial = 0; trial < 30; ++trial) {
    const Rational mu(std::abs(num(rng)) + 1, den(rng));
    const Rational nu(std::abs(num(rng)) + 1, den(rng));
    const Rational lambda(std::abs(num(rng)) + 2, den(rng));
    const int k = 1 + trial % 4;
    const auto base = tpnsi::scaled_gram(complex.basis, mu, nu);
    const auto scaled =
        tpnsi::scaled_gram(complex.basis, lambda * mu, lambda * nu);
    std::vector<Rational> coeffs(complex.basis.by_degree[k].size());
    for (auto& c : coeffs) c = Rational(num(rng), den(rng));
    const auto n0 = tpnsi::norm_of(coeffs, k, base);
    const auto n1 = tpnsi::norm_of(coeffs, k, scaled);
    // Degree-k norms pick up lambda^{-2k}.
    Rational expected = n0;
    for (int i = 0; i < k; ++i) expected /= lambda * lambda;
    CHECK(n1 == expected);
  }
}

TEST_CASE("the up-Laplacian of the three-dimensional nilpotent algebra") {
  const auto complex = tpnsi::build_ce_complex(tpnsi::h3_presentation());
  const auto gram =
      tpnsi::scaled_gram(complex.basis, Rational(1), Rational(1));
  const auto lap = tpnsi::up_laplacian(complex, 1, gram);
  // Eigenvalue 1 on xi^Z, zero on the closed horizontal generators.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Rational want = (i == 2 && j == 2) ? Rational(1) : Rational(0);
      CHECK(lap(i, j) == want);
    }
  }

  // At scales (mu, nu) the nonzero eigenvalue becomes mu^-4 nu^2.
  const auto gram23 =
      tpnsi::scaled_gram(complex.basis, Rational(2), Rational(3));
  const auto lap23 = tpnsi::up_laplacian(complex, 1, gram23);
  CHECK(lap23(2, 2) == Rational(9, 16));

  // Top degree has no up-Laplacian: the zero matrix.
  const auto top = tpnsi::up_laplacian(complex, 3, gram);
  CHECK(top.is_zero());
}

TEST_CASE("up-Laplacians scale like the inverse square of the metric") {
  const auto complex = tpnsi::build_ce_complex(tpnsi::h5_presentation());
  std::mt19937 rng(123);
  std::uniform_int_distribution<int> pick(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const Rational mu(pick(rng), pick(rng));
    const Rational nu(pick(rng), pick(rng));
    const Rational lambda(pick(rng) + 1, pick(rng));
    const int k = trial % 5;
    const auto lap = tpnsi::up_laplacian(
        complex, k, tpnsi::scaled_gram(complex.basis, mu, nu));
    const auto lap_scaled = tpnsi::up_laplacian(
        complex, k,
        tpnsi::scaled_gram(complex.basis, lambda * mu, lambda * nu));
    CHECK(lap_scaled == lap.scaled(Rational(1) / (lambda * lambda)));
  }
}

TEST_CASE("eigenvalue counts are invariant under the joint rescale") {
  // Counting up-Laplacian eigenvalues <= lambda0 at (mu, nu) matches
  // counting <= 1 at (sqrt(lambda0) mu, sqrt(lambda0) nu); with lambda0 a
  // perfect rational square everything stays exact.
  const auto complex = tpnsi::build_ce_complex(tpnsi::h3_presentation());
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const Rational mu(pick(rng), pick(rng));
    const Rational nu(pick(rng), pick(rng));
    const Rational root(pick(rng), pick(rng));
    const Rational lambda0 = root * root;
    const int k = trial % 3;
    const auto lap = tpnsi::up_laplacian(
        complex, k, tpnsi::scaled_gram(complex.basis, mu, nu));
    const auto lap_rescaled = tpnsi::up_laplacian(
        complex, k, tpnsi::scaled_gram(complex.basis, root * mu, root * nu));
    CHECK(tpnsi::count_eigenvalues_leq(lap, lambda0) ==
          tpnsi::count_eigenvalues_leq(lap_rescaled, Rational(1)));
  }
}

TEST_CASE("presentation text round-trips exactly") {
  for (const auto& lie :
       {tpnsi::h3_presentation(), tpnsi::h5_presentation(),
        tpnsi::solvable3_presentation(), tpnsi::abelian_presentation(3)}) {
    const auto text = tpnsi::serialize_presentation(lie);
    const auto parsed = tpnsi::parse_presentation(text);
    CHECK(parsed.dim == lie.dim);
    CHECK(parsed.vertical == lie.vertical);
    CHECK(parsed.structure_constants == lie.structure_constants);
    CHECK(tpnsi::serialize_presentation(parsed) == text);
  }
}

TEST_CASE("parser diagnostics") {
  CHECK_THROWS_AS(tpnsi::parse_presentation("vertical = 1\n"),
                  std::invalid_argument);  // dim missing
  CHECK_THROWS_AS(tpnsi::parse_presentation("dim = 2\ndim = 3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      tpnsi::parse_presentation("dim = 2\nbracket 1 1 2 = 1\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      tpnsi::parse_presentation("dim = 2\nbracket 1 2 5 = 1\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(tpnsi::parse_presentation("dim = 2\nwhat is this\n"),
                  std::invalid_argument);
  // Fractions and comments parse.
  const auto lie = tpnsi::parse_presentation(
      "# comment\ndim = 3\nvertical = 3\nbracket 1 2 3 = -2/3\n");
  CHECK(lie.structure_constant(0, 1, 2) == Rational(-2, 3));
}

TEST_CASE("the shipped presentation files match the built-in constructors") {
  const std::string dir = std::string(TPNSI_SOURCE_DATA_DIR) +
                          "/presentations/";
  const auto same = [](const tpnsi::LieAlgebraPresentation& a,
                       const tpnsi::LieAlgebraPresentation& b) {
    return a.dim == b.dim && a.vertical == b.vertical &&
           a.structure_constants == b.structure_constants;
  };
  CHECK(same(tpnsi::load_presentation_file(dir + "h3.txt"),
             tpnsi::h3_presentation()));
  CHECK(same(tpnsi::load_presentation_file(dir + "h5.txt"),
             tpnsi::h5_presentation()));
  CHECK(same(tpnsi::load_presentation_file(dir + "solvable.txt"),
             tpnsi::solvable3_presentation()));
  CHECK(same(tpnsi::load_presentation_file(dir + "abelian2.txt"),
             tpnsi::abelian_presentation(2)));
  CHECK(same(tpnsi::load_presentation_file(dir + "abelian3.txt"),
             tpnsi::abelian_presentation(3)));
  CHECK(same(tpnsi::load_presentation_file(dir + "abelian4.txt"),
             tpnsi::abelian_presentation(4)));
  CHECK_THROWS_AS(tpnsi::load_presentation_file(dir + "missing.txt"),
                  std::runtime_error);
}
