#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "tpnsi/errors.hpp"
#include "tpnsi/lattice_spectra.hpp"
#include "tpnsi/rational_poly.hpp"

namespace {

using tpnsi::Rational;

std::vector<double> pooled_block_eigenvalues(const tpnsi::HeisenbergQuotient& q,
                                             double mu, double nu) {
  std::vector<double> all;
  for (const auto& block : tpnsi::harper_blocks(q, mu, nu)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        block, Eigen::EigenvaluesOnly);
    REQUIRE(solver.info() == Eigen::Success);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      all.push_back(solver.eigenvalues()[i]);
    }
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST_CASE("quotient group structure") {
  const auto q = tpnsi::build_heisenberg_quotient(3);
  CHECK(q.size() == 27);

  // Translating (1,0,0) by the second generator picks up the twist.
  const auto a = q.index_of(1, 0, 0);
  const auto b = q.translated(a, 1);
  CHECK(q.coords_of(b) == std::array<int, 3>{1, 1, 1});
  // The other order does not: the group is noncommutative.
  const auto c = q.translated(q.index_of(0, 1, 0), 0);
  CHECK(q.coords_of(c) == std::array<int, 3>{1, 1, 0});

  // Generator inverses undo their translations.
  for (std::size_t site = 0; site < q.size(); ++site) {
    for (int g = 0; g < 3; ++g) {
      CHECK(q.translated(q.translated(site, g), g, true) == site);
      CHECK(q.translated(q.translated(site, g, true), g) == site);
    }
  }

  // The third generator is central.
  for (std::size_t site = 0; site < q.size(); ++site) {
    for (int g = 0; g < 2; ++g) {
      CHECK(q.translated(q.translated(site, g), 2) ==
            q.translated(q.translated(site, 2), g));
    }
  }

  CHECK_THROWS_AS(tpnsi::build_heisenberg_quotient(1), std::invalid_argument);
}

TEST_CASE("dense operator: symmetry, row sums, kernel") {
  const auto q = tpnsi::build_heisenberg_quotient(3);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.25, 0.75);
  REQUIRE(op.has_dense());
  const auto& m = op.matrix;
  CHECK(m.rows() == 27);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  const double diag = 4.0 / (1.25 * 1.25) + 2.0 / (0.75 * 0.75);
  for (int i = 0; i < 27; ++i) {
    CHECK(std::abs(m(i, i) - diag) < 1e-14);
  }
  const auto ev = tpnsi::dense_eigenvalues(op);
  CHECK(ev.front() > -1e-12);
  CHECK(std::abs(ev.front()) < 1e-12);
  CHECK(ev[1] > 1e-6);  // the constant vector spans the kernel
}

TEST_CASE("side length two folds coincident edges") {
  const auto q = tpnsi::build_heisenberg_quotient(2);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0);
  // Stepping twice in one direction returns home, so each neighbour pair is
  // doubly connected and off-diagonal entries reach -2.
  CHECK(op.matrix.minCoeff() == -2.0);
  const auto ev = tpnsi::dense_eigenvalues(op);
  CHECK(std::abs(ev.front()) < 1e-12);
  CHECK(ev.back() <= 8.0 + 4.0 + 1e-12);
}

TEST_CASE("rational operator mirrors the floating-point one") {
  const auto q = tpnsi::build_heisenberg_quotient(2);
  const auto rat = tpnsi::anisotropic_laplacian_rational(q, Rational(1, 2),
                                                         Rational(2));
  const auto dbl = tpnsi::anisotropic_laplacian(q, 0.5, 2.0);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(static_cast<double>(rat(i, j)) == dbl.matrix(i, j));
    }
  }
}

TEST_CASE("block decomposition matches the dense spectrum") {
  for (int n : {2, 3, 4, 5}) {
    const auto q = tpnsi::build_heisenberg_quotient(n);
    for (double mu : {0.5, 1.0, 2.0}) {
      for (double nu : {0.5, 1.0, 2.0}) {
        const auto dense =
            tpnsi::dense_eigenvalues(tpnsi::anisotropic_laplacian(q, mu, nu));
        const auto blocks = pooled_block_eigenvalues(q, mu, nu);
        REQUIRE(dense.size() == blocks.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < dense.size(); ++i) {
          worst = std::max(worst, std::abs(dense[i] - blocks[i]));
        }
        CHECK(worst < 1e-10);
      }
    }
  }
}

TEST_CASE("block shapes and counts") {
  const auto q = tpnsi::build_heisenberg_quotient(4);
  const auto blocks = tpnsi::harper_blocks(q);
  CHECK(blocks.size() == 16);
  for (const auto& b : blocks) {
    CHECK(b.rows() == 4);
    CHECK(b.cols() == 4);
    CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("scale-independent spectrum answers counting queries") {
  const auto q = tpnsi::build_heisenberg_quotient(5);
  const auto spectrum = tpnsi::harper_spectrum(q);
  CHECK(spectrum.block_eigenvalues.size() == 25);

  const auto op = tpnsi::anisotropic_laplacian(q, 0.8, 1.7);
  const auto dense = tpnsi::dense_eigenvalues(op);
  for (double lambda : {0.0, 0.3, 1.0, 2.5, 7.0, 100.0}) {
    const double tie = 1e-12 * (8.0 / (0.8 * 0.8) + 4.0 / (1.7 * 1.7));
    const long long want = std::count_if(
        dense.begin(), dense.end(),
        [&](double e) { return e <= lambda + tie; });
    CHECK(spectrum.count(0.8, 1.7, lambda) == want);
  }
}

TEST_CASE("counting function normalization and monotonicity") {
  const auto q = tpnsi::build_heisenberg_quotient(4);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0);
  const auto at_zero = tpnsi::counting_function(op, 0.0);
  CHECK(at_zero.count == 1);  // constants only
  CHECK(at_zero.normalized == 1.0 / 64.0);
  const auto everything = tpnsi::counting_function(op, 12.0);
  CHECK(everything.count == 64);
  CHECK(everything.normalized == 1.0);
  long long prev = -1;
  for (double lambda = 0.0; lambda <= 12.0; lambda += 0.5) {
    const auto r = tpnsi::counting_function(op, lambda);
    CHECK(r.count >= prev);
    prev = r.count;
  }
}

TEST_CASE("counting beyond the dense cap uses the block path") {
  const auto q = tpnsi::build_heisenberg_quotient(16);
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0);
  CHECK(!op.has_dense());
  const auto r = tpnsi::counting_function(op, 0.0);
  CHECK(r.count == 1);
  const auto all = tpnsi::counting_function(op, 13.0);
  CHECK(all.count == 16LL * 16 * 16);
}

TEST_CASE("resource caps raise dedicated errors") {
  tpnsi::NoiseSpec noise;
  noise.strength = 2.0;
  noise.seed = 7;
  const auto q_big = tpnsi::build_heisenberg_quotient(14);
  const auto op_big = tpnsi::anisotropic_laplacian(q_big, 1.0, 1.0, noise);
  CHECK_THROWS_AS(tpnsi::counting_function(op_big, 1.0),
                  tpnsi::resource_cap_error);

  const auto q_huge = tpnsi::build_heisenberg_quotient(70);
  const auto op_huge = tpnsi::anisotropic_laplacian(q_huge, 1.0, 1.0);
  CHECK_THROWS_AS(tpnsi::counting_function(op_huge, 1.0),
                  tpnsi::resource_cap_error);
  CHECK_THROWS_AS(tpnsi::dense_eigenvalues(op_huge), std::invalid_argument);
}

TEST_CASE("noise factors are deterministic, bounded, and seed-sensitive") {
  const auto q = tpnsi::build_heisenberg_quotient(4);
  tpnsi::NoiseSpec noise;
  noise.strength = 3.0;
  noise.seed = 42;
  const auto f1 = tpnsi::noise_factors(q, noise);
  const auto f2 = tpnsi::noise_factors(q, noise);
  CHECK(f1 == f2);
  CHECK(f1.size() == 3 * q.size());
  for (double f : f1) {
    CHECK(f >= 1.0 / 3.0 - 1e-15);
    CHECK(f <= 3.0 + 1e-15);
  }
  noise.seed = 43;
  CHECK(tpnsi::noise_factors(q, noise) != f1);

  tpnsi::NoiseSpec bad;
  bad.strength = 0.5;
  CHECK_THROWS_AS(tpnsi::noise_factors(q, bad), std::invalid_argument);
}

TEST_CASE("perturbed operators stay symmetric positive semidefinite") {
  const auto q = tpnsi::build_heisenberg_quotient(3);
  tpnsi::NoiseSpec noise;
  noise.strength = 4.0;
  noise.seed = 11;
  const auto op = tpnsi::anisotropic_laplacian(q, 1.0, 1.0, noise);
  const auto& m = op.matrix;
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const auto ev = tpnsi::dense_eigenvalues(op);
  CHECK(ev.front() > -1e-10);
  CHECK(std::abs(ev.front()) < 1e-10);  // row sums still vanish
}

TEST_CASE("factorization-based counting agrees with the eigensolve") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> lam(0.0, 9.0);
  for (int n : {2, 3, 4}) {
    const auto q = tpnsi::build_heisenberg_quotient(n);
    for (int noisy = 0; noisy < 2; ++noisy) {
      std::optional<tpnsi::NoiseSpec> noise;
      if (noisy) {
        tpnsi::NoiseSpec spec;
        spec.strength = 2.0;
        spec.seed = 100 + static_cast<std::uint64_t>(n);
        noise = spec;
      }
      const auto op = tpnsi::anisotropic_laplacian(q, 1.1, 0.9, noise);
      for (int trial = 0; trial < 8; ++trial) {
        const double lambda = lam(rng);
        const auto a = tpnsi::counting_function(op, lambda);
        const auto b = tpnsi::inertia_counting_function(op, lambda);
        CHECK(a.count == b.count);
      }
      // Exactly at an eigenvalue the tie rule keeps the two paths aligned.
      const auto ev = tpnsi::dense_eigenvalues(op);
      const double at_eig = ev[ev.size() / 2];
      CHECK(tpnsi::counting_function(op, at_eig).count ==
            tpnsi::inertia_counting_function(op, at_eig).count);
    }
  }
}

TEST_CASE("joint rescale invariance of the counting function") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> scale(0.4, 2.5);
  std::uniform_real_distribution<double> lam(0.3, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    CHECK(tpnsi::rescale_lemma_check(n, scale(rng), scale(rng), lam(rng)));
  }
}

TEST_CASE("noise sandwich between rescaled unperturbed counts") {
  for (double K : {1.5, 2.0, 4.0}) {
    for (int n : {2, 3, 4}) {
      const auto r = tpnsi::perturb_sandwich_check(
          n, K, 500 + static_cast<std::uint64_t>(10 * K), 1.0, 1.0, 3.0);
      CHECK(r.ok);
      CHECK(r.witness == doctest::Approx(std::sqrt(K)));
      CHECK(r.count_lower <= r.count_perturbed);
      CHECK(r.count_perturbed <= r.count_upper);
    }
  }
  CHECK_THROWS_AS(tpnsi::perturb_sandwich_check(4, 0.9, 1, 1.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("two-parameter grids are monotone and match the golden samples") {
  const auto mu = tpnsi::log_spaced(0.5, 2.0, 5);
  const auto grid = tpnsi::two_param_grid(4, mu, mu, 1.17);
  CHECK_NOTHROW(grid.validate());

  std::ifstream golden(std::string(TPNSI_TEST_DATA_DIR) +
                       "/lattice_n4_golden.csv");
  REQUIRE(golden.good());
  std::string line;
  std::getline(golden, line);
  CHECK(line == "mu,nu,normalized_count");
  int rows = 0;
  while (std::getline(golden, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double gm = 0.0, gn = 0.0, gv = 0.0;
    REQUIRE((is >> gm >> gn >> gv));
    const int i = rows / 5;
    const int j = rows % 5;
    CHECK(std::abs(mu[i] - gm) <= 1e-15 * gm);
    CHECK(grid.values(i, j) == gv);
    ++rows;
  }
  CHECK(rows == 25);
}

TEST_CASE("grid values computed densely and via blocks coincide") {
  const auto mu = tpnsi::log_spaced(0.5, 2.0, 4);
  // n = 4 runs through the dense path; the block path must agree exactly.
  const auto q = tpnsi::build_heisenberg_quotient(4);
  const auto spectrum = tpnsi::harper_spectrum(q);
  const auto grid = tpnsi::two_param_grid(4, mu, mu, 1.3);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double via_blocks =
          static_cast<double>(spectrum.count(mu[i], mu[j], 1.3)) / 64.0;
      CHECK(grid.values(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(j)) == via_blocks);
    }
  }
}

TEST_CASE("path slope estimation: windows, errors, and coarse behaviour") {
  CHECK_THROWS_AS(tpnsi::lattice_alpha_along_path({4}, 0.0),
                  tpnsi::window_error);
  CHECK_THROWS_AS(tpnsi::lattice_alpha_along_path({}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(tpnsi::lattice_alpha_along_path({12}, -1.5),
                  std::invalid_argument);

  const auto report = tpnsi::lattice_alpha_along_path({12, 16}, 0.0);
  CHECK(report.alpha_reference == 4.0);
  REQUIRE(report.slopes.size() == 2);
  CHECK(std::isfinite(report.slopes[0]));
  CHECK(std::isfinite(report.slopes[1]));
  CHECK(report.window_lo.size() == 2);
  CHECK(report.points_used[0] >= 4);
  CHECK(report.monotone_fraction >= 0.0);
  CHECK(report.monotone_fraction <= 1.0);
  // Finer quotients resolve more of the window.
  CHECK(report.window_lo[1] < report.window_lo[0]);
}
