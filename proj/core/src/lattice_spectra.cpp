#include "tpnsi/lattice_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "tpnsi/errors.hpp"
#include "tpnsi/parallel.hpp"

namespace tpnsi {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;

int mod_n(int value, int n) {
  int r = value % n;
  return r < 0 ? r + n : r;
}

/// Relative tie tolerance applied to every threshold comparison.
double tie_tolerance(double inf_norm) { return 1e-12 * inf_norm; }

double matrix_inf_norm(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Infinity norm of the unperturbed operator without materializing it.
double structural_inf_norm(double mu, double nu) {
  return 8.0 / (mu * mu) + 4.0 / (nu * nu);
}

/// Hopping block of the (k, p) momentum sector before metric weighting:
/// the contribution of the two base directions at unit scale.
Eigen::MatrixXd block_hopping(int n, int k, int p) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    a(x, x) = 4.0 - 2.0 * std::cos(kTwoPi * mod_n(k * x + p, n) / n);
    a(x, (x + 1) % n) += -1.0;
    a(x, (x - 1 + n) % n) += -1.0;
  }
  return a;
}

long long count_sorted_leq(const std::vector<double>& sorted, double bound) {
  return static_cast<long long>(
      std::upper_bound(sorted.begin(), sorted.end(), bound) - sorted.begin());
}

void require_positive_scale(double mu, double nu, const char* where) {
  if (!(mu > 0.0) || !std::isfinite(mu) || !(nu > 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument(std::string(where) +
                                ": scales mu, nu must be positive and finite");
  }
}

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue solve failed to converge");
  }
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + sym.rows());
  std::sort(out.begin(), out.end());
  return out;
}

CountingResult make_result(int n, double lambda, long long count,
                           bool retried = false) {
  CountingResult r;
  r.lambda = lambda;
  r.count = count;
  r.normalized = static_cast<double>(count) /
                 (static_cast<double>(n) * n * n);
  r.retried = retried;
  return r;
}

}  // namespace

std::size_t HeisenbergQuotient::size() const {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) *
         static_cast<std::size_t>(n);
}

std::size_t HeisenbergQuotient::index_of(int x, int y, int z) const {
  const int rx = mod_n(x, n);
  const int ry = mod_n(y, n);
  const int rz = mod_n(z, n);
  return (static_cast<std::size_t>(rx) * n + ry) * n + rz;
}

std::array<int, 3> HeisenbergQuotient::coords_of(std::size_t index) const {
  const int z = static_cast<int>(index % static_cast<std::size_t>(n));
  index /= static_cast<std::size_t>(n);
  const int y = static_cast<int>(index % static_cast<std::size_t>(n));
  const int x = static_cast<int>(index / static_cast<std::size_t>(n));
  return {x, y, z};
}

std::size_t HeisenbergQuotient::translated(std::size_t site, int generator,
                                           bool inverse) const {
  const auto [x, y, z] = coords_of(site);
  switch (generator) {
    case 0:
      return inverse ? index_of(x - 1, y, z) : index_of(x + 1, y, z);
    case 1:
      // (x, y, z)·(0, ±1, 0) = (x, y ± 1, z ± x).
      return inverse ? index_of(x, y - 1, z - x) : index_of(x, y + 1, z + x);
    case 2:
      return inverse ? index_of(x, y, z - 1) : index_of(x, y, z + 1);
    default:
      throw std::invalid_argument(
          "HeisenbergQuotient: generator must be 0, 1, or 2");
  }
}

void HeisenbergQuotient::validate() const {
  if (n < 2) {
    throw std::invalid_argument("HeisenbergQuotient: n must be >= 2");
  }
}

HeisenbergQuotient build_heisenberg_quotient(int n) {
  HeisenbergQuotient q{n};
  q.validate();
  return q;
}

void NoiseSpec::validate() const {
  if (!(strength >= 1.0) || !std::isfinite(strength)) {
    throw std::invalid_argument("NoiseSpec: strength K must be >= 1");
  }
}

std::vector<double> noise_factors(const HeisenbergQuotient& q,
                                  const NoiseSpec& noise) {
  q.validate();
  noise.validate();
  const double lo = 1.0 / noise.strength;
  const double hi = noise.strength;
  std::mt19937_64 rng(noise.seed);
  std::vector<double> factors(3 * q.size());
  for (double& f : factors) {
    const double u =
        static_cast<double>(rng() >> 11) * 1.1102230246251565404236316680908e-16;
    f = lo + (hi - lo) * u;
  }
  return factors;
}

void AnisotropicLaplacian::validate() const {
  if (n < 2) {
    throw std::invalid_argument("AnisotropicLaplacian: n must be >= 2");
  }
  require_positive_scale(mu, nu, "AnisotropicLaplacian");
  if (noise) noise->validate();
  if (matrix.size() > 0) {
    const auto m = static_cast<Eigen::Index>(static_cast<std::size_t>(n) * n * n);
    if (matrix.rows() != m || matrix.cols() != m) {
      throw std::invalid_argument(
          "AnisotropicLaplacian: matrix shape does not match n^3");
    }
  }
}

AnisotropicLaplacian anisotropic_laplacian(
    const HeisenbergQuotient& q, double mu, double nu,
    const std::optional<NoiseSpec>& noise) {
  q.validate();
  require_positive_scale(mu, nu, "anisotropic_laplacian");
  AnisotropicLaplacian op;
  op.n = q.n;
  op.mu = mu;
  op.nu = nu;
  op.noise = noise;
  if (q.n > kDenseSolveCap) return op;

  const std::size_t m = q.size();
  std::vector<double> factors;
  if (noise) factors = noise_factors(q, *noise);
  const double imu2 = 1.0 / (mu * mu);
  const double inu2 = 1.0 / (nu * nu);
  const double base_weight[3] = {imu2, imu2, inu2};

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
  for (std::size_t site = 0; site < m; ++site) {
    for (int gen = 0; gen < 3; ++gen) {
      const std::size_t other = q.translated(site, gen);
      double w = base_weight[gen];
      if (!factors.empty()) w *= factors[3 * site + static_cast<std::size_t>(gen)];
      const auto a = static_cast<Eigen::Index>(site);
      const auto b = static_cast<Eigen::Index>(other);
      mat(a, a) += w;
      mat(b, b) += w;
      mat(a, b) -= w;
      mat(b, a) -= w;
    }
  }
  op.matrix = std::move(mat);
  return op;
}

RationalMatrix anisotropic_laplacian_rational(const HeisenbergQuotient& q,
                                              const Rational& mu,
                                              const Rational& nu) {
  q.validate();
  if (mu <= 0 || nu <= 0) {
    throw std::invalid_argument(
        "anisotropic_laplacian_rational: scales must be positive");
  }
  const std::size_t m = q.size();
  const Rational imu2 = Rational(1) / (mu * mu);
  const Rational inu2 = Rational(1) / (nu * nu);
  const Rational base_weight[3] = {imu2, imu2, inu2};
  RationalMatrix mat(m, m);
  for (std::size_t site = 0; site < m; ++site) {
    for (int gen = 0; gen < 3; ++gen) {
      const std::size_t other = q.translated(site, gen);
      const Rational& w = base_weight[gen];
      mat(site, site) += w;
      mat(other, other) += w;
      mat(site, other) -= w;
      mat(other, site) -= w;
    }
  }
  return mat;
}

std::vector<Eigen::MatrixXd> harper_blocks(const HeisenbergQuotient& q,
                                           double mu, double nu) {
  q.validate();
  require_positive_scale(mu, nu, "harper_blocks");
  const int n = q.n;
  const double imu2 = 1.0 / (mu * mu);
  const double inu2 = 1.0 / (nu * nu);
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double bk = 2.0 - 2.0 * std::cos(kTwoPi * k / n);
    for (int p = 0; p < n; ++p) {
      Eigen::MatrixXd h = imu2 * block_hopping(n, k, p);
      h.diagonal().array() += inu2 * bk;
      blocks[static_cast<std::size_t>(k) * n + p] = std::move(h);
    }
  }
  return blocks;
}

HarperSpectrum harper_spectrum(const HeisenbergQuotient& q) {
  q.validate();
  const int n = q.n;
  HarperSpectrum hs;
  hs.n = n;
  hs.block_eigenvalues.resize(static_cast<std::size_t>(n) * n);
  hs.centre_weight.resize(static_cast<std::size_t>(n) * n);
  parallel_for(hs.block_eigenvalues.size(), [&](std::size_t idx) {
    const int k = static_cast<int>(idx) / n;
    const int p = static_cast<int>(idx) % n;
    hs.block_eigenvalues[idx] = sorted_eigenvalues(block_hopping(n, k, p));
    hs.centre_weight[idx] = 2.0 - 2.0 * std::cos(kTwoPi * k / n);
  });
  return hs;
}

long long HarperSpectrum::count(double mu, double nu, double lambda) const {
  require_positive_scale(mu, nu, "HarperSpectrum::count");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        "HarperSpectrum::count: lambda must be finite and >= 0");
  }
  const double imu2 = 1.0 / (mu * mu);
  const double inu2 = 1.0 / (nu * nu);
  const double bound = lambda + tie_tolerance(structural_inf_norm(mu, nu));
  long long total = 0;
  for (std::size_t idx = 0; idx < block_eigenvalues.size(); ++idx) {
    // Block eigenvalues are imu2·a + inu2·b_k; invert for the hopping bound.
    const double hop_bound = (bound - inu2 * centre_weight[idx]) / imu2;
    total += count_sorted_leq(block_eigenvalues[idx], hop_bound);
  }
  return total;
}

std::vector<double> dense_eigenvalues(const AnisotropicLaplacian& op) {
  op.validate();
  if (!op.has_dense()) {
    throw std::invalid_argument(
        "dense_eigenvalues: operator has no materialized matrix");
  }
  return sorted_eigenvalues(op.matrix);
}

CountingResult counting_function(const AnisotropicLaplacian& op,
                                 double lambda) {
  op.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        "counting_function: lambda must be finite and >= 0");
  }
  if (op.has_dense()) {
    const std::vector<double> evs = sorted_eigenvalues(op.matrix);
    const double bound = lambda + tie_tolerance(matrix_inf_norm(op.matrix));
    return make_result(op.n, lambda, count_sorted_leq(evs, bound));
  }
  if (op.noise) {
    throw resource_cap_error(
        "counting_function: perturbed operators are only supported up to the "
        "dense-solve cap n = " +
        std::to_string(kDenseSolveCap));
  }
  if (op.n > kHarperCap) {
    throw resource_cap_error(
        "counting_function: side length exceeds the block-path cap n = " +
        std::to_string(kHarperCap));
  }
  const HarperSpectrum hs = harper_spectrum(build_heisenberg_quotient(op.n));
  return make_result(op.n, lambda, hs.count(op.mu, op.nu, lambda));
}

CountingResult inertia_counting_function(const AnisotropicLaplacian& op,
                                         double lambda) {
  op.validate();
  if (!op.has_dense()) {
    throw std::invalid_argument(
        "inertia_counting_function: dense matrix required");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(
        "inertia_counting_function: lambda must be finite and >= 0");
  }
  const double tie = tie_tolerance(matrix_inf_norm(op.matrix));
  const int m = static_cast<int>(op.matrix.rows());

  // Counts eigenvalues below the shift via the inertia of the LDLᵀ
  // factorization; returns -1 on a zero pivot (shift hit the spectrum).
  auto attempt = [&](double shift) -> long long {
    Eigen::MatrixXd a = op.matrix;
    a.diagonal().array() -= shift;
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(m));
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', m, a.data(),
                                           m, ipiv.data());
    if (info < 0) {
      throw std::logic_error(
          "inertia_counting_function: invalid argument passed to dsytrf");
    }
    if (info > 0) return -1;
    long long negatives = 0;
    int i = 0;
    while (i < m) {
      if (ipiv[static_cast<std::size_t>(i)] > 0) {
        const double d = a(i, i);
        if (d == 0.0) return -1;
        if (d < 0.0) ++negatives;
        ++i;
      } else {
        const double p = a(i, i);
        const double r = a(i + 1, i);
        const double s = a(i + 1, i + 1);
        const double det = p * s - r * r;
        if (det == 0.0) return -1;
        if (det < 0.0) {
          negatives += 1;
        } else if (p + s < 0.0) {
          negatives += 2;
        }
        i += 2;
      }
    }
    return negatives;
  };

  long long count = attempt(lambda + tie);
  bool retried = false;
  if (count < 0) {
    retried = true;
    count = attempt(lambda + 2.0 * tie);
  }
  if (count < 0) {
    throw std::runtime_error(
        "inertia_counting_function: factorization breakdown persisted after "
        "the tie-tolerance retry");
  }
  return make_result(op.n, lambda, count, retried);
}

TwoParamFunction two_param_grid(int n, const std::vector<double>& mu_grid,
                                const std::vector<double>& nu_grid,
                                double lambda0) {
  const HeisenbergQuotient q = build_heisenberg_quotient(n);
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument(
        "two_param_grid: lambda0 must be finite and >= 0");
  }
  TwoParamFunction out;
  out.mu_grid = mu_grid;
  out.nu_grid = nu_grid;
  out.values.resize(static_cast<Eigen::Index>(mu_grid.size()),
                    static_cast<Eigen::Index>(nu_grid.size()));

  if (n <= kDenseSolveCap) {
    const std::size_t total = mu_grid.size() * nu_grid.size();
    parallel_for(total, [&](std::size_t flat) {
      const std::size_t i = flat / nu_grid.size();
      const std::size_t j = flat % nu_grid.size();
      const AnisotropicLaplacian op =
          anisotropic_laplacian(q, mu_grid[i], nu_grid[j]);
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          counting_function(op, lambda0).normalized;
    });
  } else if (n <= kHarperCap) {
    const HarperSpectrum hs = harper_spectrum(q);
    const double volume = static_cast<double>(n) * n * n;
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      for (std::size_t j = 0; j < nu_grid.size(); ++j) {
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            static_cast<double>(hs.count(mu_grid[i], nu_grid[j], lambda0)) /
            volume;
      }
    }
  } else {
    throw resource_cap_error(
        "two_param_grid: side length exceeds the block-path cap n = " +
        std::to_string(kHarperCap));
  }
  out.validate();
  return out;
}

bool rescale_lemma_check(int n, double mu, double nu, double lambda0) {
  require_positive_scale(mu, nu, "rescale_lemma_check");
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument(
        "rescale_lemma_check: lambda0 must be finite and positive");
  }
  const HeisenbergQuotient q = build_heisenberg_quotient(n);
  const double root = std::sqrt(lambda0);
  const CountingResult left =
      counting_function(anisotropic_laplacian(q, mu, nu), lambda0);
  const CountingResult right =
      counting_function(anisotropic_laplacian(q, root * mu, root * nu), 1.0);
  return left.count == right.count;
}

SandwichResult perturb_sandwich_check(int n, double K, std::uint64_t seed,
                                      double mu, double nu, double lambda0) {
  if (!(K >= 1.0) || !std::isfinite(K)) {
    throw std::invalid_argument("perturb_sandwich_check: K must be >= 1");
  }
  require_positive_scale(mu, nu, "perturb_sandwich_check");
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument(
        "perturb_sandwich_check: lambda0 must be finite and >= 0");
  }
  const HeisenbergQuotient q = build_heisenberg_quotient(n);
  const double root = std::sqrt(K);
  const NoiseSpec noise{K, seed};

  SandwichResult result;
  result.witness = root;
  result.count_lower =
      counting_function(anisotropic_laplacian(q, mu / root, nu / root), lambda0)
          .count;
  result.count_perturbed =
      counting_function(anisotropic_laplacian(q, mu, nu, noise), lambda0).count;
  result.count_upper =
      counting_function(anisotropic_laplacian(q, mu * root, nu * root), lambda0)
          .count;
  result.ok = result.count_lower <= result.count_perturbed &&
              result.count_perturbed <= result.count_upper;
  return result;
}

PathSlopeReport lattice_alpha_along_path(const std::vector<int>& n_list,
                                         double zeta,
                                         const std::vector<double>& lambda_grid) {
  if (n_list.empty()) {
    throw std::invalid_argument("lattice_alpha_along_path: empty n_list");
  }
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2 || n_list[i] > kHarperCap) {
      throw std::invalid_argument(
          "lattice_alpha_along_path: each n must lie in [2, " +
          std::to_string(kHarperCap) + "]");
    }
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument(
          "lattice_alpha_along_path: n_list must be strictly increasing");
    }
  }
  if (!std::isfinite(zeta) || zeta <= -1.0) {
    throw std::invalid_argument(
        "lattice_alpha_along_path: zeta must be finite and > -1");
  }
  for (double l : lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument(
          "lattice_alpha_along_path: lambda grid entries must be positive");
    }
  }

  PathSlopeReport report;
  report.zeta = zeta;
  report.alpha_reference = 4.0 + 2.0 * zeta;

  std::vector<HarperSpectrum> spectra;
  spectra.reserve(n_list.size());
  for (int n : n_list) {
    spectra.push_back(harper_spectrum(build_heisenberg_quotient(n)));
  }

  std::vector<std::vector<double>> all_lambdas(n_list.size());
  std::vector<std::vector<double>> all_values(n_list.size());

  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const int n = n_list[idx];
    const double gap_scale = kPathWindowC1 / n;
    double lo = gap_scale;
    if (zeta != 0.0 && gap_scale < 1.0) {
      lo = std::max(lo, std::pow(gap_scale, 1.0 / (1.0 + zeta)));
    }
    const double hi = kPathWindowC2;

    std::vector<double> lambdas;
    if (lambda_grid.empty()) {
      if (lo < hi) lambdas = log_spaced(lo, hi, 33);
    } else {
      for (double l : lambda_grid) {
        if (l >= lo && l <= hi) lambdas.push_back(l);
      }
      std::sort(lambdas.begin(), lambdas.end());
    }
    if (lambdas.size() < 4) {
      throw window_error(
          "lattice_alpha_along_path: fewer than 4 resolvable points in the "
          "window [" +
          std::to_string(lo) + ", " + std::to_string(hi) + "] for n = " +
          std::to_string(n) + "; increase n");
    }

    const double volume = static_cast<double>(n) * n * n;
    const double floor = 1.0 / volume;
    std::vector<double> xs, ys, values;
    values.reserve(lambdas.size());
    for (double l : lambdas) {
      const double g =
          static_cast<double>(
              spectra[idx].count(l, std::pow(l, 1.0 + zeta), 1.0)) /
          volume;
      values.push_back(g);
      if (g - floor > 0.0) {
        xs.push_back(std::log(l));
        ys.push_back(std::log(g - floor));
      }
    }
    if (xs.size() < 4) {
      throw window_error(
          "lattice_alpha_along_path: fewer than 4 points above the "
          "constant-mode floor for n = " +
          std::to_string(n) + "; increase n");
    }

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mean_x += xs[i];
      mean_y += ys[i];
    }
    mean_x /= static_cast<double>(xs.size());
    mean_y /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
      sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    const double slope = sxy / sxx;

    report.n_values.push_back(n);
    report.slopes.push_back(slope);
    report.deviations.push_back(slope - report.alpha_reference);
    report.window_lo.push_back(lo);
    report.window_hi.push_back(hi);
    report.points_used.push_back(xs.size());
    all_lambdas[idx] = std::move(lambdas);
    all_values[idx] = std::move(values);
  }

  if (report.slopes.size() >= 2) {
    report.deviation_shrinks =
        std::abs(report.deviations.back()) < std::abs(report.deviations.front());
    const double na = report.n_values[report.n_values.size() - 2];
    const double nb = report.n_values.back();
    const double aa = report.slopes[report.slopes.size() - 2];
    const double ab = report.slopes.back();
    report.extrapolated_alpha =
        ab + (ab - aa) * (1.0 / nb) / (1.0 / na - 1.0 / nb);

    std::size_t comparisons = 0, monotone = 0;
    for (std::size_t idx = 0; idx + 1 < n_list.size(); ++idx) {
      const double fine_volume = static_cast<double>(n_list[idx + 1]) *
                                 n_list[idx + 1] * n_list[idx + 1];
      for (std::size_t j = 0; j < all_lambdas[idx].size(); ++j) {
        const double l = all_lambdas[idx][j];
        const double coarse = all_values[idx][j];
        const double fine =
            static_cast<double>(spectra[idx + 1].count(
                l, std::pow(l, 1.0 + zeta), 1.0)) /
            fine_volume;
        ++comparisons;
        if (fine >= coarse - 1e-15) ++monotone;
      }
    }
    report.monotone_fraction =
        comparisons == 0
            ? 1.0
            : static_cast<double>(monotone) / static_cast<double>(comparisons);
  } else {
    report.extrapolated_alpha = report.slopes.front();
    report.monotone_fraction = 1.0;
  }
  return report;
}

}  // namespace tpnsi
