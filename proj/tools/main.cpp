#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tpnsi/bigraded_complex.hpp"
#include "tpnsi/errors.hpp"
#include "tpnsi/heat_kernel_h3.hpp"
#include "tpnsi/lattice_spectra.hpp"
#include "tpnsi/ns_profile.hpp"
#include "tpnsi/spectral_asymptotics.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitDomainError = 2;
constexpr int kExitEmptyResult = 3;
constexpr int kExitResourceCap = 4;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_alpha(const tpnsi::AlphaValue& a) {
  return a.is_infinite() ? "inf" : fmt17(a.value());
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Reads a flat `key = value` config file and renders it as flag tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read config file: " + path);
  }
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config file " + path + " line " +
                               std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    const std::string key = trim_copy(line.substr(0, eq));
    const std::string value = trim_copy(line.substr(eq + 1));
    if (key.empty() ||
        key.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-") !=
            std::string::npos) {
      throw std::runtime_error("config file " + path + " line " +
                               std::to_string(line_no) + ": bad key '" + key +
                               "'");
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

/// Splices config-derived tokens right after the subcommand name so that
/// explicit command-line flags, parsed later, win.
std::vector<std::string> rewrite_args(const std::vector<std::string>& args) {
  static const std::vector<std::string> kSubcommands = {
      "heat-trace", "alpha", "lattice", "product", "verify"};
  std::size_t sub_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), args[i]) !=
        kSubcommands.end()) {
      sub_pos = i;
      break;
    }
  }
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty() || sub_pos == args.size()) return args;

  std::vector<std::string> out(args.begin(),
                               args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
  for (auto& t : config_tokens(config_path)) out.push_back(std::move(t));
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1,
             args.end());
  return out;
}

// ---------------------------------------------------------------------------
// heat-trace

int run_heat_trace(int degree, double zeta, double t_min, double t_max,
                   std::size_t points, const std::string& out_path) {
  if (points == 0) {
    throw std::invalid_argument("heat-trace: --points must be >= 1");
  }
  std::vector<double> grid;
  if (points == 1) {
    if (!(t_min > 0.0) || !std::isfinite(t_min)) {
      throw std::invalid_argument("heat-trace: --t-min must be positive");
    }
    grid.push_back(t_min);
  } else {
    grid = tpnsi::log_spaced(t_min, t_max, points);
  }
  const std::vector<tpnsi::HeatTraceSample> samples =
      tpnsi::heat_trace_curve(degree, zeta, grid);
  std::string csv = "t,c,theta,abs_err\n";
  for (const auto& s : samples) {
    csv += fmt17(s.point.t) + "," + fmt17(s.point.c) + "," + fmt17(s.theta) +
           "," + fmt17(s.est_abs_error) + "\n";
  }
  write_output(out_path, csv);
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// alpha

int run_alpha(int degree, const std::vector<double>& zetas,
              const std::string& out_path) {
  if (degree < 0 || degree > 2) {
    throw std::invalid_argument("alpha: --degree must be 0, 1, or 2");
  }
  if (zetas.empty()) {
    std::cerr << "alpha: empty zeta grid\n";
    return kExitEmptyResult;
  }
  std::string csv = "zeta,alpha_hat,alpha_formula,abs_dev\n";
  std::size_t rows = 0;
  for (double zeta : zetas) {
    const bool in_range = (degree == 1) ? (zeta > -0.5 && zeta < 1.0)
                                        : (zeta >= -0.5);
    if (!std::isfinite(zeta) || !in_range) {
      std::cerr << "alpha: skipping zeta = " << zeta << " (degree " << degree
                << " requires "
                << (degree == 1 ? "-0.5 < zeta < 1" : "zeta >= -0.5") << ")\n";
      continue;
    }
    tpnsi::ScalingPath path;
    path.r = 1.0;
    path.s = 1.0 + zeta;
    const double alpha_hat = tpnsi::two_param_alpha(degree, path);
    const double formula =
        (degree == 1) ? 2.0 - 2.0 * zeta : 4.0 + 2.0 * zeta;
    csv += fmt17(zeta) + "," + fmt17(alpha_hat) + "," + fmt17(formula) + "," +
           fmt17(std::abs(alpha_hat - formula)) + "\n";
    ++rows;
  }
  if (rows == 0) {
    std::cerr << "alpha: all zeta values were out of range\n";
    return kExitEmptyResult;
  }
  write_output(out_path, csv);
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// lattice

int run_lattice(int n, double mu_min, double mu_max, std::size_t mu_points,
                double nu_min, double nu_max, std::size_t nu_points,
                double lambda0, const std::optional<double>& path_zeta,
                const std::vector<int>& n_list,
                const std::vector<double>& lambda_grid, bool want_grid,
                const std::string& out_path) {
  std::string out;
  if (want_grid) {
    const std::vector<double> mu_grid =
        tpnsi::log_spaced(mu_min, mu_max, mu_points);
    const std::vector<double> nu_grid =
        tpnsi::log_spaced(nu_min, nu_max, nu_points);
    const tpnsi::TwoParamFunction grid =
        tpnsi::two_param_grid(n, mu_grid, nu_grid, lambda0);
    out += "mu,nu,normalized_count\n";
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      for (std::size_t j = 0; j < nu_grid.size(); ++j) {
        out += fmt17(mu_grid[i]) + "," + fmt17(nu_grid[j]) + "," +
               fmt17(grid.values(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j))) +
               "\n";
      }
    }
  }
  if (path_zeta) {
    if (!out.empty()) out += "\n";
    const tpnsi::PathSlopeReport report =
        tpnsi::lattice_alpha_along_path(n_list, *path_zeta, lambda_grid);
    out += "n,slope,deviation,window_lo,window_hi,points_used\n";
    for (std::size_t i = 0; i < report.n_values.size(); ++i) {
      out += std::to_string(report.n_values[i]) + "," +
             fmt17(report.slopes[i]) + "," + fmt17(report.deviations[i]) +
             "," + fmt17(report.window_lo[i]) + "," +
             fmt17(report.window_hi[i]) + "," +
             std::to_string(report.points_used[i]) + "\n";
    }
    out += "zeta,alpha_reference,extrapolated_alpha,deviation_shrinks,"
           "monotone_fraction\n";
    out += fmt17(report.zeta) + "," + fmt17(report.alpha_reference) + "," +
           fmt17(report.extrapolated_alpha) + "," +
           (report.deviation_shrinks ? "1" : "0") + "," +
           fmt17(report.monotone_fraction) + "\n";
  }
  if (out.empty()) {
    std::cerr << "lattice: nothing requested (no grid, no --path-zeta)\n";
    return kExitEmptyResult;
  }
  write_output(out_path, out);
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// product

int run_product(const std::string& fibre_path, const std::string& base_path,
                double r, double s, const std::optional<int>& only_k,
                const std::string& out_path) {
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot read profile file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return tpnsi::parse_ns_profile(buf.str());
  };
  const tpnsi::NSProfile fibre = load(fibre_path);
  const tpnsi::NSProfile base = load(base_path);
  tpnsi::ScalingPath path;
  path.r = r;
  path.s = s;
  path.validate();

  const int top = fibre.top_degree + base.top_degree;
  std::vector<int> degrees;
  if (only_k) {
    if (*only_k < 0 || *only_k >= top) {
      throw std::invalid_argument(
          "product: --k must lie in [0, " + std::to_string(top - 1) + "]");
    }
    degrees.push_back(*only_k);
  } else {
    for (int k = 0; k < top; ++k) degrees.push_back(k);
  }
  if (degrees.empty()) {
    std::cerr << "product: no degrees to evaluate\n";
    return kExitEmptyResult;
  }
  std::string csv = "k,alpha\n";
  for (int k : degrees) {
    csv += std::to_string(k) + "," +
           fmt_alpha(tpnsi::product_alpha(k, fibre, base, path)) + "\n";
  }
  write_output(out_path, csv);
  return kExitSuccess;
}

// ---------------------------------------------------------------------------
// verify

struct CheckRow {
  std::string suite;
  std::string check;
  bool pass = false;
  std::string detail;
};

void verify_identities_suite(std::vector<CheckRow>& rows) {
  const std::vector<std::pair<std::string, tpnsi::LieAlgebraPresentation>>
      algebras = {{"r2", tpnsi::abelian_presentation(2)},
                  {"r3", tpnsi::abelian_presentation(3)},
                  {"r4", tpnsi::abelian_presentation(4)},
                  {"h3", tpnsi::h3_presentation()},
                  {"h5", tpnsi::h5_presentation()},
                  {"solvable", tpnsi::solvable3_presentation()}};
  for (const auto& [name, lie] : algebras) {
    try {
      const tpnsi::CEComplex complex = tpnsi::build_ce_complex(lie);
      const tpnsi::DifferentialSplit split = tpnsi::split_differential(complex);
      const tpnsi::IdentityResiduals res = tpnsi::verify_identities(split);
      for (std::size_t i = 0; i < res.composites.size(); ++i) {
        bool zero = true;
        for (const auto& m : res.composites[i]) zero = zero && m.is_zero();
        rows.push_back({"identities", name + "/identity" + std::to_string(i + 1),
                        zero, zero ? "exact zero" : "nonzero residual"});
      }
    } catch (const std::exception& e) {
      rows.push_back({"identities", name, false, e.what()});
    }
  }
}

void verify_bounds_suite(std::vector<CheckRow>& rows) {
  const tpnsi::QuadratureSpec quad;
  const double K = tpnsi::constant_series_K(quad);
  const std::vector<double> zetas = {-0.4, 0.0, 0.5};
  const double slack = 1e-9;
  auto within = [&](double v, const tpnsi::IntegralBounds& b) {
    return v >= b.lower - slack * std::abs(b.lower) &&
           v <= b.upper + slack * std::abs(b.upper);
  };
  for (double zeta : zetas) {
    bool ok_minus = true, ok_plus = true, ok_i5 = true;
    std::string first_fail;
    for (int e = 2; e <= 7; ++e) {
      const double t = std::pow(10.0, e);
      const auto point = tpnsi::ScaledMetricPoint::on_path(t, zeta);
      const double i1m = tpnsi::eval_I1(point, tpnsi::SeriesSign::minus, quad);
      const double i1p = tpnsi::eval_I1(point, tpnsi::SeriesSign::plus, quad);
      if (!within(i1m, tpnsi::bounds_I1minus(point))) {
        ok_minus = false;
        if (first_fail.empty()) first_fail = "I1minus at t=1e" + std::to_string(e);
      }
      if (!within(i1p, tpnsi::bounds_I4(point))) {
        ok_plus = false;
        if (first_fail.empty()) first_fail = "I4 at t=1e" + std::to_string(e);
      }
      if (!within(0.0, tpnsi::bounds_I5(point, K))) {
        ok_i5 = false;
        if (first_fail.empty()) first_fail = "I5 at t=1e" + std::to_string(e);
      }
    }
    char ztag[32];
    std::snprintf(ztag, sizeof(ztag), "zeta=%g", zeta);
    const std::string tag = ztag;
    rows.push_back({"bounds", "I1minus/" + tag, ok_minus,
                    ok_minus ? "t in {1e2..1e7}" : first_fail});
    rows.push_back({"bounds", "I4/" + tag, ok_plus,
                    ok_plus ? "t in {1e2..1e7}" : first_fail});
    rows.push_back({"bounds", "I5/" + tag, ok_i5,
                    ok_i5 ? "t in {1e2..1e7}" : first_fail});
  }
}

tpnsi::Rational random_rational(std::mt19937& rng, bool positive) {
  std::uniform_int_distribution<int> num_dist(positive ? 1 : -9, 9);
  std::uniform_int_distribution<int> den_dist(1, 9);
  int num = num_dist(rng);
  if (positive && num < 1) num = 1;
  return tpnsi::Rational(num, den_dist(rng));
}

void verify_invariance_suite(std::vector<CheckRow>& rows) {
  std::mt19937 rng(20240822u);

  // Gram-norm and up-Laplacian scaling on the degree-graded complex.
  {
    const tpnsi::CEComplex complex =
        tpnsi::build_ce_complex(tpnsi::h3_presentation());
    bool norm_ok = true, lap_ok = true;
    for (int trial = 0; trial < 25 && (norm_ok || lap_ok); ++trial) {
      const tpnsi::Rational mu = random_rational(rng, true);
      const tpnsi::Rational nu = random_rational(rng, true);
      const tpnsi::Rational lam = random_rational(rng, true);
      const auto gram = tpnsi::scaled_gram(complex.basis, mu, nu);
      const auto gram_scaled =
          tpnsi::scaled_gram(complex.basis, lam * mu, lam * nu);
      std::uniform_int_distribution<int> deg_dist(0, complex.lie.dim);
      const int k = deg_dist(rng);
      const std::size_t nk =
          complex.basis.by_degree[static_cast<std::size_t>(k)].size();
      std::vector<tpnsi::Rational> coeffs(nk);
      for (auto& c : coeffs) c = random_rational(rng, false);
      tpnsi::Rational factor = 1;
      for (int i = 0; i < 2 * k; ++i) factor /= lam;
      if (tpnsi::norm_of(coeffs, k, gram_scaled) !=
          factor * tpnsi::norm_of(coeffs, k, gram)) {
        norm_ok = false;
      }
      const auto lap = tpnsi::up_laplacian(complex, k, gram);
      const auto lap_scaled = tpnsi::up_laplacian(complex, k, gram_scaled);
      if (lap_scaled != lap.scaled(tpnsi::Rational(1) / (lam * lam))) {
        lap_ok = false;
      }
    }
    rows.push_back({"invariance", "gram-norm-scaling", norm_ok, "25 trials"});
    rows.push_back(
        {"invariance", "up-laplacian-scaling", lap_ok, "25 trials"});
  }

  // Exact operator scaling on the lattice side.
  {
    bool ok = true;
    for (int trial = 0; trial < 10 && ok; ++trial) {
      const int n = 2 + trial % 2;
      const auto q = tpnsi::build_heisenberg_quotient(n);
      const tpnsi::Rational mu = random_rational(rng, true);
      const tpnsi::Rational nu = random_rational(rng, true);
      const tpnsi::Rational lam = random_rational(rng, true);
      const auto base = tpnsi::anisotropic_laplacian_rational(q, mu, nu);
      const auto scaled =
          tpnsi::anisotropic_laplacian_rational(q, lam * mu, lam * nu);
      ok = scaled == base.scaled(tpnsi::Rational(1) / (lam * lam));
    }
    rows.push_back({"invariance", "lattice-operator-scaling", ok, "10 trials"});
  }

  // Right-endpoint rescaling of the counting function.
  {
    std::uniform_real_distribution<double> scale_dist(0.4, 2.5);
    std::uniform_real_distribution<double> lam_dist(0.3, 5.0);
    bool ok = true;
    std::string detail = "20 trials";
    for (int trial = 0; trial < 20 && ok; ++trial) {
      const int n = 2 + trial % 3;
      const double mu = scale_dist(rng);
      const double nu = scale_dist(rng);
      const double l0 = lam_dist(rng);
      if (!tpnsi::rescale_lemma_check(n, mu, nu, l0)) {
        ok = false;
        detail = "failed at n=" + std::to_string(n) + " mu=" + fmt17(mu) +
                 " nu=" + fmt17(nu) + " lambda0=" + fmt17(l0);
      }
    }
    rows.push_back({"invariance", "rescale-lemma", ok, detail});
  }

  // Perturbation sandwich.
  {
    const double ks[3] = {1.5, 2.0, 4.0};
    bool ok = true;
    std::string detail = "9 trials";
    for (int trial = 0; trial < 9 && ok; ++trial) {
      const int n = 2 + trial % 3;
      const double K = ks[trial / 3];
      const auto res = tpnsi::perturb_sandwich_check(
          n, K, 1000u + static_cast<std::uint64_t>(trial), 1.0, 1.0, 3.0);
      if (!res.ok) {
        ok = false;
        detail = "failed at n=" + std::to_string(n) + " K=" + fmt17(K);
      }
    }
    rows.push_back({"invariance", "perturb-sandwich", ok, detail});
  }
}

/// Independent enumeration of the product exponent over the full index set
/// {(a, b): a + b = k} ∪ {(a, b): a + b = k + 1, a >= 1}.
tpnsi::AlphaValue brute_product_alpha(int k, const tpnsi::NSProfile& fibre,
                                      const tpnsi::NSProfile& base,
                                      const tpnsi::ScalingPath& path) {
  tpnsi::AlphaValue best = tpnsi::AlphaValue::infinity();
  for (int a = 0; a <= k; ++a) {
    best = tpnsi::min_alpha(
        best, tpnsi::scale_alpha(path.s, fibre.alpha_at(a)) +
                  tpnsi::scale_alpha(path.r, base.alpha_at(k - a)));
  }
  for (int a = 1; a <= k + 1; ++a) {
    best = tpnsi::min_alpha(
        best, tpnsi::scale_alpha(path.s, fibre.alpha_at(a)) +
                  tpnsi::scale_alpha(path.r, base.alpha_at(k + 1 - a)));
  }
  return best;
}

tpnsi::NSProfile random_profile(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim_dist(1, 4);
  std::uniform_real_distribution<double> alpha_dist(0.5, 8.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  tpnsi::NSProfile p;
  p.top_degree = dim_dist(rng);
  for (int k = 0; k < p.top_degree; ++k) {
    if (coin(rng) < 0.15) {
      p.alpha.emplace(k, tpnsi::AlphaValue::infinity());
    } else {
      p.alpha.emplace(k, tpnsi::AlphaValue(alpha_dist(rng)));
    }
  }
  return p;
}

void verify_product_suite(std::vector<CheckRow>& rows) {
  std::mt19937 rng(77u);
  std::uniform_real_distribution<double> path_dist(0.5, 2.0);
  bool ok = true;
  std::string detail = "100 trials";
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const tpnsi::NSProfile fibre = random_profile(rng);
    const tpnsi::NSProfile base = random_profile(rng);
    tpnsi::ScalingPath path;
    path.r = path_dist(rng);
    path.s = path_dist(rng);
    std::uniform_int_distribution<int> k_dist(
        0, fibre.top_degree + base.top_degree - 1);
    const int k = k_dist(rng);
    const auto got = tpnsi::product_alpha(k, fibre, base, path);
    const auto want = brute_product_alpha(k, fibre, base, path);
    if (got != want) {
      ok = false;
      detail = "mismatch at trial " + std::to_string(trial) + " k=" +
               std::to_string(k) + " got=" + fmt_alpha(got) + " want=" +
               fmt_alpha(want);
    }
  }
  rows.push_back({"product", "brute-force-agreement", ok, detail});

  // The line-times-plane instance: exponent 3 at degree 0.
  {
    tpnsi::NSProfile line;
    line.top_degree = 1;
    line.alpha.emplace(0, tpnsi::AlphaValue(1.0));
    tpnsi::NSProfile plane;
    plane.top_degree = 2;
    plane.alpha.emplace(0, tpnsi::AlphaValue(2.0));
    plane.alpha.emplace(1, tpnsi::AlphaValue(2.0));
    tpnsi::ScalingPath unit;
    const auto got = tpnsi::product_alpha(0, line, plane, unit);
    const bool pass = !got.is_infinite() && got.value() == 3.0;
    rows.push_back({"product", "line-times-plane-degree0", pass,
                    "alpha=" + fmt_alpha(got)});
  }

  // Weighted growth degree.
  {
    const long long got = tpnsi::growth_degree({{1, 2}, {2, 1}});
    rows.push_back({"product", "growth-degree", got == 4,
                    "value=" + std::to_string(got)});
  }
}

int run_verify(const std::string& suite, const std::string& out_path) {
  static const std::vector<std::string> kSuites = {"identities", "bounds",
                                                   "invariance", "product"};
  if (suite != "all" &&
      std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end()) {
    throw std::invalid_argument(
        "verify: --suite must be one of identities, bounds, invariance, "
        "product, all");
  }
  std::vector<CheckRow> rows;
  if (suite == "all" || suite == "identities") verify_identities_suite(rows);
  if (suite == "all" || suite == "bounds") verify_bounds_suite(rows);
  if (suite == "all" || suite == "invariance") verify_invariance_suite(rows);
  if (suite == "all" || suite == "product") verify_product_suite(rows);

  std::string csv = "suite,check,status,detail\n";
  bool all_pass = true;
  for (const auto& row : rows) {
    all_pass = all_pass && row.pass;
    std::string detail = row.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    csv += row.suite + "," + row.check + "," + (row.pass ? "PASS" : "FAIL") +
           "," + detail + "\n";
  }
  write_output(out_path, csv);
  return all_pass ? kExitSuccess : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-parameter spectral density functions and Novikov-Shubin exponents "
      "for fibred geometries"};
  app.require_subcommand(1);

  auto add_opt = [](CLI::Option* opt) {
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    return opt;
  };

  // heat-trace ---------------------------------------------------------------
  auto* heat = app.add_subcommand(
      "heat-trace", "Evaluate a heat-trace curve along the path c = t^zeta");
  int ht_degree = 0;
  double ht_zeta = 0.0, ht_tmin = 1e3, ht_tmax = 1e7;
  std::size_t ht_points = 41;
  std::string ht_out, ht_config;
  add_opt(heat->add_option("--degree", ht_degree, "Form degree (0, 1, or 2)"));
  add_opt(heat->add_option("--zeta", ht_zeta, "Path exponent"));
  add_opt(heat->add_option("--t-min", ht_tmin, "Smallest diffusion time"));
  add_opt(heat->add_option("--t-max", ht_tmax, "Largest diffusion time"));
  add_opt(heat->add_option("--points", ht_points, "Number of log-spaced t values"));
  add_opt(heat->add_option("--out", ht_out, "Output file (default stdout)"));
  add_opt(heat->add_option("--config", ht_config, "key=value config file"));

  // alpha --------------------------------------------------------------------
  auto* alpha = app.add_subcommand(
      "alpha", "Estimate decay exponents along c = t^zeta against the "
               "closed-form values");
  int al_degree = 0;
  std::vector<double> al_zetas;
  std::optional<double> al_zmin, al_zmax, al_zstep;
  std::string al_out, al_config;
  add_opt(alpha->add_option("--degree", al_degree, "Form degree (0, 1, or 2)"));
  alpha->add_option("--zetas", al_zetas, "Comma-separated zeta values")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_opt(alpha->add_option("--zeta-min", al_zmin, "Sweep start"));
  add_opt(alpha->add_option("--zeta-max", al_zmax, "Sweep end (inclusive)"));
  add_opt(alpha->add_option("--zeta-step", al_zstep, "Sweep step"));
  add_opt(alpha->add_option("--out", al_out, "Output file (default stdout)"));
  add_opt(alpha->add_option("--config", al_config, "key=value config file"));

  // lattice ------------------------------------------------------------------
  auto* lattice = app.add_subcommand(
      "lattice", "Normalized eigenvalue counts on Heisenberg quotients");
  int la_n = 4;
  double la_mumin = 0.25, la_mumax = 4.0, la_numin = 0.25, la_numax = 4.0;
  std::size_t la_mupts = 9, la_nupts = 9;
  double la_lambda0 = 1.0;
  std::optional<double> la_path_zeta;
  std::vector<int> la_nlist = {12, 24};
  std::vector<double> la_lgrid;
  std::string la_out, la_config;
  add_opt(lattice->add_option("--n", la_n, "Quotient side length"));
  auto* om1 = add_opt(lattice->add_option("--mu-min", la_mumin, "Smallest mu"));
  auto* om2 = add_opt(lattice->add_option("--mu-max", la_mumax, "Largest mu"));
  auto* om3 = add_opt(lattice->add_option("--mu-points", la_mupts, "Mu grid size"));
  auto* on1 = add_opt(lattice->add_option("--nu-min", la_numin, "Smallest nu"));
  auto* on2 = add_opt(lattice->add_option("--nu-max", la_numax, "Largest nu"));
  auto* on3 = add_opt(lattice->add_option("--nu-points", la_nupts, "Nu grid size"));
  add_opt(lattice->add_option("--lambda0", la_lambda0, "Counting threshold"));
  auto* opz = add_opt(lattice->add_option(
      "--path-zeta", la_path_zeta,
      "Also fit counting slopes along (mu, nu) = (lambda, lambda^{1+zeta})"));
  lattice->add_option("--n-list", la_nlist, "Side lengths for the slope fit")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  lattice
      ->add_option("--lambda-grid", la_lgrid,
                   "Explicit lambda grid for the slope fit")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_opt(lattice->add_option("--out", la_out, "Output file (default stdout)"));
  add_opt(lattice->add_option("--config", la_config, "key=value config file"));

  // product ------------------------------------------------------------------
  auto* product = app.add_subcommand(
      "product", "Exponents of a fibre-times-base product from profile files");
  std::string pr_fibre, pr_base, pr_out, pr_config;
  double pr_r = 1.0, pr_s = 1.0;
  std::optional<int> pr_k;
  add_opt(product->add_option("--fibre", pr_fibre, "Fibre profile file"))
      ->required();
  add_opt(product->add_option("--base", pr_base, "Base profile file"))
      ->required();
  add_opt(product->add_option("--r", pr_r, "Base scaling weight"));
  add_opt(product->add_option("--s", pr_s, "Fibre scaling weight"));
  add_opt(product->add_option("--k", pr_k, "Single degree (default: all)"));
  add_opt(product->add_option("--out", pr_out, "Output file (default stdout)"));
  add_opt(product->add_option("--config", pr_config, "key=value config file"));

  // verify -------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string ve_suite = "all", ve_out, ve_config;
  add_opt(verify->add_option(
      "--suite", ve_suite, "identities, bounds, invariance, product, or all"));
  add_opt(verify->add_option("--out", ve_out, "Output file (default stdout)"));
  add_opt(verify->add_option("--config", ve_config, "key=value config file"));

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = rewrite_args(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (heat->parsed()) {
      return run_heat_trace(ht_degree, ht_zeta, ht_tmin, ht_tmax, ht_points,
                            ht_out);
    }
    if (alpha->parsed()) {
      std::vector<double> zetas = al_zetas;
      if (zetas.empty() && al_zmin && al_zmax && al_zstep) {
        if (!(*al_zstep > 0.0)) {
          throw std::invalid_argument("alpha: --zeta-step must be positive");
        }
        for (double z = *al_zmin; z <= *al_zmax + 1e-12 * *al_zstep;
             z += *al_zstep) {
          zetas.push_back(z);
        }
      }
      return run_alpha(al_degree, zetas, al_out);
    }
    if (lattice->parsed()) {
      const bool explicit_grid = om1->count() || om2->count() ||
                                 om3->count() || on1->count() ||
                                 on2->count() || on3->count();
      const bool want_grid = !opz->count() || explicit_grid;
      return run_lattice(la_n, la_mumin, la_mumax, la_mupts, la_numin,
                         la_numax, la_nupts, la_lambda0, la_path_zeta,
                         la_nlist, la_lgrid, want_grid, la_out);
    }
    if (product->parsed()) {
      return run_product(pr_fibre, pr_base, pr_r, pr_s, pr_k, pr_out);
    }
    if (verify->parsed()) {
      return run_verify(ve_suite, ve_out);
    }
    std::cerr << "error: no subcommand\n";
    return kExitDomainError;
  } catch (const tpnsi::resource_cap_error& e) {
    std::cerr << "resource cap: " << e.what()
              << "\nhint: perturbed operators need n <= 12; unperturbed "
                 "counting supports n <= 64\n";
    return kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}
