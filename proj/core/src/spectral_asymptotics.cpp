#include "tpnsi/spectral_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tpnsi/errors.hpp"
#include "tpnsi/parallel.hpp"

namespace tpnsi {

namespace {

/// Slope of y against x by centered least squares; optionally reports the
/// intercept and the largest absolute residual.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y,
                double* max_resid = nullptr) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("ls_slope: abscissae are all equal");
  }
  const double b = sxy / sxx;
  if (max_resid) {
    const double a = my - b * mx;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(y[i] - (a + b * x[i])));
    }
    *max_resid = worst;
  }
  return b;
}

/// Least-squares decay exponent of theta ~ A t^{-beta} with subpolynomial
/// correction columns t^{-j sigma}, j = 1..3, solved on max-abs-normalized
/// columns; near-vanishing correction columns are dropped.
double corrected_ls_beta(const std::vector<double>& ln_t,
                         const std::vector<double>& ln_theta, double sigma) {
  const auto n = static_cast<Eigen::Index>(ln_t.size());
  Eigen::MatrixXd basis(n, 5);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = ln_t[static_cast<std::size_t>(i)];
    basis(i, 0) = 1.0;
    basis(i, 1) = x;
    basis(i, 2) = std::exp(-sigma * x);
    basis(i, 3) = std::exp(-2.0 * sigma * x);
    basis(i, 4) = std::exp(-3.0 * sigma * x);
    rhs(i) = ln_theta[static_cast<std::size_t>(i)];
  }

  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < 5; ++j) {
    if (j < 2 || basis.col(j).cwiseAbs().maxCoeff() >= 1e-12) {
      kept.push_back(j);
    }
  }
  Eigen::MatrixXd a(n, static_cast<Eigen::Index>(kept.size()));
  Eigen::VectorXd scale(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    scale(jj) = basis.col(kept[j]).cwiseAbs().maxCoeff();
    a.col(jj) = basis.col(kept[j]) / scale(jj);
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
  // kept[1] is always the log-t column; undo its normalization.
  return -sol(1) / scale(1);
}

void check_log_uniform_grid(const std::vector<double>& grid,
                            const char* name) {
  if (grid.size() < 2) {
    throw std::invalid_argument(std::string("TwoParamFunction: ") + name +
                                " needs at least 2 points");
  }
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument(std::string("TwoParamFunction: ") + name +
                                  " must be positive and finite");
    }
  }
  const double r0 = grid[1] / grid[0];
  if (!(r0 > 1.0)) {
    throw std::invalid_argument(std::string("TwoParamFunction: ") + name +
                                " must be strictly increasing");
  }
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double r = grid[i + 1] / grid[i];
    if (std::abs(r - r0) > 1e-9 * r0) {
      throw std::invalid_argument(std::string("TwoParamFunction: ") + name +
                                  " is not log-uniform");
    }
  }
}

/// Whole-step shift count for C on a log-uniform grid with the given ratio.
Eigen::Index grid_shift_steps(double C, double ratio, const char* axis) {
  const double steps = std::log(C) / std::log(ratio);
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps))) {
    std::ostringstream os;
    os << "dilatational check: C = " << C
       << " is not a whole power of the " << axis << " grid step";
    throw std::invalid_argument(os.str());
  }
  return static_cast<Eigen::Index>(rounded);
}

void require_shared_grids(const TwoParamFunction& G, const TwoParamFunction& H) {
  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-12 * a[i]) return false;
    }
    return true;
  };
  if (!same(G.mu_grid, H.mu_grid) || !same(G.nu_grid, H.nu_grid)) {
    throw std::invalid_argument(
        "dilatational check: the two functions must share their grids");
  }
}

/// One orientation of the chain A(C^{-1} mu, C^{-1} nu) <= B <= A(C mu, C nu)
/// at every point where both shifted lookups stay on the grid.
bool chain_holds(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                 Eigen::Index k_mu, Eigen::Index k_nu, Eigen::Index* fail_i,
                 Eigen::Index* fail_j) {
  const Eigen::Index rows = B.rows();
  const Eigen::Index cols = B.cols();
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (i - k_mu < 0 || i + k_mu >= rows || i - k_mu >= rows || i + k_mu < 0) {
      continue;
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j - k_nu < 0 || j + k_nu >= cols || j - k_nu >= cols ||
          j + k_nu < 0) {
        continue;
      }
      const double lo = A(i - k_mu, j - k_nu);
      const double hi = A(i + k_mu, j + k_nu);
      const double v = B(i, j);
      if (lo > v + tol || v > hi + tol) {
        if (fail_i) *fail_i = i;
        if (fail_j) *fail_j = j;
        return false;
      }
    }
  }
  return true;
}

}  // namespace

void ScalingPath::validate() const {
  if (!std::isfinite(r) || !std::isfinite(s) || r < 0.0 || s < 0.0) {
    throw std::invalid_argument("ScalingPath: requires finite r >= 0, s >= 0");
  }
  if (r == 0.0 && s == 0.0) {
    throw std::invalid_argument("ScalingPath: r and s must not both be zero");
  }
}

void TwoParamFunction::validate() const {
  check_log_uniform_grid(mu_grid, "mu_grid");
  check_log_uniform_grid(nu_grid, "nu_grid");
  if (values.rows() != static_cast<Eigen::Index>(mu_grid.size()) ||
      values.cols() != static_cast<Eigen::Index>(nu_grid.size())) {
    throw std::invalid_argument(
        "TwoParamFunction: values shape must be mu_grid.size() x "
        "nu_grid.size()");
  }
  double scale = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(
            "TwoParamFunction: values must be finite and >= 0");
      }
      scale = std::max(scale, v);
    }
  }
  const double slack = 1e-12 * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (i + 1 < values.rows() && values(i + 1, j) < values(i, j) - slack) {
        throw std::invalid_argument(
            "TwoParamFunction: values decrease along the mu axis");
      }
      if (j + 1 < values.cols() && values(i, j + 1) < values(i, j) - slack) {
        throw std::invalid_argument(
            "TwoParamFunction: values decrease along the nu axis");
      }
    }
  }
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || n < 2) {
    throw std::invalid_argument(
        "log_spaced: requires 0 < lo < hi (finite) and n >= 2");
  }
  std::vector<double> out(n);
  const double la = std::log(lo);
  const double lb = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                               static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<HeatTraceSample> heat_trace_curve(int degree, double zeta,
                                              const std::vector<double>& t_grid,
                                              const QuadratureSpec& quad) {
  if (degree < 0 || degree > 2) {
    throw std::invalid_argument("heat_trace_curve: degree must be 0, 1, or 2");
  }
  if (!std::isfinite(zeta)) {
    throw std::invalid_argument("heat_trace_curve: zeta must be finite");
  }
  if (degree == 1) {
    if (!(zeta > -0.5 && zeta < 1.0)) {
      std::ostringstream os;
      os << "heat_trace_curve: degree 1 requires -1/2 < zeta < 1; got "
         << zeta;
      throw std::domain_error(os.str());
    }
  } else if (!(zeta >= -0.5)) {
    std::ostringstream os;
    os << "heat_trace_curve: degree " << degree
       << " requires zeta >= -1/2; got " << zeta;
    throw std::domain_error(os.str());
  }
  if (t_grid.empty()) {
    throw std::invalid_argument("heat_trace_curve: t_grid must be non-empty");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i])) {
      throw std::invalid_argument(
          "heat_trace_curve: t_grid must be positive and finite");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument(
          "heat_trace_curve: t_grid must be strictly increasing");
    }
  }
  quad.validate();

  std::vector<HeatTraceSample> samples(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    const ScaledMetricPoint point = ScaledMetricPoint::on_path(t_grid[i], zeta);
    HeatTraceSample s =
        (degree == 1) ? eval_theta1(point, quad) : eval_theta0(point, quad);
    s.degree = degree;
    samples[i] = s;
  });
  return samples;
}

DecayEstimate fit_decay_exponent(const std::vector<HeatTraceSample>& samples,
                                 double window_decades,
                                 std::optional<double> correction_scale) {
  const std::size_t n = samples.size();
  if (n < 8) {
    throw std::invalid_argument(
        "fit_decay_exponent: requires at least 8 samples");
  }
  std::vector<double> lt(n), lth(n), ln_t(n), ln_theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = samples[i].point.t;
    const double theta = samples[i].theta;
    if (!(t > 0.0) || (i > 0 && !(t > samples[i - 1].point.t))) {
      throw std::invalid_argument(
          "fit_decay_exponent: sample times must be positive and strictly "
          "increasing");
    }
    if (!(theta > 0.0) || !std::isfinite(theta)) {
      throw std::domain_error(
          "fit_decay_exponent: all theta values must be > 0");
    }
    lt[i] = std::log10(t);
    lth[i] = std::log10(theta);
    ln_t[i] = std::log(t);
    ln_theta[i] = std::log(theta);
  }
  const double span = lt[n - 1] - lt[0];
  if (span < 3.0 - 1e-12) {
    throw std::invalid_argument(
        "fit_decay_exponent: samples must span at least 3 decades");
  }
  if (!(window_decades > 0.0) || window_decades > span) {
    throw std::invalid_argument(
        "fit_decay_exponent: window_decades must lie in (0, span]");
  }

  DecayEstimate est;
  // Sliding secant windows anchored at the large-t end; for each right
  // endpoint, the left endpoint is the nearest sample at least a full window
  // away.
  for (std::size_t j = n; j-- > 1;) {
    std::size_t left = n;
    for (std::size_t i = j; i-- > 0;) {
      if (lt[j] - lt[i] >= window_decades * (1.0 - 1e-12)) {
        left = i;
        break;
      }
    }
    if (left == n) break;
    est.window_slopes.push_back(-(lth[j] - lth[left]) / (lt[j] - lt[left]));
  }
  est.beta_hat =
      *std::min_element(est.window_slopes.begin(), est.window_slopes.end());

  // Least squares over the last two decades (the smoother diagnostic).
  const double cutoff = lt[n - 1] - 2.0 - 1e-12;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    if (lt[i] >= cutoff) {
      xs.push_back(lt[i]);
      ys.push_back(lth[i]);
    }
  }
  est.ls_two_decades = -ls_slope(xs, ys, &est.max_residual);

  if (correction_scale) {
    const double sigma = *correction_scale;
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument(
          "fit_decay_exponent: correction scale must be finite and >= 0");
    }
    if (sigma < 0.05) {
      // The correction columns degenerate toward the power law itself; the
      // plain full-window fit is the stable estimator here.
      est.corrected = -ls_slope(lt, lth);
    } else {
      est.corrected = corrected_ls_beta(ln_t, ln_theta, sigma);
    }
  }
  return est;
}

double alpha_from_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw std::invalid_argument("alpha_from_beta: requires finite beta >= 0");
  }
  return 2.0 * beta;
}

double two_param_alpha(int degree, const ScalingPath& path,
                       const QuadratureSpec& quad) {
  path.validate();
  if (path.r != 1.0) {
    throw std::invalid_argument(
        "two_param_alpha: the path must have r = 1 (base normalization)");
  }
  const double zeta = path.zeta();
  const std::vector<double> t_grid = log_spaced(1e3, 1e7, 33);
  const std::vector<HeatTraceSample> samples =
      heat_trace_curve(degree, zeta, t_grid, quad);
  if (degree == 1) {
    const DecayEstimate est = fit_decay_exponent(samples);
    return alpha_from_beta(est.ls_two_decades);
  }
  // Degrees 0 and 2: the trace approaches its power law through
  // subpolynomial corrections in t^{-(2 zeta + 1)}; fit them out.
  const DecayEstimate est =
      fit_decay_exponent(samples, 1.0, 2.0 * zeta + 1.0);
  return alpha_from_beta(*est.corrected);
}

AlphaValue product_alpha(int k, const NSProfile& F, const NSProfile& B,
                         const ScalingPath& path) {
  if (k < 0) {
    throw std::invalid_argument("product_alpha: degree k must be >= 0");
  }
  F.validate();
  B.validate();
  path.validate();
  if (!F.betti_all_zero() || !B.betti_all_zero()) {
    throw unsupported_case_error(
        "product_alpha: nonzero L2-Betti numbers are not supported; the "
        "product formula assumes they all vanish");
  }
  AlphaValue best = AlphaValue::infinity();
  for (int p = 0; p <= k; ++p) {
    const AlphaValue base_term = scale_alpha(path.r, B.alpha_at(k - p));
    best = min_alpha(best, scale_alpha(path.s, F.alpha_at(p)) + base_term);
    best = min_alpha(best, scale_alpha(path.s, F.alpha_at(p + 1)) + base_term);
  }
  return best;
}

double product_sdf_pointwise(
    int k, const std::vector<std::function<double(double)>>& F_sdf,
    const std::vector<std::function<double(double)>>& B_sdf, double mu,
    double nu) {
  if (k < 0) {
    throw std::invalid_argument("product_sdf_pointwise: k must be >= 0");
  }
  if (!(mu > 0.0) || !(nu > 0.0) || !std::isfinite(mu) || !std::isfinite(nu)) {
    throw std::invalid_argument(
        "product_sdf_pointwise: mu and nu must be positive and finite");
  }
  double sum = 0.0;
  for (int p = 0; p <= k; ++p) {
    const int q = k - p;
    const std::size_t up = static_cast<std::size_t>(p);
    const std::size_t uq = static_cast<std::size_t>(q);
    const double f = (up < F_sdf.size() && F_sdf[up]) ? F_sdf[up](nu) : 0.0;
    const double b = (uq < B_sdf.size() && B_sdf[uq]) ? B_sdf[uq](mu) : 0.0;
    if (!(f >= 0.0) || !(b >= 0.0) || !std::isfinite(f) || !std::isfinite(b)) {
      throw std::invalid_argument(
          "product_sdf_pointwise: factors must evaluate finite and >= 0");
    }
    sum += f * b;
  }
  return sum;
}

long long growth_degree(
    const std::vector<std::pair<int, long long>>& graded_ranks) {
  long long total = 0;
  for (const auto& [weight, rank] : graded_ranks) {
    if (weight < 1) {
      throw std::invalid_argument("growth_degree: weights must be >= 1");
    }
    if (rank < 0) {
      throw std::invalid_argument("growth_degree: ranks must be >= 0");
    }
    total += static_cast<long long>(weight) * rank;
  }
  return total;
}

double hodge_dual_alpha(double alpha_0_value) {
  if (!std::isfinite(alpha_0_value)) {
    throw std::invalid_argument("hodge_dual_alpha: requires a finite value");
  }
  return alpha_0_value;
}

bool dilatational_admissible(const TwoParamFunction& G,
                             const TwoParamFunction& H, double C,
                             Eigen::Index* fail_i, Eigen::Index* fail_j) {
  G.validate();
  H.validate();
  require_shared_grids(G, H);
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument(
        "dilatational check: C must be positive and finite");
  }
  const Eigen::Index k_mu =
      grid_shift_steps(C, G.mu_grid[1] / G.mu_grid[0], "mu");
  const Eigen::Index k_nu =
      grid_shift_steps(C, G.nu_grid[1] / G.nu_grid[0], "nu");
  return chain_holds(G.values, H.values, k_mu, k_nu, fail_i, fail_j) &&
         chain_holds(H.values, G.values, k_mu, k_nu, fail_i, fail_j);
}

DilatationalResult dilatational_equiv_check(
    const TwoParamFunction& G, const TwoParamFunction& H,
    const std::vector<double>& C_candidates) {
  if (C_candidates.empty()) {
    throw std::invalid_argument(
        "dilatational_equiv_check: needs at least one candidate");
  }
  for (std::size_t i = 0; i < C_candidates.size(); ++i) {
    if (!(C_candidates[i] > 0.0) || !std::isfinite(C_candidates[i])) {
      throw std::invalid_argument(
          "dilatational_equiv_check: candidates must be positive and finite");
    }
    if (i > 0 && !(C_candidates[i] > C_candidates[i - 1])) {
      throw std::invalid_argument(
          "dilatational_equiv_check: candidates must be strictly increasing");
    }
  }

  DilatationalResult result;
  for (double C : C_candidates) {
    Eigen::Index fi = -1, fj = -1;
    if (dilatational_admissible(G, H, C, &fi, &fj)) {
      result.admissible = true;
      result.C = C;
      return result;
    }
    result.fail_i = fi;
    result.fail_j = fj;
  }
  result.admissible = false;
  result.C = C_candidates.back();
  result.fail_mu = G.mu_grid[static_cast<std::size_t>(result.fail_i)];
  result.fail_nu = G.nu_grid[static_cast<std::size_t>(result.fail_j)];
  std::ostringstream os;
  os << "no candidate admissible; C = " << result.C
     << " first violates the two-sided chain at (mu, nu) = (" << result.fail_mu
     << ", " << result.fail_nu << ")";
  result.detail = os.str();
  return result;
}

}  // namespace tpnsi
