#include "tpnsi/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tpnsi/errors.hpp"

namespace tpnsi {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
  if (max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
  }
  if (!(series_switch_eps > 0.0)) {
    throw std::invalid_argument("QuadratureSpec: series_switch_eps must be > 0");
  }
}

namespace {

constexpr int kOrder = 15;

struct GaussRule {
  std::array<double, kOrder> node;
  std::array<double, kOrder> weight;
};

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence.
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r{};
    const int n = kOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      r.node[i] = x;
      r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

double eval_panel(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = gauss_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) {
    sum += r.weight[i] * f(mid + half * r.node[i]);
  }
  return half * sum;
}

struct Interval {
  double a, b;
  double panel_value;
  int depth;
};

QuadratureResult adapt(const std::function<double(double)>& f, double a,
                       double b, double target_abs, int max_depth) {
  std::vector<Interval> stack;
  stack.push_back({a, b, eval_panel(f, a, b), 0});

  const double total_len = b - a;
  double accepted_value = 0.0;
  double accepted_error = 0.0;

  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();

    const double mid = 0.5 * (iv.a + iv.b);
    const double left = eval_panel(f, iv.a, mid);
    const double right = eval_panel(f, mid, iv.b);
    const double refined = left + right;
    const double disc = std::abs(iv.panel_value - refined);

    const double share = target_abs * ((iv.b - iv.a) / total_len) * 0.5;
    if (disc <= share || disc <= 1e-15 * std::abs(refined) || disc < 1e-300) {
      accepted_value += refined;
      accepted_error += disc;
      continue;
    }
    if (iv.depth >= max_depth) {
      // Fold everything still pending into a conservative partial result.
      double partial = accepted_value + refined;
      double err = accepted_error + disc;
      for (const Interval& rest : stack) {
        partial += rest.panel_value;
        err += std::abs(rest.panel_value);
      }
      throw quadrature_convergence_error(
          "adaptive quadrature: subdivision limit reached before meeting the "
          "error budget",
          partial, err);
    }
    stack.push_back({mid, iv.b, right, iv.depth + 1});
    stack.push_back({iv.a, mid, left, iv.depth + 1});
  }
  return {accepted_value, accepted_error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    double abs_tol, int max_subdivisions) {
  if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: requires b >= a");
  if (a == b) return {0.0, 0.0};

  // Coarse composite bootstrap for the magnitude entering the relative part
  // of the budget.
  double rough = 0.0;
  {
    const int pieces = 8;
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
      rough += eval_panel(f, a + i * h, a + (i + 1) * h);
    }
  }

  double target = 0.5 * (rel_tol * std::abs(rough) + abs_tol);
  QuadratureResult res = adapt(f, a, b, target, max_subdivisions);

  // If the bootstrap overestimated the magnitude badly, tighten once against
  // the converged value so the promised budget holds for the true integral.
  const double true_target = 0.5 * (rel_tol * std::abs(res.value) + abs_tol);
  if (true_target < 0.75 * target) {
    res = adapt(f, a, b, true_target, max_subdivisions);
  }
  return res;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& quad) {
  quad.validate();
  return integrate_adaptive(f, a, b, quad.rel_tol, quad.abs_tol,
                            quad.max_subdivisions);
}

double composite_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels) {
  if (panels < 1) throw std::invalid_argument("composite_gauss: panels must be >= 1");
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    sum += eval_panel(f, a + i * h, a + (i + 1) * h);
  }
  return sum;
}

}  // namespace tpnsi
