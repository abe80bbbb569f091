#include "boxaffine/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

// P_n(t) and P_n'(t) together; the derivative uses the identity
// (1 - t^2) P_n' = n (P_{n-1} - t P_n), valid away from t = +-1.
struct LegendrePair {
  double value;
  double derivative;
};

LegendrePair legendre_with_derivative(std::size_t n, double t) {
  double p_prev = 1.0;
  double p = t;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = next;
  }
  const double dp = n * (p_prev - t * p) / (1.0 - t * t);
  return {p, dp};
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(double)>& f, double a,
                                 double b) const {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

QuadratureRule gauss_legendre(std::size_t n) {
  if (n < 1 || n > 512) {
    throw Error(ErrorKind::InvalidArgument,
                "gauss_legendre order must lie in [1, 512], got " + std::to_string(n));
  }
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  // Roots come in +-pairs; solve for the positive ones (index i counts from
  // the largest root down) and mirror.
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, t);
      const double step = p / dp;
      t -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(ErrorKind::ConvergenceFailure,
                  "Newton iteration for Legendre root " + std::to_string(i) + " of order " +
                      std::to_string(n) + " did not converge");
    }
    const double dp = legendre_with_derivative(n, t).derivative;
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    rule.nodes[n - 1 - i] = t;
    rule.nodes[i] = -t;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) {
    const double dp = legendre_with_derivative(n, 0.0).derivative;
    rule.nodes[half] = 0.0;
    rule.weights[half] = 2.0 / (dp * dp);
  }
  return rule;
}

double legendre_eval(int k, double t) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "Legendre degree must be >= 0");
  if (k == 0) return 1.0;
  double p_prev = 1.0;
  double p = t;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0) * t * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = next;
  }
  return p;
}

LegendreTable legendre_table(int count, double t) {
  LegendreTable table;
  table.value.assign(count, 0.0);
  table.first.assign(count, 0.0);
  table.second.assign(count, 0.0);
  if (count == 0) return table;
  table.value[0] = 1.0;
  if (count == 1) return table;
  table.value[1] = t;
  table.first[1] = 1.0;
  for (int k = 1; k + 1 < count; ++k) {
    table.value[k + 1] = ((2.0 * k + 1.0) * t * table.value[k] - k * table.value[k - 1]) / (k + 1.0);
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same ladder one order up.
    table.first[k + 1] = table.first[k - 1] + (2.0 * k + 1.0) * table.value[k];
    table.second[k + 1] = table.second[k - 1] + (2.0 * k + 1.0) * table.first[k];
  }
  return table;
}

double laguerre_eval(double alpha, int n, double t) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "Laguerre degree must be >= 0");
  if (!(alpha > -1.0)) throw Error(ErrorKind::InvalidArgument, "Laguerre alpha must be > -1");
  if (n == 0) return 1.0;
  double l_prev = 1.0;
  double l = 1.0 + alpha - t;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - t) * l - (k + alpha) * l_prev) / (k + 1.0);
    l_prev = l;
    l = next;
  }
  return l;
}

namespace {

const QuadratureRule& panel_rule() {
  static const QuadratureRule rule = gauss_legendre(15);
  return rule;
}

double adaptive_panel(const std::function<double(double)>& f, double a, double b,
                      double coarse, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel_rule().integrate(f, a, mid);
  const double right = panel_rule().integrate(f, mid, b);
  const double fine = left + right;
  if (!std::isfinite(fine)) {
    throw Error(ErrorKind::QuadratureFailure, "integrand is not finite on the panel");
  }
  if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine))) return fine;
  if (depth == 0) {
    throw Error(ErrorKind::QuadratureFailure,
                "adaptive quadrature did not reach the requested tolerance");
  }
  return adaptive_panel(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_panel(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  if (a == b) return 0.0;
  const double coarse = panel_rule().integrate(f, a, b);
  return adaptive_panel(f, a, b, coarse, tol, 40);
}

}  // namespace boxaffine
