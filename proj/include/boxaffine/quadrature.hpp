#pragma once

// Orthogonal-polynomial recurrences and Gauss-Legendre quadrature.

#include <cstddef>
#include <functional>
#include <vector>

namespace boxaffine {

/// Gauss rule on [-1, 1] for the Legendre weight.
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, antisymmetric about 0
  std::vector<double> weights;  // positive, symmetric, sum to 2

  std::size_t order() const { return nodes.size(); }

  /// Applies the rule to f mapped onto [a, b].
  double integrate(const std::function<double(double)>& f, double a, double b) const;
};

/// n-point Gauss-Legendre rule, 1 <= n <= 512. Nodes are polished by Newton
/// iteration from Chebyshev guesses and mirrored so the rule is exactly
/// symmetric. Throws ConvergenceFailure if Newton does not settle.
QuadratureRule gauss_legendre(std::size_t n);

/// P_k(t) by the three-term recurrence.
double legendre_eval(int k, double t);

/// Values and first two derivatives of P_0..P_{count-1} at t.
struct LegendreTable {
  std::vector<double> value;
  std::vector<double> first;
  std::vector<double> second;
};
LegendreTable legendre_table(int count, double t);

/// Generalized Laguerre polynomial L_n^{(alpha)}(t), alpha > -1.
double laguerre_eval(double alpha, int n, double t);

/// Adaptive Gauss-Legendre integration of a smooth integrand. Each panel
/// compares a 15-point rule with two 15-point half panels and bisects until
/// |coarse - fine| <= tol * max(1, |fine|). Throws QuadratureFailure when the
/// recursion depth is exhausted or the integrand is not finite.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-10);

}  // namespace boxaffine
