#include "boxaffine/cli/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "boxaffine/analytic_box.hpp"
#include "boxaffine/linalg.hpp"
#include "boxaffine/piecewise.hpp"
#include "boxaffine/potentials.hpp"
#include "boxaffine/quadrature.hpp"
#include "boxaffine/rayleigh_ritz.hpp"
#include "boxaffine/shooting.hpp"

namespace boxaffine::cli {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << v;
  return s.str();
}

double rel(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool cq_spectrum(std::string& detail) {
  const BoxGeometry g{1.0, 1.0};
  const ModelSpec cq = CqBox{g};
  const SpectrumResult rr = compute_spectrum(cq, 32);
  const Shooter shooter(cq, default_grid(cq, 20000));
  double worst_rr = 0.0;
  double worst_sh = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const double exact = cq_eigenvalue(n, g);
    worst_rr = std::max(worst_rr, rel(rr.eigenvalues[n - 1], exact));
    worst_sh = std::max(worst_sh, rel(shooter.eigenvalue(n - 1, 1e-10), exact));
  }
  detail = "max rel err rayleigh-ritz " + sci(worst_rr) + " (<= 1e-8), shooting " + sci(worst_sh) +
           " (<= 1e-6)";
  return worst_rr <= 1e-8 && worst_sh <= 1e-6;
}

bool toy_delta(std::string& detail) {
  const PiecewiseSmooth f = ramp_function();
  const WeakDerivative w = weak_second_derivative(f);
  double smooth_max = 0.0;
  for (int i = 0; i <= 200; ++i) {
    smooth_max = std::max(smooth_max, std::abs(w.smooth_part.evaluate(-1.0 + i * 0.01)));
  }
  const double l2 = l2_norm_squared(w, f.ambient());
  const bool one = w.delta_terms.size() == 1 && w.delta_prime_terms.empty();
  const bool at_zero = one && w.delta_terms[0].location == 0.0;
  const double coef_err = one ? std::abs(w.delta_terms[0].coefficient - 1.0) : INFINITY;
  detail = std::to_string(w.delta_terms.size()) + " delta(s), coefficient error " + sci(coef_err) +
           ", max |smooth part| " + sci(smooth_max) + ", L2 norm^2 " + (std::isinf(l2) ? "+inf" : sci(l2));
  return one && at_zero && coef_err <= 1e-12 && smooth_max == 0.0 && std::isinf(l2) && l2 > 0;
}

bool obstruction_scaling(std::string& detail) {
  const PiecewiseSmooth phi = cq_zero_extended(1, {1.0, 1.0});
  std::vector<double> log_h;
  std::vector<double> log_norm;
  for (int k = 6; k <= 12; ++k) {
    const double h = std::ldexp(1.0, -k);
    log_h.push_back(std::log(h));
    log_norm.push_back(std::log(discrete_second_derivative_norm(phi, h)));
  }
  const double slope = fitted_slope(log_h, log_norm);
  detail = "log-log slope " + fixed(slope, 4) + " over h = 2^-6..2^-12 (want [-1.1, -0.9])";
  return slope >= -1.1 && slope <= -0.9;
}

bool mode_counting(std::string& detail) {
  int bad = 0;
  for (int m = 1; m <= 16; ++m) {
    const ModeClassification c = classify_trig_modes(m, {1.0, 1.0});
    if (static_cast<int>(c.accepted.size()) != m || static_cast<int>(c.rejected.size()) != m) ++bad;
  }
  detail = std::to_string(16 - bad) + "/16 values of M give exactly M accepted of 2M";
  return bad == 0;
}

bool half_ho(std::string& detail) {
  double worst = 0.0;
  double worst_exponent = 0.0;
  for (double hbar : {0.5, 1.0, 2.0}) {
    const ModelSpec m = HalfHarmonic{hbar};
    const Shooter shooter(m, default_grid(m));
    for (int k = 0; k <= 4; ++k) {
      const double e = shooter.eigenvalue(k, 1e-10 * hbar);
      worst = std::max(worst, rel(e, 2.0 * hbar * (k + 1)));
      if (k == 0) worst_exponent = std::max(worst_exponent, std::abs(shooter.boundary_exponent(e) - 1.5));
    }
  }
  detail = "max rel err " + sci(worst) + " (<= 1e-6), max |exponent - 1.5| " + sci(worst_exponent) +
           " (<= 0.01)";
  return worst <= 1e-6 && worst_exponent <= 0.01;
}

bool aq_cross_method(std::string& detail) {
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  const SpectrumResult rr = compute_spectrum(aq, 48);
  const Shooter shooter(aq, default_grid(aq, 40000, 1e-6));
  double worst = 0.0;
  bool structure = true;
  for (int k = 0; k <= 5; ++k) {
    const double e = shooter.eigenvalue(k, 1e-10);
    worst = std::max(worst, rel(e, rr.eigenvalues[k]));
    const Parity expected = k % 2 == 0 ? Parity::even : Parity::odd;
    structure = structure && rr.diagnostics[k].parity == expected && rr.diagnostics[k].node_count == k &&
                shooter.parity(e) == expected && shooter.match(e).node_count == k;
  }
  const std::vector<int> sizes = {8, 16, 24, 32, 40, 48};
  const ConvergenceTable table = convergence_sweep(aq, sizes, 6);
  double final_change = 0.0;
  for (double c : table.final_relative_change) final_change = std::max(final_change, c);
  detail = "max rel delta " + sci(worst) + " (<= 1e-6), nonincreasing " +
           (table.nonincreasing ? "yes" : "no") + ", final change " + sci(final_change) +
           " (<= 1e-8), parity/nodes " + (structure ? "ok" : "wrong");
  return worst <= 1e-6 && table.nonincreasing && final_change <= 1e-8 && structure;
}

bool scaling_law(std::string& detail) {
  const SpectrumResult unit = compute_spectrum(AqBox{{1.0, 1.0}}, 32);
  double worst = 0.0;
  for (const auto& [b, hbar] : {std::pair{2.0, 1.0}, std::pair{1.0, 2.0}, std::pair{0.5, 3.0}}) {
    const SpectrumResult r = compute_spectrum(AqBox{{b, hbar}}, 32);
    for (int n = 0; n <= 3; ++n) {
      worst = std::max(worst, rel(r.eigenvalues[n] * b * b / (hbar * hbar), unit.eigenvalues[n]));
    }
  }
  detail = "max rel deviation " + sci(worst) + " (<= 1e-8)";
  return worst <= 1e-8;
}

bool boundary_asymptotics(std::string& detail) {
  double worst_ratio = 0.0;
  for (double b : {1.0, 2.0}) {
    const double s = 1e-4 * b;
    for (double x : {b - s, -(b - s)}) {
      worst_ratio = std::max(worst_ratio, std::abs(boundary_asymptotic_ratio(x, {b, 1.0}) - 1.0));
    }
  }
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  const SpectrumResult rr = compute_spectrum(aq, 32);
  const Shooter shooter(aq, default_grid(aq));
  const double p_rr = rr.diagnostics[0].boundary_exponent;
  const double p_sh = shooter.boundary_exponent(shooter.eigenvalue(0, 1e-10));
  detail = "|ratio - 1| " + sci(worst_ratio) + " (<= 5e-5), exponent rayleigh-ritz " + fixed(p_rr, 4) +
           ", shooting " + fixed(p_sh, 4) + " (1.5 +- 0.01)";
  return worst_ratio <= 5e-5 && std::abs(p_rr - 1.5) <= 0.01 && std::abs(p_sh - 1.5) <= 0.01;
}

bool infrastructure(std::string& detail) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst_quad = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const QuadratureRule rule = gauss_legendre(n);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(2 * n);
      for (auto& v : c) v = coef(rng);
      double exact = 0.0;
      for (std::size_t k = 0; k < c.size(); k += 2) exact += 2.0 * c[k] / static_cast<double>(k + 1);
      double approx = 0.0;
      for (std::size_t q = 0; q < rule.order(); ++q) {
        double p = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) p = p * rule.nodes[q] + c[k];
        approx += rule.weights[q] * p;
      }
      worst_quad = std::max(worst_quad, std::abs(approx - exact));
    }
  }

  double worst_residual = 0.0;
  for (int n : {1, 2, 3, 6, 12, 24, 32}) {
    Matrix a(n, n);
    Matrix h(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = coef(rng);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = coef(rng);
    }
    Matrix s(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double sum = i == j ? 0.1 : 0.0;
        for (int k = 0; k < n; ++k) sum += a(k, i) * a(k, j);
        s(i, j) = sum;
      }
    }
    const EigenDecomposition eig = solve_generalized_symmetric(h, s);
    const double hn = frobenius_norm(h);
    const double sn = frobenius_norm(s);
    for (int k = 0; k < n; ++k) {
      const std::vector<double> v = eig.vectors.column(k);
      const std::vector<double> hv = multiply(h, v);
      const std::vector<double> sv = multiply(s, v);
      double r2 = 0.0;
      double v2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = hv[i] - eig.values[k] * sv[i];
        r2 += d * d;
        v2 += v[i] * v[i];
      }
      worst_residual = std::max(worst_residual,
                                std::sqrt(r2) / ((hn + std::abs(eig.values[k]) * sn) * std::sqrt(v2)));
    }
  }
  detail = "Gauss-Legendre max error " + sci(worst_quad) + " (<= 1e-12), eigensolver max residual " +
           sci(worst_residual) + " (<= 1e-9)";
  return worst_quad <= 1e-12 && worst_residual <= 1e-9;
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "CQ spectrum reproduction", 1.0, cq_spectrum},
      {2, "Toy delta", 0.0, toy_delta},
      {3, "Obstruction scaling", 1.0, obstruction_scaling},
      {4, "Mode counting", 0.0, mode_counting},
      {5, "Half-HO validation", 5.0, half_ho},
      {6, "AQ box cross-method", 30.0, aq_cross_method},
      {7, "Scaling law", 0.0, scaling_law},
      {8, "Boundary asymptotics", 0.0, boundary_asymptotics},
      {9, "Numerical infrastructure", 0.0, infrastructure},
  };
  return criteria;
}

CriterionResult run_criterion(const Criterion& c) {
  CriterionResult r;
  r.id = c.id;
  r.title = c.title;
  r.time_limit = c.time_limit;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.passed = c.check(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("threw ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.time_limit > 0.0 && r.seconds >= r.time_limit) {
    r.passed = false;
    r.detail += "; runtime over limit";
  }
  return r;
}

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;
  for (const auto& c : acceptance_criteria()) out.push_back(run_criterion(c));
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::string line = (r.passed ? "PASS  [" : "FAIL  [") + std::to_string(r.id) + "] " + r.title + ": " +
                     r.detail + " (" + fixed(r.seconds, 2) + " s";
  if (r.time_limit > 0.0) line += " < " + fixed(r.time_limit, 0) + " s";
  return line + ")";
}

}  // namespace boxaffine::cli
