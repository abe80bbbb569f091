#include "boxaffine/rayleigh_ritz.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

constexpr int kNodeGridPoints = 2048;
constexpr double kNodeMargin = 1e-6;  // fraction of b excluded at each wall
constexpr int kExponentSamples = 40;

struct AssemblyTerms {
  BoxGeometry geom;
  bool inverse_square = false;  // aq-box potential present
};

AssemblyTerms assembly_terms(const ModelSpec& model) {
  if (const auto* m = std::get_if<CqBox>(&model)) return {m->geom, false};
  if (const auto* m = std::get_if<AqBox>(&model)) return {m->geom, true};
  throw Error(ErrorKind::ModelUnsupported,
              std::string("Rayleigh-Ritz handles cq-box and aq-box, not ") +
                  std::string(model_name(model)));
}

// Basis function chi = u^w P in t and its first two t-derivatives, summed
// against coefficients. u = 1 - t^2 is passed in separately so callers can
// form it from the wall distance without cancellation.
struct ExpansionValue {
  double value;
  double first;
  double second;
};

ExpansionValue expansion(const std::vector<double>& coeffs, double w, double t, double u) {
  const LegendreTable p = legendre_table(static_cast<int>(coeffs.size()), t);
  double sum_p = 0.0;
  double sum_dp = 0.0;
  double sum_d2p = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum_p += coeffs[k] * p.value[k];
    sum_dp += coeffs[k] * p.first[k];
    sum_d2p += coeffs[k] * p.second[k];
  }
  const double uw = std::pow(u, w);
  const double uw1 = std::pow(u, w - 1.0);
  const double uw2 = std::pow(u, w - 2.0);
  return {uw * sum_p, uw1 * (u * sum_dp - 2.0 * w * t * sum_p),
          uw * sum_d2p - 4.0 * w * t * uw1 * sum_dp - 2.0 * w * uw1 * sum_p +
              4.0 * w * (w - 1.0) * t * t * uw2 * sum_p};
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
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

}  // namespace

BasisSpec default_basis(const ModelSpec& model, int size) {
  const AssemblyTerms terms = assembly_terms(model);
  if (size < 1 || size > kMaxBasisSize) {
    throw Error(ErrorKind::InvalidArgument,
                "basis size must lie in [1, 64], got " + std::to_string(size));
  }
  return {size, terms.inverse_square ? 1.5 : 1.0, terms.geom};
}

GeneralizedEigProblem assemble_matrices(const ModelSpec& model, const BasisSpec& basis,
                                        const QuadratureRule& rule) {
  const AssemblyTerms terms = assembly_terms(model);
  validate(basis.geom);
  const int n = basis.size;
  if (n < 1 || n > kMaxBasisSize) {
    throw Error(ErrorKind::InvalidArgument, "basis size must lie in [1, 64]");
  }
  if (rule.order() < static_cast<std::size_t>(2 * n + 8)) {
    throw Error(ErrorKind::InvalidArgument,
                "assembly needs at least " + std::to_string(2 * n + 8) + " quadrature nodes");
  }
  const double w = basis.weight_exponent;
  const double energy_unit = basis.geom.hbar * basis.geom.hbar / (basis.geom.b * basis.geom.b);

  BasicMatrix<long double> h(n, n);
  BasicMatrix<long double> s(n, n);
  std::vector<double> slope(n);
  for (std::size_t q = 0; q < rule.order(); ++q) {
    const double t = rule.nodes[q];
    const double u = (1.0 - t) * (1.0 + t);
    const LegendreTable p = legendre_table(n, t);
    // chi_k' = u^{w-1} [u P_k' - 2 w t P_k]
    for (int k = 0; k < n; ++k) slope[k] = u * p.first[k] - 2.0 * w * t * p.value[k];
    const double kinetic_weight = rule.weights[q] * energy_unit * std::pow(u, 2.0 * w - 2.0);
    // V chi_j chi_k = (hbar^2/b^2) (2t^2 + 1) u^{2w-2} P_j P_k
    const double potential_weight =
        terms.inverse_square ? kinetic_weight * (2.0 * t * t + 1.0) : 0.0;
    const double overlap_weight = rule.weights[q] * std::pow(u, 2.0 * w);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k <= j; ++k) {
        h(j, k) += static_cast<long double>(kinetic_weight) * slope[j] * slope[k] +
                   static_cast<long double>(potential_weight) * p.value[j] * p.value[k];
        s(j, k) += static_cast<long double>(overlap_weight) * p.value[j] * p.value[k];
      }
    }
  }
  GeneralizedEigProblem out{Matrix(n, n), Matrix(n, n)};
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k <= j; ++k) {
      out.h(j, k) = out.h(k, j) = static_cast<double>(h(j, k));
      out.s(j, k) = out.s(k, j) = static_cast<double>(s(j, k));
    }
  }
  return out;
}

EigenDecomposition solve_generalized_symmetric(const GeneralizedEigProblem& problem) {
  return solve_generalized_symmetric(problem.h, problem.s);
}

double eigenfunction_value(const SpectrumResult& result, int level, double x, int order) {
  const double b = result.basis.geom.b;
  if (level < 0 || level >= static_cast<int>(result.eigenvalues.size())) {
    throw Error(ErrorKind::InvalidArgument, "level index out of range");
  }
  if (order < 0 || order > 2) throw Error(ErrorKind::InvalidArgument, "derivative order must be 0..2");
  const double gap = b - std::abs(x);
  if (!(gap > 0.0)) throw Error(ErrorKind::DomainError, "eigenfunctions are evaluated inside the box");
  const double t = x / b;
  const double r = gap / b;
  const double u = r * (2.0 - r);
  const ExpansionValue e =
      expansion(result.coefficients.column(level), result.basis.weight_exponent, t, u);
  switch (order) {
    case 0: return e.value;
    case 1: return e.first / b;
    default: return e.second / (b * b);
  }
}

SpectrumResult compute_spectrum(const ModelSpec& model, int basis_size) {
  const BasisSpec basis = default_basis(model, basis_size);
  const GeneralizedEigProblem problem =
      assemble_matrices(model, basis, gauss_legendre(2 * basis_size + 8));
  EigenDecomposition eig = solve_generalized_symmetric(problem);

  SpectrumResult result;
  result.basis = basis;
  result.eigenvalues = eig.values;
  result.coefficients = eig.vectors;

  const double b = basis.geom.b;
  const int n = basis_size;
  std::vector<double> node_grid(kNodeGridPoints);
  const double lo = -b + kNodeMargin * b;
  const double hi = b - kNodeMargin * b;
  for (int i = 0; i < kNodeGridPoints; ++i) {
    node_grid[i] = lo + (hi - lo) * i / (kNodeGridPoints - 1);
  }
  std::vector<double> log_s(kExponentSamples);
  std::vector<double> s_samples(kExponentSamples);
  for (int i = 0; i < kExponentSamples; ++i) {
    log_s[i] = std::log(1e-4 * b) + (std::log(1e-2 * b) - std::log(1e-4 * b)) * i / (kExponentSamples - 1);
    s_samples[i] = std::exp(log_s[i]);
  }

  for (int k = 0; k < n; ++k) {
    LevelDiagnostics d;
    const std::vector<double> c = eig.vectors.column(k);
    double even = 0.0;
    double odd = 0.0;
    for (int j = 0; j < n; ++j) (j % 2 == 0 ? even : odd) += c[j] * c[j];
    d.parity = even >= odd ? Parity::even : Parity::odd;

    double previous = 0.0;
    for (double x : node_grid) {
      const double v = eigenfunction_value(result, k, x);
      if (v == 0.0) continue;
      if (previous != 0.0 && (v > 0.0) != (previous > 0.0)) ++d.node_count;
      previous = v;
    }

    std::vector<double> log_psi(kExponentSamples);
    for (int i = 0; i < kExponentSamples; ++i) {
      log_psi[i] = std::log(std::abs(eigenfunction_value(result, k, b - s_samples[i])));
    }
    d.boundary_exponent = least_squares_slope(log_s, log_psi);
    d.residual = eig.residuals[k];
    const double lambda = eig.values[k];
    const auto close = [&](int other) {
      return other >= 0 && other < n &&
             std::abs(eig.values[other] - lambda) < 1e-12 * std::abs(lambda);
    };
    d.near_degenerate = close(k - 1) || close(k + 1);
    result.diagnostics.push_back(d);
  }
  return result;
}

ConvergenceTable convergence_sweep(const ModelSpec& model, std::span<const int> sizes, int levels) {
  if (sizes.empty()) throw Error(ErrorKind::InvalidArgument, "convergence sweep needs basis sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw Error(ErrorKind::InvalidArgument, "basis sizes must be ascending");
  }
  if (levels < 1 || levels > sizes.front()) {
    throw Error(ErrorKind::InvalidArgument, "level count must lie in [1, smallest basis size]");
  }
  std::vector<std::future<std::vector<double>>> jobs;
  for (int n : sizes) {
    const BasisSpec basis = default_basis(model, n);
    jobs.push_back(std::async(std::launch::async, [model, basis] {
      const auto problem = assemble_matrices(model, basis, gauss_legendre(2 * basis.size + 8));
      return solve_generalized_symmetric(problem).values;
    }));
  }
  ConvergenceTable table;
  table.sizes.assign(sizes.begin(), sizes.end());
  for (auto& job : jobs) {
    std::vector<double> values = job.get();
    values.resize(levels);
    table.energies.push_back(std::move(values));
  }
  table.final_relative_change.assign(levels, 0.0);
  for (int k = 0; k < levels; ++k) {
    for (std::size_t i = 1; i < table.energies.size(); ++i) {
      if (table.energies[i][k] > table.energies[i - 1][k] + 1e-12) table.nonincreasing = false;
    }
    if (table.energies.size() > 1) {
      const double last = table.energies.back()[k];
      const double prev = table.energies[table.energies.size() - 2][k];
      table.final_relative_change[k] = std::abs(last - prev) / std::abs(last);
    }
  }
  return table;
}

}  // namespace boxaffine
