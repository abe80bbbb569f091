#pragma once

// Rayleigh-Ritz solver for the finite-interval models.
//
// Basis functions are chi_k(t) = (1 - t^2)^w P_k(t) in t = x / b, with
// w = 3/2 for the aq-box (the wall behaviour psi ~ (b^2 - x^2)^{3/2}) and
// w = 1 for the Dirichlet cq-box. In this basis the aq-box potential times
// chi_j chi_k reduces to a polynomial, so Gauss-Legendre assembly is exact up
// to rounding.

#include <span>
#include <vector>

#include "boxaffine/linalg.hpp"
#include "boxaffine/potentials.hpp"
#include "boxaffine/quadrature.hpp"

namespace boxaffine {

inline constexpr int kMaxBasisSize = 64;

struct BasisSpec {
  int size = 32;
  double weight_exponent = 1.5;
  BoxGeometry geom;
};

/// Basis matching the model's wall behaviour. Throws ModelUnsupported for
/// half-ho and anti-box, InvalidArgument for sizes outside [1, 64].
BasisSpec default_basis(const ModelSpec& model, int size);

/// H_jk = int [hbar^2/b^2 chi_j' chi_k' + V chi_j chi_k] dt (energy units),
/// S_jk = int chi_j chi_k dt (dimensionless), primes in t.
struct GeneralizedEigProblem {
  Matrix h;
  Matrix s;
};

/// Requires a rule with at least 2N + 8 nodes.
GeneralizedEigProblem assemble_matrices(const ModelSpec& model, const BasisSpec& basis,
                                        const QuadratureRule& rule);

EigenDecomposition solve_generalized_symmetric(const GeneralizedEigProblem& problem);

struct LevelDiagnostics {
  Parity parity = Parity::even;
  int node_count = 0;
  double boundary_exponent = 0.0;
  double residual = 0.0;
  bool near_degenerate = false;
};

struct SpectrumResult {
  BasisSpec basis;
  std::vector<double> eigenvalues;  // ascending, level 0 first
  Matrix coefficients;              // column k: coefficients of level k
  std::vector<LevelDiagnostics> diagnostics;
};

SpectrumResult compute_spectrum(const ModelSpec& model, int basis_size);

/// psi_k or one of its first two x-derivatives at x in (-b, b).
double eigenfunction_value(const SpectrumResult& result, int level, double x, int order = 0);

struct ConvergenceTable {
  std::vector<int> sizes;
  std::vector<std::vector<double>> energies;  // energies[i][k]: level k at sizes[i]
  std::vector<double> final_relative_change;  // per level, last two sizes
  bool nonincreasing = true;                  // min-max monotonicity, 1e-12 slack
};

/// Runs the sizes concurrently; `levels` must not exceed the smallest size.
ConvergenceTable convergence_sweep(const ModelSpec& model, std::span<const int> sizes, int levels);

}  // namespace boxaffine
