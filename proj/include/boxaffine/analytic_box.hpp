#pragma once

// Closed-form canonical-quantization particle in a box on (-b, b), with
// H = -hbar^2 d^2/dx^2 (units 2m = 1) and Dirichlet walls.

#include <vector>

#include "boxaffine/piecewise.hpp"

namespace boxaffine {

struct BoxGeometry {
  double b = 1.0;     // half-width
  double hbar = 1.0;
};

/// Throws InvalidArgument unless b and hbar are positive and finite.
void validate(const BoxGeometry& geom);

enum class TrigKind { cosine, sine };

struct TrigMode {
  int n = 1;
  TrigKind kind = TrigKind::cosine;

  friend bool operator==(const TrigMode&, const TrigMode&) = default;
};

/// Mode n of the box: cosine for odd n, sine for even n.
TrigMode cq_mode(int n);

struct CqLevel {
  int n;
  double energy;
  TrigMode mode;
};

/// cos(n pi x / 2b) or sin(n pi x / 2b) for any trig mode, evaluated with
/// exact argument reduction so that half-integer multiples of pi vanish
/// exactly. Derivative order 0..3.
double trig_mode_value(const TrigMode& mode, double x, const BoxGeometry& geom, int order = 0);

/// Unnormalized eigenfunction n >= 1; exactly zero for |x| >= b.
double cq_eigenfunction(int n, double x, const BoxGeometry& geom);

/// Analytic derivative of the eigenfunction inside the box (|x| < b).
double cq_eigenfunction_derivative(int n, double x, const BoxGeometry& geom, int order);

/// hbar^2 n^2 pi^2 / (4 b^2).
double cq_eigenvalue(int n, const BoxGeometry& geom);
CqLevel cq_level(int n, const BoxGeometry& geom);

/// Integral of the squared eigenfunction over (-b, b); equals b for every n.
double cq_norm_squared(int n, const BoxGeometry& geom);

struct ModeClassification {
  std::vector<TrigMode> accepted;
  std::vector<TrigMode> rejected;
};

/// Sorts {cos(n pi x/2b), sin(n pi x/2b) : n = 1..M} by whether the mode
/// vanishes at both walls.
ModeClassification classify_trig_modes(int max_n, const BoxGeometry& geom);

/// Eigenfunction n extended by zero to the ambient interval [-2b, 2b], as
/// three pieces carrying value and three derivatives.
PiecewiseSmooth cq_zero_extended(int n, const BoxGeometry& geom);

}  // namespace boxaffine
