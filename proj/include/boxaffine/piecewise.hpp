#pragma once

// Piecewise-smooth functions and their weak (distributional) derivatives.
//
// A function is stored as smooth pieces that tile an ambient interval. Each
// piece carries a ladder of analytic evaluators: value, first derivative,
// second derivative, ... . Differentiating a function shifts every ladder by
// one rung; jumps of the rung being differentiated become Dirac-delta terms.

#include <functional>
#include <span>
#include <vector>

namespace boxaffine {

using Evaluator = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct Piece {
  Interval span;
  std::vector<Evaluator> derivatives;  // [0] value, [1] first derivative, ...
  // An endpoint flagged singular is approached by Richardson extrapolation
  // instead of direct evaluation.
  bool singular_lo = false;
  bool singular_hi = false;

  int max_order() const { return static_cast<int>(derivatives.size()) - 1; }
};

enum class Side { left, right };

class PiecewiseSmooth {
 public:
  /// Pieces must tile `ambient` exactly, in increasing order, and share the
  /// same number of derivative rungs. Throws InvalidArgument otherwise.
  PiecewiseSmooth(Interval ambient, std::vector<Piece> pieces);

  static PiecewiseSmooth single(Interval ambient, std::vector<Evaluator> derivatives);

  Interval ambient() const { return ambient_; }
  std::span<const Piece> pieces() const { return pieces_; }
  int max_order() const { return pieces_.front().max_order(); }

  /// Interior boundaries between consecutive pieces.
  std::vector<double> breakpoints() const;

  /// Derivative of the given order at x. Outside the ambient interval the
  /// function is extended by zero; at a breakpoint the mean of the two
  /// one-sided limits is returned.
  double evaluate(double x, int order = 0) const;
  double operator()(double x) const { return evaluate(x, 0); }

  /// Classical piecewise derivative (ladder shifted by one rung).
  PiecewiseSmooth derivative() const;

  /// Index of the piece whose closure contains x from the given side.
  std::size_t piece_index(double x, Side side) const;

 private:
  Interval ambient_;
  std::vector<Piece> pieces_;
};

/// alpha f + beta g on the union of both breakpoint sets. Both functions must
/// share the ambient interval.
PiecewiseSmooth linear_combination(double alpha, const PiecewiseSmooth& f, double beta,
                                   const PiecewiseSmooth& g);

struct LimitResult {
  double value;
  bool finite;
};

/// lim f^{(order)}(x0 -+ eps) from the requested side of a single piece.
/// Regular endpoints are evaluated directly; endpoints declared singular are
/// extrapolated from eps = eps0 2^{-k}, and a divergent limit is reported
/// with finite = false. A non-finite direct evaluation throws NonFinite.
LimitResult one_sided_limit(const Piece& piece, double x0, Side side, int order = 0);

/// Same, selecting the piece adjacent to x0 on the requested side.
LimitResult one_sided_limit(const PiecewiseSmooth& f, double x0, Side side, int order = 0);

struct DeltaTerm {
  double location;
  double coefficient;
};

struct WeakDerivative {
  PiecewiseSmooth smooth_part;
  std::vector<DeltaTerm> delta_terms;
  std::vector<DeltaTerm> delta_prime_terms;

  bool l2_finite() const { return delta_terms.empty() && delta_prime_terms.empty(); }
};

/// Jumps below this magnitude are treated as continuity.
inline constexpr double kJumpThreshold = 1e-10;

WeakDerivative weak_derivative(const PiecewiseSmooth& f);
WeakDerivative weak_second_derivative(const PiecewiseSmooth& f);

/// Squared L2 norm over [lo, hi]: +infinity if any delta or delta-prime term
/// lies in the closed interval, otherwise adaptive quadrature of the smooth
/// part to 1e-10.
double l2_norm_squared(const WeakDerivative& w, Interval interval);

enum class MeshSampling {
  // Zero-extended function, every mesh point whose stencil touches the
  // support (the mesh runs two steps past each end of the ambient interval).
  full,
  // Only mesh points whose five-point stencil stays inside the ambient
  // interval; the zero extension never enters.
  interior,
};

/// h * sum_i |D2_h f(x_i)|^2 with D2_h the symmetric difference quotient
/// applied twice, [f(x+2h) - 2 f(x) + f(x-2h)] / (4 h^2), on the mesh
/// x_i = lo + i h. h must divide the ambient length.
double discrete_second_derivative_norm(const PiecewiseSmooth& f, double h,
                                       MeshSampling sampling = MeshSampling::full);

/// The continuous ramp on [lo, hi]: zero left of `kink`, slope * (x - kink)
/// to the right.
PiecewiseSmooth ramp_function(Interval ambient = {-1.0, 1.0}, double kink = 0.0,
                              double slope = 1.0);

}  // namespace boxaffine
