#pragma once

// Schrodinger-representation models and their potentials.
//
//   cq-box   H = -hbar^2 d2/dx2 on (-b, b), hard Dirichlet walls, V = 0
//   aq-box   H = -hbar^2 d2/dx2 + hbar^2 (2x^2 + b^2) / (b^2 - x^2)^2 on (-b, b)
//   half-ho  H = [-hbar^2 d2/dx2 + (3/4) hbar^2 / x^2 + x^2] / 2 on (0, inf)
//   anti-box the aq-box potential plus W/|x| on |x| > b (evaluation only)

#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "boxaffine/analytic_box.hpp"
#include "boxaffine/piecewise.hpp"

namespace boxaffine {

struct CqBox {
  BoxGeometry geom;
};
struct AqBox {
  BoxGeometry geom;
};
struct HalfHarmonic {
  double hbar = 1.0;
};
struct AntiBox {
  BoxGeometry geom;
  double coupling = 0.0;  // W, energy * length, W >= 0
};

using ModelSpec = std::variant<CqBox, AqBox, HalfHarmonic, AntiBox>;

/// Reflection symmetry of an eigenfunction of a symmetric box model.
enum class Parity { even, odd };

/// CLI name: cq-box, aq-box, half-ho, anti-box.
std::string_view model_name(const ModelSpec& model);

/// Throws InvalidArgument when a parameter is non-positive or non-finite
/// (W may be zero).
void validate(const ModelSpec& model);

/// Domain length scale: b for the box variants, sqrt(hbar) for the half-HO.
double length_scale(const ModelSpec& model);

double aq_box_potential(double x, const BoxGeometry& geom);
double half_ho_potential(double x, double hbar);
double anti_box_potential(double x, const BoxGeometry& geom, double coupling);

/// aq_box_potential(x) / [(3/4) hbar^2 / (b - |x|)^2]; tends to 1 at the walls.
double boundary_asymptotic_ratio(double x, const BoxGeometry& geom);

/// V ~ coefficient * distance^exponent near `location`.
struct SingularEndpoint {
  double location;
  double coefficient;
  int exponent;
};

/// Inverse-square endpoint data, in each potential's own normalization.
/// Throws Unsupported for cq-box and anti-box.
std::vector<SingularEndpoint> singularity_metadata(const ModelSpec& model);

struct Potential {
  std::vector<Interval> domain;  // open intervals
  std::function<double(double)> evaluate;
  std::vector<SingularEndpoint> singular_endpoints;

  bool in_domain(double x) const;
};

Potential make_potential(const ModelSpec& model);

}  // namespace boxaffine
