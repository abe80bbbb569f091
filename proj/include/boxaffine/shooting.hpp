#pragma once

// Numerov shooting for cq-box, aq-box and half-ho.
//
// The eigen-equation is integrated from both ends toward a match point at
// the potential minimum, starting from the leading Frobenius power s^{3/2}
// next to an inverse-square wall (or from psi = 0 at a hard wall), and
// eigenvalues are located by Sturm-count bracketing followed by bisection of
// the match mismatch.
//
// With GridMapping::liouville the grid is uniform in a coordinate rho with
// x = b tanh(rho) (aq-box) or x = exp(rho) (half-ho), and the unknown is
// phi = psi / sqrt(dx/drho). The inverse-square wall term becomes bounded in
// rho, which keeps Numerov at fourth order all the way to the wall. The
// uniform-x grid is kept for comparison; next to a singular wall it loses
// about two orders of accuracy.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "boxaffine/potentials.hpp"

namespace boxaffine {

enum class GridMapping { uniform, liouville };

struct ShootingGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 20001;
  double offset = 0.0;  // distance of the first point from a singular wall
  GridMapping mapping = GridMapping::liouville;
};

/// Grid for the model: walls at +-b for cq-box; x in [-b + eps, b - eps] for
/// aq-box; x in [eps, 12 sqrt(hbar)] for half-ho; eps = relative_offset times
/// the model length scale. cq-box always uses the uniform grid.
ShootingGrid default_grid(const ModelSpec& model, std::size_t points = 20001,
                          double relative_offset = 1e-6,
                          GridMapping mapping = GridMapping::liouville);

struct MatchResult {
  double energy = 0.0;
  // Normalized Wronskian of the left and right solutions at the match
  // point, (psi_L' psi_R - psi_L psi_R') / (|(psi_L, l psi_L')| |(psi_R, l psi_R')|)
  // with l the model length scale. Equals the log-derivative difference
  // where the solutions are not near a zero, and has no poles.
  double log_derivative_mismatch = 0.0;
  int node_count = 0;   // sign changes of the assembled solution
  int sturm_count = 0;  // sign changes of the left solution over the whole grid
};

struct EigenfunctionSample {
  double x;
  double psi;
};

class Shooter {
 public:
  /// Throws DomainError for anti-box, InvalidArgument for grids with fewer
  /// than 1000 points or an offset outside [1e-8, 1e-3] length scales.
  Shooter(const ModelSpec& model, const ShootingGrid& grid);

  MatchResult match(double energy) const;
  int sturm_count(double energy) const;

  /// Level k >= 0 to within `tol` (absolute, at least 1e-10 energy units).
  /// e_max <= 0 selects the default ceiling 1e4 energy units. Throws
  /// BracketFailure.
  double eigenvalue(int k, double tol, double e_max = 0.0) const;

  /// Polishes `energy` to working precision, integrates from the far wall
  /// across the domain, and fits log|psi| against log s for wall distances
  /// s in [1e-4, 1e-2] length scales. Throws FitFailure.
  double boundary_exponent(double energy) const;

  /// Assembled eigenfunction at `energy`, scaled to max |psi| = 1.
  std::vector<EigenfunctionSample> eigenfunction(double energy) const;

  /// Parity of the assembled eigenfunction; empty for half-ho.
  std::optional<Parity> parity(double energy) const;

  double energy_scale() const { return energy_scale_; }
  double length_scale() const { return length_scale_; }
  std::size_t match_index() const { return match_; }
  std::span<const double> x() const { return x_; }
  double step() const { return h_; }

 private:
  std::vector<double> coefficient(double energy) const;
  std::vector<double> integrate_left(const std::vector<double>& q, std::size_t stop,
                                     int* sign_changes) const;
  std::vector<double> integrate_right(const std::vector<double>& q, std::size_t stop) const;
  double mismatch(const std::vector<double>& left, const std::vector<double>& right) const;
  std::vector<double> assembled(const std::vector<double>& left, const std::vector<double>& right) const;
  double polish(double energy) const;

  ModelSpec model_;
  bool symmetric_ = false;
  double h_ = 0.0;
  double length_scale_ = 1.0;
  double energy_scale_ = 1.0;
  std::size_t match_ = 0;
  std::vector<double> x_;
  std::vector<double> a_;          // g = a - E b_
  std::vector<double> b_;
  std::vector<double> root_jac_;   // sqrt(dx/drho)
  std::vector<double> dlog_jac_;   // d log(dx/drho) / drho
  std::vector<double> wall_left_;  // distance to the left end of the domain
  double left_start_[2] = {0.0, 0.0};
  double right_start_[2] = {0.0, 0.0};
};

MatchResult numerov_integrate(const ModelSpec& model, double energy, const ShootingGrid& grid);

double eigenvalue_search(const ModelSpec& model, int k, double tol, const ShootingGrid& grid,
                         double e_max = 0.0);

double boundary_exponent_probe(const ModelSpec& model, double energy, const ShootingGrid& grid);

/// x,psi rows with a header line.
void write_eigenfunction_csv(std::ostream& out, std::span<const EigenfunctionSample> samples);

}  // namespace boxaffine
