#include "boxaffine/analytic_box.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi u) and cos(pi u) with the argument reduced in units of pi first, so
// integer and half-integer u give exact zeros.
double sin_pi(double u) {
  const double r = std::remainder(u, 2.0);  // r in [-1, 1]
  if (r > 0.5) return std::sin(kPi * (1.0 - r));
  if (r < -0.5) return -std::sin(kPi * (1.0 + r));
  return std::sin(kPi * r);
}

void require_level(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "mode index must be >= 1, got " + std::to_string(n));
}

}  // namespace

void validate(const BoxGeometry& geom) {
  if (!(std::isfinite(geom.b) && geom.b > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "b must be > 0 and finite");
  }
  if (!(std::isfinite(geom.hbar) && geom.hbar > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "hbar must be > 0 and finite");
  }
}

TrigMode cq_mode(int n) {
  require_level(n);
  return {n, n % 2 == 1 ? TrigKind::cosine : TrigKind::sine};
}

double trig_mode_value(const TrigMode& mode, double x, const BoxGeometry& geom, int order) {
  require_level(mode.n);
  // d/dx shifts the phase by a quarter period and multiplies by k.
  const double u = 0.5 * mode.n * (x / geom.b);
  const double k = mode.n * kPi / (2.0 * geom.b);
  const double phase = mode.kind == TrigKind::sine ? u : u + 0.5;
  return std::pow(k, order) * sin_pi(phase + 0.5 * order);
}

double cq_eigenfunction(int n, double x, const BoxGeometry& geom) {
  if (std::abs(x) >= geom.b) return 0.0;
  return trig_mode_value(cq_mode(n), x, geom, 0);
}

double cq_eigenfunction_derivative(int n, double x, const BoxGeometry& geom, int order) {
  if (std::abs(x) >= geom.b) {
    throw Error(ErrorKind::DomainError, "eigenfunction derivatives are taken inside the box");
  }
  return trig_mode_value(cq_mode(n), x, geom, order);
}

double cq_eigenvalue(int n, const BoxGeometry& geom) {
  require_level(n);
  const double k = n * kPi / (2.0 * geom.b);
  return geom.hbar * geom.hbar * k * k;
}

CqLevel cq_level(int n, const BoxGeometry& geom) {
  return {n, cq_eigenvalue(n, geom), cq_mode(n)};
}

double cq_norm_squared(int n, const BoxGeometry& geom) {
  require_level(n);
  return geom.b;
}

ModeClassification classify_trig_modes(int max_n, const BoxGeometry& geom) {
  if (max_n < 1) throw Error(ErrorKind::InvalidArgument, "mode count must be >= 1");
  ModeClassification result;
  for (int n = 1; n <= max_n; ++n) {
    for (TrigKind kind : {TrigKind::cosine, TrigKind::sine}) {
      const TrigMode mode{n, kind};
      const bool vanishes = std::abs(trig_mode_value(mode, -geom.b, geom)) < 1e-12 &&
                            std::abs(trig_mode_value(mode, geom.b, geom)) < 1e-12;
      (vanishes ? result.accepted : result.rejected).push_back(mode);
    }
  }
  return result;
}

PiecewiseSmooth cq_zero_extended(int n, const BoxGeometry& geom) {
  const TrigMode mode = cq_mode(n);
  const double b = geom.b;
  const Evaluator zero = [](double) { return 0.0; };
  std::vector<Evaluator> ladder;
  for (int order = 0; order <= 3; ++order) {
    ladder.push_back([mode, geom, order](double x) { return trig_mode_value(mode, x, geom, order); });
  }
  return PiecewiseSmooth({-2.0 * b, 2.0 * b},
                         {Piece{{-2.0 * b, -b}, {zero, zero, zero, zero}},
                          Piece{{-b, b}, std::move(ladder)},
                          Piece{{b, 2.0 * b}, {zero, zero, zero, zero}}});
}

}  // namespace boxaffine
