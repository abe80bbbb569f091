#include "boxaffine/piecewise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "boxaffine/error.hpp"
#include "boxaffine/quadrature.hpp"

namespace boxaffine {

PiecewiseSmooth::PiecewiseSmooth(Interval ambient, std::vector<Piece> pieces)
    : ambient_(ambient), pieces_(std::move(pieces)) {
  if (!(ambient_.lo < ambient_.hi)) {
    throw Error(ErrorKind::InvalidArgument, "ambient interval must satisfy lo < hi");
  }
  if (pieces_.empty()) throw Error(ErrorKind::InvalidArgument, "at least one piece is required");
  if (pieces_.front().span.lo != ambient_.lo || pieces_.back().span.hi != ambient_.hi) {
    throw Error(ErrorKind::InvalidArgument, "pieces must start and end on the ambient interval");
  }
  const std::size_t rungs = pieces_.front().derivatives.size();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (!(p.span.lo < p.span.hi)) {
      throw Error(ErrorKind::InvalidArgument, "piece " + std::to_string(i) + " is empty");
    }
    if (i + 1 < pieces_.size() && p.span.hi != pieces_[i + 1].span.lo) {
      throw Error(ErrorKind::InvalidArgument,
                  "pieces " + std::to_string(i) + " and " + std::to_string(i + 1) +
                      " leave a gap or overlap");
    }
    if (p.derivatives.empty() || p.derivatives.size() != rungs) {
      throw Error(ErrorKind::InvalidArgument,
                  "every piece needs the same non-empty derivative ladder");
    }
  }
}

PiecewiseSmooth PiecewiseSmooth::single(Interval ambient, std::vector<Evaluator> derivatives) {
  return PiecewiseSmooth(ambient, {Piece{ambient, std::move(derivatives)}});
}

std::vector<double> PiecewiseSmooth::breakpoints() const {
  std::vector<double> points;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) points.push_back(pieces_[i].span.hi);
  return points;
}

std::size_t PiecewiseSmooth::piece_index(double x, Side side) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Interval s = pieces_[i].span;
    const bool inside = side == Side::left ? (s.lo < x && x <= s.hi) : (s.lo <= x && x < s.hi);
    if (inside) return i;
  }
  std::ostringstream msg;
  msg << "no piece approaches x = " << x << " from the " << (side == Side::left ? "left" : "right");
  throw Error(ErrorKind::DomainError, msg.str());
}

double PiecewiseSmooth::evaluate(double x, int order) const {
  if (order < 0 || order > max_order()) {
    throw Error(ErrorKind::InvalidArgument,
                "derivative order " + std::to_string(order) + " is not carried by the pieces");
  }
  if (x < ambient_.lo || x > ambient_.hi) return 0.0;
  if (x == ambient_.lo) return pieces_.front().derivatives[order](x);
  if (x == ambient_.hi) return pieces_.back().derivatives[order](x);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Interval s = pieces_[i].span;
    if (x == s.hi && i + 1 < pieces_.size()) {
      return 0.5 * (pieces_[i].derivatives[order](x) + pieces_[i + 1].derivatives[order](x));
    }
    if (s.lo <= x && x < s.hi) return pieces_[i].derivatives[order](x);
  }
  return 0.0;
}

PiecewiseSmooth PiecewiseSmooth::derivative() const {
  if (max_order() < 1) {
    throw Error(ErrorKind::InvalidArgument, "pieces carry no derivative evaluator");
  }
  std::vector<Piece> shifted;
  shifted.reserve(pieces_.size());
  for (const Piece& p : pieces_) {
    Piece q = p;
    q.derivatives.erase(q.derivatives.begin());
    shifted.push_back(std::move(q));
  }
  return PiecewiseSmooth(ambient_, std::move(shifted));
}

PiecewiseSmooth linear_combination(double alpha, const PiecewiseSmooth& f, double beta,
                                   const PiecewiseSmooth& g) {
  if (f.ambient().lo != g.ambient().lo || f.ambient().hi != g.ambient().hi) {
    throw Error(ErrorKind::InvalidArgument, "linear combination needs a common ambient interval");
  }
  std::vector<double> cuts{f.ambient().lo, f.ambient().hi};
  for (double x : f.breakpoints()) cuts.push_back(x);
  for (double x : g.breakpoints()) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const int rungs = std::min(f.max_order(), g.max_order()) + 1;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const Piece& pf = f.pieces()[f.piece_index(mid, Side::right)];
    const Piece& pg = g.pieces()[g.piece_index(mid, Side::right)];
    Piece combined;
    combined.span = {cuts[i], cuts[i + 1]};
    for (int k = 0; k < rungs; ++k) {
      combined.derivatives.push_back(
          [alpha, beta, ef = pf.derivatives[k], eg = pg.derivatives[k]](double x) {
            return alpha * ef(x) + beta * eg(x);
          });
    }
    combined.singular_lo = (pf.singular_lo && pf.span.lo == cuts[i]) ||
                           (pg.singular_lo && pg.span.lo == cuts[i]);
    combined.singular_hi = (pf.singular_hi && pf.span.hi == cuts[i + 1]) ||
                           (pg.singular_hi && pg.span.hi == cuts[i + 1]);
    pieces.push_back(std::move(combined));
  }
  return PiecewiseSmooth(f.ambient(), std::move(pieces));
}

namespace {

// Richardson extrapolation of g(x0 -+ eps) as eps -> 0, assuming an error
// expansion in integer powers of eps. Divergence shows up as raw differences
// that stop shrinking.
LimitResult extrapolated_limit(const Evaluator& g, double x0, double direction, double eps0) {
  constexpr int kLevels = 14;
  constexpr int kColumns = 4;
  std::array<double, kLevels> raw{};
  for (int k = 0; k < kLevels; ++k) {
    raw[k] = g(x0 + direction * std::ldexp(eps0, -k));
    if (!std::isfinite(raw[k])) return {raw[k], false};
  }
  const double last_step = std::abs(raw[kLevels - 1] - raw[kLevels - 2]);
  const double prev_step = std::abs(raw[kLevels - 2] - raw[kLevels - 3]);
  const double scale = std::max(1.0, std::abs(raw[kLevels - 1]));
  if (last_step > 1e-12 * scale && last_step >= 0.95 * prev_step) {
    return {std::numeric_limits<double>::infinity(), false};
  }

  std::array<std::array<double, kColumns + 1>, kLevels> table{};
  for (int k = 0; k < kLevels; ++k) {
    table[k][0] = raw[k];
    for (int j = 1; j <= std::min(k, kColumns); ++j) {
      const double factor = std::ldexp(1.0, j);
      table[k][j] = (factor * table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0);
    }
  }
  return {table[kLevels - 1][kColumns], true};
}

}  // namespace

LimitResult one_sided_limit(const Piece& piece, double x0, Side side, int order) {
  if (order < 0 || order > piece.max_order()) {
    throw Error(ErrorKind::InvalidArgument, "derivative order not carried by the piece");
  }
  const Interval s = piece.span;
  const bool reachable = side == Side::left ? (s.lo < x0 && x0 <= s.hi) : (s.lo <= x0 && x0 < s.hi);
  if (!reachable) {
    std::ostringstream msg;
    msg << "x0 = " << x0 << " is not approached by the piece [" << s.lo << ", " << s.hi << "]";
    throw Error(ErrorKind::DomainError, msg.str());
  }
  const Evaluator& g = piece.derivatives[order];
  const bool singular =
      (side == Side::left && x0 == s.hi && piece.singular_hi) ||
      (side == Side::right && x0 == s.lo && piece.singular_lo);
  if (singular) {
    const double direction = side == Side::left ? -1.0 : 1.0;
    return extrapolated_limit(g, x0, direction, 1e-2 * s.length());
  }
  const double value = g(x0);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "evaluator of order " << order << " is not finite at x0 = " << x0;
    throw Error(ErrorKind::NonFinite, msg.str());
  }
  return {value, true};
}

LimitResult one_sided_limit(const PiecewiseSmooth& f, double x0, Side side, int order) {
  return one_sided_limit(f.pieces()[f.piece_index(x0, side)], x0, side, order);
}

namespace {

std::vector<DeltaTerm> jumps_of_order(const PiecewiseSmooth& f, int order) {
  std::vector<DeltaTerm> terms;
  for (double x0 : f.breakpoints()) {
    const LimitResult left = one_sided_limit(f, x0, Side::left, order);
    const LimitResult right = one_sided_limit(f, x0, Side::right, order);
    if (!left.finite || !right.finite) {
      std::ostringstream msg;
      msg << "one-sided limit of derivative order " << order << " diverges at x = " << x0;
      throw Error(ErrorKind::NonFinite, msg.str());
    }
    const double jump = right.value - left.value;
    if (std::abs(jump) > kJumpThreshold) terms.push_back({x0, jump});
  }
  return terms;
}

}  // namespace

WeakDerivative weak_derivative(const PiecewiseSmooth& f) {
  return WeakDerivative{f.derivative(), jumps_of_order(f, 0), {}};
}

WeakDerivative weak_second_derivative(const PiecewiseSmooth& f) {
  if (f.max_order() < 2) {
    throw Error(ErrorKind::InvalidArgument, "weak second derivative needs second-derivative evaluators");
  }
  return WeakDerivative{f.derivative().derivative(), jumps_of_order(f, 1), jumps_of_order(f, 0)};
}

double l2_norm_squared(const WeakDerivative& w, Interval interval) {
  const Interval ambient = w.smooth_part.ambient();
  if (!(interval.lo <= interval.hi) || interval.lo < ambient.lo || interval.hi > ambient.hi) {
    throw Error(ErrorKind::DomainError, "integration interval must lie in the ambient interval");
  }
  const auto inside = [&](const DeltaTerm& d) { return interval.contains(d.location); };
  if (std::any_of(w.delta_terms.begin(), w.delta_terms.end(), inside) ||
      std::any_of(w.delta_prime_terms.begin(), w.delta_prime_terms.end(), inside)) {
    return std::numeric_limits<double>::infinity();
  }
  double total = 0.0;
  for (const Piece& p : w.smooth_part.pieces()) {
    const double a = std::max(p.span.lo, interval.lo);
    const double b = std::min(p.span.hi, interval.hi);
    if (!(a < b)) continue;
    const Evaluator& g = p.derivatives[0];
    total += integrate_adaptive([&g](double x) { const double v = g(x); return v * v; }, a, b, 1e-10);
  }
  return total;
}

double discrete_second_derivative_norm(const PiecewiseSmooth& f, double h, MeshSampling sampling) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "mesh spacing must be positive");
  const Interval ambient = f.ambient();
  const double cells = ambient.length() / h;
  const long n = std::lround(cells);
  if (n < 4 || std::abs(cells - static_cast<double>(n)) > 1e-9 * cells) {
    throw Error(ErrorKind::InvalidArgument, "mesh spacing must divide the ambient interval");
  }
  const auto node = [&](long i) { return ambient.lo + static_cast<double>(i) * h; };
  const long first = sampling == MeshSampling::full ? -2 : 2;
  const long last = sampling == MeshSampling::full ? n + 2 : n - 2;
  const double inv = 1.0 / (4.0 * h * h);
  double sum = 0.0;
  for (long i = first; i <= last; ++i) {
    const double d2 = (f(node(i + 2)) - 2.0 * f(node(i)) + f(node(i - 2))) * inv;
    sum += d2 * d2;
  }
  return h * sum;
}

PiecewiseSmooth ramp_function(Interval ambient, double kink, double slope) {
  if (!(ambient.lo < kink && kink < ambient.hi)) {
    throw Error(ErrorKind::InvalidArgument, "ramp kink must lie inside the ambient interval");
  }
  const Evaluator zero = [](double) { return 0.0; };
  Piece floor{{ambient.lo, kink}, {zero, zero, zero, zero}};
  Piece door{{kink, ambient.hi},
             {[=](double x) { return slope * (x - kink); }, [=](double) { return slope; }, zero, zero}};
  return PiecewiseSmooth(ambient, {std::move(floor), std::move(door)});
}

}  // namespace boxaffine
