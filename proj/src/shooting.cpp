#include "boxaffine/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

constexpr std::size_t kMinPoints = 1000;
constexpr std::size_t kRescaleInterval = 512;
constexpr double kRescaleThreshold = 1e100;
constexpr double kHalfHoExtent = 12.0;  // outer wall at 12 sqrt(hbar)

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Counts a sign change between consecutive non-zero values.
struct SignTracker {
  int last = 0;
  int changes = 0;
  void push(double v) {
    const int s = sign_of(v);
    if (s == 0) return;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
};

bool close_to(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * scale; }

}  // namespace

ShootingGrid default_grid(const ModelSpec& model, std::size_t points, double relative_offset,
                          GridMapping mapping) {
  validate(model);
  const double scale = length_scale(model);
  const double eps = relative_offset * scale;
  if (const auto* m = std::get_if<CqBox>(&model)) {
    return {-m->geom.b, m->geom.b, points, 0.0, GridMapping::uniform};
  }
  if (const auto* m = std::get_if<AqBox>(&model)) {
    return {-m->geom.b + eps, m->geom.b - eps, points, eps, mapping};
  }
  if (const auto* m = std::get_if<HalfHarmonic>(&model)) {
    return {eps, kHalfHoExtent * std::sqrt(m->hbar), points, eps, mapping};
  }
  throw Error(ErrorKind::DomainError, "shooting does not handle the anti-box");
}

Shooter::Shooter(const ModelSpec& model, const ShootingGrid& grid) : model_(model) {
  validate(model);
  if (std::holds_alternative<AntiBox>(model)) {
    throw Error(ErrorKind::DomainError, "shooting does not handle the anti-box");
  }
  const std::size_t n = grid.points;
  if (n < kMinPoints) {
    throw Error(ErrorKind::InvalidArgument, "shooting grids need at least 1000 points");
  }
  length_scale_ = boxaffine::length_scale(model);
  const double eps = grid.offset;
  if (!std::holds_alternative<CqBox>(model) &&
      !(eps >= 1e-8 * length_scale_ && eps <= 1e-3 * length_scale_)) {
    throw Error(ErrorKind::InvalidArgument,
                "wall offset must lie in [1e-8, 1e-3] domain length scales");
  }

  x_.resize(n);
  a_.resize(n);
  b_.resize(n);
  root_jac_.assign(n, 1.0);
  dlog_jac_.assign(n, 0.0);
  wall_left_.resize(n);
  const double last = static_cast<double>(n - 1);

  if (const auto* m = std::get_if<CqBox>(&model)) {
    const double b = m->geom.b;
    const double hbar = m->geom.hbar;
    if (!close_to(grid.x_min, -b, b) || !close_to(grid.x_max, b, b)) {
      throw Error(ErrorKind::InvalidArgument, "cq-box grid must run wall to wall");
    }
    symmetric_ = true;
    energy_scale_ = hbar * hbar / (b * b);
    h_ = 2.0 * b / last;
    for (std::size_t i = 0; i < n; ++i) {
      wall_left_[i] = static_cast<double>(i) * h_;
      x_[i] = -b + wall_left_[i];
      a_[i] = 0.0;
      b_[i] = 1.0 / (hbar * hbar);
    }
    x_.back() = b;
    left_start_[0] = right_start_[0] = 0.0;
    left_start_[1] = right_start_[1] = h_;
  } else if (const auto* m = std::get_if<AqBox>(&model)) {
    const double b = m->geom.b;
    const double hbar = m->geom.hbar;
    if (!close_to(grid.x_min, -b + eps, b) || !close_to(grid.x_max, b - eps, b)) {
      throw Error(ErrorKind::InvalidArgument, "aq-box grid must stop one offset from each wall");
    }
    symmetric_ = true;
    energy_scale_ = hbar * hbar / (b * b);
    std::vector<double> wall_right(n);
    if (grid.mapping == GridMapping::uniform) {
      h_ = (2.0 * b - 2.0 * eps) / last;
      for (std::size_t i = 0; i < n; ++i) {
        wall_left_[i] = eps + static_cast<double>(i) * h_;
        wall_right[i] = eps + static_cast<double>(n - 1 - i) * h_;
        x_[i] = -b + wall_left_[i];
        const double gap = wall_left_[i] * wall_right[i];
        a_[i] = (2.0 * x_[i] * x_[i] + b * b) / (gap * gap);
        b_[i] = 1.0 / (hbar * hbar);
      }
    } else {
      // x = b tanh(rho); the nearer wall sits at distance 2b / (e^{2|rho|} + 1).
      const double reach = 0.5 * std::log((2.0 * b - eps) / eps);
      h_ = 2.0 * reach / last;
      for (std::size_t i = 0; i < n; ++i) {
        const double rho = -reach + static_cast<double>(i) * h_;
        const double near = 2.0 * b / (std::exp(2.0 * std::abs(rho)) + 1.0);
        const double far = 2.0 * b - near;
        wall_left_[i] = rho < 0.0 ? near : far;
        wall_right[i] = rho < 0.0 ? far : near;
        x_[i] = rho < 0.0 ? -b + near : b - near;
        const double jac = wall_left_[i] * wall_right[i] / b;
        const double t = x_[i] / b;
        a_[i] = 2.0 + 2.0 * t * t;
        b_[i] = jac * jac / (hbar * hbar);
        root_jac_[i] = std::sqrt(jac);
        dlog_jac_[i] = -2.0 * std::tanh(rho);
      }
    }
    left_start_[0] = std::pow(wall_left_[0], 1.5) / root_jac_[0];
    left_start_[1] = std::pow(wall_left_[1], 1.5) / root_jac_[1];
    right_start_[0] = std::pow(wall_right[n - 1], 1.5) / root_jac_[n - 1];
    right_start_[1] = std::pow(wall_right[n - 2], 1.5) / root_jac_[n - 2];
  } else if (const auto* m = std::get_if<HalfHarmonic>(&model)) {
    const double hbar = m->hbar;
    if (!close_to(grid.x_min, eps, length_scale_) || !(grid.x_max > 1.0 * length_scale_)) {
      throw Error(ErrorKind::InvalidArgument, "half-ho grid must start one offset from x = 0");
    }
    energy_scale_ = hbar;
    const double h2 = hbar * hbar;
    if (grid.mapping == GridMapping::uniform) {
      h_ = (grid.x_max - eps) / last;
      for (std::size_t i = 0; i < n; ++i) {
        x_[i] = eps + static_cast<double>(i) * h_;
        a_[i] = 0.75 / (x_[i] * x_[i]) + x_[i] * x_[i] / h2;
        b_[i] = 2.0 / h2;
      }
    } else {
      // x = e^rho; psi = sqrt(x) phi.
      const double lo = std::log(eps);
      h_ = (std::log(grid.x_max) - lo) / last;
      for (std::size_t i = 0; i < n; ++i) {
        x_[i] = std::exp(lo + static_cast<double>(i) * h_);
        const double x2 = x_[i] * x_[i];
        a_[i] = 1.0 + x2 * x2 / h2;
        b_[i] = 2.0 * x2 / h2;
        root_jac_[i] = std::sqrt(x_[i]);
        dlog_jac_[i] = 1.0;
      }
    }
    x_.front() = eps;
    wall_left_ = x_;
    left_start_[0] = std::pow(x_[0], 1.5) / root_jac_[0];
    left_start_[1] = std::pow(x_[1], 1.5) / root_jac_[1];
    right_start_[0] = 0.0;
    right_start_[1] = h_;
  }

  if (grid.mapping == GridMapping::uniform && !std::holds_alternative<CqBox>(model)) {
    const double worst = h_ * h_ * *std::max_element(a_.begin(), a_.end()) / 12.0;
    if (!(worst < 0.5)) {
      throw Error(ErrorKind::InvalidArgument,
                  "uniform grid step is too coarse for the wall offset; raise the offset or the point count");
    }
  }

  // Match at the potential minimum (the box centre for cq-box).
  if (std::holds_alternative<CqBox>(model)) {
    match_ = (n - 1) / 2;
  } else {
    const Potential v = make_potential(model);
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (v.evaluate(x_[i]) < v.evaluate(x_[best])) best = i;
    }
    match_ = best;
  }
  match_ = std::clamp<std::size_t>(match_, 2, n - 3);
}

std::vector<double> Shooter::coefficient(double energy) const {
  if (!std::isfinite(energy)) throw Error(ErrorKind::NonFinite, "trial energy is not finite");
  std::vector<double> q(a_.size());
  const double w = h_ * h_ / 12.0;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = w * (a_[i] - energy * b_[i]);
  return q;
}

// Numerov on phi'' = g phi with q = h^2 g / 12, carried as y = (1 - q) phi:
//   y_{i+1} = 2 y_i - y_{i-1} + 12 q_i phi_i.
// Keeping q out of the subtraction 1 - q preserves energy resolution at fine steps.
std::vector<double> Shooter::integrate_left(const std::vector<double>& q, std::size_t stop,
                                            int* sign_changes) const {
  std::vector<double> phi(stop + 1, 0.0);
  phi[0] = left_start_[0];
  phi[1] = left_start_[1];
  double y_prev = (1.0 - q[0]) * phi[0];
  double y = (1.0 - q[1]) * phi[1];
  SignTracker tracker;
  tracker.push(phi[0]);
  tracker.push(phi[1]);
  for (std::size_t i = 1; i < stop; ++i) {
    const double y_next = 2.0 * y - y_prev + 12.0 * q[i] * phi[i];
    phi[i + 1] = y_next / (1.0 - q[i + 1]);
    y_prev = y;
    y = y_next;
    tracker.push(phi[i + 1]);
    if (i % kRescaleInterval == 0) {
      const double peak = std::max(std::abs(phi[i]), std::abs(phi[i + 1]));
      if (peak > kRescaleThreshold) {
        for (std::size_t j = 0; j <= i + 1; ++j) phi[j] /= peak;
        y_prev /= peak;
        y /= peak;
      }
    }
  }
  if (sign_changes != nullptr) *sign_changes = tracker.changes;
  return phi;
}

std::vector<double> Shooter::integrate_right(const std::vector<double>& q, std::size_t stop) const {
  const std::size_t n = q.size();
  std::vector<double> phi(n, 0.0);
  phi[n - 1] = right_start_[0];
  phi[n - 2] = right_start_[1];
  double y_prev = (1.0 - q[n - 1]) * phi[n - 1];
  double y = (1.0 - q[n - 2]) * phi[n - 2];
  std::size_t steps = 0;
  for (std::size_t i = n - 2; i > stop; --i) {
    const double y_next = 2.0 * y - y_prev + 12.0 * q[i] * phi[i];
    phi[i - 1] = y_next / (1.0 - q[i - 1]);
    y_prev = y;
    y = y_next;
    if (++steps % kRescaleInterval == 0) {
      const double peak = std::max(std::abs(phi[i]), std::abs(phi[i - 1]));
      if (peak > kRescaleThreshold) {
        for (std::size_t j = i - 1; j < n; ++j) phi[j] /= peak;
        y_prev /= peak;
        y /= peak;
      }
    }
  }
  return phi;
}

namespace {

struct PhasePoint {
  double psi;
  double slope;  // d psi / dx
};

}  // namespace

double Shooter::mismatch(const std::vector<double>& left, const std::vector<double>& right) const {
  const std::size_t m = match_;
  const auto phase = [&](const std::vector<double>& phi) {
    const double d_rho = (phi[m + 1] - phi[m - 1]) / (2.0 * h_);
    return PhasePoint{root_jac_[m] * phi[m], (d_rho + 0.5 * dlog_jac_[m] * phi[m]) / root_jac_[m]};
  };
  const PhasePoint l = phase(left);
  const PhasePoint r = phase(right);
  const double ell = length_scale_;
  const double value = (l.slope * r.psi - l.psi * r.slope) /
                       (std::hypot(l.psi, ell * l.slope) * std::hypot(r.psi, ell * r.slope));
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::NonFinite, "match-point mismatch is not finite");
  }
  return value;
}

std::vector<double> Shooter::assembled(const std::vector<double>& left,
                                       const std::vector<double>& right) const {
  const std::size_t m = match_;
  const double ell = length_scale_;
  const double dl = (left[m + 1] - left[m - 1]) / (2.0 * h_);
  const double dr = (right[m + 1] - right[m - 1]) / (2.0 * h_);
  // Least-squares scale of the right solution onto (phi, l phi') of the left.
  const double c = (left[m] * right[m] + ell * ell * dl * dr) / (right[m] * right[m] + ell * ell * dr * dr);
  std::vector<double> phi(x_.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = i <= m ? left[i] : c * right[i];
  return phi;
}

MatchResult Shooter::match(double energy) const {
  const std::vector<double> f = coefficient(energy);
  MatchResult result;
  result.energy = energy;
  const std::vector<double> left = integrate_left(f, f.size() - 1, &result.sturm_count);
  const std::vector<double> right = integrate_right(f, match_ - 1);
  result.log_derivative_mismatch = mismatch(left, right);
  SignTracker tracker;
  for (double v : assembled(left, right)) tracker.push(v);
  result.node_count = tracker.changes;
  return result;
}

int Shooter::sturm_count(double energy) const {
  const std::vector<double> f = coefficient(energy);
  int changes = 0;
  integrate_left(f, f.size() - 1, &changes);
  return changes;
}

double Shooter::eigenvalue(int k, double tol, double e_max) const {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "level index must be >= 0");
  if (!(tol >= 1e-10 * energy_scale_)) {
    throw Error(ErrorKind::InvalidArgument, "energy tolerance must be at least 1e-10 energy units");
  }
  const double ceiling = e_max > 0.0 ? e_max : 1e4 * energy_scale_;

  // Below min(a/b) the coefficient g = a - E b is positive everywhere and
  // no solution oscillates.
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a_.size(); ++i) lo = std::min(lo, a_[i] / b_[i]);
  lo -= 1e-9 * energy_scale_;
  if (sturm_count(lo) > k) {
    throw Error(ErrorKind::BracketFailure, "lower side: more than k nodes at the energy floor");
  }

  double step = energy_scale_;
  double hi = lo + step;
  while (sturm_count(hi) <= k) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (hi > ceiling) {
      std::ostringstream msg;
      msg << "upper side: no node transition to " << k + 1 << " below E_max = " << ceiling;
      throw Error(ErrorKind::BracketFailure, msg.str());
    }
  }

  // Narrow until the bracket holds exactly level k.
  int count_lo = sturm_count(lo);
  int count_hi = sturm_count(hi);
  for (int iter = 0; !(count_lo == k && count_hi == k + 1); ++iter) {
    if (iter > 200) {
      throw Error(ErrorKind::BracketFailure, "lower side: could not isolate level " + std::to_string(k));
    }
    const double mid = 0.5 * (lo + hi);
    const int count_mid = sturm_count(mid);
    if (count_mid <= k) {
      lo = mid;
      count_lo = count_mid;
    } else {
      hi = mid;
      count_hi = count_mid;
    }
  }

  const double d_lo = match(lo).log_derivative_mismatch;
  const double d_hi = match(hi).log_derivative_mismatch;
  const bool by_mismatch = sign_of(d_lo) != sign_of(d_hi);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool lower_half = by_mismatch ? sign_of(match(mid).log_derivative_mismatch) == sign_of(d_lo)
                                        : sturm_count(mid) <= k;
    (lower_half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Shooter::polish(double energy) const {
  double width = std::max(1e-9 * std::abs(energy), 1e-12 * energy_scale_);
  double lo = energy - width;
  double hi = energy + width;
  double d_lo = match(lo).log_derivative_mismatch;
  double d_hi = match(hi).log_derivative_mismatch;
  for (int widen = 0; sign_of(d_lo) == sign_of(d_hi); ++widen) {
    if (widen == 6) {
      throw Error(ErrorKind::FitFailure, "energy is not close to a converged eigenvalue");
    }
    width *= 10.0;
    lo = energy - width;
    hi = energy + width;
    d_lo = match(lo).log_derivative_mismatch;
    d_hi = match(hi).log_derivative_mismatch;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d_mid = match(mid).log_derivative_mismatch;
    if (d_mid == 0.0) return mid;
    (sign_of(d_mid) == sign_of(d_lo) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Shooter::boundary_exponent(double energy) const {
  const double polished = polish(energy);
  const std::vector<double> f = coefficient(polished);
  const std::vector<double> phi = integrate_right(f, 0);
  const double lo = 1e-4 * length_scale_;
  const double hi = 1e-2 * length_scale_;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double s = wall_left_[i];
    const double psi = root_jac_[i] * phi[i];
    if (s < lo || s > hi || psi == 0.0) continue;
    const double u = std::log(s);
    const double v = std::log(std::abs(psi));
    sx += u;
    sy += v;
    sxx += u * u;
    sxy += u * v;
    ++count;
  }
  if (count < 20) {
    throw Error(ErrorKind::FitFailure,
                "only " + std::to_string(count) + " grid points fall in the fit window");
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::vector<EigenfunctionSample> Shooter::eigenfunction(double energy) const {
  const std::vector<double> f = coefficient(energy);
  const std::vector<double> left = integrate_left(f, match_ + 1, nullptr);
  const std::vector<double> right = integrate_right(f, match_ - 1);
  std::vector<double> full_left(x_.size(), 0.0);
  std::copy(left.begin(), left.end(), full_left.begin());
  const std::vector<double> phi = assembled(full_left, right);
  std::vector<EigenfunctionSample> samples(x_.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    samples[i] = {x_[i], root_jac_[i] * phi[i]};
    peak = std::max(peak, std::abs(samples[i].psi));
  }
  if (peak > 0.0) {
    for (auto& s : samples) s.psi /= peak;
  }
  return samples;
}

std::optional<Parity> Shooter::parity(double energy) const {
  if (!symmetric_) return std::nullopt;
  const std::vector<EigenfunctionSample> psi = eigenfunction(energy);
  double even = 0.0;
  double odd = 0.0;
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double plus = psi[i].psi + psi[n - 1 - i].psi;
    const double minus = psi[i].psi - psi[n - 1 - i].psi;
    even += plus * plus;
    odd += minus * minus;
  }
  return even >= odd ? Parity::even : Parity::odd;
}

MatchResult numerov_integrate(const ModelSpec& model, double energy, const ShootingGrid& grid) {
  return Shooter(model, grid).match(energy);
}

double eigenvalue_search(const ModelSpec& model, int k, double tol, const ShootingGrid& grid,
                         double e_max) {
  return Shooter(model, grid).eigenvalue(k, tol, e_max);
}

double boundary_exponent_probe(const ModelSpec& model, double energy, const ShootingGrid& grid) {
  return Shooter(model, grid).boundary_exponent(energy);
}

void write_eigenfunction_csv(std::ostream& out, std::span<const EigenfunctionSample> samples) {
  const auto old_precision = out.precision(17);
  out << "x,psi\n";
  for (const auto& s : samples) out << s.x << ',' << s.psi << '\n';
  out.precision(old_precision);
}

}  // namespace boxaffine
