#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "boxaffine/analytic_box.hpp"
#include "boxaffine/error.hpp"
#include "boxaffine/piecewise.hpp"

using namespace boxaffine;
using std::numbers::pi;

namespace {

Piece quadratic(double lo, double hi, double a, double b, double c) {
  return Piece{{lo, hi},
               {[=](double x) { return a + b * x + c * x * x; }, [=](double x) { return b + 2 * c * x; },
                [=](double) { return 2 * c; }}};
}

PiecewiseSmooth constant(double v) {
  return PiecewiseSmooth::single({-1, 1}, {[=](double) { return v; }, [](double) { return 0.0; },
                                           [](double) { return 0.0; }});
}

double oracle_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

double slope_of(const PiecewiseSmooth& f, MeshSampling sampling, double unit = 1.0, int k_min = 6,
                int k_max = 12) {
  std::vector<double> xs, ys;
  for (int k = k_min; k <= k_max; ++k) {
    const double h = std::ldexp(unit, -k);
    xs.push_back(std::log(h));
    ys.push_back(std::log(discrete_second_derivative_norm(f, h, sampling)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Random piecewise quadratic on [-1, 1] with `pieces` pieces; jumps in the
// value are allowed unless `continuous`.
PiecewiseSmooth random_piecewise(std::mt19937_64& rng, int pieces, bool continuous) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> cuts;
  for (int i = 1; i < pieces; ++i) cuts.push_back(-1.0 + 2.0 * i / pieces + 0.1 * u(rng) / pieces);
  std::vector<Piece> out;
  double lo = -1.0;
  double prev_value = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double hi = i + 1 < pieces ? cuts[i] : 1.0;
    const double b = u(rng);
    const double c = u(rng);
    double a = u(rng);
    if (continuous && i > 0) a = prev_value - b * lo - c * lo * lo;
    out.push_back(quadratic(lo, hi, a, b, c));
    prev_value = a + b * hi + c * hi * hi;
    lo = hi;
  }
  return PiecewiseSmooth({-1.0, 1.0}, std::move(out));
}

}  // namespace

TEST_CASE("one-sided limits of the ramp slope at its kink") {
  const PiecewiseSmooth f = ramp_function();
  CHECK(one_sided_limit(f, 0.0, Side::right, 1).value == 1.0);
  CHECK(one_sided_limit(f, 0.0, Side::left, 1).value == 0.0);
  CHECK(one_sided_limit(f, 0.0, Side::right, 1).finite);
}

TEST_CASE("one-sided limit of the ground-state slope at the right wall") {
  const PiecewiseSmooth phi = cq_zero_extended(1, {1.0, 1.0});
  // oracle: d/dx cos(pi x / 2) at x = 1
  const double expected = -pi / 2 * std::sin(pi / 2);
  CHECK(one_sided_limit(phi, 1.0, Side::left, 1).value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(one_sided_limit(phi, 1.0, Side::right, 1).value == 0.0);
}

TEST_CASE("singular endpoints are extrapolated and divergence is reported") {
  Piece sinc{{-1.0, 0.0},
             {[](double x) { return std::sin(x) / x; }},
             false,
             true};
  const LimitResult r = one_sided_limit(sinc, 0.0, Side::left);
  CHECK(r.finite);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

  Piece pole{{0.0, 1.0}, {[](double x) { return 1.0 / x; }}, true, false};
  CHECK_FALSE(one_sided_limit(pole, 0.0, Side::right).finite);

  Piece undeclared{{0.0, 1.0}, {[](double x) { return 1.0 / x; }}};
  CHECK_THROWS_AS(one_sided_limit(undeclared, 0.0, Side::right), Error);
}

TEST_CASE("weak first derivative: ramp, constant, step") {
  const WeakDerivative ramp = weak_derivative(ramp_function());
  CHECK(ramp.delta_terms.empty());
  CHECK(ramp.delta_prime_terms.empty());
  CHECK(ramp.smooth_part.evaluate(-0.5) == 0.0);
  CHECK(ramp.smooth_part.evaluate(0.5) == 1.0);

  const WeakDerivative flat = weak_derivative(constant(3.0));
  CHECK(flat.delta_terms.empty());
  CHECK(flat.smooth_part.evaluate(0.3) == 0.0);

  const auto zero = [](double) { return 0.0; };
  const auto one = [](double) { return 1.0; };
  const PiecewiseSmooth step({-1, 1}, {Piece{{-1, 0}, {zero, zero}}, Piece{{0, 1}, {one, zero}}});
  const WeakDerivative d = weak_derivative(step);
  REQUIRE(d.delta_terms.size() == 1);
  CHECK(d.delta_terms[0].location == 0.0);
  CHECK(d.delta_terms[0].coefficient == 1.0);
}

TEST_CASE("weak second derivative of the ramp is a unit delta at the kink") {
  const WeakDerivative w = weak_second_derivative(ramp_function());
  REQUIRE(w.delta_terms.size() == 1);
  CHECK(w.delta_terms[0].location == 0.0);
  CHECK(w.delta_terms[0].coefficient == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.delta_prime_terms.empty());
  for (double x = -1.0; x <= 1.0; x += 0.125) CHECK(w.smooth_part.evaluate(x) == 0.0);
  CHECK(std::isinf(l2_norm_squared(w, {-1.0, 1.0})));
}

TEST_CASE("weak second derivative of the zero-extended ground state") {
  const PiecewiseSmooth phi = cq_zero_extended(1, {1.0, 1.0});
  const WeakDerivative w = weak_second_derivative(phi);
  REQUIRE(w.delta_terms.size() == 2);
  CHECK(w.delta_prime_terms.empty());
  for (const DeltaTerm& t : w.delta_terms) {
    CHECK(std::abs(t.location) == 1.0);
    // jump of phi' across the wall from the analytic one-sided limits
    const double expected = one_sided_limit(phi, t.location, Side::right, 1).value -
                            one_sided_limit(phi, t.location, Side::left, 1).value;
    CHECK(t.coefficient == doctest::Approx(expected).epsilon(1e-14));
    CHECK(t.coefficient == doctest::Approx(pi / 2).epsilon(1e-14));
  }
  for (double x : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
    CHECK(w.smooth_part.evaluate(x) == doctest::Approx(-(pi * pi / 4) * std::cos(pi * x / 2)).epsilon(1e-13));
  }
  CHECK(w.smooth_part.evaluate(1.5) == 0.0);
  CHECK(w.smooth_part.evaluate(-1.7) == 0.0);
}

TEST_CASE("alternative wall coefficients +-pi^2/8 with opposite signs are not what the jump rule gives") {
  // Recorded discrepancy: a derivation elsewhere quotes +pi^2/(8b^2) at x = -b
  // and -pi^2/(8b^2) at x = +b. The jump rule yields +pi/(2b) at both walls.
  for (double b : {1.0, 2.0}) {
    const WeakDerivative w = weak_second_derivative(cq_zero_extended(1, {b, 1.0}));
    REQUIRE(w.delta_terms.size() == 2);
    const double quoted_left = pi * pi / (8 * b * b);
    const double quoted_right = -pi * pi / (8 * b * b);
    CHECK(w.delta_terms[0].coefficient != doctest::Approx(quoted_left));
    CHECK(w.delta_terms[1].coefficient != doctest::Approx(quoted_right));
    CHECK(w.delta_terms[0].coefficient == doctest::Approx(pi / (2 * b)).epsilon(1e-14));
    CHECK(w.delta_terms[1].coefficient == doctest::Approx(pi / (2 * b)).epsilon(1e-14));
  }
}

TEST_CASE("smooth single piece has no deltas") {
  const PiecewiseSmooth g = PiecewiseSmooth::single(
      {-1, 1}, {[](double x) { return x * x; }, [](double x) { return 2 * x; }, [](double) { return 2.0; }});
  const WeakDerivative w = weak_second_derivative(g);
  CHECK(w.delta_terms.empty());
  CHECK(w.delta_prime_terms.empty());
  CHECK(w.smooth_part.evaluate(0.3) == 2.0);
  CHECK(w.l2_finite());
  CHECK(l2_norm_squared(w, {-1, 1}) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("weak second derivative needs second-derivative evaluators") {
  const PiecewiseSmooth f = PiecewiseSmooth::single({-1, 1}, {[](double x) { return x; }});
  CHECK_THROWS_AS(weak_second_derivative(f), Error);
}

TEST_CASE("L2 norm of the ground-state slope matches a quadrature oracle") {
  const WeakDerivative w = weak_derivative(cq_zero_extended(1, {1.0, 1.0}));
  CHECK(w.delta_terms.empty());
  const double oracle = oracle_integral(
      [](double x) {
        const double s = (pi / 2) * std::sin(pi * x / 2);
        return s * s;
      },
      -1.0, 1.0);
  CHECK(oracle == doctest::Approx(pi * pi / 4).epsilon(1e-13));
  CHECK(l2_norm_squared(w, {-1.0, 1.0}) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(l2_norm_squared(w, {-1.0, 1.0}) == doctest::Approx(2.467401).epsilon(1e-6));
}

TEST_CASE("L2 norm of the zero function is zero") {
  CHECK(l2_norm_squared(weak_second_derivative(constant(0.0)), {-1, 1}) == 0.0);
}

TEST_CASE("L2 of a delta outside the integration interval stays finite") {
  const WeakDerivative w = weak_second_derivative(ramp_function());
  CHECK(l2_norm_squared(w, {0.25, 1.0}) == 0.0);
  CHECK(std::isinf(l2_norm_squared(w, {0.0, 1.0})));
  CHECK_THROWS_AS(l2_norm_squared(w, {-2.0, 1.0}), Error);
}

TEST_CASE("discrete second-derivative norm of the ground state doubles when h halves") {
  const PiecewiseSmooth phi = cq_zero_extended(1, {1.0, 1.0});
  const double h = std::ldexp(1.0, -6);
  const double ratio = discrete_second_derivative_norm(phi, h / 2) / discrete_second_derivative_norm(phi, h);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("discrete norm of the zero function is zero") {
  CHECK(discrete_second_derivative_norm(constant(0.0), 1.0 / 64) == 0.0);
}

TEST_CASE("discrete norm preconditions") {
  CHECK_THROWS_AS(discrete_second_derivative_norm(ramp_function(), 0.0), Error);
  CHECK_THROWS_AS(discrete_second_derivative_norm(ramp_function(), 0.3), Error);
}

TEST_CASE("smooth recovery: interior sampling converges to the L2 norm at second order") {
  const PiecewiseSmooth g = PiecewiseSmooth::single(
      {-1, 1}, {[](double x) { return std::cos(pi * x / 2); },
                [](double x) { return -(pi / 2) * std::sin(pi * x / 2); },
                [](double x) { return -(pi * pi / 4) * std::cos(pi * x / 2); }});
  const double exact = l2_norm_squared(weak_second_derivative(g), {-1, 1});
  const double oracle = oracle_integral(
      [](double x) {
        const double v = (pi * pi / 4) * std::cos(pi * x / 2);
        return v * v;
      },
      -1.0, 1.0);
  CHECK(exact == doctest::Approx(oracle).epsilon(1e-10));

  std::vector<double> errors;
  for (int k = 5; k <= 9; ++k) {
    const double h = std::ldexp(1.0, -k);
    errors.push_back(std::abs(discrete_second_derivative_norm(g, h, MeshSampling::interior) - exact));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double order = std::log2(errors[i - 1] / errors[i]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.15));
  }
  CHECK(errors.back() < 1e-3);
}

TEST_CASE("divergence scaling: slope near -1 for continuous functions with a slope jump") {
  for (int n = 1; n <= 3; ++n) {
    CAPTURE(n);
    const double s = slope_of(cq_zero_extended(n, {1.0, 1.0}), MeshSampling::full);
    CHECK(s >= -1.1);
    CHECK(s <= -0.9);
  }
  // n = 4: the smooth part (~n^4) still competes with the wall spikes at
  // h = 2^-6, so the window fit sits near -0.87; finer meshes reach -1.
  const PiecewiseSmooth phi4 = cq_zero_extended(4, {1.0, 1.0});
  const double coarse = slope_of(phi4, MeshSampling::full);
  CHECK(coarse < -0.8);
  CHECK(coarse > -1.1);
  const double fine = slope_of(phi4, MeshSampling::full, 1.0, 10, 16);
  CHECK(fine >= -1.1);
  CHECK(fine <= -0.9);
  const double b = 2.0;
  const double sb = slope_of(cq_zero_extended(1, {b, 1.0}), MeshSampling::full, b);
  CHECK(sb >= -1.1);
  CHECK(sb <= -0.9);

  for (double kink : {0.0, 0.25, -0.5}) {
    CAPTURE(kink);
    const double s = slope_of(ramp_function({-1, 1}, kink, 1.7), MeshSampling::interior);
    CHECK(s >= -1.1);
    CHECK(s <= -0.9);
  }

  // x^2 for x < 1/2, then slope 3: a slope jump of 2 at a mesh point
  const PiecewiseSmooth bent({-1, 1}, {quadratic(-1, 0.5, 0, 0, 1), quadratic(0.5, 1, 0.25 - 1.5, 3, 0)});
  const double s = slope_of(bent, MeshSampling::interior);
  CHECK(s >= -1.1);
  CHECK(s <= -0.9);
}

TEST_CASE("property: delta coefficients equal one-sided limit jumps") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const PiecewiseSmooth f = random_piecewise(rng, 2 + trial % 5, trial % 2 == 0);
    const WeakDerivative w = weak_second_derivative(f);
    for (const DeltaTerm& t : w.delta_terms) {
      const double jump = one_sided_limit(f, t.location, Side::right, 1).value -
                          one_sided_limit(f, t.location, Side::left, 1).value;
      CHECK(std::abs(t.coefficient - jump) <= 1e-12);
    }
    for (const DeltaTerm& t : w.delta_prime_terms) {
      const double jump = one_sided_limit(f, t.location, Side::right, 0).value -
                          one_sided_limit(f, t.location, Side::left, 0).value;
      CHECK(std::abs(t.coefficient - jump) <= 1e-12);
    }
    // every breakpoint with a non-negligible jump appears
    for (double x0 : f.breakpoints()) {
      const double jump = one_sided_limit(f, x0, Side::right, 1).value -
                          one_sided_limit(f, x0, Side::left, 1).value;
      const bool listed = std::any_of(w.delta_terms.begin(), w.delta_terms.end(),
                                      [&](const DeltaTerm& t) { return t.location == x0; });
      CHECK(listed == (std::abs(jump) > kJumpThreshold));
    }
  }
}

TEST_CASE("property: weak second derivative is linear") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const PiecewiseSmooth f = random_piecewise(rng, 3, trial % 3 == 0);
    const PiecewiseSmooth g = random_piecewise(rng, 4, trial % 2 == 0);
    const double alpha = u(rng);
    const double beta = u(rng);
    const WeakDerivative wf = weak_second_derivative(f);
    const WeakDerivative wg = weak_second_derivative(g);
    const WeakDerivative wc = weak_second_derivative(linear_combination(alpha, f, beta, g));

    const auto coefficient_at = [](const std::vector<DeltaTerm>& terms, double x) {
      for (const auto& t : terms) {
        if (t.location == x) return t.coefficient;
      }
      return 0.0;
    };
    std::vector<double> locations = f.breakpoints();
    for (double x : g.breakpoints()) locations.push_back(x);
    for (double x : locations) {
      CHECK(std::abs(coefficient_at(wc.delta_terms, x) -
                     (alpha * coefficient_at(wf.delta_terms, x) + beta * coefficient_at(wg.delta_terms, x))) <=
            1e-12);
      CHECK(std::abs(coefficient_at(wc.delta_prime_terms, x) -
                     (alpha * coefficient_at(wf.delta_prime_terms, x) +
                      beta * coefficient_at(wg.delta_prime_terms, x))) <= 1e-12);
    }
    for (int i = 0; i < 20; ++i) {
      const double x = -0.99 + 1.98 * (i + 0.37) / 20;
      CHECK(std::abs(wc.smooth_part.evaluate(x) -
                     (alpha * wf.smooth_part.evaluate(x) + beta * wg.smooth_part.evaluate(x))) <= 1e-12);
    }
  }
}

TEST_CASE("property: L2 finite exactly when no delta terms remain") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const PiecewiseSmooth f = random_piecewise(rng, 1 + trial % 3, trial % 2 == 0);
    const WeakDerivative w = weak_second_derivative(f);
    CHECK(std::isfinite(l2_norm_squared(w, {-1, 1})) == w.l2_finite());
  }
  CHECK(std::isfinite(l2_norm_squared(weak_second_derivative(constant(1.0)), {-1, 1})));
}

TEST_CASE("construction rejects gaps and mismatched ladders") {
  const auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(PiecewiseSmooth({-1, 1}, {Piece{{-1, 0}, {zero}}, Piece{{0.1, 1}, {zero}}}), Error);
  CHECK_THROWS_AS(PiecewiseSmooth({-1, 1}, {Piece{{-1, 0}, {zero}}, Piece{{0, 1}, {zero, zero}}}), Error);
  CHECK_THROWS_AS(PiecewiseSmooth({-1, 1}, {Piece{{-1, 0.5}, {zero}}}), Error);
  CHECK_THROWS_AS(ramp_function({-1, 1}, 2.0), Error);
}

TEST_CASE("evaluation averages at breakpoints and vanishes outside") {
  const PiecewiseSmooth f = ramp_function({-1, 1}, 0.0, 2.0);
  CHECK(f.evaluate(0.0, 1) == 1.0);
  CHECK(f(0.5) == 1.0);
  CHECK(f(3.0) == 0.0);
  CHECK(f.breakpoints() == std::vector<double>{0.0});
}
