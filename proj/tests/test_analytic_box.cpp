#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "boxaffine/analytic_box.hpp"
#include "boxaffine/error.hpp"

using namespace boxaffine;
using std::numbers::pi;

namespace {

double oracle_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("eigenfunction values") {
  const BoxGeometry unit{1.0, 1.0};
  CHECK(cq_eigenfunction(1, 0.0, unit) == 1.0);
  CHECK(cq_eigenfunction(2, 1.0, unit) == 0.0);
  CHECK(cq_eigenfunction(1, 1.5, unit) == 0.0);
  CHECK(cq_eigenfunction(1, -1.5, unit) == 0.0);
  CHECK(cq_eigenfunction(3, 0.25, unit) == doctest::Approx(std::cos(3 * pi * 0.25 / 2)).epsilon(1e-15));
  CHECK(cq_eigenfunction(2, 0.25, unit) == doctest::Approx(std::sin(pi * 0.25)).epsilon(1e-15));
  CHECK(cq_eigenfunction(4, 1.2, {2.0, 1.0}) == doctest::Approx(std::sin(4 * pi * 1.2 / 4)).epsilon(1e-14));
}

TEST_CASE("eigenvalues") {
  CHECK(cq_eigenvalue(1, {1.0, 1.0}) == doctest::Approx(2.4674011).epsilon(1e-8));
  CHECK(cq_eigenvalue(1, {1.0, 1.0}) == doctest::Approx(pi * pi / 4).epsilon(1e-15));
  CHECK(cq_eigenvalue(2, {1.0, 1.0}) == doctest::Approx(9.8696044).epsilon(1e-8));
  CHECK(cq_eigenvalue(1, {2.0, 1.0}) == doctest::Approx(pi * pi / 16).epsilon(1e-15));
  CHECK(cq_eigenvalue(3, {1.0, 0.5}) == doctest::Approx(0.25 * 9 * pi * pi / 4).epsilon(1e-15));

  const CqLevel level = cq_level(4, {1.0, 1.0});
  CHECK(level.n == 4);
  CHECK(level.mode == TrigMode{4, TrigKind::sine});
  CHECK(cq_level(5, {1.0, 1.0}).mode.kind == TrigKind::cosine);
}

TEST_CASE("norm squared matches a quadrature oracle") {
  for (const auto& [n, b] : std::vector<std::pair<int, double>>{{1, 1.0}, {4, 1.0}, {1, 2.0}, {7, 0.5}}) {
    CAPTURE(n);
    const BoxGeometry g{b, 1.0};
    const double oracle = oracle_integral(
        [&](double x) {
          const double v = cq_eigenfunction(n, x, g);
          return v * v;
        },
        -b, b);
    CHECK(cq_norm_squared(n, g) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(cq_norm_squared(n, g) == b);
  }
}

TEST_CASE("mode classification") {
  const BoxGeometry unit{1.0, 1.0};
  const ModeClassification m2 = classify_trig_modes(2, unit);
  CHECK(m2.accepted == std::vector<TrigMode>{{1, TrigKind::cosine}, {2, TrigKind::sine}});
  CHECK(m2.rejected == std::vector<TrigMode>{{1, TrigKind::sine}, {2, TrigKind::cosine}});

  const ModeClassification m1 = classify_trig_modes(1, unit);
  CHECK(m1.accepted == std::vector<TrigMode>{{1, TrigKind::cosine}});
  CHECK(m1.rejected == std::vector<TrigMode>{{1, TrigKind::sine}});

  CHECK(classify_trig_modes(4, unit).accepted.size() == 4);
  CHECK(classify_trig_modes(4, unit).rejected.size() == 4);
}

TEST_CASE("property: classification count and agreement with cq_mode") {
  for (double b : {0.3, 1.0, 7.0}) {
    for (int m = 1; m <= 40; ++m) {
      const ModeClassification c = classify_trig_modes(m, {b, 1.0});
      CHECK(c.accepted.size() == static_cast<std::size_t>(m));
      CHECK(c.rejected.size() == static_cast<std::size_t>(m));
      for (const TrigMode& t : c.accepted) CHECK(cq_mode(t.n) == t);
      for (const TrigMode& t : c.rejected) CHECK_FALSE(cq_mode(t.n) == t);
    }
  }
}

TEST_CASE("property: Dirichlet walls") {
  for (double b : {1.0, 2.5}) {
    const BoxGeometry g{b, 1.0};
    for (int n = 1; n <= 50; ++n) {
      CHECK(std::abs(cq_eigenfunction(n, b, g)) < 1e-14);
      CHECK(std::abs(cq_eigenfunction(n, -b, g)) < 1e-14);
    }
  }
}

TEST_CASE("property: orthogonality by quadrature") {
  const BoxGeometry g{1.0, 1.0};
  for (int m = 1; m <= 12; ++m) {
    for (int n = m + 1; n <= 12; ++n) {
      const double overlap = oracle_integral(
          [&](double x) { return cq_eigenfunction(m, x, g) * cq_eigenfunction(n, x, g); }, -1.0, 1.0);
      CHECK(std::abs(overlap) < 1e-10);
    }
  }
}

TEST_CASE("property: interior eigen-residual") {
  for (const BoxGeometry g : {BoxGeometry{1.0, 1.0}, BoxGeometry{2.0, 0.7}}) {
    for (int n = 1; n <= 12; ++n) {
      const double e = cq_eigenvalue(n, g);
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const double x = -g.b + 2 * g.b * (i + 0.5) / 1000;
        const double r = -g.hbar * g.hbar * cq_eigenfunction_derivative(n, x, g, 2) - e * cq_eigenfunction(n, x, g);
        worst = std::max(worst, std::abs(r));
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("analytic derivatives agree with central differences") {
  const BoxGeometry g{1.0, 1.0};
  const double h = 1e-5;
  for (int n = 1; n <= 6; ++n) {
    for (double x : {-0.7, 0.1, 0.55}) {
      const double fd = (cq_eigenfunction(n, x + h, g) - cq_eigenfunction(n, x - h, g)) / (2 * h);
      CHECK(cq_eigenfunction_derivative(n, x, g, 1) == doctest::Approx(fd).epsilon(1e-8));
      const double fd3 = (cq_eigenfunction_derivative(n, x + h, g, 2) - cq_eigenfunction_derivative(n, x - h, g, 2)) /
                         (2 * h);
      CHECK(cq_eigenfunction_derivative(n, x, g, 3) == doctest::Approx(fd3).epsilon(1e-7));
    }
  }
}

TEST_CASE("property: obstruction link, two walls deltas for every level") {
  for (int n = 1; n <= 12; ++n) {
    const BoxGeometry g{1.0, 1.0};
    const WeakDerivative w = weak_second_derivative(cq_zero_extended(n, g));
    REQUIRE(w.delta_terms.size() == 2);
    CHECK(w.delta_terms[0].location == -1.0);
    CHECK(w.delta_terms[1].location == 1.0);
    CHECK(std::isinf(l2_norm_squared(w, {-2.0, 2.0})));
    CHECK(std::abs(w.delta_terms[0].coefficient) == doctest::Approx(n * pi / 2).epsilon(1e-13));
  }
}

TEST_CASE("second mode wall jumps have opposite signs") {
  const WeakDerivative w = weak_second_derivative(cq_zero_extended(2, {1.0, 1.0}));
  REQUIRE(w.delta_terms.size() == 2);
  CHECK(w.delta_terms[0].coefficient == doctest::Approx(-pi).epsilon(1e-14));
  CHECK(w.delta_terms[1].coefficient == doctest::Approx(pi).epsilon(1e-14));
}

TEST_CASE("invalid geometry and indices") {
  CHECK_THROWS_AS(validate(BoxGeometry{-1.0, 1.0}), Error);
  CHECK_THROWS_AS(validate(BoxGeometry{1.0, 0.0}), Error);
  CHECK_THROWS_AS(validate(BoxGeometry{std::nan(""), 1.0}), Error);
  CHECK_THROWS_AS(cq_eigenvalue(0, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(classify_trig_modes(0, {1.0, 1.0}), Error);
}
