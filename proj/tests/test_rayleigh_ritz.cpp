#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <numbers>

#include "boxaffine/error.hpp"
#include "boxaffine/rayleigh_ritz.hpp"

using namespace boxaffine;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

// Matrix entries in t = x/b, written out with the weight cancelled by hand
// and integrated adaptively. u = 1 - t^2.
struct EntryOracle {
  double w;
  BoxGeometry g;
  bool aq;

  double basis(int k, double t) const { return std::pow(1 - t * t, w) * boost::math::legendre_p(k, t); }
  double basis_slope(int k, double t) const {
    const double u = 1 - t * t;
    return std::pow(u, w - 1) *
           (-2 * w * t * boost::math::legendre_p(k, t) + u * boost::math::legendre_p_prime(k, t));
  }
  double potential_term(int j, int k, double t) const {
    if (!aq) return 0.0;
    const double u = 1 - t * t;
    return g.hbar * g.hbar / (g.b * g.b) * (2 * t * t + 1) * std::pow(u, 2 * w - 2) *
           boost::math::legendre_p(j, t) * boost::math::legendre_p(k, t);
  }
  double h(int j, int k) const {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) {
          return g.hbar * g.hbar / (g.b * g.b) * basis_slope(j, t) * basis_slope(k, t) + potential_term(j, k, t);
        },
        -1.0, 1.0, 15, 1e-14);
  }
  double s(int j, int k) const {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return basis(j, t) * basis(k, t); }, -1.0, 1.0, 15, 1e-14);
  }
};

const double kAqReference[] = {4.62208181379878, 14.3641563121538, 29.0850500047574,
                               48.7618813299104, 73.3860443776288, 102.953325415745};

}  // namespace

TEST_CASE("one-function Rayleigh quotient for the Dirichlet box") {
  const ModelSpec cq = CqBox{{1.0, 1.0}};
  const GeneralizedEigProblem p = assemble_matrices(cq, default_basis(cq, 1), gauss_legendre(10));
  CHECK(p.h(0, 0) == doctest::Approx(8.0 / 3).epsilon(1e-14));
  CHECK(p.s(0, 0) == doctest::Approx(16.0 / 15).epsilon(1e-14));
  CHECK(p.h(0, 0) / p.s(0, 0) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("one-function aq-box quotient is a variational upper bound") {
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  const GeneralizedEigProblem p = assemble_matrices(aq, default_basis(aq, 1), gauss_legendre(10));
  CHECK(p.h(0, 0) / p.s(0, 0) >= kAqReference[0]);
}

TEST_CASE("assembled entries agree with an adaptive quadrature oracle") {
  for (const auto& [model, aq] : {std::pair<ModelSpec, bool>{AqBox{{1.0, 1.0}}, true},
                                  std::pair<ModelSpec, bool>{AqBox{{2.0, 0.7}}, true},
                                  std::pair<ModelSpec, bool>{CqBox{{1.5, 1.0}}, false}}) {
    const BasisSpec basis = default_basis(model, 8);
    const GeneralizedEigProblem p = assemble_matrices(model, basis, gauss_legendre(2 * 8 + 8));
    const EntryOracle oracle{basis.weight_exponent, basis.geom, aq};
    for (int j = 0; j < 8; ++j) {
      for (int k = 0; k < 8; ++k) {
        CHECK(p.h(j, k) == doctest::Approx(oracle.h(j, k)).epsilon(1e-11).scale(1.0));
        CHECK(p.s(j, k) == doctest::Approx(oracle.s(j, k)).epsilon(1e-11).scale(1.0));
      }
    }
  }
}

TEST_CASE("matrix structure: symmetric, parity blocks, positive-definite overlap") {
  for (const ModelSpec& model : {ModelSpec{AqBox{{1.0, 1.0}}}, ModelSpec{CqBox{{1.0, 1.0}}}}) {
    const int n = 24;
    const GeneralizedEigProblem p = assemble_matrices(model, default_basis(model, n), gauss_legendre(2 * n + 8));
    const double hn = frobenius_norm(p.h);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        CHECK(std::abs(p.h(j, k) - p.h(k, j)) <= 1e-12 * hn);
        if ((j + k) % 2 == 1) {
          CHECK(std::abs(p.h(j, k)) <= 1e-12 * hn);
          CHECK(std::abs(p.s(j, k)) <= 1e-12);
        }
      }
    }
    CHECK_NOTHROW(cholesky(p.s));
  }
}

TEST_CASE("assembly preconditions") {
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  CHECK(kind_of([&] { assemble_matrices(aq, default_basis(aq, 10), gauss_legendre(27)); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { default_basis(HalfHarmonic{1.0}, 8); }) == ErrorKind::ModelUnsupported);
  CHECK(kind_of([] { default_basis(AntiBox{{1.0, 1.0}, 0.0}, 8); }) == ErrorKind::ModelUnsupported);
  CHECK(kind_of([&] { default_basis(aq, 65); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { default_basis(aq, 0); }) == ErrorKind::InvalidArgument);
  CHECK(default_basis(aq, 4).weight_exponent == 1.5);
  CHECK(default_basis(CqBox{{1.0, 1.0}}, 4).weight_exponent == 1.0);
}

TEST_CASE("generalized solve agrees with Eigen on the assembled aq-box pencil") {
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  const GeneralizedEigProblem p = assemble_matrices(aq, default_basis(aq, 20), gauss_legendre(48));
  Eigen::MatrixXd h(20, 20), s(20, 20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      h(i, j) = p.h(i, j);
      s(i, j) = p.s(i, j);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> oracle(h, s);
  const EigenDecomposition d = solve_generalized_symmetric(p);
  for (int k = 0; k < 8; ++k) CHECK(d.values[k] == doctest::Approx(oracle.eigenvalues()(k)).epsilon(1e-9));
}

TEST_CASE("cq-box ground state at N = 24") {
  const SpectrumResult r = compute_spectrum(CqBox{{1.0, 1.0}}, 24);
  CHECK(std::abs(r.eigenvalues[0] / (pi * pi / 4) - 1) <= 1e-8);
}

TEST_CASE("property: cq-box levels 1..6 reproduce the closed form at N = 32") {
  for (const BoxGeometry g : {BoxGeometry{1.0, 1.0}, BoxGeometry{2.0, 0.5}}) {
    const SpectrumResult r = compute_spectrum(CqBox{g}, 32);
    for (int n = 1; n <= 6; ++n) {
      CHECK(std::abs(r.eigenvalues[n - 1] / cq_eigenvalue(n, g) - 1) <= 1e-8);
      CHECK(r.diagnostics[n - 1].boundary_exponent == doctest::Approx(1.0).epsilon(0.01));
    }
  }
}

TEST_CASE("aq-box spectrum at N = 32 and boundary exponent") {
  const SpectrumResult r = compute_spectrum(AqBox{{1.0, 1.0}}, 32);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(r.eigenvalues[k] / kAqReference[k] - 1) <= 1e-9);
  CHECK(std::abs(r.diagnostics[0].boundary_exponent - 1.5) <= 0.01);
  for (const auto& d : r.diagnostics) {
    CHECK_FALSE(d.near_degenerate);
    CHECK(d.residual <= 1e-9);
  }
}

TEST_CASE("property: variational monotonicity") {
  for (const ModelSpec& model : {ModelSpec{AqBox{{1.0, 1.0}}}, ModelSpec{CqBox{{1.0, 1.0}}}}) {
    std::vector<std::vector<double>> spectra;
    const std::vector<int> sizes{2, 4, 6, 8, 12, 16, 24, 32, 40, 48};
    for (int n : sizes) spectra.push_back(compute_spectrum(model, n).eigenvalues);
    for (std::size_t a = 0; a < sizes.size(); ++a) {
      for (std::size_t b = a + 1; b < sizes.size(); ++b) {
        for (int k = 0; k < sizes[a]; ++k) CHECK(spectra[b][k] <= spectra[a][k] + 1e-12);
      }
    }
  }
}

TEST_CASE("property: coefficient vectors are S-orthonormal") {
  const ModelSpec aq = AqBox{{1.0, 1.0}};
  const int n = 40;
  const SpectrumResult r = compute_spectrum(aq, n);
  const GeneralizedEigProblem p = assemble_matrices(aq, r.basis, gauss_legendre(2 * n + 8));
  for (int i = 0; i < n; ++i) {
    const std::vector<double> si = multiply(p.s, r.coefficients.column(i));
    for (int j = 0; j < n; ++j) {
      const std::vector<double> vj = r.coefficients.column(j);
      double ip = 0.0;
      for (int m = 0; m < n; ++m) ip += vj[m] * si[m];
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("property: parity alternates and level n has n nodes") {
  for (const ModelSpec& model : {ModelSpec{AqBox{{1.0, 1.0}}}, ModelSpec{CqBox{{1.0, 1.0}}},
                                 ModelSpec{AqBox{{3.0, 0.4}}}}) {
    const SpectrumResult r = compute_spectrum(model, 32);
    for (int k = 0; k <= 8; ++k) {
      CHECK(r.diagnostics[k].parity == (k % 2 == 0 ? Parity::even : Parity::odd));
      CHECK(r.diagnostics[k].node_count == k);
    }
  }
}

TEST_CASE("property: scaling law E(b, hbar) b^2 / hbar^2 = E(1, 1)") {
  const SpectrumResult ref = compute_spectrum(AqBox{{1.0, 1.0}}, 32);
  for (const auto& [b, hbar] : std::vector<std::pair<double, double>>{{2, 1}, {1, 2}, {0.5, 3}}) {
    const SpectrumResult r = compute_spectrum(AqBox{{b, hbar}}, 32);
    for (int k = 0; k < 6; ++k) {
      CHECK(std::abs(r.eigenvalues[k] * b * b / (hbar * hbar) / ref.eigenvalues[k] - 1) <= 1e-8);
    }
  }
}

TEST_CASE("property: pointwise eigen-residual of the lowest aq-box levels at N = 48") {
  const BoxGeometry g{1.0, 1.0};
  const SpectrumResult r = compute_spectrum(AqBox{g}, 48);
  for (int k = 0; k < 4; ++k) {
    const double e = r.eigenvalues[k];
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = -0.99 + 1.98 * i / 2000;
      peak = std::max(peak, std::abs(eigenfunction_value(r, k, x)));
    }
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = -0.99 + 1.98 * i / 2000;
      const double res = -g.hbar * g.hbar * eigenfunction_value(r, k, x, 2) +
                         (aq_box_potential(x, g) - e) * eigenfunction_value(r, k, x);
      worst = std::max(worst, std::abs(res) / (e * peak));
    }
    CAPTURE(k);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("eigenfunction derivatives agree with central differences") {
  const SpectrumResult r = compute_spectrum(AqBox{{1.0, 1.0}}, 24);
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    for (double x : {-0.6, 0.05, 0.8}) {
      const double fd = (eigenfunction_value(r, k, x + h) - eigenfunction_value(r, k, x - h)) / (2 * h);
      CHECK(eigenfunction_value(r, k, x, 1) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      const double fd2 = (eigenfunction_value(r, k, x + h, 1) - eigenfunction_value(r, k, x - h, 1)) / (2 * h);
      CHECK(eigenfunction_value(r, k, x, 2) == doctest::Approx(fd2).epsilon(1e-6).scale(1.0));
    }
  }
  CHECK(kind_of([&] { eigenfunction_value(r, 0, 1.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { eigenfunction_value(r, 24, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("convergence sweeps") {
  const std::vector<int> cq_sizes{4, 8, 16};
  const ConvergenceTable cq = convergence_sweep(CqBox{{1.0, 1.0}}, cq_sizes, 1);
  CHECK(cq.nonincreasing);
  CHECK(cq.energies[0][0] >= cq.energies[1][0]);
  CHECK(cq.energies[1][0] >= cq.energies[2][0]);
  CHECK(cq.energies[2][0] >= pi * pi / 4 * (1 - 1e-12));

  const std::vector<int> aq_sizes{8, 16, 32};
  const ConvergenceTable aq = convergence_sweep(AqBox{{1.0, 1.0}}, aq_sizes, 1);
  CHECK(aq.nonincreasing);
  CHECK(aq.final_relative_change[0] < 1e-8);

  const ConvergenceTable again = convergence_sweep(AqBox{{1.0, 1.0}}, aq_sizes, 1);
  CHECK(again.energies == aq.energies);

  const std::vector<int> descending{16, 8};
  CHECK(kind_of([&] { convergence_sweep(AqBox{{1.0, 1.0}}, descending, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { convergence_sweep(AqBox{{1.0, 1.0}}, aq_sizes, 9); }) == ErrorKind::InvalidArgument);
}
