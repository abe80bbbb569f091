#include "boxaffine/potentials.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be > 0 and finite");
  }
}

[[noreturn]] void domain_failure(const char* what, double x) {
  std::ostringstream msg;
  msg << what << " is undefined at x = " << x;
  throw Error(ErrorKind::DomainError, msg.str());
}

// hbar^2 (2x^2 + b^2) / (b^2 - x^2)^2 with b^2 - x^2 formed as a product of
// distances, so the value stays accurate next to the walls.
double rational_term(double x, const BoxGeometry& geom) {
  const double b = geom.b;
  const double ax = std::abs(x);
  const double gap = (b - ax) * (b + ax);
  return geom.hbar * geom.hbar * (2.0 * x * x + b * b) / (gap * gap);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view model_name(const ModelSpec& model) {
  return std::visit(overloaded{[](const CqBox&) { return std::string_view("cq-box"); },
                               [](const AqBox&) { return std::string_view("aq-box"); },
                               [](const HalfHarmonic&) { return std::string_view("half-ho"); },
                               [](const AntiBox&) { return std::string_view("anti-box"); }},
                    model);
}

void validate(const ModelSpec& model) {
  std::visit(overloaded{[](const CqBox& m) { validate(m.geom); },
                        [](const AqBox& m) { validate(m.geom); },
                        [](const HalfHarmonic& m) { require_positive(m.hbar, "hbar"); },
                        [](const AntiBox& m) {
                          validate(m.geom);
                          if (!(std::isfinite(m.coupling) && m.coupling >= 0.0)) {
                            throw Error(ErrorKind::InvalidArgument, "W must be >= 0 and finite");
                          }
                        }},
             model);
}

double length_scale(const ModelSpec& model) {
  return std::visit(overloaded{[](const HalfHarmonic& m) { return std::sqrt(m.hbar); },
                               [](const auto& m) { return m.geom.b; }},
                    model);
}

double aq_box_potential(double x, const BoxGeometry& geom) {
  if (!(std::abs(x) < geom.b)) domain_failure("aq-box potential", x);
  return rational_term(x, geom);
}

double half_ho_potential(double x, double hbar) {
  if (!(x > 0.0)) domain_failure("half-ho potential", x);
  return (0.75 * hbar * hbar / (x * x) + x * x) / 2.0;
}

double anti_box_potential(double x, const BoxGeometry& geom, double coupling) {
  if (!(std::abs(x) > geom.b)) domain_failure("anti-box potential", x);
  return rational_term(x, geom) + coupling / std::abs(x);
}

double boundary_asymptotic_ratio(double x, const BoxGeometry& geom) {
  const double s = geom.b - std::abs(x);
  if (!(s > 0.0)) domain_failure("boundary asymptotic ratio", x);
  const double reference = 0.75 * geom.hbar * geom.hbar / (s * s);
  return aq_box_potential(x, geom) / reference;
}

std::vector<SingularEndpoint> singularity_metadata(const ModelSpec& model) {
  return std::visit(
      overloaded{
          [](const AqBox& m) {
            const double c = 0.75 * m.geom.hbar * m.geom.hbar;
            return std::vector<SingularEndpoint>{{-m.geom.b, c, -2}, {m.geom.b, c, -2}};
          },
          [](const HalfHarmonic& m) {
            return std::vector<SingularEndpoint>{{0.0, 0.375 * m.hbar * m.hbar, -2}};
          },
          [](const auto& m) -> std::vector<SingularEndpoint> {
            throw Error(ErrorKind::Unsupported,
                        std::string("no inverse-square endpoints for ") +
                            std::string(model_name(ModelSpec{m})));
          }},
      model);
}

bool Potential::in_domain(double x) const {
  for (const Interval& i : domain) {
    if (i.lo < x && x < i.hi) return true;
  }
  return false;
}

Potential make_potential(const ModelSpec& model) {
  validate(model);
  return std::visit(
      overloaded{
          [](const CqBox& m) {
            const BoxGeometry g = m.geom;
            return Potential{{{-g.b, g.b}},
                             [g](double x) {
                               if (!(std::abs(x) < g.b)) domain_failure("cq-box potential", x);
                               return 0.0;
                             },
                             {}};
          },
          [&model](const AqBox& m) {
            const BoxGeometry g = m.geom;
            return Potential{{{-g.b, g.b}},
                             [g](double x) { return aq_box_potential(x, g); },
                             singularity_metadata(model)};
          },
          [&model](const HalfHarmonic& m) {
            const double hbar = m.hbar;
            return Potential{{{0.0, kInf}},
                             [hbar](double x) { return half_ho_potential(x, hbar); },
                             singularity_metadata(model)};
          },
          [](const AntiBox& m) {
            const BoxGeometry g = m.geom;
            const double w = m.coupling;
            return Potential{{{-kInf, -g.b}, {g.b, kInf}},
                             [g, w](double x) { return anti_box_potential(x, g, w); },
                             {}};
          }},
      model);
}

}  // namespace boxaffine
