#include "boxaffine/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "boxaffine/analytic_box.hpp"
#include "boxaffine/cli/acceptance.hpp"
#include "boxaffine/error.hpp"
#include "boxaffine/piecewise.hpp"
#include "boxaffine/rayleigh_ritz.hpp"
#include "boxaffine/shooting.hpp"

namespace boxaffine::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json parity_json(std::optional<Parity> p) {
  if (!p) return nullptr;
  return *p == Parity::even ? "even" : "odd";
}

std::ofstream open_dump(const std::string& dir, const std::string& name) {
  std::ofstream f(std::filesystem::path(dir) / name);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write dump file " + name + " in " + dir);
  return f;
}

Json ritz_levels(const RunConfig& c, double& seconds) {
  const auto start = Clock::now();
  const SpectrumResult r = compute_spectrum(c.model, c.basis_size);
  Json levels = Json::array();
  for (int k = 0; k < c.levels; ++k) {
    const LevelDiagnostics& d = r.diagnostics[k];
    Json l;
    l["index"] = k;
    l["energy"] = r.eigenvalues[k];
    l["parity"] = parity_json(d.parity);
    l["node_count"] = d.node_count;
    l["boundary_exponent"] = d.boundary_exponent;
    l["residual"] = d.residual;
    l["near_degenerate"] = d.near_degenerate;
    levels.push_back(l);
  }
  if (!c.dump_dir.empty()) {
    const auto problem = assemble_matrices(c.model, r.basis, gauss_legendre(2 * c.basis_size + 8));
    auto h = open_dump(c.dump_dir, "rayleigh_ritz_H.csv");
    write_matrix_csv(h, problem.h);
    auto s = open_dump(c.dump_dir, "rayleigh_ritz_S.csv");
    write_matrix_csv(s, problem.s);
    const double b = r.basis.geom.b;
    constexpr int kSamples = 2001;
    for (int k = 0; k < c.levels; ++k) {
      std::vector<EigenfunctionSample> samples;
      for (int i = 0; i < kSamples; ++i) {
        const double x = -b + 2.0 * b * (i + 0.5) / kSamples;
        samples.push_back({x, eigenfunction_value(r, k, x)});
      }
      auto f = open_dump(c.dump_dir, "rayleigh_ritz_level_" + std::to_string(k) + ".csv");
      write_eigenfunction_csv(f, samples);
    }
  }
  Json out;
  out["basis_size"] = c.basis_size;
  out["levels"] = levels;
  seconds = seconds_since(start);
  return out;
}

Json shooting_levels(const RunConfig& c, double& seconds) {
  const auto start = Clock::now();
  const Shooter shooter(c.model, default_grid(c.model, c.grid_size));
  Json levels = Json::array();
  for (int k = 0; k < c.levels; ++k) {
    const double e = shooter.eigenvalue(k, c.tol * shooter.energy_scale());
    Json l;
    l["index"] = k;
    l["energy"] = e;
    l["parity"] = parity_json(shooter.parity(e));
    l["node_count"] = shooter.match(e).node_count;
    l["boundary_exponent"] = shooter.boundary_exponent(e);
    levels.push_back(l);
    if (!c.dump_dir.empty()) {
      auto f = open_dump(c.dump_dir, "shooting_level_" + std::to_string(k) + ".csv");
      write_eigenfunction_csv(f, shooter.eigenfunction(e));
    }
  }
  Json out;
  out["grid_size"] = c.grid_size;
  out["tol"] = c.tol;
  out["levels"] = levels;
  seconds = seconds_since(start);
  return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Json terms_json(const std::vector<DeltaTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back({{"location", t.location}, {"coefficient", t.coefficient}});
  return out;
}

std::vector<double> singular_points(const ModelSpec& model) {
  if (const auto* m = std::get_if<AntiBox>(&model)) return {-m->geom.b, m->geom.b};
  if (std::holds_alternative<CqBox>(model)) return {};
  std::vector<double> out;
  for (const auto& e : singularity_metadata(model)) out.push_back(e.location);
  return out;
}

std::string level_csv(const Json& report) {
  std::ostringstream out;
  out << "method,level,energy,parity,node_count,boundary_exponent\n";
  for (const auto& [method, result] : report["results"].items()) {
    for (const auto& l : result["levels"]) {
      out << method << ',' << l["index"].get<int>() << ',' << format_number(l["energy"].get<double>()) << ','
          << (l["parity"].is_null() ? "" : l["parity"].get<std::string>()) << ','
          << l["node_count"].get<int>() << ',' << format_number(l["boundary_exponent"].get<double>()) << '\n';
    }
  }
  return out.str();
}

std::string render_csv(const Json& report) {
  const std::string command = report["command"].get<std::string>();
  std::ostringstream out;
  if (command == "spectrum") return level_csv(report);
  if (command == "potential") {
    bool first = true;
    for (const auto& col : report["columns"]) {
      out << (first ? "" : ",") << col.get<std::string>();
      first = false;
    }
    out << '\n';
    for (const auto& row : report["rows"]) {
      first = true;
      for (const auto& v : row) {
        out << (first ? "" : ",") << format_number(v.get<double>());
        first = false;
      }
      out << '\n';
    }
  } else if (command == "check-derivatives") {
    out << "h,norm\n";
    const Json& s = report["scaling"];
    for (std::size_t i = 0; i < s["h"].size(); ++i) {
      out << format_number(s["h"][i].get<double>()) << ',' << format_number(s["norm"][i].get<double>()) << '\n';
    }
  } else if (command == "convergence") {
    const Json& t = report["table"];
    out << "N";
    const std::size_t levels = t["energies"].empty() ? 0 : t["energies"][0].size();
    for (std::size_t k = 0; k < levels; ++k) out << ",E" << k;
    out << '\n';
    for (std::size_t i = 0; i < t["sizes"].size(); ++i) {
      out << t["sizes"][i].get<int>();
      for (const auto& e : t["energies"][i]) out << ',' << format_number(e.get<double>());
      out << '\n';
    }
  }
  return out.str();
}

void emit(const RunConfig& c, const Json& report, std::ostream& out) {
  const std::string text = c.format == Format::json ? report.dump(2) + "\n" : render_csv(report);
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw UsageError("--out: cannot write '" + c.out + "'");
  f << text;
}

}  // namespace

SpectrumOutcome run_spectrum(const RunConfig& c) {
  const auto start = Clock::now();
  if (!c.dump_dir.empty()) std::filesystem::create_directories(c.dump_dir);
  const bool ritz = c.method != Method::shooting;
  const bool shoot = c.method != Method::rayleigh_ritz;
  double ritz_seconds = 0.0;
  double shoot_seconds = 0.0;

  std::future<Json> ritz_job;
  if (ritz) ritz_job = std::async(std::launch::async, [&] { return ritz_levels(c, ritz_seconds); });
  Json shot;
  if (shoot) shot = shooting_levels(c, shoot_seconds);

  SpectrumOutcome outcome;
  Json& r = outcome.report;
  r = report_header(c);
  Json results = Json::object();
  if (ritz) results["rayleigh-ritz"] = ritz_job.get();
  if (shoot) results["shooting"] = shot;
  r["results"] = results;

  if (ritz && shoot) {
    Json deltas = Json::array();
    double worst = 0.0;
    for (int k = 0; k < c.levels; ++k) {
      const double a = results["rayleigh-ritz"]["levels"][k]["energy"].get<double>();
      const double b = results["shooting"]["levels"][k]["energy"].get<double>();
      const double d = std::abs(b - a) / std::abs(a);
      deltas.push_back(d);
      worst = std::max(worst, d);
    }
    Json agreement;
    agreement["threshold"] = kAgreementThreshold;
    agreement["relative_deltas"] = deltas;
    agreement["max_relative_delta"] = worst;
    agreement["pass"] = worst <= kAgreementThreshold;
    r["agreement"] = agreement;
    if (!(worst <= kAgreementThreshold)) outcome.exit_code = kExitDisagreement;
  }

  Json timings;
  if (ritz) timings["rayleigh-ritz"] = ritz_seconds;
  if (shoot) timings["shooting"] = shoot_seconds;
  timings["total"] = seconds_since(start);
  finalize_report(r, timings);
  return outcome;
}

Json run_potential(const RunConfig& c) {
  const auto start = Clock::now();
  const Potential v = make_potential(c.model);
  const double scale = length_scale(c.model);
  const std::vector<double> singular = singular_points(c.model);
  const bool with_ratio = std::holds_alternative<AqBox>(c.model);

  Json rows = Json::array();
  std::size_t skipped = 0;
  const std::size_t n = c.points;
  for (std::size_t i = 0; i < n; ++i) {
    // Weighted form keeps symmetric grids exactly symmetric (x = 0 hits 0).
    const double x = n == 1 ? c.x_min
                            : (static_cast<double>(n - 1 - i) * c.x_min + static_cast<double>(i) * c.x_max) /
                                  static_cast<double>(n - 1);
    for (double s : singular) {
      if (std::abs(x - s) <= 1e-12 * scale) {
        throw UsageError("--x-min/--x-max: grid point " + format_number(x) + " touches the singular point x = " +
                         format_number(s));
      }
    }
    if (!v.in_domain(x)) {
      ++skipped;
      continue;
    }
    Json row = Json::array({x, v.evaluate(x)});
    if (with_ratio) row.push_back(boundary_asymptotic_ratio(x, std::get<AqBox>(c.model).geom));
    rows.push_back(row);
  }

  Json r = report_header(c);
  r["columns"] = with_ratio ? Json::array({"x", "V", "ratio"}) : Json::array({"x", "V"});
  r["rows"] = rows;
  r["skipped"] = skipped;
  finalize_report(r, {{"total", seconds_since(start)}});
  return r;
}

Json run_check_derivatives(const RunConfig& c) {
  const auto start = Clock::now();
  const BoxGeometry geom = std::get<CqBox>(c.model).geom;
  const PiecewiseSmooth f =
      c.target == DerivativeTarget::toy ? ramp_function() : cq_zero_extended(c.n, geom);
  const double unit = c.target == DerivativeTarget::toy ? 1.0 : geom.b;
  // The ramp does not vanish at x = 1, so its zero extension would add a
  // value jump there; sample it on interior mesh points only.
  const MeshSampling sampling =
      c.target == DerivativeTarget::toy ? MeshSampling::interior : MeshSampling::full;
  const WeakDerivative w = weak_second_derivative(f);
  const Interval ambient = f.ambient();

  Json samples_x = Json::array();
  Json samples_v = Json::array();
  constexpr int kSamples = 16;
  for (int j = 0; j < kSamples; ++j) {
    const double x = ambient.lo + (j + 0.5) * ambient.length() / kSamples;
    samples_x.push_back(x);
    samples_v.push_back(w.smooth_part.evaluate(x));
  }

  const double l2 = l2_norm_squared(w, ambient);

  Json hs = Json::array();
  Json norms = Json::array();
  std::vector<double> log_h;
  std::vector<double> log_norm;
  for (int k = 6; k <= 12; ++k) {
    const double h = std::ldexp(unit, -k);
    const double value = discrete_second_derivative_norm(f, h, sampling);
    hs.push_back(h);
    norms.push_back(value);
    log_h.push_back(std::log(h));
    log_norm.push_back(std::log(value));
  }

  Json r = report_header(c);
  Json weak;
  weak["delta_terms"] = terms_json(w.delta_terms);
  weak["delta_prime_terms"] = terms_json(w.delta_prime_terms);
  weak["smooth_part_samples"] = {{"x", samples_x}, {"value", samples_v}};
  r["weak_second_derivative"] = weak;
  Json l2_json;
  l2_json["finite"] = std::isfinite(l2);
  if (std::isfinite(l2)) {
    l2_json["norm_squared"] = l2;
  } else {
    l2_json["norm_squared"] = "+inf";
  }
  r["l2"] = l2_json;
  r["scaling"] = {{"h", hs}, {"norm", norms}, {"slope", least_squares_slope(log_h, log_norm)}};
  finalize_report(r, {{"total", seconds_since(start)}});
  return r;
}

Json run_convergence(const RunConfig& c) {
  const auto start = Clock::now();
  const ConvergenceTable t = convergence_sweep(c.model, c.sizes, c.levels);
  Json r = report_header(c);
  Json table;
  table["sizes"] = t.sizes;
  table["energies"] = t.energies;
  table["final_relative_change"] = t.final_relative_change;
  table["nonincreasing"] = t.nonincreasing;
  r["table"] = table;
  finalize_report(r, {{"total", seconds_since(start)}});
  return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    ParseResult parsed = parse_config(args);
    if (!parsed.config) {
      out << parsed.message;
      return parsed.exit_code;
    }
    config = *parsed.config;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    switch (config.command) {
      case Command::spectrum: {
        const SpectrumOutcome outcome = run_spectrum(config);
        emit(config, outcome.report, out);
        if (outcome.exit_code == kExitDisagreement) {
          err << "methods disagree: max relative delta "
              << format_number(outcome.report["agreement"]["max_relative_delta"].get<double>())
              << " exceeds " << format_number(kAgreementThreshold) << '\n';
        }
        return outcome.exit_code;
      }
      case Command::potential:
        emit(config, run_potential(config), out);
        return kExitOk;
      case Command::check_derivatives:
        emit(config, run_check_derivatives(config), out);
        return kExitOk;
      case Command::convergence:
        emit(config, run_convergence(config), out);
        return kExitOk;
      case Command::validate: {
        bool all = true;
        for (const CriterionResult& r : run_acceptance()) {
          out << format_criterion(r) << '\n';
          all = all && r.passed;
        }
        out << (all ? "validate: all criteria passed" : "validate: FAILED") << '\n';
        return all ? kExitOk : kExitSolverFailure;
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitSolverFailure;
}

}  // namespace boxaffine::cli
