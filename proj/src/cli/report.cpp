#include "boxaffine/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

namespace boxaffine::cli {

namespace {

Json model_echo(const RunConfig& c) {
  Json m;
  m["name"] = std::string(model_name(c.model));
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, HalfHarmonic>) {
          m["hbar"] = model.hbar;
        } else {
          m["b"] = model.geom.b;
          m["hbar"] = model.geom.hbar;
          if constexpr (std::is_same_v<T, AntiBox>) m["W"] = model.coupling;
        }
      },
      c.model);
  return m;
}

Json units(const RunConfig& c) {
  Json u;
  u["convention"] = "2m = 1";
  if (c.command == Command::check_derivatives) {
    u["length_unit"] = "b";
    return u;
  }
  if (const auto* h = std::get_if<HalfHarmonic>(&c.model)) {
    u["energy_unit"] = "hbar";
    u["energy_scale"] = h->hbar;
    u["length_unit"] = "sqrt(hbar)";
  } else {
    u["energy_unit"] = "hbar^2/b^2";
    const BoxGeometry g = std::visit(
        [](const auto& m) -> BoxGeometry {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, HalfHarmonic>) {
            return {};
          } else {
            return m.geom;
          }
        },
        c.model);
    u["energy_scale"] = g.hbar * g.hbar / (g.b * g.b);
    u["length_unit"] = "b";
  }
  u["energies"] = "absolute, in the units above times energy_scale";
  return u;
}

Json config_echo(const RunConfig& c) {
  Json j;
  switch (c.command) {
    case Command::spectrum:
      j["model"] = model_echo(c);
      j["method"] = std::string(to_string(c.method));
      j["levels"] = c.levels;
      if (c.method != Method::shooting) j["basis_size"] = c.basis_size;
      if (c.method != Method::rayleigh_ritz) {
        j["grid_size"] = c.grid_size;
        j["tol"] = c.tol;
      }
      break;
    case Command::potential:
      j["model"] = model_echo(c);
      j["x_min"] = c.x_min;
      j["x_max"] = c.x_max;
      j["points"] = c.points;
      break;
    case Command::check_derivatives:
      j["target"] = std::string(to_string(c.target));
      if (c.target == DerivativeTarget::cq) {
        j["n"] = c.n;
        const auto& g = std::get<CqBox>(c.model).geom;
        j["b"] = g.b;
      }
      break;
    case Command::convergence:
      j["model"] = model_echo(c);
      j["levels"] = c.levels;
      j["sizes"] = c.sizes;
      break;
    case Command::validate:
      break;
  }
  j["format"] = std::string(to_string(c.format));
  return j;
}

// Validation helpers collect messages instead of stopping at the first one.
struct Checker {
  std::vector<std::string> problems;

  void fail(const std::string& where, const std::string& what) { problems.push_back(where + ": " + what); }

  bool object_with(const Json& j, const std::string& where, const std::set<std::string>& required,
                   const std::set<std::string>& optional = {}) {
    if (!j.is_object()) {
      fail(where, "expected an object");
      return false;
    }
    bool ok = true;
    for (const auto& key : required) {
      if (!j.contains(key)) {
        fail(where, "missing key '" + key + "'");
        ok = false;
      }
    }
    for (const auto& [key, _] : j.items()) {
      if (!required.count(key) && !optional.count(key)) {
        fail(where, "unknown key '" + key + "'");
        ok = false;
      }
    }
    return ok;
  }

  void number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
  }
  void integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
  }
  void boolean(const Json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected a boolean");
  }
  void string(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
  }
  void number_array(const Json& j, const std::string& where) {
    if (!j.is_array()) {
      fail(where, "expected an array");
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) number(j[i], where + "[" + std::to_string(i) + "]");
  }
};

void check_levels(Checker& c, const Json& levels, const std::string& where, bool ritz) {
  if (!levels.is_array() || levels.empty()) {
    c.fail(where, "expected a non-empty array");
    return;
  }
  std::set<std::string> optional;
  if (ritz) optional = {"residual", "near_degenerate"};
  double previous = -INFINITY;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const Json& l = levels[i];
    if (!c.object_with(l, at, {"index", "energy", "parity", "node_count", "boundary_exponent"}, optional)) continue;
    c.integer(l["index"], at + ".index");
    if (l["index"].is_number_integer() && l["index"].get<long long>() != static_cast<long long>(i)) {
      c.fail(at + ".index", "levels must be numbered 0, 1, 2, ...");
    }
    c.number(l["energy"], at + ".energy");
    if (l["energy"].is_number()) {
      const double e = l["energy"].get<double>();
      if (e < previous) c.fail(at + ".energy", "energies must be ascending");
      previous = e;
    }
    if (!(l["parity"].is_null() || l["parity"] == "even" || l["parity"] == "odd")) {
      c.fail(at + ".parity", "expected \"even\", \"odd\" or null");
    }
    c.integer(l["node_count"], at + ".node_count");
    if (!l["boundary_exponent"].is_null()) c.number(l["boundary_exponent"], at + ".boundary_exponent");
    if (l.contains("residual")) c.number(l["residual"], at + ".residual");
    if (l.contains("near_degenerate")) c.boolean(l["near_degenerate"], at + ".near_degenerate");
  }
}

void check_spectrum(Checker& c, const Json& r) {
  if (!c.object_with(r, "report", {"schema", "command", "units", "config", "results", "digest", "timings"},
                     {"agreement"})) {
    return;
  }
  const Json& results = r["results"];
  if (!c.object_with(results, "results", {}, {"rayleigh-ritz", "shooting"})) return;
  if (results.empty()) c.fail("results", "expected at least one method");
  if (results.contains("rayleigh-ritz")) {
    const Json& rr = results["rayleigh-ritz"];
    if (c.object_with(rr, "results.rayleigh-ritz", {"basis_size", "levels"})) {
      c.integer(rr["basis_size"], "results.rayleigh-ritz.basis_size");
      check_levels(c, rr["levels"], "results.rayleigh-ritz.levels", true);
    }
  }
  if (results.contains("shooting")) {
    const Json& sh = results["shooting"];
    if (c.object_with(sh, "results.shooting", {"grid_size", "tol", "levels"})) {
      c.integer(sh["grid_size"], "results.shooting.grid_size");
      c.number(sh["tol"], "results.shooting.tol");
      check_levels(c, sh["levels"], "results.shooting.levels", false);
    }
  }
  const bool both = results.contains("rayleigh-ritz") && results.contains("shooting");
  if (both != r.contains("agreement")) {
    c.fail("agreement", both ? "required when both methods ran" : "only allowed when both methods ran");
  }
  if (r.contains("agreement")) {
    const Json& a = r["agreement"];
    if (c.object_with(a, "agreement", {"threshold", "relative_deltas", "max_relative_delta", "pass"})) {
      c.number(a["threshold"], "agreement.threshold");
      c.number_array(a["relative_deltas"], "agreement.relative_deltas");
      c.number(a["max_relative_delta"], "agreement.max_relative_delta");
      c.boolean(a["pass"], "agreement.pass");
    }
  }
}

void check_potential(Checker& c, const Json& r) {
  if (!c.object_with(r, "report", {"schema", "command", "units", "config", "columns", "rows", "skipped", "digest", "timings"})) {
    return;
  }
  if (!r["columns"].is_array() || r["columns"].size() < 2) {
    c.fail("columns", "expected at least two column names");
    return;
  }
  c.integer(r["skipped"], "skipped");
  if (!r["rows"].is_array()) {
    c.fail("rows", "expected an array");
    return;
  }
  for (std::size_t i = 0; i < r["rows"].size(); ++i) {
    const Json& row = r["rows"][i];
    const std::string at = "rows[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != r["columns"].size()) {
      c.fail(at, "expected one value per column");
      continue;
    }
    c.number_array(row, at);
  }
}

void check_terms(Checker& c, const Json& terms, const std::string& where) {
  if (!terms.is_array()) {
    c.fail(where, "expected an array");
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (c.object_with(terms[i], at, {"location", "coefficient"})) {
      c.number(terms[i]["location"], at + ".location");
      c.number(terms[i]["coefficient"], at + ".coefficient");
    }
  }
}

void check_derivatives(Checker& c, const Json& r) {
  if (!c.object_with(r, "report",
                     {"schema", "command", "units", "config", "weak_second_derivative", "l2", "scaling", "digest", "timings"})) {
    return;
  }
  const Json& w = r["weak_second_derivative"];
  if (c.object_with(w, "weak_second_derivative", {"delta_terms", "delta_prime_terms", "smooth_part_samples"})) {
    check_terms(c, w["delta_terms"], "weak_second_derivative.delta_terms");
    check_terms(c, w["delta_prime_terms"], "weak_second_derivative.delta_prime_terms");
    const Json& s = w["smooth_part_samples"];
    if (c.object_with(s, "weak_second_derivative.smooth_part_samples", {"x", "value"})) {
      c.number_array(s["x"], "weak_second_derivative.smooth_part_samples.x");
      c.number_array(s["value"], "weak_second_derivative.smooth_part_samples.value");
    }
  }
  const Json& l2 = r["l2"];
  if (c.object_with(l2, "l2", {"finite", "norm_squared"})) {
    c.boolean(l2["finite"], "l2.finite");
    if (!(l2["norm_squared"].is_number() || l2["norm_squared"] == "+inf")) {
      c.fail("l2.norm_squared", "expected a number or \"+inf\"");
    }
  }
  const Json& s = r["scaling"];
  if (c.object_with(s, "scaling", {"h", "norm", "slope"})) {
    c.number_array(s["h"], "scaling.h");
    c.number_array(s["norm"], "scaling.norm");
    c.number(s["slope"], "scaling.slope");
    if (s["h"].is_array() && s["norm"].is_array() && s["h"].size() != s["norm"].size()) {
      c.fail("scaling", "h and norm must have equal length");
    }
  }
}

void check_convergence(Checker& c, const Json& r) {
  if (!c.object_with(r, "report", {"schema", "command", "units", "config", "table", "digest", "timings"})) return;
  const Json& t = r["table"];
  if (!c.object_with(t, "table", {"sizes", "energies", "final_relative_change", "nonincreasing"})) return;
  c.number_array(t["sizes"], "table.sizes");
  c.number_array(t["final_relative_change"], "table.final_relative_change");
  c.boolean(t["nonincreasing"], "table.nonincreasing");
  if (!t["energies"].is_array() || t["energies"].size() != t["sizes"].size()) {
    c.fail("table.energies", "expected one row per size");
    return;
  }
  for (std::size_t i = 0; i < t["energies"].size(); ++i) {
    c.number_array(t["energies"][i], "table.energies[" + std::to_string(i) + "]");
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string digest_region(const Json& report) {
  Json copy = report;
  copy.erase("digest");
  copy.erase("timings");
  return copy.dump();
}

Json report_header(const RunConfig& config) {
  Json r;
  r["schema"] = std::string(kSchema);
  r["command"] = std::string(to_string(config.command));
  r["units"] = units(config);
  r["config"] = config_echo(config);
  return r;
}

void finalize_report(Json& report, const Json& timings) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(digest_region(report))));
  report["digest"] = buf;
  report["timings"] = timings;
}

std::vector<std::string> validate_report(const Json& report) {
  Checker c;
  if (!report.is_object()) return {"report: expected an object"};
  if (!report.contains("schema") || report["schema"] != kSchema) {
    c.fail("schema", "expected \"boxaffine/1\"");
  }
  if (!report.contains("command") || !report["command"].is_string()) {
    c.fail("command", "missing");
    return c.problems;
  }
  const std::string command = report["command"].get<std::string>();
  if (command == "spectrum") {
    check_spectrum(c, report);
  } else if (command == "potential") {
    check_potential(c, report);
  } else if (command == "check-derivatives") {
    check_derivatives(c, report);
  } else if (command == "convergence") {
    check_convergence(c, report);
  } else {
    c.fail("command", "unknown command '" + command + "'");
    return c.problems;
  }
  if (report.contains("units")) c.object_with(report["units"], "units", {"convention"},
                                              {"energy_unit", "energy_scale", "length_unit", "energies"});
  if (report.contains("config") && !report["config"].is_object()) c.fail("config", "expected an object");
  if (report.contains("timings")) {
    if (!report["timings"].is_object()) {
      c.fail("timings", "expected an object");
    } else {
      for (const auto& [key, value] : report["timings"].items()) c.number(value, "timings." + key);
    }
  }
  if (report.contains("digest")) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(digest_region(report))));
    if (report["digest"] != std::string(buf)) c.fail("digest", "does not match the report content");
  }
  return c.problems;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace boxaffine::cli
