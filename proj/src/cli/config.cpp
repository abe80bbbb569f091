#include "boxaffine/cli/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace boxaffine::cli {

namespace {

using nlohmann::json;


struct KeySpec {
  const char* name;
  const char* help;
};

// Every key a config file may carry; flags use the same names with "--".
const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"model", "cq-box | aq-box | half-ho | anti-box"},
      {"b", "box half-width (default 1)"},
      {"hbar", "reduced Planck constant (default 1)"},
      {"W", "anti-box coupling W >= 0 (default 0)"},
      {"levels", "number of levels, 1..12 (default 6)"},
      {"basis-size", "Rayleigh-Ritz basis size N, 1..64 (default 32)"},
      {"grid-size", "shooting grid points M (default 20001)"},
      {"tol", "shooting energy tolerance in energy units (default 1e-8)"},
      {"method", "rayleigh-ritz | shooting | both"},
      {"format", "json | csv (default json)"},
      {"out", "output file (default stdout)"},
      {"dump-dir", "directory for eigenfunction and matrix CSV dumps"},
      {"target", "toy | cq"},
      {"n", "cq eigenfunction index n >= 1 (default 1)"},
      {"x-min", "first sample point"},
      {"x-max", "last sample point"},
      {"points", "number of sample points"},
      {"sizes", "ascending basis sizes, comma separated"},
  };
  return specs;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_specs()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

// Config-file keys may spell separators as '-', '_' or nothing
// ("basis-size", "basis_size", "basissize").
const KeySpec* find_config_key(const std::string& raw) {
  const auto compact = [](std::string s) {
    std::erase_if(s, [](char c) { return c == '-' || c == '_'; });
    return s;
  };
  const std::string wanted = compact(raw);
  for (const auto& k : key_specs()) {
    if (wanted == compact(k.name)) return &k;
  }
  return nullptr;
}

std::string flag(const std::string& key) { return "--" + key; }

double as_real(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw UsageError(flag(key) + ": expected a number, got '" + s + "'");
  }
  throw UsageError(flag(key) + ": expected a number");
}

long long as_integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e15) return static_cast<long long>(d);
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const long long i = std::stoll(s, &used);
      if (used == s.size()) return i;
    } catch (const std::exception&) {
    }
    throw UsageError(flag(key) + ": expected an integer, got '" + s + "'");
  }
  throw UsageError(flag(key) + ": expected an integer");
}

std::string as_text(const json& v, const std::string& key) {
  if (!v.is_string()) throw UsageError(flag(key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<int> as_integer_list(const json& v, const std::string& key) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(static_cast<int>(as_integer(item, key)));
    return out;
  }
  if (v.is_string()) {
    std::stringstream in(v.get<std::string>());
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(static_cast<int>(as_integer(json(item), key)));
    return out;
  }
  throw UsageError(flag(key) + ": expected a list of integers");
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("--config: '" + path + "' is not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw UsageError("--config: top level must be a flat JSON object");
  json settings = json::object();
  for (const auto& [raw_key, value] : doc.items()) {
    const KeySpec* spec = find_config_key(raw_key);
    if (spec == nullptr) throw UsageError("--config: unknown key '" + raw_key + "'");
    const std::string key = spec->name;
    if (value.is_object() || (value.is_array() && key != "sizes")) {
      throw UsageError("--config: key '" + raw_key + "' must be a scalar");
    }
    settings[key] = value;
  }
  return settings;
}

std::string choices_text() {
  std::string out;
  for (const auto& m : model_choices()) out += (out.empty() ? "" : ", ") + m;
  return out;
}

ModelSpec build_model(const std::string& name, double b, double hbar, double w) {
  const BoxGeometry geom{b, hbar};
  if (name == "cq-box") return CqBox{geom};
  if (name == "aq-box") return AqBox{geom};
  if (name == "half-ho") return HalfHarmonic{hbar};
  if (name == "anti-box") return AntiBox{geom, w};
  throw UsageError("--model: unknown model '" + name + "' (valid choices: " + choices_text() + ")");
}

bool is_box(const ModelSpec& m) {
  return std::holds_alternative<CqBox>(m) || std::holds_alternative<AqBox>(m);
}

void default_potential_grid(RunConfig& c, bool has_min, bool has_max, bool has_points) {
  const double scale = length_scale(c.model);
  double lo = -0.99 * scale;
  double hi = 0.99 * scale;
  std::size_t points = 199;
  if (std::holds_alternative<HalfHarmonic>(c.model)) {
    lo = 0.01 * scale;
    hi = 6.0 * scale;
    points = 600;
  } else if (std::holds_alternative<AntiBox>(c.model)) {
    lo = 1.01 * scale;
    hi = 10.0 * scale;
    points = 900;
  }
  if (!has_min) c.x_min = lo;
  if (!has_max) c.x_max = hi;
  if (!has_points) c.points = points;
}

RunConfig build_config(Command command, const json& s) {
  RunConfig c;
  c.command = command;
  const auto has = [&](const char* key) { return s.contains(key); };

  double b = 1.0;
  double hbar = 1.0;
  double w = 0.0;
  if (has("b")) b = as_real(s["b"], "b");
  if (has("hbar")) hbar = as_real(s["hbar"], "hbar");
  if (has("W")) w = as_real(s["W"], "W");
  if (!(std::isfinite(b) && b > 0.0)) {
    throw UsageError("--b: requires b > 0 (finite), got " + json(b).dump());
  }
  if (!(std::isfinite(hbar) && hbar > 0.0)) {
    throw UsageError("--hbar: requires hbar > 0 (finite), got " + json(hbar).dump());
  }
  if (!(std::isfinite(w) && w >= 0.0)) {
    throw UsageError("--W: requires W >= 0 (finite), got " + json(w).dump());
  }

  const bool needs_model = command == Command::spectrum || command == Command::potential ||
                           command == Command::convergence;
  if (command == Command::check_derivatives) {
    c.model = CqBox{{b, hbar}};
  } else if (has("model")) {
    c.model = build_model(as_text(s["model"], "model"), b, hbar, w);
  } else if (needs_model) {
    throw UsageError("--model: required (valid choices: " + choices_text() + ")");
  } else {
    c.model = CqBox{{b, hbar}};
  }

  if (has("levels")) c.levels = static_cast<int>(as_integer(s["levels"], "levels"));
  if (has("basis-size")) c.basis_size = static_cast<int>(as_integer(s["basis-size"], "basis-size"));
  if (has("grid-size")) {
    const long long m = as_integer(s["grid-size"], "grid-size");
    if (m < 0) throw UsageError("--grid-size: requires M >= 1000");
    c.grid_size = static_cast<std::size_t>(m);
  }
  if (has("tol")) c.tol = as_real(s["tol"], "tol");
  if (has("format")) {
    const std::string f = as_text(s["format"], "format");
    if (f == "json") {
      c.format = Format::json;
    } else if (f == "csv") {
      c.format = Format::csv;
    } else {
      throw UsageError("--format: unknown format '" + f + "' (valid choices: json, csv)");
    }
  }
  if (has("out")) c.out = as_text(s["out"], "out");
  if (has("dump-dir")) c.dump_dir = as_text(s["dump-dir"], "dump-dir");

  const bool half_ho = std::holds_alternative<HalfHarmonic>(c.model);
  if (has("method")) {
    const std::string m = as_text(s["method"], "method");
    if (m == "rayleigh-ritz") {
      c.method = Method::rayleigh_ritz;
    } else if (m == "shooting") {
      c.method = Method::shooting;
    } else if (m == "both") {
      c.method = Method::both;
    } else {
      throw UsageError("--method: unknown method '" + m +
                       "' (valid choices: rayleigh-ritz, shooting, both)");
    }
  } else {
    c.method = half_ho ? Method::shooting : Method::both;
  }

  if (has("target")) {
    const std::string t = as_text(s["target"], "target");
    if (t == "toy") {
      c.target = DerivativeTarget::toy;
    } else if (t == "cq" || t == "cq-eigenfunction") {
      c.target = DerivativeTarget::cq;
    } else {
      throw UsageError("--target: unknown target '" + t + "' (valid choices: toy, cq)");
    }
  }
  if (has("n")) c.n = static_cast<int>(as_integer(s["n"], "n"));

  if (has("x-min")) c.x_min = as_real(s["x-min"], "x-min");
  if (has("x-max")) c.x_max = as_real(s["x-max"], "x-max");
  if (has("points")) {
    const long long p = as_integer(s["points"], "points");
    if (p < 0) throw UsageError("--points: requires at least 2 points");
    c.points = static_cast<std::size_t>(p);
  }
  if (command == Command::potential) {
    default_potential_grid(c, has("x-min"), has("x-max"), has("points"));
  }
  if (has("sizes")) c.sizes = as_integer_list(s["sizes"], "sizes");
  return c;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::potential: return "potential";
    case Command::check_derivatives: return "check-derivatives";
    case Command::convergence: return "convergence";
    case Command::validate: return "validate";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rayleigh_ritz: return "rayleigh-ritz";
    case Method::shooting: return "shooting";
    case Method::both: return "both";
  }
  return "?";
}

std::string_view to_string(Format f) { return f == Format::json ? "json" : "csv"; }

std::string_view to_string(DerivativeTarget t) {
  return t == DerivativeTarget::toy ? "toy" : "cq-eigenfunction";
}

const std::vector<std::string>& model_choices() {
  static const std::vector<std::string> names = {"cq-box", "aq-box", "half-ho", "anti-box"};
  return names;
}

void validate_config(const RunConfig& c) {
  const bool box = is_box(c.model);
  const bool half_ho = std::holds_alternative<HalfHarmonic>(c.model);
  if (std::holds_alternative<AntiBox>(c.model) && c.command != Command::potential) {
    throw UsageError("--model: anti-box supports only `potential`");
  }
  switch (c.command) {
    case Command::spectrum:
      if (c.levels < 1 || c.levels > kMaxLevels) {
        throw UsageError("--levels: requires 1 <= levels <= 12, got " + std::to_string(c.levels));
      }
      if (half_ho && c.method != Method::shooting) {
        throw UsageError("--method: half-ho is solved by shooting only");
      }
      if (c.method != Method::shooting) {
        if (c.basis_size < 1 || c.basis_size > 64) {
          throw UsageError("--basis-size: requires 1 <= N <= 64, got " +
                           std::to_string(c.basis_size));
        }
        if (c.levels > c.basis_size) {
          throw UsageError("--levels: cannot exceed --basis-size");
        }
      }
      if (c.method != Method::rayleigh_ritz) {
        if (c.grid_size < 1000 || c.grid_size > 2000000) {
          throw UsageError("--grid-size: requires 1000 <= M <= 2000000, got " +
                           std::to_string(c.grid_size));
        }
        if (!(c.tol >= 1e-10 && c.tol <= 1e-3)) {
          throw UsageError("--tol: requires 1e-10 <= tol <= 1e-3, got " + json(c.tol).dump());
        }
      }
      break;
    case Command::convergence:
      if (!box) throw UsageError("--model: convergence sweeps need cq-box or aq-box");
      if (c.sizes.empty()) throw UsageError("--sizes: requires at least one basis size");
      for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        if (c.sizes[i] < 1 || c.sizes[i] > 64) {
          throw UsageError("--sizes: every size must lie in [1, 64]");
        }
        if (i > 0 && c.sizes[i] <= c.sizes[i - 1]) {
          throw UsageError("--sizes: sizes must be strictly ascending");
        }
      }
      if (c.levels < 1 || c.levels > kMaxLevels) {
        throw UsageError("--levels: requires 1 <= levels <= 12, got " + std::to_string(c.levels));
      }
      if (c.levels > c.sizes.front()) {
        throw UsageError("--levels: cannot exceed the smallest of --sizes");
      }
      break;
    case Command::potential:
      if (!(std::isfinite(c.x_min) && std::isfinite(c.x_max) && c.x_min <= c.x_max)) {
        throw UsageError("--x-min: requires finite x-min <= x-max");
      }
      if (c.points < 1 || c.points > 1000000) {
        throw UsageError("--points: requires 1 <= points <= 1000000");
      }
      if (c.points > 1 && c.x_min == c.x_max) {
        throw UsageError("--x-max: must exceed --x-min when points > 1");
      }
      break;
    case Command::check_derivatives:
      if (c.n < 1 || c.n > 50) {
        throw UsageError("--n: requires 1 <= n <= 50, got " + std::to_string(c.n));
      }
      break;
    case Command::validate:
      break;
  }
}

ParseResult parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Particle-in-a-box spectra: canonical and affine quantization", "boxaffine"};
  app.require_subcommand(1, 1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::vector<std::string> keys;
  };
  const std::vector<std::string> model_keys = {"model", "b", "hbar", "W", "format", "out"};
  std::vector<Sub> subs;
  const auto add = [&](Command command, const char* help, std::vector<std::string> keys) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(command)), help);
    subs.push_back({command, sub, std::move(keys)});
  };
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> keys = model_keys;
    keys.insert(keys.end(), extra.begin(), extra.end());
    return keys;
  };
  add(Command::spectrum, "Lowest levels by Rayleigh-Ritz and/or Numerov shooting",
      with({"levels", "basis-size", "grid-size", "tol", "method", "dump-dir"}));
  add(Command::potential, "Sample V(x) as CSV", with({"x-min", "x-max", "points"}));
  add(Command::check_derivatives,
      "Weak second derivative, L2 classification and discrete h-scaling",
      {"target", "n", "b", "hbar", "format", "out"});
  add(Command::convergence, "Rayleigh-Ritz eigenvalues against basis size",
      with({"levels", "sizes"}));
  add(Command::validate, "Run the built-in acceptance suite", {});

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  for (auto& sub : subs) {
    for (const auto& key : sub.keys) {
      const KeySpec* spec = find_key(key);
      CLI::Option* opt = sub.app->add_option(flag(key), values[std::string(sub.app->get_name()) + "/" + key],
                                             spec->help);
      options[std::string(sub.app->get_name()) + "/" + key] = opt;
    }
    if (!sub.keys.empty()) {
      sub.app->add_option("--config", config_path, "flat JSON file with the same keys as the flags");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, app.help(), 0};
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, app.help("", CLI::AppFormatMode::All), 0};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const Sub* chosen = nullptr;
  for (const auto& sub : subs) {
    if (sub.app->parsed()) chosen = &sub;
  }
  if (chosen == nullptr) throw UsageError("a subcommand is required");
  for (const auto& sub : subs) {
    if (sub.app->parsed() && sub.app != chosen->app) throw UsageError("only one subcommand allowed");
  }
  if (chosen->app->get_help_ptr() != nullptr && chosen->app->get_help_ptr()->count() > 0) {
    return {std::nullopt, chosen->app->help(), 0};
  }

  json settings = config_path.empty() ? json::object() : read_config_file(config_path);
  const std::string prefix = std::string(chosen->app->get_name()) + "/";
  for (const auto& key : chosen->keys) {
    if (options[prefix + key]->count() > 0) settings[key] = values[prefix + key];
  }
  RunConfig config = build_config(chosen->command, settings);
  validate_config(config);
  return {config, "", 0};
}

}  // namespace boxaffine::cli
