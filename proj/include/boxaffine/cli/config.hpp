#pragma once

// Run configuration for the command-line tool: flag parsing, the flat JSON
// config file, defaults and validation.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boxaffine/potentials.hpp"

namespace boxaffine::cli {

enum class Command { spectrum, potential, check_derivatives, convergence, validate };
enum class Method { rayleigh_ritz, shooting, both };
enum class Format { json, csv };
enum class DerivativeTarget { toy, cq };

std::string_view to_string(Command c);
std::string_view to_string(Method m);
std::string_view to_string(Format f);
std::string_view to_string(DerivativeTarget t);

inline constexpr int kMaxLevels = 12;

struct RunConfig {
  Command command = Command::spectrum;
  ModelSpec model = AqBox{};
  Method method = Method::both;
  int levels = 6;
  int basis_size = 32;
  std::size_t grid_size = 20001;
  double tol = 1e-8;  // shooting energy tolerance, units of hbar^2/b^2 (hbar for half-ho)
  Format format = Format::json;
  std::string out;  // empty: standard output
  std::string dump_dir;

  // check-derivatives
  DerivativeTarget target = DerivativeTarget::toy;
  int n = 1;

  // potential
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;

  // convergence
  std::vector<int> sizes = {8, 16, 24, 32, 40, 48};
};

/// Raised for bad flags and invalid values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of parsing: a config to run, or text to print and an exit code
/// (help output, for instance).
struct ParseResult {
  std::optional<RunConfig> config;
  std::string message;
  int exit_code = 0;
};

/// Parses argv-style arguments (without the program name). Flags override
/// keys from --config. Throws UsageError.
ParseResult parse_config(const std::vector<std::string>& args);

/// Checks ranges and model/command compatibility. Throws UsageError naming
/// the offending flag.
void validate_config(const RunConfig& config);

/// Names accepted by --model.
const std::vector<std::string>& model_choices();

}  // namespace boxaffine::cli
