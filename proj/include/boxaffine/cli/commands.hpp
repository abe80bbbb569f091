#pragma once

// Subcommand implementations and the in-process entry point used by the
// executable and the tests.

#include <iosfwd>
#include <string>
#include <vector>

#include "boxaffine/cli/config.hpp"
#include "boxaffine/cli/report.hpp"

namespace boxaffine::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDisagreement = 3;
inline constexpr int kExitSolverFailure = 4;

inline constexpr double kAgreementThreshold = 1e-5;

/// Report plus the exit code it implies (3 when methods disagree).
struct SpectrumOutcome {
  Json report;
  int exit_code = kExitOk;
};

SpectrumOutcome run_spectrum(const RunConfig& config);
Json run_check_derivatives(const RunConfig& config);
Json run_convergence(const RunConfig& config);

/// Throws UsageError when a sample lands on a singular point.
Json run_potential(const RunConfig& config);

/// Parses, dispatches and writes output. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boxaffine::cli
