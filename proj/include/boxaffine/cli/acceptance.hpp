#pragma once

// Built-in acceptance suite run by `boxaffine validate` (criteria 1-9). The
// acceptance test binary adds the CLI contract check on top.

#include <functional>
#include <string>
#include <vector>

namespace boxaffine::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds, 0 for none
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;
  // Returns pass/fail and fills the detail text.
  std::function<bool(std::string&)> check;
};

const std::vector<Criterion>& acceptance_criteria();

/// Runs one criterion, timing it; exceptions become failures. Exceeding the
/// time limit fails the criterion.
CriterionResult run_criterion(const Criterion& c);

std::vector<CriterionResult> run_acceptance();

/// "PASS  [1] title: detail (0.12 s < 1 s)".
std::string format_criterion(const CriterionResult& r);

}  // namespace boxaffine::cli
