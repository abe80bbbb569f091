#pragma once

// JSON reports ("schema": "boxaffine/1") and CSV helpers.
//
// Every report carries a content digest: FNV-1a 64 over the compact dump of
// the report with "digest" and "timings" removed. Keys are emitted in a fixed
// order, so identical configurations give byte-identical digested regions.

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "boxaffine/cli/config.hpp"

namespace boxaffine::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "boxaffine/1";

std::uint64_t fnv1a64(std::string_view bytes);

/// The digested region: the report without "digest" and "timings", dumped
/// compactly.
std::string digest_region(const Json& report);

/// Header with schema, command, units and config echo.
Json report_header(const RunConfig& config);

/// Appends "digest" and then "timings" (seconds per phase).
void finalize_report(Json& report, const Json& timings);

/// Schema violations, empty when the report is valid.
std::vector<std::string> validate_report(const Json& report);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace boxaffine::cli
