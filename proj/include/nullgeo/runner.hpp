#pragma once

// Command implementations behind tools/nullgeo.cpp.
//
// Exit codes: 0 all checks passed, 1 a verdict was violated or differed from
// its expectation, 2 config schema error, 3 hypotheses failed on a check that
// requires them, 4 numerical domain error.

#include <ostream>
#include <string>

#include "json.hpp"
#include "nullgeo/config.hpp"

namespace nullgeo {

enum ExitCode { kExitOk = 0, kExitViolated = 1, kExitSchema = 2, kExitHypotheses = 3, kExitDomain = 4 };

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::vector<std::pair<std::string, ScalarField>> fields;  // file stem -> field
};

/// Evaluates every check; never throws for per-check failures.
RunResult execute(const RunConfig& config);

/// `nullgeo run`: loads, executes, writes the report and CSV dumps.
int run_command(const std::string& config_path, std::ostream& out, std::ostream& err);

std::string catalog_text();
nlohmann::json catalog_json();
std::string version_string();

}  // namespace nullgeo
