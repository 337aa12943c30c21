#pragma once

// Run configuration: a validating loader for the JSON schema in docs/config.md
// and the inverse used for the config echo in reports.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullgeo/functionals.hpp"

namespace nullgeo {

struct CheckSpec {
  std::string name;
  std::string f = "1";
  std::string u = "0";
  Branch branch = Branch::incoming;
  Family family = Family::chi_family;
  int r = 0, s = 0;
  int k = 1;                        // order for the single-index checks
  std::optional<std::string> expect;  // verdict or classification
  bool require_hypotheses = true;

  bool operator==(const CheckSpec&) const = default;
};

struct RunConfig {
  SpacetimeKind kind = SpacetimeKind::minkowski;
  int n = 3;
  double mass = 0.0;

  std::string surface_catalog;           // empty when surface_dsl is used
  nlohmann::json surface_params = nlohmann::json::object();
  std::string surface_dsl;

  int n_theta = 64, n_phi = 128;
  double refined = 1.5;                  // <= 1 disables the refined cross-check
  int fd_order = GridSpec::kDefaultOrder;

  std::vector<CheckSpec> checks;
  Tolerances tol;

  std::string report_path;               // empty: stdout
  std::string fields_dir;                // empty: no CSV dumps
  std::vector<std::string> formats{"json"};

  bool operator==(const RunConfig& o) const;
};

/// Names accepted in checks[].name.
const std::vector<std::string>& check_names();

/// SchemaError on unknown keys, wrong types, unknown names or unparsable expressions.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully explicit form (defaults filled in); parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

Spacetime make_spacetime(const RunConfig& c);
SurfaceSpec make_surface(const RunConfig& c);

}  // namespace nullgeo
