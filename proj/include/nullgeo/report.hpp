#pragma once

// Deterministic report serialization: sorted keys, computed floats as %.12e,
// the config echo with round-trip floats so it reparses to the same RunConfig.

#include <ostream>
#include <string>

#include "json.hpp"
#include "nullgeo/functionals.hpp"

namespace nullgeo {

nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const HypothesisFlags& h);

/// %.12e; "inf", "-inf" and "nan" for non-finite values.
std::string format_float(double v);

/// Two-space indented JSON. Floats under a top-level "config" key keep full precision.
std::string dump_report(const nlohmann::json& report);

/// theta,phi,value rows, one per grid node.
void write_field_csv(const std::string& path, const ScalarField& field);

}  // namespace nullgeo
