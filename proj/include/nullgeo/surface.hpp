#pragma once

// Codimension-two surfaces given as graphs (t, r) = (tau(theta,phi), rho(theta,phi))
// over the round sphere fibre of a 3+1 spacetime.

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullgeo/autodiff.hpp"
#include "nullgeo/expr.hpp"
#include "nullgeo/spacetime.hpp"

namespace nullgeo {

struct SurfaceSpec {
  ExprPtr tau;
  ExprPtr rho;
  std::string label;
};

SurfaceSpec parse_surface(const std::string& source, const std::string& label = "dsl");
/// "t = <tau>; r = <rho>"
std::string print_surface(const SurfaceSpec& spec);

/// 2-jet of F(theta, phi) = (tau, rho, theta, phi).
struct Jet2 {
  Point position;
  std::array<std::array<double, 4>, 2> d1{};
  std::array<std::array<std::array<double, 4>, 2>, 2> d2{};
  ad::HyperDual tau;
  ad::HyperDual rho;
};

/// Exact partials through hyper-dual evaluation of the AST.
Jet2 eval_jet2(const SurfaceSpec& spec, double theta, double phi);

/// Plain evaluation of (tau, rho).
std::array<double, 2> eval_graph(const SurfaceSpec& spec, double theta, double phi);

struct CatalogEntry {
  std::string name;
  std::string params;  // human-readable parameter list with defaults
  std::string exercises;
};

const std::vector<CatalogEntry>& catalog_entries();

/// Builds a catalog surface; unknown names or parameter keys raise SchemaError.
SurfaceSpec catalog(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

}  // namespace nullgeo
