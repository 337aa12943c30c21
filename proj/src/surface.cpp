#include "nullgeo/surface.hpp"

#include <cstdio>
#include <set>

namespace nullgeo {

SurfaceSpec parse_surface(const std::string& source, const std::string& label) {
  const SurfaceExprs e = parse_surface_exprs(source);
  return SurfaceSpec{e.tau, e.rho, label};
}

std::string print_surface(const SurfaceSpec& spec) {
  return "t = " + print(spec.tau) + "; r = " + print(spec.rho);
}

Jet2 eval_jet2(const SurfaceSpec& spec, double theta, double phi) {
  Bindings<ad::HyperDual> b;
  b.theta = ad::HyperDual::variable(theta, 0);
  b.phi = ad::HyperDual::variable(phi, 1);
  Jet2 j;
  j.tau = evaluate(*spec.tau, b);
  j.rho = evaluate(*spec.rho, b);
  j.position.t = j.tau.v;
  j.position.r = j.rho.v;
  j.position.angles = {theta, phi};
  for (int a = 0; a < 2; ++a) {
    j.d1[a] = {j.tau.g[a], j.rho.g[a], a == 0 ? 1.0 : 0.0, a == 1 ? 1.0 : 0.0};
    for (int c = 0; c < 2; ++c)
      j.d2[a][c] = {j.tau.hess(a, c), j.rho.hess(a, c), 0.0, 0.0};
  }
  return j;
}

std::array<double, 2> eval_graph(const SurfaceSpec& spec, double theta, double phi) {
  Bindings<double> b;
  b.theta = theta;
  b.phi = phi;
  return {evaluate(*spec.tau, b), evaluate(*spec.rho, b)};
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"sphere_of_symmetry", "t0 = 0, r0 = 2",
       "rigidity case of every criterion; null hypersurfaces of symmetry"},
      {"perturbed_sphere",
       "t0 = 0, r0 = 2, epsilon = 0.05, mode = \"cos(theta)^2\", tau_mode = \"0\"",
       "generic untrapped surface; strict Heintze–Karcher and Schwarzschild inequalities"},
      {"ellipsoid_slice", "a = 1, c = 1.3",
       "time-symmetric slice surface; Euclidean reduction and the strict inequality case"},
      {"lightcone_section",
       "c = 5, u = \"1 + 0.2*sin(theta)*cos(phi)\", cone = \"minkowski\" | \"anti_de_sitter\" | "
       "\"de_sitter\"",
       "equality case of Heintze–Karcher (incoming shear-free null hypersurface)"},
      {"boosted_sphere", "v = 0.3, r0 = 1",
       "round sphere in a tilted hyperplane; normal frame and gauge invariance"},
  };
  return entries;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  return v < 0.0 ? "(" + s + ")" : s;
}

class Params {
 public:
  Params(const std::string& surface, const nlohmann::json& p) : surface_(surface), p_(p) {
    if (!p_.is_object()) throw SchemaError("parameters of '" + surface + "' must be an object");
  }

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (!p_.contains(key)) return fallback;
    if (!p_[key].is_number())
      throw SchemaError("parameter '" + key + "' of '" + surface_ + "' must be a number");
    return p_[key].get<double>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!p_.contains(key)) return fallback;
    if (!p_[key].is_string())
      throw SchemaError("parameter '" + key + "' of '" + surface_ + "' must be a string");
    return p_[key].get<std::string>();
  }

  void finish() const {
    for (auto it = p_.begin(); it != p_.end(); ++it)
      if (!used_.count(it.key()))
        throw SchemaError("unknown parameter '" + it.key() + "' for surface '" + surface_ + "'");
  }

 private:
  std::string surface_;
  const nlohmann::json& p_;
  std::set<std::string> used_;
};

// expression text checked on its own so error positions refer to the user's string
std::string checked(const std::string& expr) {
  parse_expression(expr);
  return "(" + expr + ")";
}

}  // namespace

SurfaceSpec catalog(const std::string& name, const nlohmann::json& params) {
  Params p(name, params);
  std::string tau, rho, label;
  if (name == "sphere_of_symmetry") {
    const double t0 = p.number("t0", 0.0), r0 = p.number("r0", 2.0);
    tau = num(t0);
    rho = num(r0);
    label = "sphere_of_symmetry(" + num(t0) + ", " + num(r0) + ")";
  } else if (name == "perturbed_sphere") {
    const double t0 = p.number("t0", 0.0), r0 = p.number("r0", 2.0);
    const double eps = p.number("epsilon", 0.05);
    const std::string mode = p.text("mode", "cos(theta)^2");
    const std::string tmode = p.text("tau_mode", "0");
    tau = tmode == "0" ? num(t0) : num(t0) + " + " + checked(tmode);
    rho = num(r0) + " + " + num(eps) + " * " + checked(mode);
    label = "perturbed_sphere(" + num(t0) + ", " + num(r0) + ", " + num(eps) + ", " + mode + ")";
  } else if (name == "ellipsoid_slice") {
    const double a = p.number("a", 1.0), c = p.number("c", 1.3);
    if (!(a > 0.0 && c > 0.0)) throw SchemaError("ellipsoid_slice needs a > 0 and c > 0");
    tau = "0";
    rho = "1 / sqrt(sin(theta)^2 / " + num(a) + "^2 + cos(theta)^2 / " + num(c) + "^2)";
    label = "ellipsoid_slice(" + num(a) + ", " + num(c) + ")";
  } else if (name == "lightcone_section") {
    const double c = p.number("c", 5.0);
    const std::string u = p.text("u", "1 + 0.2*sin(theta)*cos(phi)");
    const std::string cone = p.text("cone", "minkowski");
    const std::string arg = "(" + num(c) + " - " + checked(u) + ")";
    tau = checked(u);
    if (cone == "minkowski") {
      rho = num(c) + " - " + checked(u);
    } else if (cone == "anti_de_sitter") {
      // t + arctan r = c
      rho = "sin" + arg + " / cos" + arg;
    } else if (cone == "de_sitter") {
      // t + artanh r = c
      rho = "(1 - exp(-2 * " + arg + ")) / (1 + exp(-2 * " + arg + "))";
    } else {
      throw SchemaError("unknown cone '" + cone + "' for lightcone_section");
    }
    label = "lightcone_section(" + num(c) + ", " + u + (cone == "minkowski" ? "" : ", " + cone) + ")";
  } else if (name == "boosted_sphere") {
    const double v = p.number("v", 0.3), r0 = p.number("r0", 1.0);
    tau = num(v * r0) + " * cos(theta)";
    rho = num(r0);
    label = "boosted_sphere(" + num(v) + ", " + num(r0) + ")";
  } else {
    std::string names;
    for (const auto& e : catalog_entries()) names += (names.empty() ? "" : ", ") + e.name;
    throw SchemaError("unknown catalog surface '" + name + "' (known: " + names + ")");
  }
  p.finish();
  return parse_surface("t = " + tau + "; r = " + rho, label);
}

}  // namespace nullgeo
