#include "nullgeo/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace nullgeo {

using nlohmann::json;

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "minkowski_basic", "minkowski_pm",       "euclidean_reduction",     "hk",
      "alexandrov",      "higher_minkowski",   "dzeta_invariance",        "schwarzschild_hypotheses",
      "schwarzschild_mink", "higher_alexandrov", "mixed_rs"};
  return names;
}

namespace {

/// Key-checked view of one JSON object.
class Block {
 public:
  Block(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SchemaError(where_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw SchemaError(where_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw SchemaError(where_ + "." + key + " must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw SchemaError(where_ + "." + key + " must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(where_ + "." + key + " must be a boolean");
    return v.get<bool>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError("unknown key '" + it.key() + "' in " + where_);
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Branch branch_from(const std::string& s, const std::string& where) {
  if (s == "incoming") return Branch::incoming;
  if (s == "outgoing") return Branch::outgoing;
  throw SchemaError(where + ".branch must be \"incoming\" or \"outgoing\"");
}

Family family_from(const std::string& s, const std::string& where) {
  if (s == "chi_family") return Family::chi_family;
  if (s == "chibar_family") return Family::chibar_family;
  throw SchemaError(where + ".family must be \"chi_family\" or \"chibar_family\"");
}

void check_expression(const std::string& text, const std::string& where) {
  try {
    parse_expression(text, ParseOptions{true});
  } catch (const SyntaxError& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

void check_weight(const std::string& text, const std::string& where) {
  try {
    parse_weight(text);
  } catch (const SyntaxError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

const std::set<std::string>& expectation_names() {
  static const std::set<std::string> names = {
      "identity_ok",   "inequality_ok",  "strict_positive",
      "violated",      "hypotheses_failed", "shear_free",
      "not_shear_free", "inconclusive",   "null_hypersurface_of_symmetry",
      "sphere_of_symmetry", "not_sphere_of_symmetry", "equality", "strict", "inequality"};
  return names;
}

CheckSpec parse_check(const json& j, int index) {
  Block b(j, "checks[" + std::to_string(index) + "]");
  CheckSpec c;
  if (!b.has("name")) throw SchemaError(b.where() + " needs a name");
  c.name = b.text("name", "");
  const auto& names = check_names();
  if (std::find(names.begin(), names.end(), c.name) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw SchemaError("unknown check '" + c.name + "' (known: " + all + ")");
  }
  const std::string& n = c.name;
  const bool takes_f = n == "minkowski_basic" || n == "minkowski_pm" || n == "euclidean_reduction" ||
                       n == "higher_minkowski" || n == "schwarzschild_mink";
  const bool takes_u = n == "minkowski_basic" || n == "dzeta_invariance";
  const bool takes_branch = n == "minkowski_pm" || n == "hk" || n == "alexandrov";
  const bool takes_family = n == "higher_minkowski" || n == "schwarzschild_mink" || n == "higher_alexandrov";
  const bool takes_rs = n == "higher_minkowski" || n == "mixed_rs";
  const bool takes_k = n == "schwarzschild_mink" || n == "higher_alexandrov";
  if (takes_f) {
    c.f = b.text("f", c.f);
    check_weight(c.f, b.where() + ".f");
  }
  if (takes_u) {
    c.u = b.text("u", c.u);
    check_expression(c.u, b.where() + ".u");
  }
  if (takes_branch) c.branch = branch_from(b.text("branch", "incoming"), b.where());
  if (takes_family) c.family = family_from(b.text("family", "chi_family"), b.where());
  if (takes_rs) {
    c.r = b.integer("r", 1);
    c.s = b.integer("s", n == "mixed_rs" ? 1 : 0);
  }
  if (takes_k) c.k = b.integer("k", 1);
  if (b.has("expect")) {
    c.expect = b.text("expect", "");
    if (!expectation_names().count(*c.expect))
      throw SchemaError(b.where() + ".expect: unknown verdict or classification '" + *c.expect + "'");
  }
  c.require_hypotheses = b.boolean("require_hypotheses", true);
  b.finish();
  return c;
}

Tolerances parse_tolerances(const json& j) {
  Block b(j, "tolerances");
  Tolerances t;
  t.identity = b.number("identity", t.identity);
  t.inequality = b.number("inequality", t.inequality);
  t.equality = b.number("equality", t.equality);
  t.shear = b.number("shear", t.shear);
  t.dzeta = b.number("dzeta", t.dzeta);
  t.gauge = b.number("gauge", t.gauge);
  t.pointwise = b.number("pointwise", t.pointwise);
  t.abs_floor = b.number("abs_floor", t.abs_floor);
  b.finish();
  for (double v : {t.identity, t.inequality, t.equality, t.shear, t.dzeta, t.gauge, t.pointwise, t.abs_floor})
    if (!(v >= 0.0)) throw SchemaError("tolerances must be nonnegative");
  return t;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return kind == o.kind && n == o.n && mass == o.mass && surface_catalog == o.surface_catalog &&
         surface_params == o.surface_params && surface_dsl == o.surface_dsl && n_theta == o.n_theta &&
         n_phi == o.n_phi && refined == o.refined && fd_order == o.fd_order && checks == o.checks &&
         tol == o.tol && report_path == o.report_path && fields_dir == o.fields_dir && formats == o.formats;
}

RunConfig parse_config(const json& j) {
  Block top(j, "config");
  RunConfig c;

  if (!top.has("spacetime")) throw SchemaError("config needs a spacetime block");
  {
    Block b(top.raw("spacetime"), "spacetime");
    if (!b.has("kind")) throw SchemaError("spacetime needs a kind");
    c.kind = spacetime_kind_from_string(b.text("kind", ""));
    c.n = b.integer("n", 3);
    if (c.n != 3) throw SchemaError("spacetime.n: grid-backed surfaces need n = 3");
    c.mass = b.number("mass", c.kind == SpacetimeKind::schwarzschild ? 1.0 : 0.0);
    if (c.mass < 0.0) throw SchemaError("spacetime.mass must be nonnegative");
    if (c.kind != SpacetimeKind::schwarzschild && c.mass != 0.0)
      throw SchemaError("spacetime.mass applies to schwarzschild only");
    b.finish();
  }

  if (!top.has("surface")) throw SchemaError("config needs a surface block");
  {
    Block b(top.raw("surface"), "surface");
    const bool has_cat = b.has("catalog"), has_dsl = b.has("dsl");
    if (has_cat == has_dsl) throw SchemaError("surface needs exactly one of catalog or dsl");
    if (has_cat) {
      c.surface_catalog = b.text("catalog", "");
      if (b.has("params")) c.surface_params = b.raw("params");
    } else {
      c.surface_dsl = b.text("dsl", "");
    }
    b.finish();
    try {
      make_surface(c);
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(std::string("surface: ") + e.what());
    }
  }

  if (top.has("grid")) {
    Block b(top.raw("grid"), "grid");
    c.n_theta = b.integer("n_theta", c.n_theta);
    c.n_phi = b.integer("n_phi", c.n_phi);
    c.refined = b.number("refined", c.refined);
    c.fd_order = b.integer("fd_order", c.fd_order);
    b.finish();
    if (c.n_theta < 8 || c.n_phi < 8 || c.n_phi % 2 != 0)
      throw SchemaError("grid: need n_theta >= 8 and an even n_phi >= 8");
    if (c.fd_order != 4 && c.fd_order != 8) throw SchemaError("grid.fd_order must be 4 or 8");
  }

  if (!top.has("checks")) throw SchemaError("config needs a checks list");
  {
    const json& list = top.raw("checks");
    if (!list.is_array()) throw SchemaError("checks must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) c.checks.push_back(parse_check(list[i], static_cast<int>(i)));
  }

  if (top.has("tolerances")) c.tol = parse_tolerances(top.raw("tolerances"));

  if (top.has("output")) {
    Block b(top.raw("output"), "output");
    c.report_path = b.text("report", "");
    c.fields_dir = b.text("fields_dir", "");
    if (b.has("formats")) {
      const json& f = b.raw("formats");
      if (!f.is_array()) throw SchemaError("output.formats must be a list");
      c.formats.clear();
      for (const auto& x : f) {
        if (!x.is_string() || (x != "json" && x != "csv"))
          throw SchemaError("output.formats entries must be \"json\" or \"csv\"");
        c.formats.push_back(x.get<std::string>());
      }
    }
    b.finish();
  }
  top.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["spacetime"] = {{"kind", to_string(c.kind)}, {"n", c.n}, {"mass", c.mass}};
  if (c.surface_catalog.empty())
    j["surface"] = {{"dsl", c.surface_dsl}};
  else
    j["surface"] = {{"catalog", c.surface_catalog}, {"params", c.surface_params}};
  j["grid"] = {{"n_theta", c.n_theta}, {"n_phi", c.n_phi}, {"refined", c.refined}, {"fd_order", c.fd_order}};
  json checks = json::array();
  for (const CheckSpec& k : c.checks) {
    json e{{"name", k.name}, {"require_hypotheses", k.require_hypotheses}};
    const std::string& n = k.name;
    if (n == "minkowski_basic" || n == "minkowski_pm" || n == "euclidean_reduction" || n == "higher_minkowski" ||
        n == "schwarzschild_mink")
      e["f"] = k.f;
    if (n == "minkowski_basic" || n == "dzeta_invariance") e["u"] = k.u;
    if (n == "minkowski_pm" || n == "hk" || n == "alexandrov") e["branch"] = to_string(k.branch);
    if (n == "higher_minkowski" || n == "schwarzschild_mink" || n == "higher_alexandrov")
      e["family"] = to_string(k.family);
    if (n == "higher_minkowski" || n == "mixed_rs") {
      e["r"] = k.r;
      e["s"] = k.s;
    }
    if (n == "schwarzschild_mink" || n == "higher_alexandrov") e["k"] = k.k;
    if (k.expect) e["expect"] = *k.expect;
    checks.push_back(e);
  }
  j["checks"] = checks;
  const Tolerances& t = c.tol;
  j["tolerances"] = {{"identity", t.identity}, {"inequality", t.inequality}, {"equality", t.equality},
                     {"shear", t.shear},       {"dzeta", t.dzeta},           {"gauge", t.gauge},
                     {"pointwise", t.pointwise}, {"abs_floor", t.abs_floor}};
  j["output"] = {{"report", c.report_path}, {"fields_dir", c.fields_dir}, {"formats", c.formats}};
  return j;
}

Spacetime make_spacetime(const RunConfig& c) { return Spacetime::make(c.kind, c.n, c.mass); }

SurfaceSpec make_surface(const RunConfig& c) {
  if (!c.surface_catalog.empty()) return catalog(c.surface_catalog, c.surface_params);
  try {
    return parse_surface(c.surface_dsl);
  } catch (const SyntaxError& e) {
    throw SchemaError(std::string("surface.dsl: ") + e.what());
  }
}

}  // namespace nullgeo
