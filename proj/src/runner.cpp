#include "nullgeo/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "nullgeo/report.hpp"

namespace nullgeo {

using nlohmann::json;

namespace {

IdentityReport flags_report(const Evaluation& ev, const HypothesisFlags& h) {
  const SurfaceData& s = ev.surface();
  IdentityReport rep;
  rep.check = "schwarzschild_hypotheses";
  rep.n_theta = s.grid->n_theta();
  rep.n_phi = s.grid->n_phi();
  const bool any_case = h.case1() || h.case2() || h.case3();
  rep.verdict = h.dzeta_zero && any_case ? Verdict::identity_ok : Verdict::hypotheses_failed;
  if (!h.dzeta_zero) rep.notes.push_back("d zeta does not vanish");
  if (!any_case) rep.notes.push_back("none of the divergence-sign cases holds");
  rep.diagnostics["dzeta_max"] = h.dzeta_max;
  rep.diagnostics["gauge_residual"] = h.gauge_residual;
  return rep;
}

IdentityReport dzeta_report(const Evaluation& ev, const Expr& u) {
  const SurfaceData& s = ev.surface();
  const DzetaInvariance d = dzeta_invariance(ev, u);
  IdentityReport rep;
  rep.check = "dzeta_invariance";
  rep.n_theta = s.grid->n_theta();
  rep.n_phi = s.grid->n_phi();
  rep.value = d.invariance;
  rep.scale = 1.0;
  rep.relative = d.invariance;
  rep.diagnostics["ricci_diff"] = d.ricci_diff;
  rep.diagnostics["dzeta_max"] = d.dzeta_max;
  rep.verdict = d.invariance <= ev.tolerances().dzeta ? Verdict::identity_ok : Verdict::violated;
  return rep;
}

bool uses_flags(const SurfaceData& s, const CheckSpec& c) {
  const bool sch = s.st.kind() == SpacetimeKind::schwarzschild;
  return c.name == "schwarzschild_hypotheses" || c.name == "schwarzschild_mink" ||
         (c.name == "higher_alexandrov" && sch && !s.st.constant_curvature());
}

IdentityReport evaluate_check(const Evaluation& ev, const CheckSpec& c) {
  const std::string& n = c.name;
  if (n == "minkowski_basic") return minkowski_residual_basic(ev, parse_weight(c.f), *parse_expression(c.u, {true}));
  if (n == "minkowski_pm") return minkowski_residual_pm(ev, parse_weight(c.f), c.branch);
  if (n == "euclidean_reduction") return euclidean_reduction_check(ev, parse_weight(c.f));
  if (n == "hk") return hk_functional(ev, c.branch);
  if (n == "alexandrov") return alexandrov_criterion(ev, c.branch);
  if (n == "higher_minkowski") return higher_minkowski_residual(ev, parse_weight(c.f), c.r, c.s, c.family);
  if (n == "dzeta_invariance") return dzeta_report(ev, *parse_expression(c.u, {true}));
  if (n == "schwarzschild_hypotheses") return flags_report(ev, schwarzschild_hypotheses(ev));
  if (n == "schwarzschild_mink") return schwarzschild_mink_inequality(ev, parse_weight(c.f), c.k, c.family);
  if (n == "higher_alexandrov") return higher_alexandrov_criterion(ev, c.k, c.family);
  if (n == "mixed_rs") return mixed_rs_criterion(ev, c.r, c.s);
  throw SchemaError("unknown check '" + n + "'");
}

json check_echo(const CheckSpec& c) {
  RunConfig one;
  one.checks = {c};
  return to_json(one)["checks"][0];
}

int grade(const IdentityReport& rep, const CheckSpec& c) {
  if (c.expect) {
    if (to_string(rep.verdict) == *c.expect || rep.classification == *c.expect) return kExitOk;
    if (rep.verdict == Verdict::hypotheses_failed && c.require_hypotheses) return kExitHypotheses;
    return kExitViolated;
  }
  switch (rep.verdict) {
    case Verdict::identity_ok:
    case Verdict::inequality_ok:
      return kExitOk;
    case Verdict::hypotheses_failed:
      return c.require_hypotheses ? kExitHypotheses : kExitOk;
    case Verdict::strict_positive:
    case Verdict::violated:
      return kExitViolated;
  }
  return kExitViolated;
}

int combine(int a, int b) {
  // precedence: schema, domain, hypotheses, violated
  for (int code : {kExitSchema, kExitDomain, kExitHypotheses, kExitViolated})
    if (a == code || b == code) return code;
  return kExitOk;
}

std::string safe_stem(const std::string& s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  return out;
}

json grid_json(const GridPtr& g) {
  return {{"n_theta", g->n_theta()}, {"n_phi", g->n_phi()}, {"fd_order", g->fd_order()}};
}

}  // namespace

RunResult execute(const RunConfig& config) {
  RunResult res;
  json& rep = res.report;
  rep["config"] = to_json(config);
  const Spacetime st = make_spacetime(config);
  const SurfaceSpec spec = make_surface(config);
  const GridPtr grid = GridSpec::make(config.n_theta, config.n_phi, config.fd_order);
  GridPtr fine;
  if (config.refined > 1.0) {
    const int nt = static_cast<int>(std::lround(config.n_theta * config.refined));
    int np = static_cast<int>(std::lround(config.n_phi * config.refined));
    np += np % 2;
    fine = GridSpec::make(nt, np, config.fd_order);
  }
  json env;
  env["version"] = version_string();
  env["grid"] = grid_json(grid);
  env["refined_grid"] = fine ? grid_json(fine) : json(nullptr);
  env["tolerances"] = rep["config"]["tolerances"];
  rep["environment"] = env;
  rep["spacetime"] = st.describe();
  rep["surface"] = {{"label", spec.label}, {"dsl", print_surface(spec)}};

  std::unique_ptr<Evaluation> ev, ev_fine;
  std::string build_error;
  int build_code = kExitOk;
  try {
    ev = std::make_unique<Evaluation>(st, spec, grid, config.tol);
    if (fine) ev_fine = std::make_unique<Evaluation>(st, spec, fine, config.tol);
  } catch (const DomainError& e) {
    build_error = e.what();
    build_code = kExitDomain;
  } catch (const PreconditionError& e) {
    build_error = e.what();
    build_code = kExitDomain;
  }

  json checks = json::array();
  int overall = build_code;
  int passed = 0, failed = 0;
  for (std::size_t i = 0; i < config.checks.size(); ++i) {
    const CheckSpec& c = config.checks[i];
    json entry;
    entry["spec"] = check_echo(c);
    int code = kExitOk;
    if (!ev) {
      entry["error"] = build_error;
      code = build_code;
    } else {
      try {
        IdentityReport r = evaluate_check(*ev, c);
        if (ev_fine) attach_refined(r, evaluate_check(*ev_fine, c));
        if (uses_flags(ev->surface(), c)) entry["flags"] = to_json(schwarzschild_hypotheses(*ev));
        code = grade(r, c);
        entry["report"] = to_json(r);
        for (auto& [name, field] : r.fields)
          res.fields.emplace_back(std::to_string(i) + "_" + safe_stem(r.check) + "_" + safe_stem(name),
                                  std::move(field));
      } catch (const DomainError& e) {
        entry["error"] = e.what();
        code = kExitDomain;
      } catch (const PreconditionError& e) {
        entry["error"] = e.what();
        code = kExitHypotheses;
      } catch (const SchemaError& e) {
        entry["error"] = e.what();
        code = kExitSchema;
      } catch (const Error& e) {
        entry["error"] = e.what();
        code = kExitDomain;
      }
    }
    entry["exit_code"] = code;
    entry["passed"] = code == kExitOk;
    (code == kExitOk ? passed : failed) += 1;
    overall = combine(overall, code);
    checks.push_back(entry);
  }
  rep["checks"] = checks;
  rep["overall"] = {{"exit_code", overall}, {"passed", passed}, {"failed", failed}};
  if (!build_error.empty()) rep["overall"]["error"] = build_error;
  res.exit_code = overall;
  return res;
}

int run_command(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitSchema;
  }
  RunResult res;
  try {
    res = execute(config);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const Error& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  }
  const auto has = [&](const char* f) {
    return std::find(config.formats.begin(), config.formats.end(), f) != config.formats.end();
  };
  try {
    if (has("json")) {
      const std::string text = dump_report(res.report);
      if (config.report_path.empty()) {
        out << text;
      } else {
        std::ofstream f(config.report_path);
        if (!f) throw Error("cannot write '" + config.report_path + "'");
        f << text;
      }
    }
    if (has("csv")) {
      const std::string dir = config.fields_dir.empty() ? "fields" : config.fields_dir;
      std::filesystem::create_directories(dir);
      for (const auto& [stem, field] : res.fields) write_field_csv(dir + "/" + stem + ".csv", field);
    }
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitDomain;
  }
  for (const auto& c : res.report["checks"]) {
    if (c.contains("error")) err << c["spec"]["name"].get<std::string>() << ": " << c["error"].get<std::string>() << "\n";
  }
  return res.exit_code;
}

std::string catalog_text() {
  std::string out;
  for (const auto& e : catalog_entries()) {
    out += e.name + " \xE2\x80\x94 " + e.exercises + "\n";
    out += "    params: " + e.params + "\n";
  }
  return out;
}

json catalog_json() {
  json list = json::array();
  for (const auto& e : catalog_entries())
    list.push_back({{"name", e.name}, {"params", e.params}, {"exercises", e.exercises}});
  return list;
}

std::string version_string() { return "nullgeo 0.1.0"; }

}  // namespace nullgeo
