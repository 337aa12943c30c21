#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nullgeo/config.hpp"
#include "nullgeo/report.hpp"
#include "nullgeo/runner.hpp"

using namespace nullgeo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = NULLGEO_CLI_PATH;
const std::string kConfigs = NULLGEO_CONFIG_DIR;

struct Proc {
  int code = -1;
  std::string out;
};

Proc run_cli(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  Proc r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nullgeo_test_" + std::to_string(getpid()));
  fs::create_directories(d);
  return d / name;
}

std::string write_config(const std::string& name, const json& j) {
  const fs::path p = scratch(name);
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json base_config() {
  return {{"spacetime", {{"kind", "minkowski"}}},
          {"surface", {{"catalog", "sphere_of_symmetry"}}},
          {"grid", {{"n_theta", 16}, {"n_phi", 32}, {"refined", 1.0}}},
          {"checks", {{{"name", "hk"}}}}};
}

int exit_of(const json& j) { return execute(parse_config(j)).exit_code; }

// hand-rolled generator over the schema
json random_config(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto real = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  json j;
  static const char* kinds[] = {"minkowski", "schwarzschild", "anti_de_sitter", "de_sitter"};
  const std::string kind = kinds[pick(4)];
  j["spacetime"] = {{"kind", kind}};
  if (kind == "schwarzschild") j["spacetime"]["mass"] = real(0.0, 2.0);
  if (pick(2)) j["spacetime"]["n"] = 3;
  switch (pick(4)) {
    case 0: j["surface"] = {{"catalog", "sphere_of_symmetry"}, {"params", {{"r0", real(1.0, 5.0)}, {"t0", real(-1, 1)}}}}; break;
    case 1:
      j["surface"] = {{"catalog", "perturbed_sphere"},
                      {"params", {{"epsilon", real(0, 0.1)}, {"mode", "sin(theta)*cos(phi)"}, {"tau_mode", "0.1*cos(theta)"}}}};
      break;
    case 2: j["surface"] = {{"catalog", "ellipsoid_slice"}, {"params", {{"a", real(0.5, 2)}, {"c", real(0.5, 2)}}}}; break;
    default: j["surface"] = {{"dsl", "t = 0.1*cos(theta); r = 2 + 0.1*sin(theta)^2"}}; break;
  }
  if (pick(2)) j["grid"] = {{"n_theta", 8 + 2 * pick(20)}, {"n_phi", 16 + 2 * pick(40)}, {"refined", real(0.5, 2.0)},
                            {"fd_order", pick(2) ? 4 : 8}};
  json checks = json::array();
  const auto& names = check_names();
  for (int c = 0, nc = 1 + pick(4); c < nc; ++c) {
    const std::string n = names[pick(static_cast<int>(names.size()))];
    json e{{"name", n}};
    if (n == "minkowski_basic" || n == "minkowski_pm" || n == "euclidean_reduction" || n == "higher_minkowski" ||
        n == "schwarzschild_mink")
      e["f"] = pick(2) ? "1 + 0.3*cos(theta)" : "1/|H|";
    if (n == "minkowski_basic" || n == "dzeta_invariance") e["u"] = "0.2*sin(theta)*cos(phi)";
    if (n == "minkowski_pm" || n == "hk" || n == "alexandrov") e["branch"] = pick(2) ? "incoming" : "outgoing";
    if (n == "higher_minkowski" || n == "schwarzschild_mink" || n == "higher_alexandrov")
      e["family"] = pick(2) ? "chi_family" : "chibar_family";
    if (n == "higher_minkowski" || n == "mixed_rs") {
      e["r"] = 1 + pick(2);
      e["s"] = pick(2);
    }
    if (n == "schwarzschild_mink" || n == "higher_alexandrov") e["k"] = 1 + pick(2);
    if (pick(3) == 0) e["expect"] = pick(2) ? "inequality_ok" : "shear_free";
    if (pick(3) == 0) e["require_hypotheses"] = false;
    checks.push_back(e);
  }
  j["checks"] = checks;
  if (pick(2)) j["tolerances"] = {{"identity", real(1e-9, 1e-5)}, {"shear", real(1e-7, 1e-4)}, {"abs_floor", 1e-13}};
  if (pick(2)) j["output"] = {{"report", "out.json"}, {"formats", {"json", "csv"}}, {"fields_dir", "f"}};
  return j;
}

}  // namespace

TEST_CASE("parse_config: schema errors") {
  auto bad = [](json j) { CHECK_THROWS_AS(parse_config(j), SchemaError); };
  json j = base_config();
  j["spacetime"]["kind"] = "kerr";
  bad(j);
  j = base_config();
  j["extra"] = 1;
  bad(j);
  j = base_config();
  j["grid"]["n_theta"] = "sixty";
  bad(j);
  j = base_config();
  j["checks"][0]["name"] = "nonsense";
  bad(j);
  j = base_config();
  j["checks"][0]["branch"] = "sideways";
  bad(j);
  j = base_config();
  j["checks"] = {{{"name", "minkowski_pm"}, {"f", "1 + * 2"}}};
  bad(j);
  j = base_config();
  j["checks"] = {{{"name", "minkowski_pm"}, {"f", "1 + zeta"}}};
  bad(j);
  j = base_config();
  j["checks"][0]["f"] = "1";  // hk takes no weight
  bad(j);
  j = base_config();
  j["output"] = {{"formats", {"xml"}}};
  bad(j);
  j = base_config();
  j.erase("surface");
  bad(j);
  j = base_config();
  j["surface"]["dsl"] = "t = 0; r = 2";  // both catalog and dsl
  bad(j);
  j = base_config();
  j["surface"]["params"] = {{"radius", 2}};
  bad(j);
  j = base_config();
  j["checks"][0]["expect"] = "great";
  bad(j);
  CHECK_THROWS_AS(parse_config(json::array()), SchemaError);
  CHECK_THROWS_AS(load_config((scratch("missing.json")).string()), SchemaError);
}

TEST_CASE("config round trip over random configs") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 200; ++n) {
    const json j = random_config(rng);
    INFO(j.dump());
    const RunConfig c = parse_config(j);
    const json e = to_json(c);
    CHECK(parse_config(e) == c);
    CHECK(to_json(parse_config(e)) == e);
    // through text as well
    CHECK(parse_config(json::parse(e.dump())) == c);
  }
}

TEST_CASE("report echo reparses to the same config") {
  const RunConfig c = load_config(kConfigs + "/schwarzschild_sphere.json");
  const RunResult r = execute(c);
  CHECK(parse_config(r.report["config"]) == c);
  const json back = json::parse(dump_report(r.report));
  CHECK(parse_config(back["config"]) == c);
  CHECK(back["environment"]["version"] == version_string());
  CHECK(back["environment"]["grid"]["n_theta"] == 64);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  json j = base_config();
  j["surface"] = {{"catalog", "perturbed_sphere"}, {"params", {{"tau_mode", "0.1*sin(theta)*cos(phi)"}}}};
  j["grid"] = {{"n_theta", 24}, {"n_phi", 48}, {"refined", 1.5}};
  j["checks"] = {{{"name", "minkowski_basic"}, {"f", "r"}, {"u", "0.1*cos(theta)"}},
                 {{"name", "hk"}, {"branch", "outgoing"}, {"require_hypotheses", false}},
                 {{"name", "dzeta_invariance"}, {"u", "0.2*sin(theta)"}}};
  const RunConfig c = parse_config(j);
  std::string first;
  for (const char* t : {"1", "3", "1", "2"}) {
    setenv("NULLGEO_THREADS", t, 1);
    const std::string d = dump_report(execute(c).report);
    if (first.empty()) first = d;
    CHECK(d == first);
  }
  unsetenv("NULLGEO_THREADS");
}

TEST_CASE("report formatting") {
  CHECK(format_float(1.0) == "1.000000000000e+00");
  CHECK(format_float(-0.00123) == "-1.230000000000e-03");
  CHECK(format_float(HUGE_VAL) == "inf");
  CHECK(format_float(-HUGE_VAL) == "-inf");
  CHECK(format_float(NAN) == "nan");
  const std::string d = dump_report(json{{"b", 0.5}, {"a", {{"z", 1}, {"y", 2.0}}}});
  CHECK(d.find("\"a\"") < d.find("\"b\""));
  CHECK(d.find("\"y\"") < d.find("\"z\""));
  CHECK(d.find("5.000000000000e-01") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli("run \"" + kConfigs + "/schwarzschild_sphere.json\"").code == kExitOk);
  CHECK(run_cli("run \"" + kConfigs + "/ellipsoid_strict.json\"").code == kExitOk);
  CHECK(run_cli("run \"" + kConfigs + "/unknown_kind.json\"").code == kExitSchema);
  {
    std::ostringstream out, err;
    CHECK(run_command(kConfigs + "/unknown_kind.json", out, err) == kExitSchema);
    CHECK(err.str().find("kerr") != std::string::npos);
  }

  // 1: an unexpected strict inequality, and an expectation that is not met
  json j = base_config();
  j["surface"] = {{"catalog", "ellipsoid_slice"}};
  CHECK(exit_of(j) == kExitViolated);
  j["checks"][0]["expect"] = "equality";
  CHECK(exit_of(j) == kExitViolated);
  j["checks"][0]["expect"] = "strict";
  CHECK(exit_of(j) == kExitOk);

  // 3: hypotheses required, and a check outside its hypothesis range
  j = base_config();
  j["spacetime"] = {{"kind", "schwarzschild"}, {"mass", 1.0}};
  j["surface"] = {{"catalog", "perturbed_sphere"}, {"params", {{"r0", 3.0}, {"tau_mode", "0.3*sin(theta)*cos(phi)"}}}};
  j["checks"] = {{{"name", "schwarzschild_hypotheses"}}};
  CHECK(exit_of(j) == kExitHypotheses);
  j["checks"][0]["require_hypotheses"] = false;
  CHECK(exit_of(j) == kExitOk);
  j["surface"] = {{"catalog", "sphere_of_symmetry"}, {"params", {{"r0", 3.0}}}};
  j["checks"] = {{{"name", "higher_minkowski"}, {"r", 1}, {"s", 0}}};
  CHECK(exit_of(j) == kExitHypotheses);

  // 4: inside the horizon
  j["surface"]["params"]["r0"] = 1.5;
  j["checks"] = {{{"name", "hk"}}};
  const RunResult dom = execute(parse_config(j));
  CHECK(dom.exit_code == kExitDomain);
  CHECK(dom.report["overall"].contains("error"));
  CHECK(run_cli("run \"" + write_config("domain.json", j) + "\"").code == kExitDomain);

  // precedence: a hypothesis failure outranks a violation
  j = base_config();
  j["checks"] = {{{"name", "hk"}, {"expect", "strict"}}, {{"name", "higher_minkowski"}}};
  j["spacetime"] = {{"kind", "schwarzschild"}};
  j["surface"] = {{"catalog", "sphere_of_symmetry"}, {"params", {{"r0", 3.0}}}};
  CHECK(exit_of(j) == kExitHypotheses);
  j["checks"].erase(1);
  CHECK(exit_of(j) == kExitViolated);
}

TEST_CASE("shipped configs: symmetric sphere reports a vanishing Alexandrov value") {
  const RunResult r = execute(load_config(kConfigs + "/schwarzschild_sphere.json"));
  CHECK(r.exit_code == kExitOk);
  const json& checks = r.report["checks"];
  REQUIRE(checks.size() == 3);
  CHECK(checks[2]["report"]["check"] == "alexandrov_incoming");
  CHECK(std::abs(checks[2]["report"]["value"].get<double>()) <= 1e-12);
  CHECK(r.report["overall"]["passed"] == 3);
}

TEST_CASE("cli: catalog, version and usage") {
  const Proc text = run_cli("catalog");
  CHECK(text.code == 0);
  CHECK(text.out.find("lightcone_section \xE2\x80\x94 equality case of Heintze\xE2\x80\x93Karcher") != std::string::npos);
  for (const auto& e : catalog_entries()) CHECK(text.out.find(e.name) != std::string::npos);
  CHECK(run_cli("").out == text.out);
  CHECK(run_cli("").code == 0);
  const Proc js = run_cli("catalog --json");
  CHECK(js.code == 0);
  const json list = json::parse(js.out);
  REQUIRE(list.is_array());
  CHECK(list.size() == catalog_entries().size());
  CHECK(list[0].contains("params"));
  CHECK(list == catalog_json());
  const Proc v = run_cli("version");
  CHECK(v.out == version_string() + "\n");
  CHECK(version_string() == "nullgeo 0.1.0");
  CHECK(run_cli("frobnicate").code == kExitSchema);
  CHECK(run_cli("run").code == kExitSchema);
}

TEST_CASE("cli: json report file and csv field dumps") {
  json j = base_config();
  j["surface"] = {{"catalog", "ellipsoid_slice"}};
  j["checks"] = {{{"name", "hk"}, {"expect", "strict_positive"}}, {{"name", "minkowski_pm"}, {"f", "1/|H|"}}};
  const fs::path dir = scratch("fields");
  const fs::path report = scratch("report.json");
  fs::remove_all(dir);
  j["output"] = {{"report", report.string()}, {"formats", {"json", "csv"}}, {"fields_dir", dir.string()}};
  const Proc p = run_cli("run \"" + write_config("csv.json", j) + "\"");
  CHECK(p.code == kExitOk);
  CHECK(p.out.empty());
  std::ifstream rf(report);
  const json rep = json::parse(rf);
  CHECK(rep["overall"]["exit_code"] == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    std::ifstream f(e.path());
    std::string header;
    std::getline(f, header);
    CHECK(header == "theta,phi,value");
    int rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    CHECK(rows == 16 * 32);
  }
  CHECK(files >= 2);
  // stdout report when no path is configured
  j["output"] = {{"formats", {"json"}}};
  const Proc q = run_cli("run \"" + write_config("stdout.json", j) + "\"");
  CHECK(q.code == kExitOk);
  CHECK(json::parse(q.out)["checks"].size() == 2);
  fs::remove_all(scratch("").parent_path());
}
