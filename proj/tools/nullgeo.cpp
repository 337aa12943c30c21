#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "nullgeo/report.hpp"
#include "nullgeo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Integral identities and rigidity criteria for spacelike codimension-two surfaces"};
  app.require_subcommand(0, 1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "evaluate the checks of a JSON config");
  run->add_option("config", config_path, "path to the config file")->required();

  bool as_json = false;
  auto* cat = app.add_subcommand("catalog", "list the built-in surfaces");
  cat->add_flag("--json", as_json, "machine-readable output");

  auto* ver = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nullgeo::kExitSchema;
  }

  if (*run) return nullgeo::run_command(config_path, std::cout, std::cerr);
  if (*ver) {
    std::cout << nullgeo::version_string() << "\n";
    return 0;
  }
  // `catalog` and no subcommand at all
  if (as_json)
    std::cout << nullgeo::catalog_json().dump(2) << "\n";
  else
    std::cout << nullgeo::catalog_text();
  return 0;
}
