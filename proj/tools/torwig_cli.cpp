// torwig: experiment runner.
//
//   torwig run <config.ini>   run the configured scenario, write artifacts + report.json
//   torwig list               scenario ids, descriptions and the statement each exercises
//   torwig version            library and dependency versions
//
// Exit codes: 0 all checks pass, 1 a check failed or an invariant was
// violated, 2 configuration/parse error, 3 precondition violation.
// TORWIG_OUTPUT_DIR overrides the configured output directory.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "torwig/config.hpp"
#include "torwig/errors.hpp"
#include "torwig/io.hpp"
#include "torwig/scenarios.hpp"

namespace {

int run(const std::string& path) {
  using namespace torwig;
  try {
    const ExperimentConfig config = load_config(path);
    const std::string dir = resolve_output_dir(config.output);
    const Report r = run_scenario(config, dir);
    for (const Check& c : r.checks) {
      std::printf("%-4s %-36s %.6g %s %.6g  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.relation.c_str(), c.threshold, c.detail.c_str());
    }
    std::printf("%s: %s (%.1f s), report: %s\n", r.scenario.c_str(), r.pass() ? "pass" : "FAIL", r.wall_clock_seconds,
                join_path(dir, "report.json").c_str());
    if (!r.pass()) {
      for (const Check& c : r.checks) {
        if (!c.pass) std::cerr << "torwig: check failed: " << c.name << '\n';
      }
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "torwig: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "torwig: precondition violated: " << e.what() << '\n';
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "torwig: invariant violated: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner measures and weak KAM experiments on the torus"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the scenario named in a configuration file");
  run_cmd->add_option("config", config_path, "INI configuration file")->required();
  CLI::App* list_cmd = app.add_subcommand("list", "List the scenarios");
  CLI::App* version_cmd = app.add_subcommand("version", "Print versions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*list_cmd) {
    std::cout << torwig::format_scenario_list();
    return 0;
  }
  if (*version_cmd) {
    std::cout << torwig::version_string() << '\n';
    return 0;
  }
  if (*run_cmd) return run(config_path);
  return 2;
}
