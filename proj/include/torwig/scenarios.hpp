#pragma once
// Scenario runner behind the command-line tool: each scenario executes a
// fixed experiment from an ExperimentConfig, writes CSV/JSON artifacts to the
// output directory and returns a Report whose checks decide the exit code.

#include <string>
#include <vector>

#include "torwig/config.hpp"
#include "torwig/io.hpp"

namespace torwig {

struct ScenarioInfo {
  std::string id;
  std::string description;
  std::string exercises;  // the mathematical statement the scenario checks
};

// Stable order: quantize-suite, wigner-suite, weakkam-sweep, wkb-limit, propagate, full-pipeline.
const std::vector<ScenarioInfo>& list_scenarios();
std::string format_scenario_list();

// Runs config.scenario, writing artifacts into `output_dir` (created if
// needed) and report.json. Throws ConfigError for an unknown scenario.
Report run_scenario(const ExperimentConfig& config, const std::string& output_dir);

}  // namespace torwig
