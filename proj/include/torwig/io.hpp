#pragma once
// Run reports, output-directory handling and deterministic CSV emission.

#include <string>
#include <vector>

namespace torwig {

// One named assertion of a scenario run: value compared against threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "in", "flag"
  bool pass = false;
  std::string detail;
};

Check check_le(const std::string& name, double value, double threshold, const std::string& detail = {});
Check check_ge(const std::string& name, double value, double threshold, const std::string& detail = {});
Check check_flag(const std::string& name, bool ok, const std::string& detail = {});

struct Metric {
  std::string name;
  double value = 0.0;
};

struct Report {
  std::string scenario;
  std::string config_source;
  std::vector<Check> checks;
  std::vector<Metric> metrics;
  std::vector<std::string> files;  // paths relative to the output directory
  std::string version;
  double wall_clock_seconds = 0.0;

  bool pass() const;
  const Check* find(const std::string& name) const;
};

// Resolves the output directory: TORWIG_OUTPUT_DIR overrides the configured one.
std::string resolve_output_dir(const std::string& configured);
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

// Writes rows with a header; numbers in full precision (%.17g), fixed column order.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// report.json in the output directory; then checks that every claimed file
// exists and parses (JSON by parser, CSV by a non-empty header line).
void write_report(const Report& r, const std::string& dir);
void verify_outputs(const Report& r, const std::string& dir);

std::string version_string();

}  // namespace torwig
