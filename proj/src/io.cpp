#include "torwig/io.hpp"

#include <algorithm>
#include <boost/version.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fftw3.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "torwig/errors.hpp"

namespace torwig {

namespace {

std::string ends_with_ext(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot == std::string::npos ? std::string() : path.substr(dot + 1);
}

}  // namespace

Check check_le(const std::string& name, double value, double threshold, const std::string& detail) {
  return Check{name, value, threshold, "<=", value <= threshold, detail};
}

Check check_ge(const std::string& name, double value, double threshold, const std::string& detail) {
  return Check{name, value, threshold, ">=", value >= threshold, detail};
}

Check check_flag(const std::string& name, bool ok, const std::string& detail) {
  return Check{name, ok ? 1.0 : 0.0, 1.0, "flag", ok, detail};
}

bool Report::pass() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const Check* Report::find(const std::string& name) const {
  for (const Check& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string resolve_output_dir(const std::string& configured) {
  const char* env = std::getenv("TORWIG_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : configured;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw ConfigError("cannot open " + path + " for writing");
  for (std::size_t k = 0; k < header.size(); ++k) std::fprintf(f, "%s%s", k ? "," : "", header[k].c_str());
  std::fputc('\n', f);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) std::fprintf(f, "%s%.17g", k ? "," : "", row[k]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

void write_report(const Report& r, const std::string& dir) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["config"] = r.config_source;
  j["pass"] = r.pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    jc["relation"] = c.relation;
    jc["pass"] = c.pass;
    if (!c.detail.empty()) jc["detail"] = c.detail;
    j["checks"].push_back(jc);
  }
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const Metric& x : r.metrics) m[x.name] = x.value;
  j["metrics"] = m;
  j["files"] = r.files;
  j["version"] = r.version;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  const std::string path = join_path(dir, "report.json");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

void verify_outputs(const Report& r, const std::string& dir) {
  for (const std::string& name : r.files) {
    const std::string path = join_path(dir, name);
    std::ifstream in(path);
    if (!in) throw InvariantViolation("claimed output file is missing: " + path);
    const std::string ext = ends_with_ext(name);
    if (ext == "json") {
      try {
        (void)nlohmann::json::parse(in);
      } catch (const std::exception& e) {
        throw InvariantViolation("output file does not parse as JSON: " + path + " (" + e.what() + ")");
      }
    } else if (ext == "csv") {
      std::string header, first;
      if (!std::getline(in, header) || header.empty() || header.find(',') == std::string::npos) {
        throw InvariantViolation("output CSV lacks a header: " + path);
      }
      const auto columns = std::count(header.begin(), header.end(), ',');
      while (std::getline(in, first)) {
        if (std::count(first.begin(), first.end(), ',') != columns) {
          throw InvariantViolation("output CSV has a ragged row: " + path);
        }
      }
    }
  }
}

std::string version_string() {
  std::ostringstream os;
  os << "torwig " << TORWIG_VERSION << " (Eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
     << EIGEN_MINOR_VERSION << ", Boost " << BOOST_VERSION / 100000 << "." << BOOST_VERSION / 100 % 1000 << "."
     << BOOST_VERSION % 100 << ", " << fftw_version << ")";
  return os.str();
}

}  // namespace torwig
