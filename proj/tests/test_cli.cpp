// Configuration parsing, scenario listing, report artifacts and the exit-code
// contract of the command-line tool.

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "torwig/config.hpp"
#include "torwig/errors.hpp"
#include "torwig/io.hpp"
#include "torwig/scenarios.hpp"

using namespace torwig;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("torwig-test-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string what_of(const std::string& text) {
  try {
    parse_config(text, "case.ini");
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

int cli_exit(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(TORWIG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("parse_config: defaults, fractions and round trip") {
  const ExperimentConfig c = parse_config(
      "[scenario]\nname = wkb-limit\n[potential]\ncosines = 1:1, 2:0.5\n[wkb]\nP = 2\nhbar = 1/8, 1/16, 1/32, 1/64\n");
  CHECK(c.scenario == "wkb-limit");
  REQUIRE(c.cosines.size() == 2);
  CHECK(c.cosines[1].frequency[0] == 2);
  CHECK(c.cosines[1].coefficient == doctest::Approx(0.5));
  CHECK(c.hbars[3] == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(c.N == 512);

  const ExperimentConfig back = parse_config(to_ini(c));
  CHECK(back.scenario == c.scenario);
  CHECK(back.hbars == c.hbars);
  CHECK(back.cosines.size() == c.cosines.size());
  CHECK(back.P[0] == c.P[0]);
}

TEST_CASE("parse_config: empty potential is free") {
  const ExperimentConfig c = parse_config("[potential]\ncosines =\n[wkb]\nP = 1\n");
  CHECK(c.cosines.empty());
  CHECK(c.potential().modes().empty());
}

TEST_CASE("parse_config: malformed input names the line or field") {
  const std::string syntax = what_of("[grid]\nN = 64\n[potential\ncosines = 1:1\n");
  CHECK(syntax.find("case.ini:3") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[grid]\nN = 64\n[potential\n"), ConfigError);

  const std::string bad_potential = what_of("[potential]\ncosines = 1-1\n");
  CHECK(bad_potential.find("cosines") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[potential]\ncosines = 1-1\n"), ConfigError);

  CHECK(what_of("[grid]\nsize = 64\n").find("size") != std::string::npos);
  CHECK(what_of("[colours]\nred = 1\n").find("colours") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[grid]\nN = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nN = 63\n"), ConfigError);
}

TEST_CASE("parse_config: violated preconditions are PreconditionError") {
  // 1/hbar must be a multiple of 1/ell.
  CHECK_THROWS_AS(parse_config("[wkb]\nell = 1\nhbar = 1/8, 1/16, 1/32, 0.3\n"), PreconditionError);
  // P on the lattice ell Z.
  CHECK_THROWS_AS(parse_config("[wkb]\nell = 1\nP = 0.5\n"), PreconditionError);
  // Fewer than four hbar values, non-decreasing sequence.
  CHECK_THROWS_AS(parse_config("[wkb]\nhbar = 1/8, 1/16, 1/32\n"), PreconditionError);
  CHECK_THROWS_AS(parse_config("[wkb]\nhbar = 1/8, 1/32, 1/16, 1/64\n"), PreconditionError);
  // Propagation horizon.
  CHECK_THROWS_AS(parse_config("[dynamics]\nt = 3\n"), PreconditionError);
  // Tightness radii beyond |P|.
  CHECK_THROWS_AS(parse_config("[wkb]\nP = 4\n[dynamics]\nradii = 4, 8, 16\n"), PreconditionError);
}

TEST_CASE("list_scenarios: stable order and content") {
  const auto& list = list_scenarios();
  REQUIRE(list.size() == 6);
  const char* order[] = {"quantize-suite", "wigner-suite", "weakkam-sweep", "wkb-limit", "propagate", "full-pipeline"};
  for (std::size_t k = 0; k < list.size(); ++k) CHECK(list[k].id == order[k]);
  const std::string text = format_scenario_list();
  CHECK(text.find("weakkam-sweep") != std::string::npos);
  CHECK(text.find("propagation of monokinetic Wigner measures") != std::string::npos);
  CHECK(text == format_scenario_list());
}

TEST_CASE("run_scenario: quantize-suite report, artifacts and determinism") {
  ExperimentConfig c = parse_config("[scenario]\nname = quantize-suite\n[quantize]\nN = 64\nK = 16\n");
  const fs::path a = scratch("quantize-a"), b = scratch("quantize-b");
  const Report ra = run_scenario(c, a.string());
  run_scenario(c, b.string());
  CHECK(ra.pass());
  REQUIRE(ra.find("commutator") != nullptr);
  CHECK(ra.find("commutator")->value <= 1e-10);
  for (const char* f : {"quantize_moyal.csv", "quantize_cv.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto j = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(j.at("scenario") == "quantize-suite");
  CHECK(j.at("pass") == true);
  CHECK(j.contains("files"));
  CHECK(j.contains("version"));
  CHECK(j.contains("wall_clock_seconds"));
}

TEST_CASE("run_scenario: seeded wigner suite is byte-identical across runs") {
  ExperimentConfig c = parse_config(
      "[scenario]\nname = wigner-suite\n[wigner]\nN = 64\nstates = 4\nevolution_N = 64\nevolution_t = 0.05\n"
      "evolution_dt = 1e-2\n");
  const fs::path a = scratch("wigner-a"), b = scratch("wigner-b");
  run_scenario(c, a.string());
  run_scenario(c, b.string());
  for (const char* f : {"wigner_marginals.csv", "wigner_evolution.csv", "wigner_initial.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("run_scenario: unknown scenario and two-dimensional configs") {
  ExperimentConfig c;
  c.scenario = "nonsense";
  CHECK_THROWS_AS(run_scenario(c, scratch("unknown").string()), ConfigError);
  ExperimentConfig d = parse_config("[scenario]\nname = weakkam-sweep\n[grid]\ndim = 2\nN = 32\n[wkb]\nP = 0 0\n"
                                    "[potential]\ncosines = 1 0:1\n");
  CHECK_THROWS_AS(run_scenario(d, scratch("dim2").string()), PreconditionError);
}

TEST_CASE("resolve_output_dir: environment override") {
  ::setenv("TORWIG_OUTPUT_DIR", "/tmp/override-here", 1);
  CHECK(resolve_output_dir("configured") == "/tmp/override-here");
  ::unsetenv("TORWIG_OUTPUT_DIR");
  CHECK(resolve_output_dir("configured") == "configured");
}

TEST_CASE("torwig binary: exit-code contract") {
  const fs::path dir = scratch("binary");
  const fs::path log = dir / "log.txt";

  CHECK(cli_exit("list", log) == 0);
  CHECK(slurp(log).find("weakkam-sweep") != std::string::npos);
  CHECK(cli_exit("version", log) == 0);
  CHECK(slurp(log).find("torwig") != std::string::npos);
  CHECK(cli_exit("", log) == 2);

  {
    std::ofstream(dir / "malformed.ini") << "[potential]\ncosines = 1:x\n";
    CHECK(cli_exit("run " + (dir / "malformed.ini").string(), log) == 2);
    CHECK(slurp(log).find("cosines") != std::string::npos);
  }
  {
    std::ofstream(dir / "inadmissible.ini") << "[wkb]\nhbar = 1/8, 1/16, 1/32, 0.3\n";
    CHECK(cli_exit("run " + (dir / "inadmissible.ini").string(), log) == 3);
    CHECK(slurp(log).find("inadmissible") != std::string::npos);
  }
  {
    std::ofstream(dir / "ok.ini") << "[scenario]\nname = quantize-suite\noutput = ignored\n[quantize]\nN = 64\nK = 16\n";
    const std::string env = "TORWIG_OUTPUT_DIR=" + (dir / "out").string() + " ";
    const int status = std::system((env + TORWIG_CLI_PATH + " run " + (dir / "ok.ini").string() + " > " +
                                    log.string() + " 2>&1").c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "out" / "report.json"));
  }
  {
    // A failing assertion exits 1 and names the check.
    std::ofstream(dir / "red.ini") << "[scenario]\nname = wkb-limit\n[grid]\nN = 128\n[wkb]\nP = 2\n";
    const std::string env = "TORWIG_OUTPUT_DIR=" + (dir / "red").string() + " ";
    const int status = std::system((env + TORWIG_CLI_PATH + " run " + (dir / "red.ini").string() + " > " +
                                    log.string() + " 2>&1").c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 1);
    CHECK(slurp(log).find("check failed: current-floor") != std::string::npos);
  }
}
