#pragma once
// Experiment configuration: a flat INI file with one section per module.
//
//   [scenario]  name, output, seed
//   [grid]      dim, N
//   [potential] cosines = "k:c, ..." (1D) or "k0 k1:c, ..." (2D); empty = free
//   [wkb]       ell, P, hbar (list, fractions allowed), epsilon, gamma
//   [dynamics]  t, dt, tightness_time, radii
//   [weakkam]   h, max_iter, tol, sweep (list of P)
//   [tests]     q_max, p_max, nodes, centres
//   [quantize]  N, K, hbar
//   [wigner]    N, states, hbar, evolution_N, evolution_hbar, evolution_t, evolution_dt
//
// Every key is optional; unknown sections or keys are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "torwig/potential.hpp"

namespace torwig {

struct ExperimentConfig {
  std::string source = "<defaults>";
  std::string scenario = "full-pipeline";
  std::string output = "torwig-output";
  std::uint64_t seed = 20240601;

  int dim = 1;
  int N = 512;
  std::vector<CosineTerm> cosines{{{1, 0}, 1.0}};
  Potential potential() const;

  double ell = 1.0;
  Point P{2.0, 0.0};
  std::vector<double> hbars{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  double epsilon = 0.2;
  double gamma = 0.1;

  double t = 0.5;
  double dt = 1e-3;
  double tightness_time = 1.0;
  std::vector<double> radii{4.0, 8.0, 16.0};

  double lo_h = 0.025;
  int lo_max_iter = 20000;
  double lo_tol = 1e-10;
  std::vector<double> sweep{0.0, 1.0, 2.0, 3.0, 4.0};

  int q_max = 2;
  double p_max = 1.0;
  int nodes = 128;
  std::vector<double> centres{0.0, 1.0, 2.0};

  int quantize_N = 128;
  int quantize_K = 32;
  std::vector<double> quantize_hbars{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};

  int wigner_N = 128;
  int wigner_states = 20;
  double wigner_hbar = 1.0 / 16;
  int evolution_N = 256;
  double evolution_hbar = 1.0 / 16;
  double evolution_t = 0.5;
  double evolution_dt = 1e-3;
};

// Parses INI text; `source` names the input in diagnostics. Syntax errors and
// bad values raise ConfigError (with line or [section] key), violated
// preconditions (inadmissible hbar, P off the lattice, |t| > 2, dt not
// dividing t) raise PreconditionError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

// Checks cross-field preconditions; called by parse_config.
void validate(const ExperimentConfig& c);

// Canonical INI rendering (round-trips through parse_config).
std::string to_ini(const ExperimentConfig& c);

}  // namespace torwig
