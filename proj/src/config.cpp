#include "torwig/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "torwig/dynamics.hpp"
#include "torwig/errors.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>> kSchema{
    {"scenario", {"name", "output", "seed"}},
    {"grid", {"dim", "N"}},
    {"potential", {"cosines"}},
    {"wkb", {"ell", "P", "hbar", "epsilon", "gamma"}},
    {"dynamics", {"t", "dt", "tightness_time", "radii"}},
    {"weakkam", {"h", "max_iter", "tol", "sweep"}},
    {"tests", {"q_max", "p_max", "nodes", "centres"}},
    {"quantize", {"N", "K", "hbar"}},
    {"wigner", {"N", "states", "hbar", "evolution_N", "evolution_hbar", "evolution_t", "evolution_dt"}},
};

[[noreturn]] void field_error(const std::string& source, const std::string& section, const std::string& key,
                              const std::string& value, const std::string& why) {
  std::ostringstream os;
  os << source << ": [" << section << "] " << key << " = '" << value << "': " << why;
  throw ConfigError(os.str());
}

// Number with optional "a/b" fraction form.
double parse_number(const std::string& source, const std::string& section, const std::string& key,
                    const std::string& text) {
  const std::string s = boost::algorithm::trim_copy(text);
  auto to_double = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      field_error(source, section, key, text, "not a number");
    }
    if (used != part.size() || !std::isfinite(v)) field_error(source, section, key, text, "not a finite number");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return to_double(s);
  const double num = to_double(boost::algorithm::trim_copy(s.substr(0, slash)));
  const double den = to_double(boost::algorithm::trim_copy(s.substr(slash + 1)));
  if (den == 0.0) field_error(source, section, key, text, "zero denominator");
  return num / den;
}

int parse_int(const std::string& source, const std::string& section, const std::string& key,
              const std::string& text) {
  const double v = parse_number(source, section, key, text);
  if (v != std::round(v) || std::abs(v) > 1e9) field_error(source, section, key, text, "expected an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, const char* seps) {
  std::vector<std::string> parts;
  const std::string t = boost::algorithm::trim_copy(text);
  if (t.empty()) return parts;
  boost::algorithm::split(parts, t, boost::algorithm::is_any_of(seps), boost::algorithm::token_compress_on);
  for (auto& p : parts) boost::algorithm::trim(p);
  return parts;
}

std::vector<double> parse_list(const std::string& source, const std::string& section, const std::string& key,
                               const std::string& text) {
  std::vector<double> out;
  for (const std::string& p : split(text, ",")) out.push_back(parse_number(source, section, key, p));
  if (out.empty()) field_error(source, section, key, text, "empty list");
  return out;
}

std::vector<CosineTerm> parse_cosines(const std::string& source, int dim, const std::string& text) {
  std::vector<CosineTerm> terms;
  for (const std::string& item : split(text, ",")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) field_error(source, "potential", "cosines", text, "term '" + item + "' lacks ':'");
    const auto freq = split(item.substr(0, colon), " \t");
    if (static_cast<int>(freq.size()) != dim) {
      field_error(source, "potential", "cosines", text,
                  "term '" + item + "' needs " + std::to_string(dim) + " frequency component(s)");
    }
    CosineTerm term;
    for (int d = 0; d < dim; ++d) term.frequency[d] = parse_int(source, "potential", "cosines", freq[d]);
    term.coefficient = parse_number(source, "potential", "cosines", item.substr(colon + 1));
    terms.push_back(term);
  }
  return terms;
}

std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  return os.str();
}

}  // namespace

Potential ExperimentConfig::potential() const {
  return cosines.empty() ? Potential::zero(dim) : Potential::from_cosines(dim, cosines);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    std::ostringstream os;
    os << source << ":" << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  ExperimentConfig c;
  c.source = source;
  for (const auto& [section, body] : tree) {
    const auto schema = kSchema.find(section);
    if (schema == kSchema.end()) {
      if (body.empty()) throw ConfigError(source + ": key '" + section + "' outside any section");
      throw ConfigError(source + ": unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!schema->second.count(key)) throw ConfigError(source + ": unknown key [" + section + "] " + key);
    }
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto node = tree.get_optional<std::string>(section + "." + key);
    if (!node) return std::nullopt;
    return *node;
  };
  auto num = [&](const char* s, const char* k, double& out) {
    if (auto v = get(s, k)) out = parse_number(source, s, k, *v);
  };
  auto integer = [&](const char* s, const char* k, int& out) {
    if (auto v = get(s, k)) out = parse_int(source, s, k, *v);
  };
  auto list = [&](const char* s, const char* k, std::vector<double>& out) {
    if (auto v = get(s, k)) out = parse_list(source, s, k, *v);
  };

  if (auto v = get("scenario", "name")) c.scenario = boost::algorithm::trim_copy(*v);
  if (auto v = get("scenario", "output")) c.output = boost::algorithm::trim_copy(*v);
  if (auto v = get("scenario", "seed")) {
    const double s = parse_number(source, "scenario", "seed", *v);
    if (s < 0.0 || s != std::round(s)) field_error(source, "scenario", "seed", *v, "expected a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(s);
  }
  integer("grid", "dim", c.dim);
  if (c.dim != 1 && c.dim != 2) field_error(source, "grid", "dim", std::to_string(c.dim), "dimension must be 1 or 2");
  integer("grid", "N", c.N);
  if (auto v = get("potential", "cosines")) c.cosines = parse_cosines(source, c.dim, *v);
  else if (c.dim == 2) c.cosines = {{{1, 0}, 1.0}, {{0, 1}, 1.0}};
  num("wkb", "ell", c.ell);
  if (auto v = get("wkb", "P")) {
    const auto parts = split(*v, " \t,");
    if (static_cast<int>(parts.size()) != c.dim) field_error(source, "wkb", "P", *v, "needs one component per dimension");
    c.P = {0.0, 0.0};
    for (int d = 0; d < c.dim; ++d) c.P[d] = parse_number(source, "wkb", "P", parts[d]);
  } else if (c.dim == 2) {
    c.P = {2.0, 0.0};
  }
  list("wkb", "hbar", c.hbars);
  num("wkb", "epsilon", c.epsilon);
  num("wkb", "gamma", c.gamma);
  num("dynamics", "t", c.t);
  num("dynamics", "dt", c.dt);
  num("dynamics", "tightness_time", c.tightness_time);
  list("dynamics", "radii", c.radii);
  num("weakkam", "h", c.lo_h);
  integer("weakkam", "max_iter", c.lo_max_iter);
  num("weakkam", "tol", c.lo_tol);
  list("weakkam", "sweep", c.sweep);
  integer("tests", "q_max", c.q_max);
  num("tests", "p_max", c.p_max);
  integer("tests", "nodes", c.nodes);
  list("tests", "centres", c.centres);
  integer("quantize", "N", c.quantize_N);
  integer("quantize", "K", c.quantize_K);
  list("quantize", "hbar", c.quantize_hbars);
  integer("wigner", "N", c.wigner_N);
  integer("wigner", "states", c.wigner_states);
  num("wigner", "hbar", c.wigner_hbar);
  integer("wigner", "evolution_N", c.evolution_N);
  num("wigner", "evolution_hbar", c.evolution_hbar);
  num("wigner", "evolution_t", c.evolution_t);
  num("wigner", "evolution_dt", c.evolution_dt);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

void validate(const ExperimentConfig& c) {
  const std::string& src = c.source;
  auto bad = [&](const std::string& what) { throw ConfigError(src + ": " + what); };
  auto pre = [&](const std::string& what) { throw PreconditionError(src + ": " + what); };
  for (int n : {c.N, c.quantize_N, c.wigner_N, c.evolution_N}) {
    if (n < 8 || n % 2 != 0) bad("grid sizes must be even and >= 8 (got " + std::to_string(n) + ")");
  }
  if (c.nodes < 64) bad("[tests] nodes must be >= 64");
  if (c.q_max < 0 || !(c.p_max > 0.0)) bad("[tests] needs q_max >= 0 and p_max > 0");
  if (c.centres.empty()) bad("[tests] centres must not be empty");
  if (!(c.epsilon > 0.0) || !(c.gamma > 0.0) || !(c.epsilon + c.gamma * (c.dim + 1) < 1.0)) {
    bad("[wkb] epsilon, gamma must satisfy 0 < epsilon + gamma (n+1) < 1");
  }
  if (!(c.ell > 0.0)) bad("[wkb] ell must be positive");
  if (!(c.lo_h > 0.0) || c.lo_max_iter < 1 || !(c.lo_tol > 0.0)) bad("[weakkam] needs h > 0, max_iter >= 1, tol > 0");
  if (c.quantize_K < 1) bad("[quantize] K must be >= 1");
  if (c.wigner_states < 1) bad("[wigner] states must be >= 1");
  if (!(c.dt > 0.0) || !(c.evolution_dt > 0.0)) bad("time steps must be positive");
  if (c.radii.empty()) bad("[dynamics] radii must not be empty");

  if (c.hbars.size() < 4) pre("[wkb] hbar needs at least 4 values for a semiclassical sweep");
  for (std::size_t k = 0; k < c.hbars.size(); ++k) {
    if (!is_admissible(c.hbars[k], c.ell)) {
      std::ostringstream os;
      os << "[wkb] hbar = " << c.hbars[k] << " is inadmissible for ell = " << c.ell
         << " (WKB states require P in ell Z^n and 1/hbar in (1/ell) N)";
      pre(os.str());
    }
    if (k > 0 && !(c.hbars[k] < c.hbars[k - 1])) pre("[wkb] hbar values must be strictly decreasing");
  }
  for (int d = 0; d < c.dim; ++d) {
    const double k = c.P[d] / c.ell;
    if (std::abs(k - std::round(k)) > 1e-9) pre("[wkb] P must lie in ell Z^n");
  }
  if (std::abs(c.t) > 2.0) pre("[dynamics] |t| must be <= 2");
  try {
    steps_for(std::abs(c.t), c.dt);
    steps_for(c.evolution_t, c.evolution_dt);
    steps_for(c.tightness_time, c.dt);
  } catch (const std::exception& e) {
    pre(std::string("time grid: ") + e.what());
  }
  for (double r : c.radii) {
    if (!(r > norm(c.P, c.dim))) pre("[dynamics] tightness radii must exceed |P|");
  }
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[scenario]\nname = " << c.scenario << "\noutput = " << c.output << "\nseed = " << c.seed << "\n\n";
  os << "[grid]\ndim = " << c.dim << "\nN = " << c.N << "\n\n";
  os << "[potential]\ncosines = ";
  for (std::size_t k = 0; k < c.cosines.size(); ++k) {
    os << (k ? ", " : "") << c.cosines[k].frequency[0];
    if (c.dim == 2) os << " " << c.cosines[k].frequency[1];
    os << ":" << c.cosines[k].coefficient;
  }
  os << "\n\n[wkb]\nell = " << c.ell << "\nP = " << c.P[0];
  if (c.dim == 2) os << " " << c.P[1];
  os << "\nhbar = " << format_list(c.hbars) << "\nepsilon = " << c.epsilon << "\ngamma = " << c.gamma << "\n\n";
  os << "[dynamics]\nt = " << c.t << "\ndt = " << c.dt << "\ntightness_time = " << c.tightness_time
     << "\nradii = " << format_list(c.radii) << "\n\n";
  os << "[weakkam]\nh = " << c.lo_h << "\nmax_iter = " << c.lo_max_iter << "\ntol = " << c.lo_tol
     << "\nsweep = " << format_list(c.sweep) << "\n\n";
  os << "[tests]\nq_max = " << c.q_max << "\np_max = " << c.p_max << "\nnodes = " << c.nodes
     << "\ncentres = " << format_list(c.centres) << "\n\n";
  os << "[quantize]\nN = " << c.quantize_N << "\nK = " << c.quantize_K << "\nhbar = " << format_list(c.quantize_hbars)
     << "\n\n";
  os << "[wigner]\nN = " << c.wigner_N << "\nstates = " << c.wigner_states << "\nhbar = " << c.wigner_hbar
     << "\nevolution_N = " << c.evolution_N << "\nevolution_hbar = " << c.evolution_hbar
     << "\nevolution_t = " << c.evolution_t << "\nevolution_dt = " << c.evolution_dt << "\n";
  return os.str();
}

}  // namespace torwig
