#include "torwig/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "torwig/errors.hpp"

namespace torwig {

namespace {

constexpr double kKinkMassLimit = 1e-6;

HamiltonianSpec classical_spec(const Potential& v) { return HamiltonianSpec{v, 1.0, 1.0}; }

double energy(const Potential& v, const Point& x, const Point& eta, int dim) {
  return 0.5 * dot(eta, eta, dim) + v(x);
}

void finish_report(LimitReport& r, double exact_tolerance) {
  const std::size_t n = r.errors.size();
  r.decreasing = true;
  for (std::size_t k = 1; k < n; ++k) {
    if (r.errors[k] > 1.1 * r.errors[k - 1]) r.decreasing = false;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(r.hbars[k]);
    const double y = std::log(std::max(r.errors[k], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = static_cast<double>(n) * sxx - sx * sx;
  r.slope = den > 0.0 ? (static_cast<double>(n) * sxy - sx * sy) / den : 0.0;
  const double worst = n == 0 ? 0.0 : *std::max_element(r.errors.begin(), r.errors.end());
  r.pass = r.decreasing || (exact_tolerance > 0.0 && worst <= exact_tolerance);
}

void check_family(const std::vector<WKBState>& states) {
  if (states.size() < 4) throw PreconditionError("a semiclassical sweep needs at least 4 admissible hbar values");
  for (std::size_t k = 0; k < states.size(); ++k) {
    const WKBState& s = states[k];
    if (!is_admissible(s.psi.hbar, s.ell)) {
      std::ostringstream os;
      os << "hbar = " << s.psi.hbar << " is not admissible for ell = " << s.ell << " (need 1/hbar in (1/ell) N)";
      throw PreconditionError(os.str());
    }
    if (k > 0 && !(s.psi.hbar < states[k - 1].psi.hbar)) {
      throw PreconditionError("the hbar sequence must be strictly decreasing");
    }
  }
}

std::vector<double> quantum_pairings(const WaveFunction& psi, const std::vector<TestFunction>& tests) {
  const WignerTable w = wigner_transform(psi);
  std::vector<double> out;
  out.reserve(tests.size());
  for (const TestFunction& phi : tests) out.push_back(pair(w, tabulate(phi, psi.grid, psi.hbar, false)).value);
  return out;
}

std::vector<double> classical_pairings(const MonokineticMeasure& mu, const std::vector<TestFunction>& tests) {
  std::vector<double> out;
  out.reserve(tests.size());
  for (const TestFunction& phi : tests) out.push_back(mu.pairing(phi));
  return out;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace

double MonokineticMeasure::total_weight() const {
  double s = 0.0;
  for (const Particle& p : particles) s += p.w;
  return s;
}

double MonokineticMeasure::pairing(const TestFunction& phi) const {
  double s = 0.0;
  for (const Particle& p : particles) s += p.w * phi(p.x, p.eta);
  return s;
}

MonokineticMeasure monokinetic_measure(const std::vector<double>& m, const WeakKAMSolution& v,
                                       const std::vector<double>* sigma) {
  const TorusGrid& g = v.grid;
  if (m.size() != g.size()) throw ConfigError("monokinetic weights do not match the weak KAM grid");
  if (sigma != nullptr && sigma->size() != g.size()) throw ConfigError("reference density does not match the grid");
  const int dim = g.dim();
  double total = 0.0, on_kinks = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(m[j] >= 0.0) || !std::isfinite(m[j])) throw PreconditionError("monokinetic weights must be nonnegative");
    total += m[j];
    if (v.kink_mask[j]) on_kinks += m[j];
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("monokinetic weights must sum to 1");
  if (on_kinks > kKinkMassLimit) {
    std::ostringstream os;
    os << "weights put mass " << on_kinks << " on kink points of v (limit " << kKinkMassLimit
       << "): the support must lie where grad v exists";
    throw PreconditionError(os.str());
  }
  MonokineticMeasure mu;
  mu.dim = dim;
  mu.P = v.P;
  mu.type = v.type;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (m[j] == 0.0) continue;
    Particle p;
    p.x = g.point(j);
    for (int d = 0; d < dim; ++d) p.eta[d] = v.P[d] + v.grad[d][j];
    p.w = m[j];
    if (sigma != nullptr) p.g = (*sigma)[j] > 0.0 ? m[j] / (*sigma)[j] : 0.0;
    mu.particles.push_back(p);
  }
  return mu;
}

double graph_distance(const MonokineticMeasure& mu, const WeakKAMSolution& v, double kink_exclusion) {
  const int dim = mu.dim;
  double worst = 0.0;
  for (const Particle& p : mu.particles) {
    if (kink_exclusion > 0.0 && v.distance_to_kink(p.x) <= kink_exclusion) continue;
    const Point gr = v.gradient_at(p.x);
    Point d{0.0, 0.0};
    for (int k = 0; k < dim; ++k) d[k] = p.eta[k] - (v.P[k] + gr[k]);
    worst = std::max(worst, norm(d, dim));
  }
  return worst;
}

double energy_defect(const MonokineticMeasure& mu, const Potential& v, double hbar_eff) {
  double worst = 0.0;
  for (const Particle& p : mu.particles) worst = std::max(worst, std::abs(energy(v, p.x, p.eta, mu.dim) - hbar_eff));
  return worst;
}

double energy_drift(const MonokineticMeasure& before, const MonokineticMeasure& after, const Potential& v) {
  if (before.particles.size() != after.particles.size()) throw ConfigError("particle clouds do not match");
  double worst = 0.0;
  for (std::size_t i = 0; i < before.particles.size(); ++i) {
    const Particle& a = before.particles[i];
    const Particle& b = after.particles[i];
    worst = std::max(worst, std::abs(energy(v, b.x, b.eta, after.dim) - energy(v, a.x, a.eta, before.dim)));
  }
  return worst;
}

LimitReport semiclassical_error(const std::vector<WKBState>& states, const MonokineticMeasure& target,
                                const std::vector<TestFunction>& tests, double exact_tolerance) {
  check_family(states);
  if (tests.empty()) throw ConfigError("semiclassical error needs at least one test function");
  LimitReport r;
  r.classical.push_back(classical_pairings(target, tests));
  for (const WKBState& s : states) {
    r.hbars.push_back(s.psi.hbar);
    r.quantum.push_back(quantum_pairings(s.psi, tests));
    r.errors.push_back(max_gap(r.quantum.back(), r.classical.front()));
  }
  finish_report(r, exact_tolerance);
  return r;
}

MonokineticMeasure pushforward(const MonokineticMeasure& mu, const Potential& v, double t, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("push-forward time step must be positive");
  const HamiltonianSpec h = classical_spec(v);
  MonokineticMeasure out = mu;
  for (Particle& p : out.particles) {
    const FlowState s = hamiltonian_flow(make_flow_state(h, p.x, p.eta), h, t, dt);
    p.x = s.x;
    p.eta = s.eta;
  }
  return out;
}

LimitReport propagation_error(const std::vector<WKBState>& states, const MonokineticMeasure& target, double t,
                              double dt, const std::vector<TestFunction>& tests, double exact_tolerance) {
  check_family(states);
  if (tests.empty()) throw ConfigError("propagation error needs at least one test function");
  if (std::abs(t) > 2.0) throw PreconditionError("propagation time must satisfy |t| <= 2");
  for (const WKBState& s : states) {
    const bool ok = s.type == KamType::positive ? t >= 0.0 : t <= 0.0;
    if (!ok) {
      throw PreconditionError(
          "wrong time sign for a " + to_string(s.type) +
          "-type state: forward propagation (t >= 0) uses positive-type WKB states built from v_+, "
          "backward propagation (t <= 0) uses negative-type states built from v_-");
    }
  }
  const Potential& v = states.front().solution->potential;
  const MonokineticMeasure moved = pushforward(target, v, t, dt);
  LimitReport r;
  r.classical.push_back(classical_pairings(moved, tests));
  for (const WKBState& s : states) {
    const HamiltonianSpec h{v, s.ell, s.psi.hbar};
    const WaveFunction psi_t = propagate_schrodinger(s.psi, h, t, dt);
    r.hbars.push_back(s.psi.hbar);
    r.quantum.push_back(quantum_pairings(psi_t, tests));
    r.errors.push_back(max_gap(r.quantum.back(), r.classical.front()));
  }
  finish_report(r, exact_tolerance);
  return r;
}

double liouville_residual(const MonokineticMeasure& mu, const Potential& v, const TestFunction& phi,
                          const TimeProfile& theta, double t, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const int dim = mu.dim;
  const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9)));
  const double step = t / static_cast<double>(n);
  const HamiltonianSpec h = classical_spec(v);
  double integral = 0.0, boundary = 0.0;
  for (const Particle& p : mu.particles) {
    FlowState s = make_flow_state(h, p.x, p.eta);
    auto integrand = [&](double time, const FlowState& st) {
      const auto grads = phi.gradients(st.x, st.eta);
      const Point gv = v.gradient(st.x);
      double bracket = 0.0;  // {phi, H} = eta . grad_x phi - grad V . grad_eta phi
      for (int d = 0; d < dim; ++d) bracket += st.eta[d] * grads[0][d] - gv[d] * grads[1][d];
      return theta.derivative(time) * phi(st.x, st.eta) + theta.value(time) * bracket;
    };
    const double f0 = theta.value(0.0) * phi(s.x, s.eta);
    double acc = 0.5 * integrand(0.0, s);
    for (long k = 1; k <= n; ++k) {
      s = hamiltonian_flow(s, h, step, std::abs(step));
      const double w = k == n ? 0.5 : 1.0;
      acc += w * integrand(step * static_cast<double>(k), s);
    }
    integral += p.w * acc * step;
    boundary += p.w * (theta.value(t) * phi(s.x, s.eta) - f0);
  }
  return std::abs(integral - boundary);
}

ContinuityReport continuity_check(const WeakKAMSolution& v, const std::vector<double>& sigma,
                                  const std::function<double(const Point&)>& g0, const TimeProfile& theta,
                                  double t, double dt, int substeps) {
  const TorusGrid& g = v.grid;
  if (sigma.size() != g.size()) throw ConfigError("reference density does not match the grid");
  if (!(dt > 0.0) || substeps < 1) throw PreconditionError("continuity check needs dt > 0 and substeps >= 1");
  const int dim = g.dim();
  const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9)));
  const double step = t / static_cast<double>(n);
  const HamiltonianSpec h = classical_spec(v.potential);
  const std::vector<TrigFunction> suite = f_suite(dim);

  // Support points of sigma with the graph velocity and their backward
  // characteristics, advanced incrementally: state k holds phi^{-s_k}(x, P + grad v(x)).
  std::vector<std::size_t> support;
  std::vector<Point> velocity;
  std::vector<FlowState> back;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (sigma[j] <= 0.0) continue;
    support.push_back(j);
    Point u{0.0, 0.0};
    for (int d = 0; d < dim; ++d) u[d] = v.P[d] + v.grad[d][j];
    velocity.push_back(u);
    back.push_back(make_flow_state(h, g.point(j), u));
  }
  auto densities = [&]() {
    std::vector<double> out(back.size());
    for (std::size_t i = 0; i < back.size(); ++i) out[i] = g0(back[i].x);
    return out;
  };

  std::vector<double> integral(suite.size(), 0.0), first(suite.size(), 0.0), last(suite.size(), 0.0);
  auto accumulate = [&](double time, const std::vector<double>& dens, double weight, std::vector<double>* snapshot) {
    for (std::size_t f = 0; f < suite.size(); ++f) {
      double acc = 0.0, pairing = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const Point x = g.point(support[i]);
        const double fx = suite[f].value(x, dim);
        const Point gf = suite[f].gradient(x, dim);
        const double ds = theta.derivative(time) * fx + theta.value(time) * dot(gf, velocity[i], dim);
        acc += ds * dens[i] * sigma[support[i]];
        pairing += theta.value(time) * fx * dens[i] * sigma[support[i]];
      }
      integral[f] += weight * step * acc;
      if (snapshot != nullptr) (*snapshot)[f] = pairing;
    }
  };

  accumulate(0.0, densities(), 0.5, &first);
  for (long k = 1; k <= n; ++k) {
    for (FlowState& s : back) s = hamiltonian_flow(s, h, -step, std::abs(step) / substeps);
    accumulate(step * static_cast<double>(k), densities(), k == n ? 0.5 : 1.0, k == n ? &last : nullptr);
  }
  ContinuityReport r;
  for (std::size_t f = 0; f < suite.size(); ++f) {
    r.defect = std::max(r.defect, std::abs(integral[f] - (last[f] - first[f])));
  }
  // Forward characteristics: g(t, x(t)) must equal g0(x(0)).
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Point x0 = g.point(support[i]);
    const FlowState fwd = hamiltonian_flow(make_flow_state(h, x0, velocity[i]), h, t, std::abs(step) / substeps);
    const FlowState ret = hamiltonian_flow(make_flow_state(h, fwd.x, fwd.eta), h, -t, std::abs(step) / substeps);
    r.transport_defect = std::max(r.transport_defect, std::abs(g0(ret.x) - g0(x0)));
  }
  return r;
}

TightnessReport tightness_check(const WKBState& state, const Potential& v, double t, double dt,
                                const std::vector<double>& radii) {
  const int dim = state.psi.grid.dim();
  const double pnorm = norm(state.P, dim);
  double sup_grad = 0.0;
  const WeakKAMSolution& s = *state.solution;
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    Point gv{0.0, 0.0};
    for (int d = 0; d < dim; ++d) gv[d] = s.grad[d][j];
    sup_grad = std::max(sup_grad, norm(gv, dim));
  }
  // ||(hbar D - P) psi||^2 <= (hbar ||grad a|| + ||grad v||_inf)^2, hence
  // mass(|eta| > R) <= B^2 / (R - |P|)^2 for R > |P|.
  const double b = state.psi.hbar * state.amplitude.gradient_l2 + sup_grad;
  const HamiltonianSpec h{v, state.ell, state.psi.hbar};
  const WaveFunction later = propagate_schrodinger(state.psi, h, t, dt);
  TightnessReport r;
  r.radii = radii;
  for (double radius : radii) {
    if (!(radius > pnorm)) throw PreconditionError("tightness radii must exceed |P|");
    r.mass_before.push_back(tightness_mass(state.psi, radius));
    r.mass_after.push_back(tightness_mass(later, radius));
    r.bound.push_back(b * b / ((radius - pnorm) * (radius - pnorm)));
    r.constant = std::max(r.constant, radius * r.bound.back());
  }
  // FFT roundoff of a unit-norm state puts ~1e-29 in every mode, which a
  // zero bound (constant amplitude, linear phase) must tolerate.
  constexpr double kRoundoff = 1e-14;
  r.pass = true;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double cap = r.constant / radii[k] + kRoundoff;
    if (r.mass_before[k] > cap || r.mass_after[k] > cap) r.pass = false;
  }
  return r;
}

void write_limit_report(const LimitReport& r, const std::string& json_path, const std::string& csv_path) {
  nlohmann::ordered_json j;
  j["scenario"] = r.label;
  j["hbar"] = r.hbars;
  j["errors"] = r.errors;
  j["slope"] = r.slope;
  j["decreasing"] = r.decreasing;
  j["pass"] = r.pass;
  {
    std::ofstream out(json_path);
    if (!out) throw ConfigError("cannot open " + json_path + " for writing");
    out << j.dump(2) << "\n";
  }
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot open " + csv_path + " for writing");
  out << "hbar,test,quantum,classical,abs_diff\n";
  char buf[160];
  for (std::size_t k = 0; k < r.hbars.size(); ++k) {
    const std::vector<double>& cl = r.classical.size() == r.hbars.size() ? r.classical[k] : r.classical.front();
    for (std::size_t f = 0; f < r.quantum[k].size(); ++f) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g\n", r.hbars[k], f, r.quantum[k][f], cl[f],
                    std::abs(r.quantum[k][f] - cl[f]));
      out << buf;
    }
  }
}

}  // namespace torwig
