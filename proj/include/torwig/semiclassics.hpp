#pragma once
// Monokinetic measures on the graph of P + grad v, semiclassical limits of
// WKB families, Liouville push-forward of particle measures, and the
// continuity / transport diagnostics along the flow.

#include <functional>
#include <string>
#include <vector>

#include "torwig/dynamics.hpp"
#include "torwig/test_function.hpp"
#include "torwig/weakkam.hpp"
#include "torwig/wigner.hpp"
#include "torwig/wkb.hpp"

namespace torwig {

struct Particle {
  Point x{0.0, 0.0};
  Point eta{0.0, 0.0};
  double w = 0.0;
  double g = 0.0;  // density m / sigma at the particle (0 where sigma vanishes)
};

struct MonokineticMeasure {
  int dim = 1;
  Point P{0.0, 0.0};
  KamType type = KamType::negative;
  std::vector<Particle> particles;

  double total_weight() const;
  // sum_i w_i phi(x_i, eta_i)
  double pairing(const TestFunction& phi) const;
};

// Particles at the grid points carrying m with eta = P + grad v. Rejects m
// with more than 1e-6 mass on kink points. sigma (optional, grid weights)
// supplies the densities g = m / sigma.
MonokineticMeasure monokinetic_measure(const std::vector<double>& m, const WeakKAMSolution& v,
                                       const std::vector<double>* sigma = nullptr);

// max over particles off kinks of |eta_i - (P + grad v(x_i))| (off-grid
// gradient interpolation) and max |H(x_i, eta_i) - Hbar|.
double graph_distance(const MonokineticMeasure& mu, const WeakKAMSolution& v, double kink_exclusion = 0.0);
double energy_defect(const MonokineticMeasure& mu, const Potential& v, double hbar_eff);
// max_i |H(x_i, eta_i) after - H before| for two clouds with matching particles.
double energy_drift(const MonokineticMeasure& before, const MonokineticMeasure& after, const Potential& v);

struct LimitReport {
  std::string label;
  std::vector<double> hbars;
  std::vector<double> errors;                   // max over tests
  std::vector<std::vector<double>> quantum;     // [hbar][test] pairings
  std::vector<std::vector<double>> classical;   // [test] (or [hbar][test]) pairings
  double slope = 0.0;                           // least-squares slope of log e vs log hbar
  bool decreasing = false;                      // e_k <= 1.1 e_{k-1} for all k
  bool pass = false;
};

// e(hbar) = max_tests |pair(W[psi_hbar], phi) - sum_i w_i phi(x_i, eta_i)|.
// Requires >= 4 states with distinct admissible hbar values.
LimitReport semiclassical_error(const std::vector<WKBState>& states, const MonokineticMeasure& target,
                                const std::vector<TestFunction>& tests, double exact_tolerance = 0.0);

// Each particle flowed by velocity Verlet for signed time t; weights and
// densities unchanged.
MonokineticMeasure pushforward(const MonokineticMeasure& mu, const Potential& v, double t, double dt);

// Compares the pairing of the Schrodinger-propagated states against the
// pushed-forward target. Forward propagation (t >= 0) takes positive-type
// states, backward propagation (t <= 0) negative-type states.
LimitReport propagation_error(const std::vector<WKBState>& states, const MonokineticMeasure& target, double t,
                              double dt, const std::vector<TestFunction>& tests, double exact_tolerance = 0.0);

// Weak Liouville identity along the particle discretization:
// |int_0^t sum_i w_i [d_s f + {f, H}](s, x_i(s), eta_i(s)) ds - [sum_i w_i f]_0^t|
// with f = theta(s) phi(x, eta), trapezoid rule in s on the Verlet steps.
double liouville_residual(const MonokineticMeasure& mu, const Potential& v, const TestFunction& phi,
                          const TimeProfile& theta, double t, double dt);

// Continuity equation d_s(g sigma) + div((P + grad v) g sigma) = 0 in weak form:
// |int_0^t sum_j [d_s f + grad f . (P + grad v)](s, x_j) g(s, x_j) sigma_j ds - [sum_j f g sigma]_0^t|
// maximized over f = theta(s) F(x), F in the f-suite. g(s, x) = g0(pi o phi^{-s}(x, P + grad v(x)))
// by the method of characteristics (Verlet with step dt / substeps).
struct ContinuityReport {
  double defect = 0.0;
  double transport_defect = 0.0;  // max |g(s, x(s)) - g0(x(0))| along forward characteristics
};
ContinuityReport continuity_check(const WeakKAMSolution& v, const std::vector<double>& sigma,
                                  const std::function<double(const Point&)>& g0, const TimeProfile& theta,
                                  double t, double dt, int substeps = 4);

struct TightnessReport {
  std::vector<double> radii;
  std::vector<double> mass_before;
  std::vector<double> mass_after;
  std::vector<double> bound;  // explicit tail bound at t = 0
  double constant = 0.0;      // C with bound(R) <= C / R
  bool pass = false;
};
// Mass of |eta| > R before and after Schrodinger evolution over t; passes when
// both stay below C / R with C fixed by the explicit WKB tail bound at t = 0.
TightnessReport tightness_check(const WKBState& state, const Potential& v, double t, double dt,
                                const std::vector<double>& radii);

void write_limit_report(const LimitReport& r, const std::string& json_path, const std::string& csv_path);

}  // namespace torwig
