#pragma once
// Discrete Lax-Oleinik semigroups, weak KAM solutions v_-(P,.) / v_+(P,.),
// the effective Hamiltonian, and Mather-measure diagnostics for mechanical
// Hamiltonians H = |eta|^2 / 2 + V(x) with Lagrangian L = |xi|^2 / 2 - V(x).

#include <array>
#include <string>
#include <vector>

#include "torwig/dynamics.hpp"
#include "torwig/potential.hpp"

namespace torwig {

enum class KamType { negative, positive };
std::string to_string(KamType t);

struct LaxOleinikOptions {
  double h = 0.025;         // time step of the one-step action
  int max_iter = 20000;
  double tol = 1e-10;       // flatness of successive differences (sup-norm oscillation)
  double grad_guess = -1;   // sup |grad v| guess for the search radius; < 0 selects a bound from V and P
  int subdivisions = 4;     // bracketing candidates per grid cell and axis before continuous refinement
  int warm_start = 200;     // value-iteration steps before policy iteration
  int max_policy_rounds = 60;
};

// One step of the discrete semigroup on grid values u:
//   negative: min_y { u(y) + h [ |x-y|^2/(2 h^2) - V((x+y)/2) ] - P.(x-y) }
//   positive: max_y { u(y) - h [ |y-x|^2/(2 h^2) - V((x+y)/2) ] + P.(y-x) }
// with periodic minimal representatives of x - y. The optimal y is bracketed
// on the grid refined `subdivisions` times per axis within the search radius
// h (|P| + grad_guess + 2) and then located on the continuum by Brent
// minimization; u(y) between nodes is four-point cubic interpolation (1D) or
// bilinear interpolation (2D).
std::vector<double> lax_oleinik_step(const TorusGrid& grid, const Potential& v, const std::vector<double>& u,
                                     double h, const Point& P, KamType type, double grad_guess = -1,
                                     int subdivisions = 4);

// Default search-radius gradient bound: |P| + sqrt(|P|^2 + 2 osc V).
double default_gradient_guess(const Potential& v, const Point& P);

struct WeakKAMSolution {
  TorusGrid grid;
  Potential potential;
  Point P{0.0, 0.0};
  KamType type = KamType::negative;
  std::vector<double> v;                    // normalized v(0) = 0
  double hbar_eff = 0.0;                    // effective value H(P)
  std::array<std::vector<double>, 2> grad;  // centered differences
  std::vector<char> kink_mask;
  std::array<std::vector<Complex>, 2> grad_hat;  // Fourier slots of grad (interpolation)
  double residual = 0.0;                    // fixed-point defect (oscillation of T v - v)
  int iterations = 0;
  double step = 0.0;

  // Off-grid gradient: trigonometric interpolation when no kinks are present;
  // otherwise local cubic interpolation on kink-free stencils with a
  // nearest-neighbour fallback within two cells of a kink.
  Point gradient_at(const Point& x) const;
  double distance_to_kink(const Point& x) const;  // +inf when no kinks
  // max over unmasked grid points of |H(x, P + grad v) - Hbar|.
  double hamilton_jacobi_defect() const;
  // Connected clusters of kink points (1D: index runs on the circle).
  std::vector<std::vector<std::size_t>> kink_clusters() const;
};

WeakKAMSolution solve_weak_kam(const TorusGrid& grid, const Potential& v, const Point& P, KamType type,
                               const LaxOleinikOptions& options = {});

// Kink mask: |second difference| > 10 median |second difference| (and above round-off).
std::vector<char> detect_kinks(const TorusGrid& grid, const std::vector<double>& v);

// 1D oracle: P_c = (2 pi)^{-1} int sqrt(2 (max V - V)); Hbar = max V for |P| <= P_c,
// else the root h of (2 pi)^{-1} int sqrt(2 (h - V)) dx = |P|.
double critical_momentum_1d(const Potential& v);
double effective_hamiltonian_oracle_1d(double P, const Potential& v);

struct MatherOptions {
  double tolerance = 1e-3;     // closedness / action checks
  double flow_time = 2000.0;   // ergodic branch
  double flow_step = 1e-2;
  double convergence = 2e-2;   // f-suite moment gap between half-time averages
};

struct MatherData {
  TorusGrid grid;
  Point P{0.0, 0.0};
  double hbar_eff = 0.0;
  std::vector<double> sigma;   // probability weights on the grid
  std::string support;         // "invariant-density", "point-mass" or "ergodic-average"
  double closedness_defect = 0.0;
  double action = 0.0;         // int (L - P.xi) d mu, expected -Hbar
  double action_defect = 0.0;  // |action + Hbar|
};

MatherData mather_data(const WeakKAMSolution& solution, const MatherOptions& options = {});

// Built-in smooth f-suite on T^n used by closedness / divergence diagnostics:
// sin(k.x), cos(k.x) for k in {e_1, 2 e_1, e_2, e_1 + e_2} (as applicable).
struct TrigFunction {
  Index k{0, 0};
  bool sine = false;
  double value(const Point& x, int dim) const;
  Point gradient(const Point& x, int dim) const;
};
std::vector<TrigFunction> f_suite(int dim);

void write_solution_csv(const WeakKAMSolution& s, const std::string& path);

}  // namespace torwig
