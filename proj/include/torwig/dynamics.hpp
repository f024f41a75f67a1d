#pragma once
// Quantum propagator exp(-i t Op(H) / hbar) and classical Hamiltonian flow for
// mechanical Hamiltonians H(x, eta) = |eta|^2 / 2 + V(x) on the torus.

#include <string>
#include <vector>

#include "torwig/potential.hpp"
#include "torwig/quantize.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {

struct HamiltonianSpec {
  Potential potential;
  double ell = 1.0;   // momentum lattice scale for admissible P
  double hbar = 1.0;

  int dim() const { return potential.dim(); }
  double energy(const Point& x, const Point& eta) const;
  PhaseSymbol symbol() const { return PhaseSymbol::hamiltonian(potential); }
};

struct FlowState {
  Point x{0.0, 0.0};    // reduced mod 2 pi
  Point eta{0.0, 0.0};
  double energy = 0.0;  // H(x, eta), refreshed after every flow
};

FlowState make_flow_state(const HamiltonianSpec& h, const Point& x, const Point& eta);

// <psi, Op(H) psi>: exact kinetic part in Fourier space plus int V |psi|^2.
double quantum_energy(const WaveFunction& psi, const HamiltonianSpec& h);

// Strang splitting: half potential step, exact kinetic step per mode, half
// potential step. Reusable for streaming trajectories.
class SplitStepPropagator {
 public:
  // step may be negative (backward propagation).
  SplitStepPropagator(const TorusGrid& grid, const HamiltonianSpec& h, double step);
  void advance(std::vector<Complex>& values) const;
  double step() const { return step_; }

 private:
  TorusGrid grid_;
  double step_;
  std::vector<Complex> half_potential_;
  std::vector<Complex> kinetic_;
  FourierTransform fft_;
};

// Number of steps of size dt covering t exactly; throws if dt does not divide t.
long steps_for(double t, double dt);

WaveFunction propagate_schrodinger(const WaveFunction& psi, const HamiltonianSpec& h, double t, double dt);

// Reference propagator: diagonalizes the truncated Weyl matrix of H (K <= 64).
WaveFunction exact_propagate(const WaveFunction& psi, const HamiltonianSpec& h, double t, int K);

// Velocity-Verlet with n = ceil(|t| / dt) equal steps of size t / n (signed t).
FlowState hamiltonian_flow(const FlowState& s, const HamiltonianSpec& h, double t, double dt);
std::vector<FlowState> flow_ensemble(const std::vector<FlowState>& states, const HamiltonianSpec& h,
                                     double t, double dt);

struct TrajectorySample {
  double t = 0.0;
  FlowState state;
};
// Samples the flow every `every` steps (plus the endpoints).
std::vector<TrajectorySample> flow_trajectory(const FlowState& s, const HamiltonianSpec& h, double t,
                                              double dt, int every = 1);
void write_trajectory_csv(const std::vector<TrajectorySample>& samples, int dim, const std::string& path);

}  // namespace torwig
