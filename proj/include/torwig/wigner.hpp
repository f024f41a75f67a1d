#pragma once
// Toroidal Wigner transform on the momentum lattice (hbar/2) Z^n,
//   W(x, hbar kappa / 2) = (2 pi)^{-n} int exp(i kappa.z) psi(x - z) conj(psi(x + z)) dz,
// which for psi = sum c_alpha e^{i alpha x} equals
//   sum_{alpha + beta = kappa} c_alpha conj(c_beta) e^{i (alpha - beta).x}.
// Tables cover kappa in [-N, N-1]^n so that every product of grid modes is
// represented without aliasing, and both marginals hold to round-off.

#include <string>
#include <vector>

#include "torwig/potential.hpp"
#include "torwig/test_function.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {

struct WignerTable {
  TorusGrid grid;
  double hbar = 1.0;
  IndexBox lattice{1, 0, 0};
  std::vector<double> values;  // values[j * lattice.size() + l]
  double max_imaginary = 0.0;  // largest discarded imaginary part

  double eta_max() const { return 0.5 * hbar * grid.points_per_axis(); }
  double at(std::size_t j, const Index& kappa) const;
  // sum over the lattice at each grid point (position marginal).
  std::vector<double> position_marginal() const;
  // (2 pi)^{-n} int W(x, hbar kappa / 2) dx for every lattice point.
  std::vector<double> momentum_marginal() const;
  double total_mass() const;  // sum_eta int W dx
};

WignerTable wigner_transform(const WaveFunction& psi);

struct MarginalDefects {
  double realness = 0.0;   // max discarded imaginary part
  double position = 0.0;   // max_x |sum_eta W - |psi|^2|
  double momentum = 0.0;   // max over lattice of the momentum-marginal mismatch
  double max() const;
};
MarginalDefects marginal_defects(const WignerTable& w, const WaveFunction& psi);

struct Pairing {
  double value = 0.0;
  bool truncated = false;       // test function not negligible at the lattice edge
  double edge_magnitude = 0.0;  // max |phi| on the outermost lattice shell
};
// sum_eta int phi(x, eta) W(x, eta) dx (trapezoid in x).
Pairing pair(const WignerTable& w, const TestFunction& phi);
Pairing pair(const WignerTable& w, const PhaseTable& phi);

// P_hbar(T^n x {|eta| > R}) = (2 pi)^n sum_{|hbar alpha| > R} |psi_hat_alpha|^2.
double tightness_mass(const WaveFunction& psi, double radius);

// Potential kernel K(x, hbar kappa / 2) = (i / hbar) (e^{-i kappa x} V_kappa - e^{i kappa x} conj V_kappa)
// with V_kappa = (2 pi)^{-n} int e^{i kappa z} V(z) dz. Stored as the finitely
// many nonzero rows kappa, each as samples on the grid.
struct KappaKernel {
  TorusGrid grid;
  double hbar = 1.0;
  std::vector<Index> rows;
  std::vector<std::vector<double>> values;  // values[r][j]

  double at(const Point& x, const Index& kappa) const;  // exact off-grid evaluation
  std::vector<Complex> coefficients;                    // V_kappa per row
};
KappaKernel kappa_kernel(const Potential& v, const TorusGrid& grid, double hbar);

// (K * W)(x, kappa) = sum_omega K(x, hbar omega / 2) W(x, kappa - omega), W = 0 off-table.
std::vector<double> lattice_convolution(const KappaKernel& k, const WignerTable& w);

// One sample of a Wigner trajectory.
struct WignerFrame {
  double t = 0.0;
  WignerTable table;
};

// Streaming evaluation of the weak form of the Wigner evolution equation for
// f(s, x, eta) = theta(s) phi(x, eta):
//   int_0^t sum_eta int [(d_s f + eta . grad_x f) W + f (K * W)] dx ds
//     - [sum_eta int f W dx]_{s=0}^{s=t},
// with the trapezoid rule in s. Frames must be pushed at uniform spacing.
class EvolutionResidual {
 public:
  EvolutionResidual(const TestFunction& phi, TimeProfile theta, const Potential& v,
                    const TorusGrid& grid, double hbar);
  void push(double t, const WignerTable& w);
  double residual() const;             // absolute value of the discretized identity
  double time_integral() const { return integral_; }
  double boundary_term() const { return last_pairing_ - first_pairing_; }
  std::size_t frames() const { return count_; }

 private:
  PhaseTable table_;
  TimeProfile theta_;
  KappaKernel kernel_;
  double dt_ = 0.0;
  double last_t_ = 0.0;
  double last_integrand_ = 0.0;
  double first_pairing_ = 0.0;
  double last_pairing_ = 0.0;
  double integral_ = 0.0;
  std::size_t count_ = 0;
};

double evolution_residual(const std::vector<WignerFrame>& trajectory, const TestFunction& phi,
                          const TimeProfile& theta, const Potential& v, double hbar);

// Serialization: CSV (x-index..., kappa..., value) plus a JSON header.
void write_wigner_csv(const WignerTable& w, const std::string& path);
void write_wigner_header(const WignerTable& w, const std::string& path);

}  // namespace torwig
