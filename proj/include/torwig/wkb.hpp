#pragma once
// WKB states a(x) exp(i (P.x + v(P, x)) / hbar) built from weak KAM solutions
// and mollified amplitudes, and the quantum current J = hbar Im(conj(psi) grad psi).

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "torwig/wavefunction.hpp"
#include "torwig/weakkam.hpp"

namespace torwig {

// rho(x) = C exp(-1 / (1 - s^2)), s = |x - (pi, ..., pi)| / pi, supported in
// [0, 2 pi]^n with int rho = 1.
class BumpProfile {
 public:
  explicit BumpProfile(int dim);
  int dim() const { return dim_; }
  double operator()(const Point& x) const;
  double normalization() const { return c_; }
  double gradient_sup() const { return grad_sup_; }  // ||grad rho||_inf

 private:
  int dim_;
  double c_ = 1.0;
  double grad_sup_ = 0.0;
};

// Periodized rescaled bump Phi_{gamma,hbar}(x) = hbar^{-n gamma} sum_k rho((x - 2 pi k) / hbar^gamma).
double mollifier(const BumpProfile& rho, double gamma, double hbar, const Point& x);

struct AmplitudeSpec {
  std::vector<double> target;  // probability weights m_P on the grid
  double epsilon = 0.2;
  double gamma = 0.1;
};

struct Amplitude {
  TorusGrid grid;
  double hbar = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double c0 = 0.0;             // normalization with int a^2 = 1 on the grid
  double c0_closed_form = 0.0; // 1 + (2 pi)^n hbar^epsilon for a probability target
  std::vector<double> values;  // a(x_j) > 0
  double l2_norm = 0.0;
  double gradient_l2 = 0.0;    // ||grad a||_{L2} (spectral)
  double h1_norm = 0.0;        // (||a||^2 + ||grad a||^2)^{1/2}
  double floor = 0.0;          // hbar^{epsilon/2} c0^{-1/2}
  double h1_bound = 0.0;       // ||grad rho||_inf hbar^{1 - epsilon - (n+1) gamma}, bounds hbar ||grad a||
};

// a = { c0^{-1} (hbar^epsilon + Phi_{gamma,hbar} * m) }^{1/2}; the mollifier
// convolution is a circular FFT convolution of exact samples of Phi. The
// admissibility rule (P in ell Z^n, 1/hbar in (1/ell) N) is checked with ell.
Amplitude build_amplitude(const TorusGrid& grid, const AmplitudeSpec& spec, double hbar, double ell);

struct WKBState {
  WaveFunction psi;
  Point P{0.0, 0.0};
  double ell = 1.0;
  KamType type = KamType::negative;
  std::shared_ptr<const WeakKAMSolution> solution;
  Amplitude amplitude;
  double gradient_norm = 0.0;  // ||grad psi||_{L2}
  double gradient_bound = 0.0; // hbar^{-1} ||P + grad v||_inf + ||a||_{H1}
};

// Requires the weak KAM grid to equal the amplitude grid, P in ell Z^n and
// 1/hbar in (1/ell) N; checks the norm and gradient invariants.
WKBState build_wkb(std::shared_ptr<const WeakKAMSolution> solution, const Amplitude& a, double ell);

// J_d = hbar Im(conj(psi) d_d psi) with spectral derivatives.
std::array<std::vector<double>, 2> current(const WaveFunction& psi);

// max over the suite of |int grad f . J dx| (grid quadrature).
double current_divergence_test(const WKBState& state, const std::vector<TrigFunction>& suite);

// Per-point pairing of J against (P + grad v) a^2 off the kink mask (and its
// neighbours): returns the max deviation.
double current_graph_defect(const WKBState& state);

void write_wkb_csv(const WKBState& state, const std::string& path);
void write_wkb_json(const WKBState& state, const std::string& path);

}  // namespace torwig
