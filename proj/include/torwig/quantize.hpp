#pragma once
// Toroidal Weyl quantization
//   Op_hbar(b) psi(x) = (2 pi)^{-n} sum_kappa int exp(i <x - y, kappa>) b(y, hbar kappa / 2) psi(2y - x) dy.
// On Fourier modes this reads Op(b) e^{i alpha x} = sum_q b_q(hbar (alpha + q/2)) e^{i (alpha+q) x},
// where b_q(eta) is the x-Fourier coefficient of b(., eta); hence the matrix
// entries M_{beta alpha} = b_{beta - alpha}(hbar (alpha + beta) / 2).

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "torwig/potential.hpp"
#include "torwig/test_function.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {

class PhaseSymbol {
 public:
  using Evaluator = std::function<double(const Point& x, const Point& eta)>;

  PhaseSymbol(int dim, Evaluator b, double order, std::string name = {});
  // Symbol given by compactly supported phase-space Fourier data; the
  // evaluator is the test-function sum.
  PhaseSymbol(TestFunction fourier, std::string name = {});

  static PhaseSymbol constant(int dim, double c);
  static PhaseSymbol momentum(int dim, int axis);            // eta_axis
  static PhaseSymbol kinetic(int dim);                       // |eta|^2 / 2
  static PhaseSymbol hamiltonian(const Potential& v);        // |eta|^2 / 2 + V(x)
  static PhaseSymbol position(const Potential& v);           // V(x)
  static PhaseSymbol product(const PhaseSymbol& a, const PhaseSymbol& b);

  int dim() const { return dim_; }
  double order() const { return order_; }
  const std::string& name() const { return name_; }
  const TestFunction* fourier_data() const { return fourier_.get(); }
  double operator()(const Point& x, const Point& eta) const { return eval_(x, eta); }

  // x-Fourier coefficients of b(., eta) on the grid (FFT slot order).
  std::vector<Complex> x_spectrum(const TorusGrid& grid, const Point& eta) const;

 private:
  int dim_;
  Evaluator eval_;
  double order_;
  std::string name_;
  std::shared_ptr<const TestFunction> fourier_;
};

// Truncation box |alpha|_inf <= radius.
struct ModeBox {
  int dim = 1;
  int radius = 0;
  IndexBox box() const { return IndexBox(dim, -radius, radius); }
  std::size_t size() const { return box().size(); }
};

struct OperatorMatrix {
  ModeBox modes;
  double hbar = 1.0;
  Eigen::MatrixXcd entries;  // (row beta, column alpha), ordered by IndexBox flat index

  double hermiticity_defect() const;  // max |M - M^dagger|
  double spectral_norm() const;
};

// Spectral application on the full grid Fourier box; q = beta - alpha is
// restricted to the centered box (exact for band-limited symbols).
WaveFunction apply_weyl(const PhaseSymbol& b, const WaveFunction& psi);
// Independent route through the phase-space translations
// U(q, p) psi(x) = exp(i (q.x + hbar p.q / 2)) psi(x + hbar p); requires Fourier data.
WaveFunction apply_weyl_translations(const PhaseSymbol& b, const WaveFunction& psi);

// Matrix on span{e^{i alpha x} : |alpha|_inf <= K}; requires K <= N/4.
OperatorMatrix weyl_matrix(const PhaseSymbol& b, const TorusGrid& grid, int K, double hbar);

struct Composition {
  OperatorMatrix product;   // Op(a) Op(b) restricted to the box
  double remainder_norm;    // || Op(a) Op(b) - Op(a b) || on the box
};
// Products are formed on an enlarged box K + (x-bandwidth of a and b) so the
// restriction to the K-box is exact; the enlarged box must still fit N/4.
Composition compose(const PhaseSymbol& a, const PhaseSymbol& b, const TorusGrid& grid, int K,
                    double hbar);

struct BoundCheck {
  double operator_norm = 0.0;
  double bound = 0.0;
  double derivative_sum = 0.0;  // sum_{|alpha| <= 2 Nc} sup |d_x^alpha b|
  int derivative_order = 0;     // 2 Nc
  bool holds = false;
};
// Numerical constant 2^{n+1}/(n+2) pi^{(3n-1)/2} / Gamma((n+1)/2).
double boundedness_constant(int dim);
// Highest derivative order 2 Nc, with Nc = n/2 + 1 (n even), (n+1)/2 + 1 (n odd).
int boundedness_derivative_order(int dim);
BoundCheck cv_bound_check(const PhaseSymbol& b, const TorusGrid& grid, int K, double hbar);

// x-bandwidth of a symbol detected from its spectrum on a few momentum samples.
int symbol_bandwidth(const PhaseSymbol& b, const TorusGrid& grid, double hbar, int K);

}  // namespace torwig
