#pragma once
// Wave functions on a torus grid, their Fourier coefficients, and the
// admissibility rule for the semiclassical parameter.
//
// Fourier convention: psi_hat_alpha = (2 pi)^{-n} int exp(-i alpha.x) psi(x) dx,
// so psi(x) = sum_alpha psi_hat_alpha exp(i alpha.x) and
// ||psi||^2 = (2 pi)^n sum_alpha |psi_hat_alpha|^2.

#include <complex>
#include <vector>

#include "torwig/fft.hpp"
#include "torwig/grid.hpp"

namespace torwig {

struct WaveFunction {
  TorusGrid grid;
  std::vector<Complex> values;  // one per grid point
  double hbar = 1.0;

  // L^2 norm by the trapezoid rule (exact for the trigonometric interpolant).
  double norm() const;
  double norm_squared() const;
  Complex operator()(const Point& x) const;  // trigonometric interpolation
};

WaveFunction make_wave(const TorusGrid& grid, std::vector<Complex> values, double hbar);
WaveFunction normalized(WaveFunction psi);

class SpectralCoefficients {
 public:
  SpectralCoefficients() = default;
  SpectralCoefficients(TorusGrid grid, std::vector<Complex> slots)
      : grid_(grid), slots_(std::move(slots)) {}

  const TorusGrid& grid() const { return grid_; }
  // Coefficient of mode alpha (centered box); modes outside the box are 0.
  Complex at(const Index& alpha) const;
  // Raw storage in FFT slot order.
  const std::vector<Complex>& slots() const { return slots_; }
  std::vector<Complex>& slots() { return slots_; }
  double sum_squares() const;  // sum_alpha |psi_hat_alpha|^2

 private:
  TorusGrid grid_;
  std::vector<Complex> slots_;
};

SpectralCoefficients fourier_coefficients(const WaveFunction& psi);
SpectralCoefficients fourier_coefficients(const TorusGrid& grid, const std::vector<Complex>& values);
// Inverse of fourier_coefficients: grid samples of sum_alpha c_alpha e^{i alpha x}.
std::vector<Complex> synthesize(const SpectralCoefficients& coeffs);

// Spectral partial derivative along `axis` of grid samples. The Nyquist mode
// is differentiated as the real cosine it represents (its derivative is zeroed).
std::vector<Complex> spectral_derivative(const TorusGrid& grid, const std::vector<Complex>& values,
                                         int axis);
std::vector<double> spectral_derivative(const TorusGrid& grid, const std::vector<double>& values,
                                        int axis);

// Admissibility of hbar for momenta P in ell Z^n: 1/hbar in (1/ell) N,
// i.e. ell / hbar is a positive integer (up to round-off).
bool is_admissible(double hbar, double ell);
void require_admissible(double hbar, double ell);

}  // namespace torwig
