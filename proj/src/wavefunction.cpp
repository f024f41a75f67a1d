#include "torwig/wavefunction.hpp"

#include <cmath>
#include <sstream>

#include "torwig/errors.hpp"

namespace torwig {

double WaveFunction::norm_squared() const {
  double s = 0.0;
  for (const Complex& v : values) s += std::norm(v);
  return s * grid.cell_volume();
}

double WaveFunction::norm() const { return std::sqrt(norm_squared()); }

Complex WaveFunction::operator()(const Point& x) const {
  const SpectralCoefficients c = fourier_coefficients(*this);
  const IndexBox box = fourier_box(grid);
  Complex s = 0.0;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Index alpha = box.at(k);
    s += c.at(alpha) * std::polar(1.0, index_dot(alpha, x, grid.dim()));
  }
  return s;
}

WaveFunction make_wave(const TorusGrid& grid, std::vector<Complex> values, double hbar) {
  if (values.size() != grid.size()) throw ConfigError("wave function size does not match its grid");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw PreconditionError("hbar must be positive");
  for (const Complex& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw PreconditionError("wave function has non-finite samples");
    }
  }
  return WaveFunction{grid, std::move(values), hbar};
}

WaveFunction normalized(WaveFunction psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw PreconditionError("cannot normalize the zero wave function");
  for (Complex& v : psi.values) v /= n;
  return psi;
}

Complex SpectralCoefficients::at(const Index& alpha) const {
  const int n = grid_.points_per_axis();
  for (int d = 0; d < grid_.dim(); ++d) {
    if (alpha[d] < -n / 2 || alpha[d] > n / 2 - 1) return 0.0;
  }
  return slots_[grid_.flat(alpha)];
}

double SpectralCoefficients::sum_squares() const {
  double s = 0.0;
  for (const Complex& c : slots_) s += std::norm(c);
  return s;
}

SpectralCoefficients fourier_coefficients(const TorusGrid& grid, const std::vector<Complex>& values) {
  std::vector<Complex> data = values;
  FourierTransform(grid.dim(), grid.points_per_axis()).forward(data);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& c : data) c *= scale;
  return SpectralCoefficients(grid, std::move(data));
}

SpectralCoefficients fourier_coefficients(const WaveFunction& psi) {
  return fourier_coefficients(psi.grid, psi.values);
}

std::vector<Complex> synthesize(const SpectralCoefficients& coeffs) {
  std::vector<Complex> data = coeffs.slots();
  const TorusGrid& g = coeffs.grid();
  FourierTransform(g.dim(), g.points_per_axis()).backward(data);
  return data;
}

std::vector<Complex> spectral_derivative(const TorusGrid& grid, const std::vector<Complex>& values,
                                         int axis) {
  SpectralCoefficients c = fourier_coefficients(grid, values);
  const int n = grid.points_per_axis();
  auto& slots = c.slots();
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const int k = centered_mod(grid.multi_index(j)[axis], n);
    slots[j] *= (k == -n / 2) ? Complex(0.0) : Complex(0.0, static_cast<double>(k));
  }
  return synthesize(c);
}

std::vector<double> spectral_derivative(const TorusGrid& grid, const std::vector<double>& values,
                                        int axis) {
  std::vector<Complex> z(values.begin(), values.end());
  const std::vector<Complex> dz = spectral_derivative(grid, z, axis);
  std::vector<double> out(dz.size());
  for (std::size_t j = 0; j < dz.size(); ++j) out[j] = dz[j].real();
  return out;
}

bool is_admissible(double hbar, double ell) {
  if (!(hbar > 0.0) || !(ell > 0.0)) return false;
  const double ratio = ell / hbar;
  const double k = std::round(ratio);
  return k >= 1.0 && std::abs(ratio - k) <= 1e-9 * std::max(1.0, ratio);
}

void require_admissible(double hbar, double ell) {
  if (!is_admissible(hbar, ell)) {
    std::ostringstream os;
    os << "inadmissible hbar = " << hbar << " for momentum lattice ell = " << ell
       << ": WKB states require P in ell Z^n and 1/hbar in (1/ell) N, so that exp(i P.x / hbar)"
       << " is single-valued on the torus";
    throw PreconditionError(os.str());
  }
}

}  // namespace torwig
