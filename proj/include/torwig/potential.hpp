#pragma once
// Real trigonometric-polynomial potentials V(x) on the torus, stored by their
// Fourier coefficients V_hat_omega = (2 pi)^{-n} int exp(-i omega.x) V(x) dx.
// Values and derivatives at arbitrary (off-grid) points are exact sums.

#include <array>
#include <string>
#include <vector>

#include "torwig/fft.hpp"
#include "torwig/grid.hpp"

namespace torwig {

struct CosineTerm {
  Index frequency{0, 0};
  double coefficient = 0.0;  // contributes coefficient * cos(frequency . x)
};

struct FourierMode {
  Index frequency{0, 0};
  Complex coefficient;
};

class Potential {
 public:
  Potential() = default;
  static Potential zero(int dim);
  static Potential from_cosines(int dim, const std::vector<CosineTerm>& terms);
  // Spectral interpolation of real grid samples; coefficients with modulus
  // below drop_tolerance * max|V_hat| are discarded.
  static Potential from_samples(const TorusGrid& grid, const std::vector<double>& samples,
                                double drop_tolerance = 1e-13);

  int dim() const { return dim_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  Complex coefficient(const Index& omega) const;  // V_hat_omega, 0 if absent
  int bandwidth() const;                          // max |omega|_inf present

  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  std::array<double, 4> hessian(const Point& x) const;  // row-major 2x2
  std::vector<double> sample(const TorusGrid& grid) const;

  double max_value() const { return max_; }
  double min_value() const { return min_; }
  Point argmax() const { return argmax_; }
  double oscillation() const { return max_ - min_; }
  std::string describe() const;

 private:
  void finalize();

  int dim_ = 1;
  std::vector<FourierMode> modes_;
  double max_ = 0.0;
  double min_ = 0.0;
  Point argmax_{0.0, 0.0};
};

}  // namespace torwig
