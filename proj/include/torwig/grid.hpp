#pragma once
// Uniform grids on the flat torus T^n = (R / 2 pi Z)^n, n in {1, 2}, and the
// index bookkeeping for Fourier modes and the half-integer momentum lattice.
//
// Storage convention: flat index j = j0 + N * j1 (axis 0 fastest). Fourier
// modes alpha live in the centered box [-N/2, N/2 - 1]^n and are stored at
// slot alpha mod N, which is the native FFT ordering.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace torwig {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Point = std::array<double, 2>;  // unused trailing components are 0
using Index = std::array<int, 2>;

class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return kTwoPi / n_; }
  // Trapezoid weight of one grid cell, (2 pi / N)^n.
  double cell_volume() const;

  Index multi_index(std::size_t flat) const;
  std::size_t flat(const Index& idx) const;  // wraps periodically
  Point point(std::size_t flat) const;
  std::vector<Point> points() const;

  bool operator==(const TorusGrid& other) const {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_ = 1;
  int n_ = 8;
  std::size_t size_ = 8;
};

TorusGrid make_grid(int dim, int points_per_axis);

// Periodic reduction helpers.
double wrap_angle(double x);          // -> [0, 2 pi)
double periodic_difference(double d);  // -> (-pi, pi]
Point wrap_point(const Point& x, int dim);

// Centered integer representative of k modulo m, in [-m/2, m/2 - 1].
int centered_mod(int k, int m);
// Non-negative residue of k modulo m.
int positive_mod(int k, int m);

// Enumerates multi-indices of a box [lo, hi]^dim (axis 0 fastest).
class IndexBox {
 public:
  IndexBox(int dim, int lo, int hi);
  int dim() const { return dim_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int extent() const { return hi_ - lo_ + 1; }
  std::size_t size() const { return size_; }
  Index at(std::size_t flat) const;
  bool contains(const Index& idx) const;
  std::size_t flat(const Index& idx) const;  // requires contains()

 private:
  int dim_;
  int lo_;
  int hi_;
  std::size_t size_;
};

// Momentum lattice (hbar/2) Z^n carried by Wigner tables on an N-point grid:
// kappa ranges over [-N, N - 1]^n, so every product alpha + beta of two grid
// modes is represented without aliasing. The momentum of kappa is hbar*kappa/2.
IndexBox momentum_lattice(const TorusGrid& grid);

// Centered Fourier box of a grid, [-N/2, N/2 - 1]^n.
IndexBox fourier_box(const TorusGrid& grid);

// FFT slot of mode alpha on an N-point grid.
std::size_t fourier_slot(const TorusGrid& grid, const Index& alpha);

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += a[d] * b[d];
  return s;
}
inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }
inline double index_dot(const Index& k, const Point& x, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += k[d] * x[d];
  return s;
}

}  // namespace torwig
