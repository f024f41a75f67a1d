#include "torwig/grid.hpp"

#include <string>

#include "torwig/errors.hpp"

namespace torwig {

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim != 1 && dim != 2) {
    throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (points_per_axis < 8 || points_per_axis % 2 != 0) {
    throw ConfigError("points per axis must be even and >= 8, got " +
                      std::to_string(points_per_axis));
  }
  size_ = static_cast<std::size_t>(n_);
  if (dim_ == 2) size_ *= static_cast<std::size_t>(n_);
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), dim_); }

Index TorusGrid::multi_index(std::size_t flat) const {
  Index idx{0, 0};
  idx[0] = static_cast<int>(flat % n_);
  if (dim_ == 2) idx[1] = static_cast<int>(flat / n_);
  return idx;
}

std::size_t TorusGrid::flat(const Index& idx) const {
  std::size_t f = static_cast<std::size_t>(positive_mod(idx[0], n_));
  if (dim_ == 2) f += static_cast<std::size_t>(n_) * positive_mod(idx[1], n_);
  return f;
}

Point TorusGrid::point(std::size_t flat) const {
  const Index idx = multi_index(flat);
  Point x{0.0, 0.0};
  for (int d = 0; d < dim_; ++d) x[d] = spacing() * idx[d];
  return x;
}

std::vector<Point> TorusGrid::points() const {
  std::vector<Point> out(size_);
  for (std::size_t j = 0; j < size_; ++j) out[j] = point(j);
  return out;
}

TorusGrid make_grid(int dim, int points_per_axis) { return TorusGrid(dim, points_per_axis); }

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double periodic_difference(double d) {
  double r = std::remainder(d, kTwoPi);  // in [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Point wrap_point(const Point& x, int dim) {
  Point y = x;
  for (int d = 0; d < dim; ++d) y[d] = wrap_angle(x[d]);
  return y;
}

int positive_mod(int k, int m) {
  const int r = k % m;
  return r < 0 ? r + m : r;
}

int centered_mod(int k, int m) {
  const int r = positive_mod(k, m);
  return r >= m / 2 ? r - m : r;
}

IndexBox::IndexBox(int dim, int lo, int hi) : dim_(dim), lo_(lo), hi_(hi) {
  if (hi < lo) throw ConfigError("empty index box");
  size_ = static_cast<std::size_t>(extent());
  if (dim_ == 2) size_ *= static_cast<std::size_t>(extent());
}

Index IndexBox::at(std::size_t flat) const {
  const std::size_t e = static_cast<std::size_t>(extent());
  Index idx{0, 0};
  idx[0] = lo_ + static_cast<int>(flat % e);
  if (dim_ == 2) idx[1] = lo_ + static_cast<int>(flat / e);
  return idx;
}

bool IndexBox::contains(const Index& idx) const {
  for (int d = 0; d < dim_; ++d) {
    if (idx[d] < lo_ || idx[d] > hi_) return false;
  }
  return true;
}

std::size_t IndexBox::flat(const Index& idx) const {
  std::size_t f = static_cast<std::size_t>(idx[0] - lo_);
  if (dim_ == 2) f += static_cast<std::size_t>(extent()) * static_cast<std::size_t>(idx[1] - lo_);
  return f;
}

IndexBox momentum_lattice(const TorusGrid& grid) {
  const int n = grid.points_per_axis();
  return IndexBox(grid.dim(), -n, n - 1);
}

IndexBox fourier_box(const TorusGrid& grid) {
  const int n = grid.points_per_axis();
  return IndexBox(grid.dim(), -n / 2, n / 2 - 1);
}

std::size_t fourier_slot(const TorusGrid& grid, const Index& alpha) { return grid.flat(alpha); }

}  // namespace torwig
