#include "torwig/test_function.hpp"

#include <algorithm>
#include <cmath>

#include "torwig/errors.hpp"

namespace torwig {
namespace {

double bump_profile(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

}  // namespace

TestFunction::TestFunction(int dim, std::vector<Index> modes, double p_max, int nodes,
                           const Spectrum& hat)
    : dim_(dim), modes_(std::move(modes)), p_max_(p_max), nodes_(nodes) {
  if (dim != 1 && dim != 2) throw ConfigError("test function dimension must be 1 or 2");
  if (!(p_max > 0.0)) throw ConfigError("test function momentum support must be positive");
  if (nodes < 64) throw ConfigError("test function quadrature needs at least 64 nodes per axis");
  if (modes_.empty()) throw ConfigError("test function needs at least one frequency");
  for (Index& q : modes_) {
    if (dim_ == 1) q[1] = 0;
  }
  const std::size_t count = dim_ == 1 ? static_cast<std::size_t>(nodes_)
                                      : static_cast<std::size_t>(nodes_) * nodes_;
  hat_.assign(modes_.size(), std::vector<Complex>(count));
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    for (std::size_t k = 0; k < count; ++k) hat_[m][k] = hat(modes_[m], node(k));
  }
}

Point TestFunction::node(std::size_t k) const {
  const double step = 2.0 * p_max_ / (nodes_ - 1);
  Point p{0.0, 0.0};
  p[0] = -p_max_ + step * static_cast<double>(k % nodes_);
  if (dim_ == 2) p[1] = -p_max_ + step * static_cast<double>(k / nodes_);
  return p;
}

double TestFunction::weight(std::size_t k) const {
  const double step = 2.0 * p_max_ / (nodes_ - 1);
  auto axis_weight = [&](std::size_t i) {
    return (i == 0 || i == static_cast<std::size_t>(nodes_ - 1)) ? 0.5 * step : step;
  };
  double w = axis_weight(k % nodes_);
  if (dim_ == 2) w *= axis_weight(k / nodes_);
  return w;
}

TestFunction TestFunction::bump(int dim, const Index& q, double phase, const Point& eta0,
                                double p_max, int nodes) {
  auto b = [dim, p_max](const Point& p) {
    double v = bump_profile(p[0] / p_max);
    if (dim == 2) v *= bump_profile(p[1] / p_max);
    return v;
  };
  // Normalize with the same quadrature so that G(0) = 1 exactly.
  const TestFunction probe(dim, {Index{0, 0}}, p_max, nodes,
                           [&](const Index&, const Point& p) { return Complex(b(p)); });
  double mass = 0.0;
  const std::size_t count = probe.hat_[0].size();
  for (std::size_t k = 0; k < count; ++k) mass += probe.weight(k) * probe.hat_[0][k].real();
  const double volume = std::pow(kTwoPi, dim);

  Index qq = q;
  if (dim == 1) qq[1] = 0;
  const bool zero = qq[0] == 0 && qq[1] == 0;
  std::vector<Index> modes;
  if (zero) {
    modes = {qq};
  } else {
    modes = {qq, Index{-qq[0], -qq[1]}};
  }
  auto hat = [=](const Index& m, const Point& p) {
    Complex c;
    if (zero) {
      c = std::cos(phase);
    } else {
      c = 0.5 * std::polar(1.0, m == qq ? phase : -phase);
    }
    return volume * c * b(p) * std::polar(1.0, -dot(p, eta0, dim)) / mass;
  };
  return TestFunction(dim, modes, p_max, nodes, hat);
}

int TestFunction::mode_bandwidth() const {
  int b = 0;
  for (const Index& q : modes_) {
    for (int d = 0; d < dim_; ++d) b = std::max(b, std::abs(q[d]));
  }
  return b;
}

Complex TestFunction::profile(std::size_t mode_index, const Point& eta) const {
  const std::vector<Complex>& h = hat_.at(mode_index);
  Complex s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    s += weight(k) * h[k] * std::polar(1.0, dot(node(k), eta, dim_));
  }
  return s / std::pow(kTwoPi, dim_);
}

double TestFunction::operator()(const Point& x, const Point& eta) const {
  Complex s = 0.0;
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    s += profile(m, eta) * std::polar(1.0, index_dot(modes_[m], x, dim_));
  }
  return s.real();
}

std::array<Point, 2> TestFunction::gradients(const Point& x, const Point& eta) const {
  std::array<Complex, 2> gx{0.0, 0.0}, ge{0.0, 0.0};
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const std::vector<Complex>& h = hat_[m];
    Complex prof = 0.0;
    std::array<Complex, 2> dprof{0.0, 0.0};
    for (std::size_t k = 0; k < h.size(); ++k) {
      const Point p = node(k);
      const Complex term = weight(k) * h[k] * std::polar(1.0, dot(p, eta, dim_));
      prof += term;
      for (int d = 0; d < dim_; ++d) dprof[d] += Complex(0.0, p[d]) * term;
    }
    const Complex e = std::polar(1.0, index_dot(modes_[m], x, dim_));
    for (int d = 0; d < dim_; ++d) {
      gx[d] += Complex(0.0, modes_[m][d]) * prof * e;
      ge[d] += dprof[d] * e;
    }
  }
  const double scale = std::pow(kTwoPi, dim_);
  std::array<Point, 2> out{};
  for (int d = 0; d < dim_; ++d) {
    out[0][d] = gx[d].real() / scale;
    out[1][d] = ge[d].real() / scale;
  }
  return out;
}

TestFunction TestFunction::translated_in_momentum(const Point& eta0) const {
  TestFunction out = *this;
  for (auto& row : out.hat_) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= std::polar(1.0, -dot(node(k), eta0, dim_));
  }
  return out;
}

double TestFunction::a_norm() const {
  double s = 0.0;
  for (const auto& row : hat_) {
    for (std::size_t k = 0; k < row.size(); ++k) s += weight(k) * std::abs(row[k]);
  }
  return s;
}

double TestFunction::sup_estimate(double eta_range, int samples_per_axis) const {
  const int sx = 32;
  double sup = 0.0;
  const int se = samples_per_axis;
  const int ex = dim_ == 2 ? se : 1;
  const int xx = dim_ == 2 ? sx : 1;
  for (int e0 = 0; e0 < se; ++e0) {
    for (int e1 = 0; e1 < ex; ++e1) {
      Point eta{-eta_range + 2.0 * eta_range * e0 / (se - 1), 0.0};
      if (dim_ == 2) eta[1] = -eta_range + 2.0 * eta_range * e1 / (se - 1);
      std::vector<Complex> prof(modes_.size());
      for (std::size_t m = 0; m < modes_.size(); ++m) prof[m] = profile(m, eta);
      for (int a = 0; a < sx; ++a) {
        for (int b = 0; b < xx; ++b) {
          const Point x{kTwoPi * a / sx, kTwoPi * b / sx};
          Complex s = 0.0;
          for (std::size_t m = 0; m < modes_.size(); ++m) {
            s += prof[m] * std::polar(1.0, index_dot(modes_[m], x, dim_));
          }
          sup = std::max(sup, std::abs(s.real()));
        }
      }
    }
  }
  return sup;
}

TimeProfile TimeProfile::constant() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }};
}

TimeProfile TimeProfile::cosine(double omega) {
  return {[omega](double s) { return std::cos(omega * s); },
          [omega](double s) { return -omega * std::sin(omega * s); }};
}

PhaseTable tabulate(const TestFunction& phi, const TorusGrid& grid, double hbar, bool with_gradient) {
  if (phi.dim() != grid.dim()) throw PreconditionError("test function and grid dimensions differ");
  PhaseTable t{grid, hbar, momentum_lattice(grid), {}, {}};
  const std::size_t L = t.lattice.size();
  const std::size_t M = phi.modes().size();
  const int dim = grid.dim();
  std::vector<Complex> prof(M * L);
  for (std::size_t l = 0; l < L; ++l) {
    const Index kappa = t.lattice.at(l);
    const Point eta{0.5 * hbar * kappa[0], 0.5 * hbar * kappa[1]};
    for (std::size_t m = 0; m < M; ++m) prof[m * L + l] = phi.profile(m, eta);
  }
  t.values.assign(grid.size() * L, 0.0);
  if (with_gradient) {
    for (int d = 0; d < dim; ++d) t.gradient[d].assign(grid.size() * L, 0.0);
  }
  std::vector<Complex> phase(M);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Point x = grid.point(j);
    for (std::size_t m = 0; m < M; ++m) phase[m] = std::polar(1.0, index_dot(phi.modes()[m], x, dim));
    for (std::size_t l = 0; l < L; ++l) {
      Complex s = 0.0;
      Complex g[2] = {0.0, 0.0};
      for (std::size_t m = 0; m < M; ++m) {
        const Complex term = prof[m * L + l] * phase[m];
        s += term;
        if (with_gradient) {
          for (int d = 0; d < dim; ++d) g[d] += Complex(0.0, phi.modes()[m][d]) * term;
        }
      }
      t.values[j * L + l] = s.real();
      if (with_gradient) {
        for (int d = 0; d < dim; ++d) t.gradient[d][j * L + l] = g[d].real();
      }
    }
  }
  return t;
}

std::vector<TestFunction> standard_suite(int dim, int q_max, double p_max, int nodes,
                                         const std::vector<Point>& centres) {
  std::vector<TestFunction> out;
  const int q1_max = dim == 2 ? q_max : 0;
  for (const Point& c : centres) {
    for (int q1 = 0; q1 <= q1_max; ++q1) {
      for (int q0 = 0; q0 <= q_max; ++q0) {
        const Index q{q0, q1};
        out.push_back(TestFunction::bump(dim, q, 0.0, c, p_max, nodes));
        if (q0 != 0 || q1 != 0) {
          out.push_back(TestFunction::bump(dim, q, 0.5 * std::numbers::pi, c, p_max, nodes));
        }
      }
    }
  }
  return out;
}

}  // namespace torwig
