#include "torwig/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "torwig/errors.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {
namespace {

// Newton polish of a critical point found on a sampling grid.
Point polish_critical_point(const Potential& v, Point x) {
  const int dim = v.dim();
  for (int it = 0; it < 50; ++it) {
    const Point g = v.gradient(x);
    const auto h = v.hessian(x);
    Point step{0.0, 0.0};
    if (dim == 1) {
      if (std::abs(h[0]) < 1e-14) break;
      step[0] = g[0] / h[0];
    } else {
      const double det = h[0] * h[3] - h[1] * h[2];
      if (std::abs(det) < 1e-14) break;
      step[0] = (h[3] * g[0] - h[1] * g[1]) / det;
      step[1] = (-h[2] * g[0] + h[0] * g[1]) / det;
    }
    if (norm(step, dim) > 0.1) break;  // left the basin; keep the sample
    for (int d = 0; d < dim; ++d) x[d] -= step[d];
    if (norm(step, dim) < 1e-15) break;
  }
  return wrap_point(x, dim);
}

}  // namespace

Potential Potential::zero(int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  Potential v;
  v.dim_ = dim;
  v.finalize();
  return v;
}

Potential Potential::from_cosines(int dim, const std::vector<CosineTerm>& terms) {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  std::map<Index, Complex> acc;
  for (const CosineTerm& t : terms) {
    if (!std::isfinite(t.coefficient)) throw ConfigError("non-finite potential coefficient");
    Index k = t.frequency;
    if (dim == 1) k[1] = 0;
    Index mk{-k[0], -k[1]};
    if (k == mk) {
      acc[k] += t.coefficient;
    } else {
      acc[k] += 0.5 * t.coefficient;
      acc[mk] += 0.5 * t.coefficient;
    }
  }
  Potential v;
  v.dim_ = dim;
  for (const auto& [k, c] : acc) {
    if (std::abs(c) > 0.0) v.modes_.push_back({k, c});
  }
  v.finalize();
  return v;
}

Potential Potential::from_samples(const TorusGrid& grid, const std::vector<double>& samples,
                                  double drop_tolerance) {
  if (samples.size() != grid.size()) throw ConfigError("potential samples do not match the grid");
  std::vector<Complex> z(samples.begin(), samples.end());
  for (double s : samples) {
    if (!std::isfinite(s)) throw PreconditionError("potential samples must be finite");
  }
  const SpectralCoefficients c = fourier_coefficients(grid, z);
  double cmax = 0.0;
  for (const Complex& s : c.slots()) cmax = std::max(cmax, std::abs(s));
  Potential v;
  v.dim_ = grid.dim();
  const IndexBox box = fourier_box(grid);
  const int n = grid.points_per_axis();
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Index omega = box.at(k);
    bool nyquist = false;
    for (int d = 0; d < grid.dim(); ++d) nyquist = nyquist || omega[d] == -n / 2;
    const Complex coef = c.at(omega);
    if (nyquist || std::abs(coef) <= drop_tolerance * cmax) continue;
    v.modes_.push_back({omega, coef});
  }
  v.finalize();
  return v;
}

void Potential::finalize() {
  std::sort(modes_.begin(), modes_.end(),
            [](const FourierMode& a, const FourierMode& b) { return a.frequency < b.frequency; });
  // Locate extrema: dense sampling then Newton polish.
  const int samples = dim_ == 1 ? 4096 : 256;
  const TorusGrid fine(dim_, samples);
  const std::vector<double> vals = sample(fine);
  const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  Point xmax = polish_critical_point(*this, fine.point(static_cast<std::size_t>(mx - vals.begin())));
  Point xmin = polish_critical_point(*this, fine.point(static_cast<std::size_t>(mn - vals.begin())));
  max_ = std::max(*mx, (*this)(xmax));
  min_ = std::min(*mn, (*this)(xmin));
  argmax_ = (*this)(xmax) >= *mx ? xmax : fine.point(static_cast<std::size_t>(mx - vals.begin()));
}

Complex Potential::coefficient(const Index& omega) const {
  for (const FourierMode& m : modes_) {
    bool same = m.frequency[0] == omega[0];
    if (dim_ == 2) same = same && m.frequency[1] == omega[1];
    if (same) return m.coefficient;
  }
  return 0.0;
}

int Potential::bandwidth() const {
  int b = 0;
  for (const FourierMode& m : modes_) {
    for (int d = 0; d < dim_; ++d) b = std::max(b, std::abs(m.frequency[d]));
  }
  return b;
}

double Potential::operator()(const Point& x) const {
  double s = 0.0;
  for (const FourierMode& m : modes_) {
    s += (m.coefficient * std::polar(1.0, index_dot(m.frequency, x, dim_))).real();
  }
  return s;
}

Point Potential::gradient(const Point& x) const {
  Point g{0.0, 0.0};
  for (const FourierMode& m : modes_) {
    const Complex e = m.coefficient * std::polar(1.0, index_dot(m.frequency, x, dim_));
    for (int d = 0; d < dim_; ++d) g[d] += -m.frequency[d] * e.imag();
  }
  return g;
}

std::array<double, 4> Potential::hessian(const Point& x) const {
  std::array<double, 4> h{0.0, 0.0, 0.0, 0.0};
  for (const FourierMode& m : modes_) {
    const double e = (m.coefficient * std::polar(1.0, index_dot(m.frequency, x, dim_))).real();
    for (int a = 0; a < dim_; ++a) {
      for (int b = 0; b < dim_; ++b) h[2 * a + b] += -m.frequency[a] * m.frequency[b] * e;
    }
  }
  return h;
}

std::vector<double> Potential::sample(const TorusGrid& grid) const {
  if (grid.dim() != dim_) throw PreconditionError("potential and grid dimensions differ");
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = (*this)(grid.point(j));
  return out;
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const FourierMode& m : modes_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << m.coefficient.real() << (m.coefficient.imag() < 0 ? "-" : "+")
       << std::abs(m.coefficient.imag()) << "i)e^{i(" << m.frequency[0];
    if (dim_ == 2) os << "," << m.frequency[1];
    os << ").x}";
  }
  return first ? "0" : os.str();
}

}  // namespace torwig
