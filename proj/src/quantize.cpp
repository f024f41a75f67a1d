#include "torwig/quantize.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "torwig/errors.hpp"

namespace torwig {

PhaseSymbol::PhaseSymbol(int dim, Evaluator b, double order, std::string name)
    : dim_(dim), eval_(std::move(b)), order_(order), name_(std::move(name)) {
  if (dim != 1 && dim != 2) throw ConfigError("symbol dimension must be 1 or 2");
}

PhaseSymbol::PhaseSymbol(TestFunction fourier, std::string name)
    : dim_(fourier.dim()),
      order_(-1.0),
      name_(std::move(name)),
      fourier_(std::make_shared<const TestFunction>(std::move(fourier))) {
  std::shared_ptr<const TestFunction> f = fourier_;
  eval_ = [f](const Point& x, const Point& eta) { return (*f)(x, eta); };
}

PhaseSymbol PhaseSymbol::constant(int dim, double c) {
  return PhaseSymbol(dim, [c](const Point&, const Point&) { return c; }, 0.0, "constant");
}

PhaseSymbol PhaseSymbol::momentum(int dim, int axis) {
  return PhaseSymbol(dim, [axis](const Point&, const Point& eta) { return eta[axis]; }, 1.0, "eta");
}

PhaseSymbol PhaseSymbol::kinetic(int dim) {
  return PhaseSymbol(dim, [dim](const Point&, const Point& eta) { return 0.5 * dot(eta, eta, dim); },
                     2.0, "kinetic");
}

PhaseSymbol PhaseSymbol::hamiltonian(const Potential& v) {
  const int dim = v.dim();
  return PhaseSymbol(
      dim, [v, dim](const Point& x, const Point& eta) { return 0.5 * dot(eta, eta, dim) + v(x); }, 2.0,
      "hamiltonian");
}

PhaseSymbol PhaseSymbol::position(const Potential& v) {
  return PhaseSymbol(v.dim(), [v](const Point& x, const Point&) { return v(x); }, 0.0, "potential");
}

PhaseSymbol PhaseSymbol::product(const PhaseSymbol& a, const PhaseSymbol& b) {
  if (a.dim() != b.dim()) throw PreconditionError("symbol dimensions differ");
  return PhaseSymbol(
      a.dim(), [a, b](const Point& x, const Point& eta) { return a(x, eta) * b(x, eta); },
      a.order() + b.order(), a.name() + "*" + b.name());
}

std::vector<Complex> PhaseSymbol::x_spectrum(const TorusGrid& grid, const Point& eta) const {
  if (grid.dim() != dim_) throw PreconditionError("symbol and grid dimensions differ");
  std::vector<Complex> s(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double v = eval_(grid.point(j), eta);
    if (!std::isfinite(v)) throw PreconditionError("symbol '" + name_ + "' has non-finite samples");
    s[j] = v;
  }
  FourierTransform(grid.dim(), grid.points_per_axis()).forward(s);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (Complex& c : s) c *= scale;
  return s;
}

double OperatorMatrix::hermiticity_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

double OperatorMatrix::spectral_norm() const {
  if (entries.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(entries);
  return svd.singularValues()(0);
}

WaveFunction apply_weyl(const PhaseSymbol& b, const WaveFunction& psi) {
  const TorusGrid& grid = psi.grid;
  if (b.dim() != grid.dim()) throw PreconditionError("symbol and wave function grids differ");
  const SpectralCoefficients c = fourier_coefficients(psi);
  const IndexBox modes = fourier_box(grid);
  const IndexBox lattice = momentum_lattice(grid);
  std::vector<Complex> out(grid.size(), 0.0);
  const int dim = grid.dim();
  for (std::size_t l = 0; l < lattice.size(); ++l) {
    const Index kappa = lattice.at(l);
    // Pairs (alpha, beta) with alpha + beta = kappa and q = beta - alpha in the box.
    bool any = false;
    for (std::size_t a = 0; a < modes.size() && !any; ++a) {
      const Index alpha = modes.at(a);
      const Index beta{kappa[0] - alpha[0], kappa[1] - alpha[1]};
      const Index q{beta[0] - alpha[0], beta[1] - alpha[1]};
      any = modes.contains(beta) && modes.contains(q);
    }
    if (!any) continue;
    const Point eta{0.5 * psi.hbar * kappa[0], 0.5 * psi.hbar * kappa[1]};
    const std::vector<Complex> spec = b.x_spectrum(grid, eta);
    for (std::size_t a = 0; a < modes.size(); ++a) {
      const Index alpha = modes.at(a);
      Index beta{kappa[0] - alpha[0], kappa[1] - alpha[1]};
      Index q{beta[0] - alpha[0], beta[1] - alpha[1]};
      if (dim == 1) beta[1] = q[1] = 0;
      if (!modes.contains(beta) || !modes.contains(q)) continue;
      out[grid.flat(beta)] += spec[grid.flat(q)] * c.at(alpha);
    }
  }
  SpectralCoefficients d(grid, std::move(out));
  return WaveFunction{grid, synthesize(d), psi.hbar};
}

WaveFunction apply_weyl_translations(const PhaseSymbol& b, const WaveFunction& psi) {
  if (!b.fourier_data()) {
    throw PreconditionError("the translation representation needs phase-space Fourier data");
  }
  const TestFunction& f = *b.fourier_data();
  const TorusGrid& grid = psi.grid;
  if (f.dim() != grid.dim()) throw PreconditionError("symbol and wave function grids differ");
  const SpectralCoefficients c = fourier_coefficients(psi);
  const IndexBox modes = fourier_box(grid);
  std::vector<Complex> out(grid.size(), 0.0);
  // (2 pi)^{-n} int b_hat(q,p) U(q,p) e^{i alpha x} dp
  //   = phi_q(hbar (alpha + q/2)) e^{i (alpha + q) x}.
  for (std::size_t m = 0; m < f.modes().size(); ++m) {
    const Index q = f.modes()[m];
    for (std::size_t a = 0; a < modes.size(); ++a) {
      const Index alpha = modes.at(a);
      const Complex ca = c.at(alpha);
      if (ca == Complex(0.0)) continue;
      const Index target{alpha[0] + q[0], alpha[1] + q[1]};
      if (!modes.contains(target)) continue;
      const Point eta{psi.hbar * (alpha[0] + 0.5 * q[0]), psi.hbar * (alpha[1] + 0.5 * q[1])};
      out[grid.flat(target)] += f.profile(m, eta) * ca;
    }
  }
  SpectralCoefficients d(grid, std::move(out));
  return WaveFunction{grid, synthesize(d), psi.hbar};
}

OperatorMatrix weyl_matrix(const PhaseSymbol& b, const TorusGrid& grid, int K, double hbar) {
  if (b.dim() != grid.dim()) throw PreconditionError("symbol and grid dimensions differ");
  if (K < 0 || 4 * K > grid.points_per_axis()) {
    std::ostringstream os;
    os << "truncation K = " << K << " too large for N = " << grid.points_per_axis()
       << " (need K <= N/4)";
    throw PreconditionError(os.str());
  }
  const int dim = grid.dim();
  OperatorMatrix m{ModeBox{dim, K}, hbar, {}};
  const IndexBox box = m.modes.box();
  const auto n = static_cast<Eigen::Index>(box.size());
  m.entries = Eigen::MatrixXcd::Zero(n, n);
  const IndexBox sums(dim, -2 * K, 2 * K);
  std::vector<std::vector<Complex>> spectra(sums.size());
  for (std::size_t s = 0; s < sums.size(); ++s) {
    const Index kappa = sums.at(s);
    spectra[s] = b.x_spectrum(grid, Point{0.5 * hbar * kappa[0], 0.5 * hbar * kappa[1]});
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    const Index alpha = box.at(static_cast<std::size_t>(col));
    for (Eigen::Index row = 0; row < n; ++row) {
      const Index beta = box.at(static_cast<std::size_t>(row));
      const Index kappa{alpha[0] + beta[0], alpha[1] + beta[1]};
      const Index q{beta[0] - alpha[0], beta[1] - alpha[1]};
      m.entries(row, col) = spectra[sums.flat(kappa)][grid.flat(q)];
    }
  }
  return m;
}

int symbol_bandwidth(const PhaseSymbol& b, const TorusGrid& grid, double hbar, int K) {
  const int n = grid.points_per_axis();
  int bw = 0;
  for (int k = -2 * K; k <= 2 * K; ++k) {
    for (int k1 = (grid.dim() == 2 ? -2 * K : 0); k1 <= (grid.dim() == 2 ? 2 * K : 0); k1 += std::max(1, K)) {
      const std::vector<Complex> s = b.x_spectrum(grid, Point{0.5 * hbar * k, 0.5 * hbar * k1});
      double smax = 0.0;
      for (const Complex& c : s) smax = std::max(smax, std::abs(c));
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (std::abs(s[j]) <= 1e-13 * std::max(smax, 1e-300)) continue;
        const Index q = grid.multi_index(j);
        for (int d = 0; d < grid.dim(); ++d) bw = std::max(bw, std::abs(centered_mod(q[d], n)));
      }
    }
  }
  return bw;
}

Composition compose(const PhaseSymbol& a, const PhaseSymbol& b, const TorusGrid& grid, int K,
                    double hbar) {
  if (a.dim() != b.dim()) throw PreconditionError("symbol dimensions differ");
  const int margin = symbol_bandwidth(b, grid, hbar, K);
  const int ext = K + margin;
  if (4 * ext > grid.points_per_axis()) {
    std::ostringstream os;
    os << "truncation mismatch: composing needs an enlarged box K + " << margin << " = " << ext
       << " <= N/4 = " << grid.points_per_axis() / 4;
    throw PreconditionError(os.str());
  }
  const OperatorMatrix A = weyl_matrix(a, grid, ext, hbar);
  const OperatorMatrix B = weyl_matrix(b, grid, ext, hbar);
  const Eigen::MatrixXcd AB = A.entries * B.entries;
  const IndexBox big = A.modes.box();
  const IndexBox small(grid.dim(), -K, K);
  const auto n = static_cast<Eigen::Index>(small.size());
  std::vector<Eigen::Index> map(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) map[i] = static_cast<Eigen::Index>(big.flat(small.at(i)));
  OperatorMatrix product{ModeBox{grid.dim(), K}, hbar, Eigen::MatrixXcd(n, n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) product.entries(r, c) = AB(map[r], map[c]);
  }
  const OperatorMatrix direct = weyl_matrix(PhaseSymbol::product(a, b), grid, K, hbar);
  OperatorMatrix diff{product.modes, hbar, product.entries - direct.entries};
  return Composition{product, diff.spectral_norm()};
}

double boundedness_constant(int dim) {
  const double n = dim;
  return std::pow(2.0, n + 1.0) / (n + 2.0) * std::pow(std::numbers::pi, (3.0 * n - 1.0) / 2.0) /
         std::tgamma((n + 1.0) / 2.0);
}

int boundedness_derivative_order(int dim) {
  const int nc = dim % 2 == 0 ? dim / 2 + 1 : (dim + 1) / 2 + 1;
  return 2 * nc;
}

BoundCheck cv_bound_check(const PhaseSymbol& b, const TorusGrid& grid, int K, double hbar) {
  if (b.order() > 0.0) {
    throw PreconditionError("symbol '" + b.name() + "' has positive order; boundedness needs S^0_{0,0}");
  }
  BoundCheck out;
  out.derivative_order = boundedness_derivative_order(grid.dim());
  const OperatorMatrix m = weyl_matrix(b, grid, K, hbar);
  out.operator_norm = m.spectral_norm();

  // Multi-indices alpha with |alpha| <= 2 Nc.
  std::vector<Index> orders;
  for (int a0 = 0; a0 <= out.derivative_order; ++a0) {
    if (grid.dim() == 1) {
      orders.push_back({a0, 0});
    } else {
      for (int a1 = 0; a0 + a1 <= out.derivative_order; ++a1) orders.push_back({a0, a1});
    }
  }
  std::vector<double> sups(orders.size(), 0.0);
  const IndexBox sums(grid.dim(), -2 * K, 2 * K);
  const FourierTransform fft(grid.dim(), grid.points_per_axis());
  const int n = grid.points_per_axis();
  for (std::size_t s = 0; s < sums.size(); ++s) {
    const Index kappa = sums.at(s);
    const std::vector<Complex> spec = b.x_spectrum(grid, Point{0.5 * hbar * kappa[0], 0.5 * hbar * kappa[1]});
    for (std::size_t o = 0; o < orders.size(); ++o) {
      std::vector<Complex> d = spec;
      for (std::size_t j = 0; j < d.size(); ++j) {
        const Index q = grid.multi_index(j);
        Complex factor = 1.0;
        for (int ax = 0; ax < grid.dim(); ++ax) {
          const int qq = centered_mod(q[ax], n);
          factor *= std::pow(Complex(0.0, qq == -n / 2 ? 0.0 : qq), orders[o][ax]);
        }
        d[j] *= factor;
      }
      fft.backward(d);
      for (const Complex& v : d) sups[o] = std::max(sups[o], std::abs(v));
    }
  }
  for (double s : sups) out.derivative_sum += s;
  out.bound = boundedness_constant(grid.dim()) * out.derivative_sum;
  out.holds = out.operator_norm <= out.bound;
  return out;
}

}  // namespace torwig
