#include "torwig/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "torwig/errors.hpp"

namespace torwig {
namespace {

double cell(const TorusGrid& g) { return g.cell_volume(); }

bool on_lattice_edge(const IndexBox& lattice, const Index& kappa) {
  for (int d = 0; d < lattice.dim(); ++d) {
    if (kappa[d] == lattice.lo() || kappa[d] == lattice.hi()) return true;
  }
  return false;
}

}  // namespace

double WignerTable::at(std::size_t j, const Index& kappa) const {
  if (!lattice.contains(kappa)) return 0.0;
  return values[j * lattice.size() + lattice.flat(kappa)];
}

std::vector<double> WignerTable::position_marginal() const {
  const std::size_t L = lattice.size();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < L; ++l) s += values[j * L + l];
    out[j] = s;
  }
  return out;
}

std::vector<double> WignerTable::momentum_marginal() const {
  const std::size_t L = lattice.size();
  std::vector<double> out(L, 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t l = 0; l < L; ++l) out[l] += values[j * L + l];
  }
  for (double& v : out) v /= static_cast<double>(grid.size());
  return out;
}

double WignerTable::total_mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell(grid);
}

WignerTable wigner_transform(const WaveFunction& psi) {
  const TorusGrid& grid = psi.grid;
  if (grid.points_per_axis() % 2 != 0) throw ConfigError("Wigner transform needs an even grid");
  if (!(psi.hbar > 0.0)) throw PreconditionError("hbar must be positive");
  const int n = grid.points_per_axis();
  const int m = 2 * n;  // padded transform length per axis
  const int dim = grid.dim();
  const SpectralCoefficients c = fourier_coefficients(psi);
  const IndexBox modes = fourier_box(grid);
  const TorusGrid padded(dim, m);
  const FourierTransform fft(dim, m);

  WignerTable w{grid, psi.hbar, momentum_lattice(grid), {}, 0.0};
  const std::size_t L = w.lattice.size();
  w.values.assign(grid.size() * L, 0.0);

  std::vector<Complex> a(padded.size()), b(padded.size());
  const double scale = 1.0 / static_cast<double>(padded.size());
  double max_imag = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Point x = grid.point(j);
    std::fill(a.begin(), a.end(), Complex(0.0));
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const Index alpha = modes.at(k);
      a[padded.flat(alpha)] = c.at(alpha) * std::polar(1.0, index_dot(alpha, x, dim));
    }
    // W(x, kappa) = sum_{alpha + beta = kappa} u_alpha conj(u_beta): a linear
    // convolution of u with conj(u), done on the padded grid where no sum wraps.
    fft.forward(a);
    for (std::size_t s = 0; s < padded.size(); ++s) {
      const Index th = padded.multi_index(s);
      const Index neg{-th[0], -th[1]};
      b[s] = a[s] * std::conj(a[padded.flat(neg)]);
    }
    fft.backward(b);
    for (std::size_t l = 0; l < L; ++l) {
      const Complex v = b[padded.flat(w.lattice.at(l))] * scale;
      w.values[j * L + l] = v.real();
      max_imag = std::max(max_imag, std::abs(v.imag()));
    }
  }
  w.max_imaginary = max_imag;
  return w;
}

double MarginalDefects::max() const { return std::max({realness, position, momentum}); }

MarginalDefects marginal_defects(const WignerTable& w, const WaveFunction& psi) {
  MarginalDefects d;
  d.realness = w.max_imaginary;
  const std::vector<double> pos = w.position_marginal();
  for (std::size_t j = 0; j < pos.size(); ++j) {
    d.position = std::max(d.position, std::abs(pos[j] - std::norm(psi.values[j])));
  }
  const SpectralCoefficients c = fourier_coefficients(psi);
  const std::vector<double> mom = w.momentum_marginal();
  for (std::size_t l = 0; l < mom.size(); ++l) {
    const Index kappa = w.lattice.at(l);
    bool even = true;
    for (int ax = 0; ax < w.grid.dim(); ++ax) even = even && kappa[ax] % 2 == 0;
    const double expected = even ? std::norm(c.at({kappa[0] / 2, kappa[1] / 2})) : 0.0;
    d.momentum = std::max(d.momentum, std::abs(mom[l] - expected));
  }
  return d;
}

Pairing pair(const WignerTable& w, const PhaseTable& phi) {
  if (!(phi.grid == w.grid) || std::abs(phi.hbar - w.hbar) > 1e-15 * w.hbar) {
    throw PreconditionError("test-function table does not match the Wigner table");
  }
  Pairing p;
  const std::size_t L = w.lattice.size();
  double sum = 0.0;
  double sup = 0.0;
  for (std::size_t j = 0; j < w.grid.size(); ++j) {
    for (std::size_t l = 0; l < L; ++l) {
      const double f = phi.values[j * L + l];
      sum += f * w.values[j * L + l];
      sup = std::max(sup, std::abs(f));
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (!on_lattice_edge(w.lattice, w.lattice.at(l))) continue;
    for (std::size_t j = 0; j < w.grid.size(); ++j) {
      p.edge_magnitude = std::max(p.edge_magnitude, std::abs(phi.values[j * L + l]));
    }
  }
  p.value = sum * cell(w.grid);
  p.truncated = p.edge_magnitude > 1e-8 * std::max(sup, 1e-300);
  return p;
}

Pairing pair(const WignerTable& w, const TestFunction& phi) {
  return pair(w, tabulate(phi, w.grid, w.hbar, false));
}

double tightness_mass(const WaveFunction& psi, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("tightness radius must be positive");
  const SpectralCoefficients c = fourier_coefficients(psi);
  const IndexBox modes = fourier_box(psi.grid);
  double s = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Index alpha = modes.at(k);
    const Point eta{psi.hbar * alpha[0], psi.hbar * alpha[1]};
    if (norm(eta, psi.grid.dim()) > radius) s += std::norm(c.at(alpha));
  }
  return std::pow(kTwoPi, psi.grid.dim()) * s;
}

double KappaKernel::at(const Point& x, const Index& kappa) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] == kappa) {
      return -2.0 / hbar * (std::polar(1.0, -index_dot(kappa, x, grid.dim())) * coefficients[r]).imag();
    }
  }
  return 0.0;
}

KappaKernel kappa_kernel(const Potential& v, const TorusGrid& grid, double hbar) {
  if (v.dim() != grid.dim()) throw PreconditionError("potential and grid dimensions differ");
  if (!(hbar > 0.0)) throw PreconditionError("hbar must be positive");
  KappaKernel k{grid, hbar, {}, {}, {}};
  for (const FourierMode& m : v.modes()) {
    const Index kappa{-m.frequency[0], -m.frequency[1]};  // V_kappa = V_hat_{-kappa}
    if (kappa[0] == 0 && kappa[1] == 0) continue;       // the kappa = 0 row cancels
    k.rows.push_back(kappa);
    k.coefficients.push_back(m.coefficient);
  }
  for (std::size_t r = 0; r < k.rows.size(); ++r) {
    std::vector<double> row(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) row[j] = k.at(grid.point(j), k.rows[r]);
    k.values.push_back(std::move(row));
  }
  return k;
}

std::vector<double> lattice_convolution(const KappaKernel& k, const WignerTable& w) {
  if (!(k.grid == w.grid)) throw PreconditionError("kernel and Wigner table grids differ");
  const std::size_t L = w.lattice.size();
  std::vector<double> out(w.values.size(), 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const Index kappa = w.lattice.at(l);
    for (std::size_t r = 0; r < k.rows.size(); ++r) {
      const Index src{kappa[0] - k.rows[r][0], kappa[1] - k.rows[r][1]};
      if (!w.lattice.contains(src)) continue;
      const std::size_t ls = w.lattice.flat(src);
      for (std::size_t j = 0; j < w.grid.size(); ++j) {
        out[j * L + l] += k.values[r][j] * w.values[j * L + ls];
      }
    }
  }
  return out;
}

EvolutionResidual::EvolutionResidual(const TestFunction& phi, TimeProfile theta, const Potential& v,
                                     const TorusGrid& grid, double hbar)
    : table_(tabulate(phi, grid, hbar, true)),
      theta_(std::move(theta)),
      kernel_(kappa_kernel(v, grid, hbar)) {
  // Fold the transport and kernel terms into a single table:
  //   sum_kappa phi(kappa) (K * W)(kappa) = sum_kappa' W(kappa') sum_omega K_omega phi(kappa' + omega).
  const std::size_t L = table_.lattice.size();
  std::vector<double> transport(table_.values.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t l = 0; l < L; ++l) {
      const Index kappa = table_.lattice.at(l);
      double s = 0.0;
      for (int d = 0; d < grid.dim(); ++d) s += 0.5 * hbar * kappa[d] * table_.gradient[d][j * L + l];
      for (std::size_t r = 0; r < kernel_.rows.size(); ++r) {
        const Index target{kappa[0] + kernel_.rows[r][0], kappa[1] + kernel_.rows[r][1]};
        if (!table_.lattice.contains(target)) continue;
        s += kernel_.values[r][j] * table_.values[j * L + table_.lattice.flat(target)];
      }
      transport[j * L + l] = s;
    }
  }
  table_.gradient[0] = std::move(transport);
  table_.gradient[1].clear();
}

void EvolutionResidual::push(double t, const WignerTable& w) {
  if (!(w.grid == table_.grid)) throw PreconditionError("trajectory frame on a different grid");
  const double c = cell(w.grid);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    a += table_.values[i] * w.values[i];
    b += table_.gradient[0][i] * w.values[i];
  }
  a *= c;
  b *= c;
  const double integrand = theta_.derivative(t) * a + theta_.value(t) * b;
  const double pairing = theta_.value(t) * a;
  if (count_ == 0) {
    first_pairing_ = pairing;
  } else {
    const double step = t - last_t_;
    if (count_ == 1) {
      dt_ = step;
      if (!(std::abs(dt_) > 0.0)) throw PreconditionError("repeated trajectory time");
    } else if (std::abs(step - dt_) > 1e-9 * std::max(1.0, std::abs(dt_)) &&
               std::abs(step - dt_) > 1e-6 * std::abs(dt_)) {
      std::ostringstream os;
      os << "nonuniform time sampling in trajectory: step " << step << " after " << dt_;
      throw PreconditionError(os.str());
    }
    integral_ += 0.5 * step * (last_integrand_ + integrand);
  }
  last_pairing_ = pairing;
  last_integrand_ = integrand;
  last_t_ = t;
  ++count_;
}

double EvolutionResidual::residual() const { return std::abs(integral_ - boundary_term()); }

double evolution_residual(const std::vector<WignerFrame>& trajectory, const TestFunction& phi,
                          const TimeProfile& theta, const Potential& v, double hbar) {
  if (trajectory.empty()) throw PreconditionError("empty trajectory");
  EvolutionResidual acc(phi, theta, v, trajectory.front().table.grid, hbar);
  for (const WignerFrame& f : trajectory) acc.push(f.t, f.table);
  return acc.residual();
}

void write_wigner_csv(const WignerTable& w, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + path);
  const int dim = w.grid.dim();
  std::fputs(dim == 1 ? "x_index,kappa,value\n" : "x0_index,x1_index,kappa0,kappa1,value\n", f);
  const std::size_t L = w.lattice.size();
  for (std::size_t j = 0; j < w.grid.size(); ++j) {
    const Index xi = w.grid.multi_index(j);
    for (std::size_t l = 0; l < L; ++l) {
      const Index k = w.lattice.at(l);
      if (dim == 1) {
        std::fprintf(f, "%d,%d,%.17g\n", xi[0], k[0], w.values[j * L + l]);
      } else {
        std::fprintf(f, "%d,%d,%d,%d,%.17g\n", xi[0], xi[1], k[0], k[1], w.values[j * L + l]);
      }
    }
  }
  std::fclose(f);
}

void write_wigner_header(const WignerTable& w, const std::string& path) {
  nlohmann::ordered_json j;
  j["n"] = w.grid.dim();
  j["N"] = w.grid.points_per_axis();
  j["hbar"] = w.hbar;
  j["eta_max"] = w.eta_max();
  j["kappa_min"] = w.lattice.lo();
  j["kappa_max"] = w.lattice.hi();
  j["eta_of_kappa"] = "hbar*kappa/2";
  std::ofstream(path) << j.dump(2) << "\n";
}

}  // namespace torwig
