#include "torwig/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "torwig/errors.hpp"

namespace torwig {
namespace {

void require_matching_hbar(const WaveFunction& psi, const HamiltonianSpec& h) {
  if (std::abs(psi.hbar - h.hbar) > 1e-12 * h.hbar) {
    std::ostringstream os;
    os << "wave function hbar " << psi.hbar << " differs from the Hamiltonian's " << h.hbar;
    throw PreconditionError(os.str());
  }
  if (psi.grid.dim() != h.dim()) throw PreconditionError("potential and wave function dimensions differ");
}

void verlet_step(Point& x, Point& eta, const Potential& v, double step, int dim) {
  Point g = v.gradient(x);
  for (int d = 0; d < dim; ++d) eta[d] -= 0.5 * step * g[d];
  for (int d = 0; d < dim; ++d) x[d] += step * eta[d];
  g = v.gradient(x);
  for (int d = 0; d < dim; ++d) eta[d] -= 0.5 * step * g[d];
}

}  // namespace

double HamiltonianSpec::energy(const Point& x, const Point& eta) const {
  return 0.5 * dot(eta, eta, dim()) + potential(x);
}

FlowState make_flow_state(const HamiltonianSpec& h, const Point& x, const Point& eta) {
  FlowState s{wrap_point(x, h.dim()), eta, 0.0};
  if (h.dim() == 1) s.eta[1] = 0.0;
  s.energy = h.energy(s.x, s.eta);
  return s;
}

double quantum_energy(const WaveFunction& psi, const HamiltonianSpec& h) {
  require_matching_hbar(psi, h);
  const SpectralCoefficients c = fourier_coefficients(psi);
  const IndexBox modes = fourier_box(psi.grid);
  double kinetic = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Index a = modes.at(k);
    double a2 = 0.0;
    for (int d = 0; d < psi.grid.dim(); ++d) a2 += static_cast<double>(a[d]) * a[d];
    kinetic += 0.5 * psi.hbar * psi.hbar * a2 * std::norm(c.at(a));
  }
  kinetic *= std::pow(kTwoPi, psi.grid.dim());
  const std::vector<double> v = h.potential.sample(psi.grid);
  double pot = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) pot += v[j] * std::norm(psi.values[j]);
  return kinetic + pot * psi.grid.cell_volume();
}

SplitStepPropagator::SplitStepPropagator(const TorusGrid& grid, const HamiltonianSpec& h, double step)
    : grid_(grid), step_(step), fft_(grid.dim(), grid.points_per_axis()) {
  if (grid.dim() != h.dim()) throw PreconditionError("potential and grid dimensions differ");
  const std::vector<double> v = h.potential.sample(grid);
  half_potential_.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    half_potential_[j] = std::polar(1.0, -0.5 * v[j] * step / h.hbar);
  }
  kinetic_.resize(grid.size());
  const int n = grid.points_per_axis();
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Index s = grid.multi_index(j);
    double a2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double a = centered_mod(s[d], n);
      a2 += a * a;
    }
    kinetic_[j] = scale * std::polar(1.0, -0.5 * h.hbar * a2 * step);
  }
}

void SplitStepPropagator::advance(std::vector<Complex>& values) const {
  for (std::size_t j = 0; j < values.size(); ++j) values[j] *= half_potential_[j];
  fft_.forward(values);
  for (std::size_t j = 0; j < values.size(); ++j) values[j] *= kinetic_[j];
  fft_.backward(values);
  for (std::size_t j = 0; j < values.size(); ++j) values[j] *= half_potential_[j];
}

long steps_for(double t, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const double ratio = std::abs(t) / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-8 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "time step " << dt << " does not divide t = " << t;
    throw PreconditionError(os.str());
  }
  return static_cast<long>(steps);
}

WaveFunction propagate_schrodinger(const WaveFunction& psi, const HamiltonianSpec& h, double t, double dt) {
  require_matching_hbar(psi, h);
  const long steps = steps_for(t, dt);
  WaveFunction out = psi;
  if (steps == 0) return out;
  const SplitStepPropagator prop(psi.grid, h, t < 0.0 ? -dt : dt);
  for (long s = 0; s < steps; ++s) prop.advance(out.values);
  return out;
}

WaveFunction exact_propagate(const WaveFunction& psi, const HamiltonianSpec& h, double t, int K) {
  require_matching_hbar(psi, h);
  if (K > 64) {
    throw PreconditionError("exact propagation truncation K = " + std::to_string(K) + " exceeds 64");
  }
  const OperatorMatrix m = weyl_matrix(h.symbol(), psi.grid, K, psi.hbar);
  const IndexBox box = m.modes.box();
  const SpectralCoefficients c = fourier_coefficients(psi);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(box.size()));
  for (std::size_t k = 0; k < box.size(); ++k) v(static_cast<Eigen::Index>(k)) = c.at(box.at(k));
  double outside = 0.0;
  const IndexBox all = fourier_box(psi.grid);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!box.contains(all.at(k))) outside += std::norm(c.at(all.at(k)));
  }
  if (outside > 1e-20 * c.sum_squares()) {
    throw PreconditionError("wave function is not band-limited to the truncation box K = " + std::to_string(K));
  }
  const Eigen::MatrixXcd herm = 0.5 * (m.entries + m.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<Complex>() * Complex(0.0, -t / psi.hbar)).array().exp().matrix();
  const Eigen::VectorXcd w = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * v);
  std::vector<Complex> slots(psi.grid.size(), 0.0);
  for (std::size_t k = 0; k < box.size(); ++k) slots[psi.grid.flat(box.at(k))] = w(static_cast<Eigen::Index>(k));
  return WaveFunction{psi.grid, synthesize(SpectralCoefficients(psi.grid, std::move(slots))), psi.hbar};
}

FlowState hamiltonian_flow(const FlowState& s, const HamiltonianSpec& h, double t, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const int dim = h.dim();
  Point x = s.x, eta = s.eta;
  if (t != 0.0) {
    const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9)));
    const double step = t / static_cast<double>(n);
    for (long k = 0; k < n; ++k) verlet_step(x, eta, h.potential, step, dim);
  }
  return make_flow_state(h, x, eta);
}

std::vector<FlowState> flow_ensemble(const std::vector<FlowState>& states, const HamiltonianSpec& h,
                                     double t, double dt) {
  std::vector<FlowState> out;
  out.reserve(states.size());
  for (const FlowState& s : states) out.push_back(hamiltonian_flow(s, h, t, dt));
  return out;
}

std::vector<TrajectorySample> flow_trajectory(const FlowState& s, const HamiltonianSpec& h, double t,
                                              double dt, int every) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (every < 1) throw PreconditionError("sampling stride must be positive");
  const int dim = h.dim();
  const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / dt - 1e-9)));
  const double step = t / static_cast<double>(n);
  std::vector<TrajectorySample> out{{0.0, make_flow_state(h, s.x, s.eta)}};
  Point x = s.x, eta = s.eta;
  for (long k = 1; k <= n; ++k) {
    verlet_step(x, eta, h.potential, step, dim);
    if (k % every == 0 || k == n) out.push_back({step * static_cast<double>(k), make_flow_state(h, x, eta)});
  }
  return out;
}

void write_trajectory_csv(const std::vector<TrajectorySample>& samples, int dim, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + path);
  std::fputs(dim == 1 ? "t,x,eta,energy\n" : "t,x0,x1,eta0,eta1,energy\n", f);
  for (const TrajectorySample& s : samples) {
    if (dim == 1) {
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.state.x[0], s.state.eta[0], s.state.energy);
    } else {
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.state.x[0], s.state.x[1],
                   s.state.eta[0], s.state.eta[1], s.state.energy);
    }
  }
  std::fclose(f);
}

}  // namespace torwig
