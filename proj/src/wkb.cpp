#include "torwig/wkb.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "torwig/errors.hpp"
#include "torwig/fft.hpp"

namespace torwig {

namespace {

constexpr double kPi = std::numbers::pi;

double bump_core(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double bump_core_derivative(double s) {
  if (s >= 1.0) return 0.0;
  const double d = 1.0 - s * s;
  return bump_core(s) * (-2.0 * s / (d * d));
}

}  // namespace

BumpProfile::BumpProfile(int dim) : dim_(dim) {
  if (dim != 1 && dim != 2) throw ConfigError("bump profile dimension must be 1 or 2");
  using boost::math::quadrature::gauss_kronrod;
  double mass = 0.0;
  if (dim == 1) {
    // int_0^{2 pi} exp(-1/(1-s^2)) dx with s = |x - pi|/pi, i.e. 2 pi int_0^1 core(s) ds.
    mass = 2.0 * kPi * gauss_kronrod<double, 61>::integrate(bump_core, 0.0, 1.0, 20, 1e-14);
  } else {
    // Radial: 2 pi int_0^pi r core(r/pi) dr = 2 pi^3 int_0^1 s core(s) ds.
    mass = 2.0 * kPi * kPi * kPi *
           gauss_kronrod<double, 61>::integrate([](double s) { return s * bump_core(s); }, 0.0, 1.0, 20, 1e-14);
  }
  c_ = 1.0 / mass;
  double sup = 0.0;
  for (int k = 1; k < 20000; ++k) sup = std::max(sup, std::abs(bump_core_derivative(k / 20000.0)));
  grad_sup_ = c_ * sup / kPi;
}

double BumpProfile::operator()(const Point& x) const {
  double r2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    if (x[d] < 0.0 || x[d] > kTwoPi) return 0.0;
    r2 += (x[d] - kPi) * (x[d] - kPi);
  }
  return c_ * bump_core(std::sqrt(r2) / kPi);
}

double mollifier(const BumpProfile& rho, double gamma, double hbar, const Point& x) {
  const int dim = rho.dim();
  const double scale = std::pow(hbar, gamma);
  // The support of rho(./scale) has diameter <= 2 pi scale per axis; for
  // hbar <= 1 at most one periodic image per axis meets it.
  double total = 0.0;
  const int reach = static_cast<int>(std::ceil(scale)) + 1;
  const Point base = wrap_point(x, dim);
  const int r1 = dim == 2 ? reach : 0;
  for (int k1 = -r1; k1 <= r1; ++k1) {
    for (int k0 = -reach; k0 <= reach; ++k0) {
      const Point y{(base[0] - kTwoPi * k0) / scale, dim == 2 ? (base[1] - kTwoPi * k1) / scale : 0.0};
      total += rho(y);
    }
  }
  return total * std::pow(hbar, -dim * gamma);
}

Amplitude build_amplitude(const TorusGrid& grid, const AmplitudeSpec& spec, double hbar, double ell) {
  const int dim = grid.dim();
  if (!(spec.epsilon > 0.0) || !(spec.gamma > 0.0) || !(spec.epsilon + spec.gamma * (dim + 1) < 1.0)) {
    std::ostringstream os;
    os << "amplitude exponents need epsilon, gamma > 0 and 0 < epsilon + gamma (n+1) < 1; got epsilon = "
       << spec.epsilon << ", gamma = " << spec.gamma << ", n = " << dim;
    throw ConfigError(os.str());
  }
  require_admissible(hbar, ell);
  if (spec.target.size() != grid.size()) throw ConfigError("amplitude target does not match the grid");
  double mass = 0.0;
  for (double w : spec.target) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("amplitude target weights must be nonnegative");
    mass += w;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw PreconditionError("amplitude target must be a probability measure");

  const BumpProfile rho(dim);
  const std::size_t size = grid.size();
  std::vector<Complex> phi(size), m(size);
  for (std::size_t j = 0; j < size; ++j) {
    phi[j] = mollifier(rho, spec.gamma, hbar, grid.point(j));
    m[j] = spec.target[j];
  }
  const FourierTransform fft(dim, grid.points_per_axis());
  fft.forward(phi);
  fft.forward(m);
  for (std::size_t j = 0; j < size; ++j) phi[j] *= m[j] / static_cast<double>(size);
  fft.backward(phi);

  Amplitude a;
  a.grid = grid;
  a.hbar = hbar;
  a.epsilon = spec.epsilon;
  a.gamma = spec.gamma;
  const double floor_term = std::pow(hbar, spec.epsilon);
  std::vector<double> raw(size);
  double integral = 0.0;
  for (std::size_t j = 0; j < size; ++j) {
    raw[j] = floor_term + std::max(0.0, phi[j].real());
    integral += raw[j];
  }
  integral *= grid.cell_volume();
  a.c0 = integral;
  a.c0_closed_form = 1.0 + std::pow(kTwoPi, dim) * floor_term;
  a.values.resize(size);
  for (std::size_t j = 0; j < size; ++j) a.values[j] = std::sqrt(raw[j] / a.c0);

  double l2 = 0.0;
  for (double x : a.values) l2 += x * x;
  a.l2_norm = std::sqrt(l2 * grid.cell_volume());
  double g2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const auto g = spectral_derivative(grid, a.values, d);
    for (double x : g) g2 += x * x;
  }
  a.gradient_l2 = std::sqrt(g2 * grid.cell_volume());
  a.h1_norm = std::sqrt(a.l2_norm * a.l2_norm + a.gradient_l2 * a.gradient_l2);
  a.floor = std::pow(hbar, spec.epsilon / 2.0) / std::sqrt(a.c0);
  a.h1_bound = rho.gradient_sup() * std::pow(hbar, 1.0 - spec.epsilon - (dim + 1) * spec.gamma);
  if (std::abs(a.l2_norm - 1.0) > 1e-10) throw InvariantViolation("amplitude is not normalized");
  if (hbar * a.gradient_l2 > a.h1_bound) throw InvariantViolation("amplitude gradient exceeds its mollifier bound");
  for (double x : a.values) {
    if (x < a.floor * (1.0 - 1e-12)) throw InvariantViolation("amplitude falls below its positivity floor");
  }
  return a;
}

WKBState build_wkb(std::shared_ptr<const WeakKAMSolution> solution, const Amplitude& a, double ell) {
  if (!solution) throw ConfigError("WKB state needs a weak KAM solution");
  const WeakKAMSolution& s = *solution;
  if (!(s.grid == a.grid)) throw ConfigError("weak KAM grid and amplitude grid differ");
  require_admissible(a.hbar, ell);
  const int dim = s.grid.dim();
  for (int d = 0; d < dim; ++d) {
    const double k = s.P[d] / ell;
    if (std::abs(k - std::round(k)) > 1e-9) {
      std::ostringstream os;
      os << "P = " << s.P[d] << " is not in ell Z^n with ell = " << ell
         << ": WKB states require P in ell Z^n and 1/hbar in (1/ell) N";
      throw PreconditionError(os.str());
    }
  }
  const double hbar = a.hbar;
  std::vector<Complex> vals(s.grid.size());
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    const double phase = (dot(s.P, s.grid.point(j), dim) + s.v[j]) / hbar;
    vals[j] = a.values[j] * std::polar(1.0, phase);
  }
  WKBState st;
  st.psi = make_wave(s.grid, std::move(vals), hbar);
  st.P = s.P;
  st.ell = ell;
  st.type = s.type;
  st.solution = std::move(solution);
  st.amplitude = a;
  if (std::abs(st.psi.norm() - 1.0) > 1e-10) throw InvariantViolation("WKB state is not normalized");
  double g2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const auto g = spectral_derivative(s.grid, st.psi.values, d);
    for (const Complex& c : g) g2 += std::norm(c);
  }
  st.gradient_norm = std::sqrt(g2 * s.grid.cell_volume());
  double sup = 0.0;
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    Point xi{0.0, 0.0};
    for (int d = 0; d < dim; ++d) xi[d] = s.P[d] + s.grad[d][j];
    sup = std::max(sup, norm(xi, dim));
  }
  st.gradient_bound = sup / hbar + a.h1_norm;
  return st;
}

std::array<std::vector<double>, 2> current(const WaveFunction& psi) {
  std::array<std::vector<double>, 2> j;
  const int dim = psi.grid.dim();
  for (int d = 0; d < dim; ++d) {
    const auto g = spectral_derivative(psi.grid, psi.values, d);
    j[d].resize(psi.values.size());
    for (std::size_t k = 0; k < g.size(); ++k) j[d][k] = psi.hbar * (std::conj(psi.values[k]) * g[k]).imag();
  }
  return j;
}

double current_divergence_test(const WKBState& state, const std::vector<TrigFunction>& suite) {
  const auto j = current(state.psi);
  const TorusGrid& g = state.psi.grid;
  const int dim = g.dim();
  double worst = 0.0;
  for (const TrigFunction& f : suite) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point gf = f.gradient(g.point(k), dim);
      for (int d = 0; d < dim; ++d) acc += gf[d] * j[d][k];
    }
    worst = std::max(worst, std::abs(acc * g.cell_volume()));
  }
  return worst;
}

double current_graph_defect(const WKBState& state) {
  const auto j = current(state.psi);
  const WeakKAMSolution& s = *state.solution;
  const TorusGrid& g = s.grid;
  const int dim = g.dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (s.kink_mask[k]) continue;
    const double a2 = state.amplitude.values[k] * state.amplitude.values[k];
    for (int d = 0; d < dim; ++d) worst = std::max(worst, std::abs(j[d][k] - (s.P[d] + s.grad[d][k]) * a2));
  }
  return worst;
}

void write_wkb_csv(const WKBState& st, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const TorusGrid& g = st.psi.grid;
  const int dim = g.dim();
  out << (dim == 1 ? "x,re_psi,im_psi,a,phase\n" : "x0,x1,re_psi,im_psi,a,phase\n");
  char buf[200];
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point x = g.point(j);
    const double phase = dot(st.P, x, dim) + st.solution->v[j];
    const Complex z = st.psi.values[j];
    if (dim == 1) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x[0], z.real(), z.imag(),
                    st.amplitude.values[j], phase);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x[0], x[1], z.real(), z.imag(),
                    st.amplitude.values[j], phase);
    }
    out << buf;
  }
}

void write_wkb_json(const WKBState& st, const std::string& path) {
  nlohmann::ordered_json j;
  j["n"] = st.psi.grid.dim();
  j["N"] = st.psi.grid.points_per_axis();
  j["P"] = std::vector<double>(st.P.begin(), st.P.begin() + st.psi.grid.dim());
  j["hbar"] = st.psi.hbar;
  j["ell"] = st.ell;
  j["epsilon"] = st.amplitude.epsilon;
  j["gamma"] = st.amplitude.gamma;
  j["c0"] = st.amplitude.c0;
  j["weak_kam_type"] = to_string(st.type);
  j["hbar_eff"] = st.solution->hbar_eff;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace torwig
