// Wigner transform on the momentum lattice, marginals, pairing, tightness and
// the potential kernel.
//
// Oracles:
//   - Direct quadrature of W(x, hbar kappa/2) = (2 pi)^{-1} int e^{i kappa z} psi(x-z) conj(psi(x+z)) dz.
//   - Weyl expectation <psi, Op(phi) psi> computed with the quantize module
//     (matrix route), which must equal the Wigner pairing exactly.
//   - Direct quadrature of the kernel integral
//       K(x, eta) = i / (2 pi hbar) int e^{2 i z eta / hbar} (V(x+z) - V(x-z)) dz.

#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "torwig/errors.hpp"
#include "torwig/quantize.hpp"
#include "torwig/wigner.hpp"

using namespace torwig;

namespace {

WaveFunction from_modes(const TorusGrid& g, const std::vector<std::pair<int, Complex>>& coeffs, double hbar) {
  std::vector<Complex> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = oracle::trig_eval(coeffs, g.point(j)[0]);
  return make_wave(g, v, hbar);
}

}  // namespace

TEST_CASE("wigner_transform: plane wave sits on a single lattice row") {
  const TorusGrid g = make_grid(1, 32);
  const double hbar = 0.1;
  const int alpha = 5;
  const WignerTable w = wigner_transform(from_modes(g, {{alpha, 1.0 / std::sqrt(kTwoPi)}}, hbar));
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t l = 0; l < w.lattice.size(); ++l) {
      const int kappa = w.lattice.at(l)[0];
      const double expected = kappa == 2 * alpha ? 1.0 / kTwoPi : 0.0;
      err = std::max(err, std::abs(w.values[j * w.lattice.size() + l] - expected));
    }
  }
  CHECK(err < 1e-15);
  CHECK(w.eta_max() == doctest::Approx(0.5 * hbar * 32));
}

TEST_CASE("wigner_transform: two-mode interference at the half-lattice point") {
  const TorusGrid g = make_grid(1, 16);
  const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  const WignerTable w = wigner_transform(from_modes(g, {{0, c}, {1, c}}, 0.2));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.point(j)[0];
    CHECK(w.at(j, {0, 0}) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
    CHECK(w.at(j, {1, 0}) == doctest::Approx(std::cos(x) / kTwoPi));
    CHECK(w.at(j, {2, 0}) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
    CHECK(std::abs(w.at(j, {3, 0})) < 1e-16);
    CHECK(std::abs(w.at(j, {-1, 0})) < 1e-16);
  }
}

TEST_CASE("wigner_transform: agrees with direct quadrature of the defining integral") {
  const TorusGrid g = make_grid(1, 32);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  std::vector<std::pair<int, Complex>> coeffs;
  for (int a = -6; a <= 7; ++a) coeffs.push_back({a, {n01(rng), n01(rng)}});
  const WaveFunction psi = from_modes(g, coeffs, 0.125);
  const WignerTable w = wigner_transform(psi);
  for (std::size_t j = 0; j < g.size(); j += 7) {
    const double x = g.point(j)[0];
    for (int kappa = -16; kappa <= 16; ++kappa) {
      const Complex ref = oracle::periodic_integral([&](double z) {
        return std::polar(1.0, kappa * z) * oracle::trig_eval(coeffs, x - z) *
               std::conj(oracle::trig_eval(coeffs, x + z));
      }, 256) / kTwoPi;
      CHECK(std::abs(ref.imag()) < 1e-12);
      CHECK(std::abs(w.at(j, {kappa, 0}) - ref.real()) < 1e-12);
    }
  }
}

TEST_CASE("wigner_transform: marginals and total mass over a random suite") {
  std::mt19937_64 rng(2024);
  const TorusGrid g = make_grid(1, 128);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    // Bands up to the full grid box: aliasing-free by construction.
    const int band = 4 + 3 * s;
    const WaveFunction psi = oracle::random_state(g, std::min(band, 63), 1.0 / 16.0, rng);
    const WignerTable w = wigner_transform(psi);
    const MarginalDefects d = marginal_defects(w, psi);
    worst = std::max(worst, d.max());
    CHECK(std::abs(w.total_mass() - 1.0) < 1e-10);
  }
  CHECK(worst <= 1e-10);

  const TorusGrid g2 = make_grid(2, 16);
  const WaveFunction psi2 = oracle::random_state(g2, 7, 0.25, rng);
  const WignerTable w2 = wigner_transform(psi2);
  CHECK(marginal_defects(w2, psi2).max() <= 1e-10);
  CHECK(std::abs(w2.total_mass() - 1.0) < 1e-10);
}

TEST_CASE("pair: position-only functions, plane waves and the constant function") {
  const TorusGrid g = make_grid(1, 64);
  std::mt19937_64 rng(7);
  const WaveFunction psi = oracle::random_state(g, 10, 1.0 / 8.0, rng);
  const WignerTable w = wigner_transform(psi);

  // phi(x, eta) = cos(2x) via a constant-in-eta table.
  PhaseTable t{g, psi.hbar, w.lattice, std::vector<double>(w.values.size()), {}};
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t l = 0; l < w.lattice.size(); ++l) t.values[j * w.lattice.size() + l] = std::cos(2.0 * g.point(j)[0]);
  }
  double ref = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) ref += std::cos(2.0 * g.point(j)[0]) * std::norm(psi.values[j]);
  ref *= g.cell_volume();
  const Pairing p = pair(w, t);
  CHECK(p.value == doctest::Approx(ref).epsilon(1e-12));
  CHECK(p.truncated);  // a constant-in-eta function reaches the lattice edge

  for (auto& v : t.values) v = 1.0;
  CHECK(pair(w, t).value == doctest::Approx(1.0).epsilon(1e-12));

  const int alpha = 3;
  const WignerTable wp = wigner_transform(from_modes(g, {{alpha, 1.0 / std::sqrt(kTwoPi)}}, 0.25));
  const TestFunction phi = TestFunction::bump(1, {0, 0}, 0.0, {0.5, 0.0}, 1.0);
  double avg = 0.0;
  for (int k = 0; k < 64; ++k) avg += phi({kTwoPi * k / 64, 0}, {0.25 * alpha, 0});
  avg /= 64.0;  // (2 pi)^{-1} int phi(x, hbar alpha) dx
  const Pairing pp = pair(wp, phi);
  CHECK(pp.value == doctest::Approx(avg).epsilon(1e-12));
}

TEST_CASE("pair: a sup-norm bound cannot hold because W changes sign") {
  // psi = (1 + e^{ix}) / sqrt(4 pi) has W(x, hbar/2) = cos(x) / (2 pi). A test
  // function equal to cos x on that lattice row (and |g| <= 1 everywhere)
  // pairs to 1/2, while (2 pi)^{-1} sup|g| ||psi||^2 = 1/(2 pi).
  const TorusGrid g = make_grid(1, 16);
  const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  const WignerTable w = wigner_transform(from_modes(g, {{0, c}, {1, c}}, 0.2));
  PhaseTable t{g, 0.2, w.lattice, std::vector<double>(w.values.size(), 0.0), {}};
  for (std::size_t j = 0; j < g.size(); ++j) t.values[j * w.lattice.size() + w.lattice.flat({1, 0})] = std::cos(g.point(j)[0]);
  CHECK(pair(w, t).value == doctest::Approx(0.5));
  CHECK(pair(w, t).value > 1.0 / kTwoPi);
}

TEST_CASE("pair: equals the Weyl expectation and obeys the A-norm bound") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const TorusGrid g = make_grid(1, 32);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double hbar = 1.0 / (4 + trial % 5);
    WaveFunction psi = oracle::random_state(g, 6, hbar, rng);
    const double scale = 0.5 + 1.5 * (u(rng) + 1.0);  // non-normalized states too
    for (auto& z : psi.values) z *= scale;
    const TestFunction phi = TestFunction::bump(1, {trial % 3, 0}, u(rng), {2.0 * u(rng), 0.0}, 1.0 + 0.5 * u(rng), 64);
    const double value = pair(wigner_transform(psi), phi).value;
    CHECK(std::abs(value) <= phi.a_norm() * psi.norm_squared() / kTwoPi * (1.0 + 1e-12));
    if (trial % 10 == 0) {
      const WaveFunction opsi = apply_weyl(PhaseSymbol(phi), psi);
      Complex expectation = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) expectation += std::conj(psi.values[j]) * opsi.values[j];
      expectation *= g.cell_volume();
      CHECK(std::abs(expectation - value) < 1e-12 * std::max(1.0, psi.norm_squared()));
      ++checked;
    }
  }
  CHECK(checked == 10);
}

TEST_CASE("tightness_mass: plane waves and band-limited states") {
  const TorusGrid g = make_grid(1, 64);
  const WaveFunction e = from_modes(g, {{6, 1.0 / std::sqrt(kTwoPi)}}, 0.25);
  CHECK(tightness_mass(e, 1.4) == doctest::Approx(1.0));
  CHECK(tightness_mass(e, 1.6) < 1e-28);
  std::mt19937_64 rng(1);
  const WaveFunction psi = oracle::random_state(g, 8, 0.25, rng);
  CHECK(tightness_mass(psi, 2.01) < 1e-28);
  CHECK(tightness_mass(psi, 1e-9) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(tightness_mass(psi, 0.0), PreconditionError);
}

TEST_CASE("kappa_kernel: closed form and direct quadrature of the kernel integral") {
  const TorusGrid g = make_grid(1, 32);
  const double hbar = 0.1;
  const Potential cosx = Potential::from_cosines(1, {{{1, 0}, 1.0}});
  const KappaKernel k = kappa_kernel(cosx, g, hbar);
  CHECK(k.rows.size() == 2);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.point(j)[0];
    CHECK(k.at({x, 0}, {1, 0}) == doctest::Approx(std::sin(x) / hbar));
    CHECK(k.at({x, 0}, {-1, 0}) == doctest::Approx(-std::sin(x) / hbar));
    CHECK(k.at({x, 0}, {2, 0}) == 0.0);
  }
  const Potential mixed = Potential::from_cosines(1, {{{1, 0}, 1.0}, {{2, 0}, 0.5}, {{3, 0}, -0.2}});
  const KappaKernel km = kappa_kernel(mixed, g, hbar);
  for (double x : {0.3, 1.9, 4.4}) {
    for (int kappa = -4; kappa <= 4; ++kappa) {
      const Complex ref = Complex(0.0, 1.0) / (kTwoPi * hbar) * oracle::periodic_integral([&](double z) {
        return std::polar(1.0, kappa * z) * (mixed({x + z, 0}) - mixed({x - z, 0}));
      }, 512);
      CHECK(std::abs(ref.imag()) < 1e-10);
      CHECK(std::abs(km.at({x, 0}, {kappa, 0}) - ref.real()) < 1e-10);
    }
  }
  CHECK(kappa_kernel(Potential::from_cosines(1, {{{0, 0}, 3.0}}), g, hbar).rows.empty());
  const KappaKernel k2 = kappa_kernel(Potential::from_cosines(1, {{{2, 0}, 1.0}}), g, hbar);
  CHECK(k2.rows.size() == 2);
  for (const Index& r : k2.rows) CHECK(std::abs(r[0]) == 2);
}

TEST_CASE("lattice_convolution: matches the kernel sum") {
  const TorusGrid g = make_grid(1, 16);
  std::mt19937_64 rng(4);
  const WaveFunction psi = oracle::random_state(g, 5, 0.25, rng);
  const WignerTable w = wigner_transform(psi);
  const KappaKernel k = kappa_kernel(Potential::from_cosines(1, {{{1, 0}, 1.0}}), g, 0.25);
  const std::vector<double> conv = lattice_convolution(k, w);
  const std::size_t L = w.lattice.size();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.point(j)[0];
    for (int kappa = -10; kappa <= 10; ++kappa) {
      const double expected = std::sin(x) / 0.25 * (w.at(j, {kappa - 1, 0}) - w.at(j, {kappa + 1, 0}));
      CHECK(conv[j * L + w.lattice.flat({kappa, 0})] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}
