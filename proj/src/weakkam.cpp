#include "torwig/weakkam.hpp"

#include <algorithm>
#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "torwig/errors.hpp"
#include "torwig/wavefunction.hpp"

namespace torwig {

std::string to_string(KamType t) { return t == KamType::negative ? "negative" : "positive"; }

double default_gradient_guess(const Potential& v, const Point& P) {
  const double p = norm(P, v.dim());
  return p + std::sqrt(p * p + 2.0 * v.oscillation());
}

namespace {

// One-step Lax-Oleinik operator. For each grid point x the optimal y is
// bracketed on a lattice refined `subdivisions` times and then located on the
// continuum by Brent minimization (per axis in 2D). u between nodes is a fixed
// linear combination of grid values (cubic Lagrange in 1D, bilinear in 2D), so
// a policy (one displacement y - x per grid point) turns the fixed-point
// equation into a sparse linear system.
class LaxOleinikOperator {
 public:
  LaxOleinikOperator(const TorusGrid& grid, const Potential& v, double h, const Point& P, KamType type,
                     double grad_guess, int subdivisions)
      : grid_(grid), v_(v), P_(P), h_(h), neg_(type == KamType::negative), m_(subdivisions) {
    if (!(h > 0.0)) throw ConfigError("Lax-Oleinik step must be positive");
    if (subdivisions < 1) throw ConfigError("Lax-Oleinik subdivisions must be >= 1");
    if (v.dim() != grid.dim()) throw ConfigError("potential and grid dimensions differ");
    const int dim = grid.dim();
    const int n = grid.points_per_axis();
    const double dy = grid.spacing() / m_;
    if (grad_guess < 0.0) grad_guess = default_gradient_guess(v, P);
    const double rho = h * (norm(P, dim) + grad_guess + 2.0);
    const int r = std::min(static_cast<int>(std::ceil(rho / dy)), m_ * (n / 2 - 1));
    const int r1 = dim == 2 ? r : 0;
    for (int d1 = -r1; d1 <= r1; ++d1) {
      for (int d0 = -r; d0 <= r; ++d0) {
        const double len2 = (static_cast<double>(d0) * d0 + static_cast<double>(d1) * d1) * dy * dy;
        if (len2 <= (rho + dy) * (rho + dy)) offsets_.push_back({d0, d1});
      }
    }
    // Midpoints of lattice candidates live on the grid refined 2m times.
    fine_ = 2 * m_ * n;
    vmid_ = v.sample(make_grid(dim, fine_));
  }

  struct Term {
    std::size_t index;
    double weight;
  };

  // Interpolation stencil of u at position s (in grid-spacing units per axis).
  int stencil(const Point& s, Term* out) const {
    const int n = grid_.points_per_axis();
    if (grid_.dim() == 1) {
      const double fl = std::floor(s[0]);
      const int i = static_cast<int>(fl);
      const double t = s[0] - fl;
      if (t == 0.0) {
        out[0] = {static_cast<std::size_t>(positive_mod(i, n)), 1.0};
        return 1;
      }
      const double w[4] = {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                           -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
      for (int k = 0; k < 4; ++k) out[k] = {static_cast<std::size_t>(positive_mod(i - 1 + k, n)), w[k]};
      return 4;
    }
    const double f0 = std::floor(s[0]), f1 = std::floor(s[1]);
    const int i0 = static_cast<int>(f0), i1 = static_cast<int>(f1);
    const double t0 = s[0] - f0, t1 = s[1] - f1;
    out[0] = {grid_.flat({i0, i1}), (1 - t0) * (1 - t1)};
    out[1] = {grid_.flat({i0 + 1, i1}), t0 * (1 - t1)};
    out[2] = {grid_.flat({i0, i1 + 1}), (1 - t0) * t1};
    out[3] = {grid_.flat({i0 + 1, i1 + 1}), t0 * t1};
    return 4;
  }

  // Displacement z = y - x in grid units; the part of the one-step value not involving u:
  //   negative: |z|^2/(2h) + P.z - h V(x + z/2)
  //   positive: -|z|^2/(2h) + P.z + h V(x + z/2)
  double cost(std::size_t j, const Point& z) const {
    const double dx = grid_.spacing();
    const int dim = grid_.dim();
    const Point x = grid_.point(j);
    double len2 = 0.0, lin = 0.0;
    Point mid{0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
      len2 += z[d] * z[d] * dx * dx;
      lin += P_[d] * z[d] * dx;
      mid[d] = x[d] + 0.5 * z[d] * dx;
    }
    const double vm = v_(mid);
    return neg_ ? len2 / (2.0 * h_) + lin - h_ * vm : -len2 / (2.0 * h_) + lin + h_ * vm;
  }

  double value(const std::vector<double>& u, std::size_t j, const Point& z) const {
    Term terms[4];
    const Index i = grid_.multi_index(j);
    const int k = stencil({i[0] + z[0], i[1] + z[1]}, terms);
    double val = cost(j, z);
    for (int q = 0; q < k; ++q) val += terms[q].weight * u[terms[q].index];
    return val;
  }

  // Applies the operator; records the optimal displacement per point if policy != nullptr.
  std::vector<double> apply(const std::vector<double>& u, std::vector<Point>* policy = nullptr) const {
    if (u.size() != grid_.size()) throw ConfigError("Lax-Oleinik input does not match its grid");
    const int dim = grid_.dim();
    const double sign = neg_ ? 1.0 : -1.0;  // minimize sign * value
    std::vector<double> out(grid_.size());
    if (policy) policy->assign(grid_.size(), {0.0, 0.0});
    const int fine_n = m_ * grid_.points_per_axis();
    std::vector<double> ufine;
    if (dim == 1) {
      // Lattice values of the interpolant, reused by every grid point.
      ufine.resize(static_cast<std::size_t>(fine_n));
      Term terms[4];
      for (int k = 0; k < fine_n; ++k) {
        const int c = stencil({static_cast<double>(k) / m_, 0.0}, terms);
        double acc = 0.0;
        for (int q = 0; q < c; ++q) acc += terms[q].weight * u[terms[q].index];
        ufine[k] = acc;
      }
    }
    const double dyu = 1.0 / m_;  // lattice step in grid units
    const double dx = grid_.spacing();
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const Index i = grid_.multi_index(j);
      double best = std::numeric_limits<double>::infinity();
      Point zb{0.0, 0.0};
      for (const Index& o : offsets_) {
        double val;
        if (dim == 1) {
          const double len2 = static_cast<double>(o[0]) * o[0] * dyu * dyu * dx * dx;
          const double vm = vmid_[positive_mod(2 * m_ * i[0] + o[0], fine_)];
          const double c = neg_ ? len2 / (2.0 * h_) + P_[0] * o[0] * dyu * dx - h_ * vm
                                : -len2 / (2.0 * h_) + P_[0] * o[0] * dyu * dx + h_ * vm;
          val = sign * (c + ufine[positive_mod(m_ * i[0] + o[0], fine_n)]);
        } else {
          const double len2 = (static_cast<double>(o[0]) * o[0] + static_cast<double>(o[1]) * o[1]) * dyu * dyu * dx * dx;
          const double lin = (P_[0] * o[0] + P_[1] * o[1]) * dyu * dx;
          const double vm = vmid_[positive_mod(2 * m_ * i[0] + o[0], fine_) +
                                  static_cast<std::size_t>(fine_) * positive_mod(2 * m_ * i[1] + o[1], fine_)];
          const double c = neg_ ? len2 / (2.0 * h_) + lin - h_ * vm : -len2 / (2.0 * h_) + lin + h_ * vm;
          Term terms[4];
          const int k = stencil({i[0] + o[0] * dyu, i[1] + o[1] * dyu}, terms);
          double uy = 0.0;
          for (int q = 0; q < k; ++q) uy += terms[q].weight * u[terms[q].index];
          val = sign * (c + uy);
        }
        if (val < best) {
          best = val;
          zb = {o[0] * dyu, o[1] * dyu};
        }
      }
      // Continuous refinement inside the bracketing lattice cells.
      for (int sweep = 0; sweep < (dim == 1 ? 1 : 2); ++sweep) {
        for (int d = 0; d < dim; ++d) {
          auto f = [&](double zd) {
            Point z = zb;
            z[d] = zd;
            return sign * value(u, j, z);
          };
          const auto r = boost::math::tools::brent_find_minima(f, zb[d] - dyu, zb[d] + dyu, 40);
          if (r.second < best) {
            best = r.second;
            zb[d] = r.first;
          }
        }
      }
      out[j] = sign * best;
      if (policy) (*policy)[j] = zb;
    }
    return out;
  }

  // Solves u_j + lambda = sum_k w_jk u_k + c_j for the given policy with u_0 = 0.
  bool evaluate(const std::vector<Point>& policy, std::vector<double>& u, double& lambda) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(n + 1);
    Term terms[4];
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      const Index i = grid_.multi_index(j);
      trip.emplace_back(row, row, 1.0);
      trip.emplace_back(row, n, 1.0);
      const int k = stencil({i[0] + policy[j][0], i[1] + policy[j][1]}, terms);
      for (int q = 0; q < k; ++q) trip.emplace_back(row, static_cast<Eigen::Index>(terms[q].index), -terms[q].weight);
      rhs[row] = cost(j, policy[j]);
    }
    trip.emplace_back(n, 0, 1.0);
    rhs[n] = 0.0;
    Eigen::SparseMatrix<double> a(n + 1, n + 1);
    a.setFromTriplets(trip.begin(), trip.end());
    a.prune(0.0);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) return false;
    u.assign(x.data(), x.data() + n);
    lambda = x[n];
    return true;
  }

 private:
  TorusGrid grid_;
  Potential v_;
  Point P_;
  double h_;
  bool neg_;
  int m_;
  int fine_ = 0;
  std::vector<double> vmid_;
  std::vector<Index> offsets_;
};

struct StepStats {
  double oscillation;
  double mean;
};

StepStats step_stats(const std::vector<double>& next, const std::vector<double>& u) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double d = next[j] - u[j];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  return {hi - lo, sum / static_cast<double>(u.size())};
}

void anchor(std::vector<double>& u) {
  const double a = u[0];
  for (double& x : u) x -= a;
}

}  // namespace

std::vector<double> lax_oleinik_step(const TorusGrid& grid, const Potential& v, const std::vector<double>& u,
                                     double h, const Point& P, KamType type, double grad_guess,
                                     int subdivisions) {
  return LaxOleinikOperator(grid, v, h, P, type, grad_guess, subdivisions).apply(u);
}

std::vector<char> detect_kinks(const TorusGrid& grid, const std::vector<double>& v) {
  const int dim = grid.dim();
  std::vector<double> second(grid.size(), 0.0);
  double scale = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Index i = grid.multi_index(j);
    scale = std::max(scale, std::abs(v[j]));
    for (int d = 0; d < dim; ++d) {
      Index a = i, b = i;
      a[d] -= 1;
      b[d] += 1;
      second[j] = std::max(second[j], std::abs(v[grid.flat(a)] - 2.0 * v[j] + v[grid.flat(b)]));
    }
  }
  std::vector<double> sorted = second;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  // Floor keeps round-off of a smooth (or constant) solution from registering.
  const double floor = 1e-9 * std::max(1.0, scale) + 10.0 * grid.spacing() * grid.spacing() * 1e-6;
  std::vector<char> mask(grid.size(), 0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    mask[j] = second[j] > 10.0 * median && second[j] > floor ? 1 : 0;
  }
  return mask;
}

WeakKAMSolution solve_weak_kam(const TorusGrid& grid, const Potential& v, const Point& P, KamType type,
                               const LaxOleinikOptions& options) {
  if (v.dim() != grid.dim()) throw ConfigError("potential and grid dimensions differ");
  if (!(options.h > 0.0) || options.max_iter < 1 || !(options.tol > 0.0)) {
    throw ConfigError("Lax-Oleinik options need h > 0, max_iter >= 1, tol > 0");
  }
  const double h = options.h;
  const LaxOleinikOperator op(grid, v, h, P, type, options.grad_guess, options.subdivisions);
  std::vector<double> u(grid.size(), 0.0);
  std::vector<double> next;
  StepStats st{std::numeric_limits<double>::infinity(), 0.0};
  int it = 0;
  // Blocks of value iteration alternate with Howard policy iteration on the
  // discrete fixed-point problem. A policy whose system is singular (several
  // closed classes, typical before u has settled) sends the solver back to
  // value iteration.
  const int block = std::max(1, options.warm_start);
  std::vector<Point> policy;
  int rounds = 0;
  while (st.oscillation > options.tol && it < options.max_iter) {
    for (int k = 0; k < block && it < options.max_iter; ++k) {
      next = op.apply(u);
      ++it;
      st = step_stats(next, u);
      anchor(next);
      u.swap(next);
      if (st.oscillation <= options.tol) break;
    }
    while (st.oscillation > options.tol && rounds < options.max_policy_rounds && it < options.max_iter) {
      next = op.apply(u, &policy);
      ++it;
      st = step_stats(next, u);
      if (st.oscillation <= options.tol) break;
      std::vector<double> w;
      double lambda = 0.0;
      if (!op.evaluate(policy, w, lambda)) break;
      u.swap(w);
      ++rounds;
    }
  }
  if (st.oscillation > options.tol) {
    std::ostringstream msg;
    msg << "Lax-Oleinik iteration did not converge for P = (" << P[0] << ", " << P[1] << "): defect "
        << st.oscillation << " after " << it << " steps";
    throw InvariantViolation(msg.str());
  }
  anchor(u);
  const double mean_step = st.mean;
  const double osc = st.oscillation;

  WeakKAMSolution s;
  s.grid = grid;
  s.potential = v;
  s.P = P;
  s.type = type;
  s.v = std::move(u);
  s.hbar_eff = type == KamType::negative ? -mean_step / h : mean_step / h;
  s.residual = osc;
  s.iterations = it;
  s.step = h;
  const double dx = grid.spacing();
  for (int d = 0; d < grid.dim(); ++d) {
    s.grad[d].assign(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      Index a = grid.multi_index(j), b = a;
      a[d] -= 1;
      b[d] += 1;
      s.grad[d][j] = (s.v[grid.flat(b)] - s.v[grid.flat(a)]) / (2.0 * dx);
    }
    std::vector<Complex> g(s.grad[d].begin(), s.grad[d].end());
    FourierTransform(grid.dim(), grid.points_per_axis()).forward(g);
    for (Complex& c : g) c /= static_cast<double>(grid.size());
    s.grad_hat[d] = std::move(g);
  }
  s.kink_mask = detect_kinks(grid, s.v);
  return s;
}

double WeakKAMSolution::distance_to_kink(const Point& x) const {
  double best = std::numeric_limits<double>::infinity();
  const int dim = grid.dim();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!kink_mask[j]) continue;
    const Point p = grid.point(j);
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = periodic_difference(x[d] - p[d]);
      s += diff * diff;
    }
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

Point WeakKAMSolution::gradient_at(const Point& xin) const {
  const int dim = grid.dim();
  const int n = grid.points_per_axis();
  const double dx = grid.spacing();
  const Point x = wrap_point(xin, dim);
  const bool kinks = std::any_of(kink_mask.begin(), kink_mask.end(), [](char c) { return c != 0; });
  Point out{0.0, 0.0};
  if (!kinks) {
    const IndexBox box = fourier_box(grid);
    for (std::size_t k = 0; k < box.size(); ++k) {
      const Index alpha = box.at(k);
      if (std::abs(alpha[0]) == n / 2 || (dim == 2 && std::abs(alpha[1]) == n / 2)) continue;
      const Complex e = std::polar(1.0, index_dot(alpha, x, dim));
      const std::size_t slot = grid.flat(alpha);
      for (int d = 0; d < dim; ++d) out[d] += (grad_hat[d][slot] * e).real();
    }
    return out;
  }
  // Nearest grid point that is not itself a kink.
  auto nearest = [&]() {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    Index c{static_cast<int>(std::lround(x[0] / dx)), dim == 2 ? static_cast<int>(std::lround(x[1] / dx)) : 0};
    const int r1 = dim == 2 ? 3 : 0;
    for (int e1 = -r1; e1 <= r1; ++e1) {
      for (int e0 = -3; e0 <= 3; ++e0) {
        const std::size_t j = grid.flat({c[0] + e0, c[1] + e1});
        if (kink_mask[j]) continue;
        const Point p = grid.point(j);
        double s = 0.0;
        for (int d = 0; d < dim; ++d) s += std::pow(periodic_difference(x[d] - p[d]), 2);
        if (s < best) {
          best = s;
          arg = j;
        }
      }
    }
    return arg;
  };
  if (dim == 2 || distance_to_kink(x) <= 2.0 * dx) {
    const std::size_t j = nearest();
    for (int d = 0; d < dim; ++d) out[d] = grad[d][j];
    return out;
  }
  // Cubic Lagrange interpolation on the kink-free stencil i0-1 .. i0+2.
  const int i0 = static_cast<int>(std::floor(x[0] / dx));
  const double t = x[0] / dx - i0;
  const double nodes[4] = {-1.0, 0.0, 1.0, 2.0};
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (t - nodes[b]) / (nodes[a] - nodes[b]);
    }
    out[0] += w * grad[0][grid.flat({i0 - 1 + a, 0})];
  }
  return out;
}

double WeakKAMSolution::hamilton_jacobi_defect() const {
  const int dim = grid.dim();
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (kink_mask[j]) continue;
    // Neighbours of a kink carry one-sided information in their centered
    // difference; they are excluded together with the kink itself.
    bool near = false;
    const Index i = grid.multi_index(j);
    for (int d = 0; d < dim && !near; ++d) {
      Index a = i, b = i;
      a[d] -= 1;
      b[d] += 1;
      near = kink_mask[grid.flat(a)] || kink_mask[grid.flat(b)];
    }
    if (near) continue;
    Point xi{0.0, 0.0};
    for (int d = 0; d < dim; ++d) xi[d] = P[d] + grad[d][j];
    const double hval = 0.5 * dot(xi, xi, dim) + potential(grid.point(j));
    worst = std::max(worst, std::abs(hval - hbar_eff));
  }
  return worst;
}

std::vector<std::vector<std::size_t>> WeakKAMSolution::kink_clusters() const {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<char> seen(grid.size(), 0);
  const int dim = grid.dim();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!kink_mask[j] || seen[j]) continue;
    std::vector<std::size_t> cluster;
    std::vector<std::size_t> stack{j};
    seen[j] = 1;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      cluster.push_back(k);
      const Index i = grid.multi_index(k);
      for (int d = 0; d < dim; ++d) {
        for (int s : {-1, 1}) {
          Index nb = i;
          nb[d] += s;
          const std::size_t m = grid.flat(nb);
          if (kink_mask[m] && !seen[m]) {
            seen[m] = 1;
            stack.push_back(m);
          }
        }
      }
    }
    std::sort(cluster.begin(), cluster.end());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

namespace {

// (2 pi)^{-1} int_0^{2 pi} sqrt(2 (level - V(x))) dx, integrated from the
// maximizer so the square-root cusp sits at the endpoints.
double action_integral(const Potential& v, double level) {
  const double x0 = v.argmax()[0];
  auto f = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * (level - v({x, 0.0})))); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x0, x0 + kTwoPi, 30, 1e-13, &err);
  return value / kTwoPi;
}

}  // namespace

double critical_momentum_1d(const Potential& v) {
  if (v.dim() != 1) throw ConfigError("the action-integral oracle is one-dimensional");
  return action_integral(v, v.max_value());
}

double effective_hamiltonian_oracle_1d(double P, const Potential& v) {
  const double pc = critical_momentum_1d(v);
  const double p = std::abs(P);
  if (p <= pc) return v.max_value();
  double lo = v.max_value();
  double hi = v.max_value() + 0.5 * p * p + 1.0;
  while (action_integral(v, hi) < p) hi = 2.0 * hi - lo;
  for (int k = 0; k < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++k) {
    const double mid = 0.5 * (lo + hi);
    (action_integral(v, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double TrigFunction::value(const Point& x, int dim) const {
  const double a = index_dot(k, x, dim);
  return sine ? std::sin(a) : std::cos(a);
}

Point TrigFunction::gradient(const Point& x, int dim) const {
  const double a = index_dot(k, x, dim);
  const double s = sine ? std::cos(a) : -std::sin(a);
  return {s * k[0], dim == 2 ? s * k[1] : 0.0};
}

std::vector<TrigFunction> f_suite(int dim) {
  std::vector<Index> ks{{1, 0}, {2, 0}};
  if (dim == 2) {
    ks.push_back({0, 1});
    ks.push_back({1, 1});
  }
  std::vector<TrigFunction> out;
  for (const Index& k : ks) {
    out.push_back({k, true});
    out.push_back({k, false});
  }
  return out;
}

namespace {

void finish_checks(MatherData& m, const WeakKAMSolution& s, const std::vector<Point>& velocity) {
  const int dim = s.grid.dim();
  double closed = 0.0;
  for (const TrigFunction& f : f_suite(dim)) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.grid.size(); ++j) {
      if (m.sigma[j] == 0.0) continue;
      acc += dot(f.gradient(s.grid.point(j), dim), velocity[j], dim) * m.sigma[j];
    }
    closed = std::max(closed, std::abs(acc));
  }
  m.closedness_defect = closed;
  double action = 0.0;
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    if (m.sigma[j] == 0.0) continue;
    const Point& xi = velocity[j];
    action += (0.5 * dot(xi, xi, dim) - s.potential(s.grid.point(j)) - dot(s.P, xi, dim)) * m.sigma[j];
  }
  m.action = action;
  m.action_defect = std::abs(action + m.hbar_eff);
}

}  // namespace

MatherData mather_data(const WeakKAMSolution& s, const MatherOptions& options) {
  const TorusGrid& grid = s.grid;
  const int dim = grid.dim();
  MatherData m;
  m.grid = grid;
  m.P = s.P;
  m.hbar_eff = s.hbar_eff;
  m.sigma.assign(grid.size(), 0.0);
  std::vector<Point> velocity(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (int d = 0; d < dim; ++d) velocity[j][d] = s.P[d] + s.grad[d][j];
  }
  const double vmax = s.potential.max_value();
  const double gap = 1e-6 + 10.0 * s.residual / s.step;

  if (dim == 1 && s.hbar_eff > vmax + gap) {
    // Invariant density of the circle flow; on the graph P + v' = +-sqrt(2 (H - V)).
    m.support = "invariant-density";
    double mean_velocity = 0.0;
    for (const Point& xi : velocity) mean_velocity += xi[0];
    const double sign = mean_velocity >= 0.0 ? 1.0 : -1.0;
    double total = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double speed = std::sqrt(2.0 * (s.hbar_eff - s.potential(grid.point(j))));
      velocity[j][0] = sign * speed;
      m.sigma[j] = 1.0 / speed;
      total += m.sigma[j];
    }
    for (double& w : m.sigma) w /= total;
  } else if (dim == 1) {
    m.support = "point-mass";
    const Point xs = s.potential.argmax();
    const std::size_t j =
        static_cast<std::size_t>(positive_mod(static_cast<int>(std::lround(xs[0] / grid.spacing())),
                                              grid.points_per_axis()));
    m.sigma[j] = 1.0;
    velocity[j] = {0.0, 0.0};
  } else {
    m.support = "ergodic-average";
    HamiltonianSpec h{s.potential, 1.0, 1.0};
    std::size_t start = 0;
    while (start < grid.size() && s.kink_mask[start]) ++start;
    FlowState st = make_flow_state(h, grid.point(start), velocity[start]);
    const long steps = static_cast<long>(std::ceil(options.flow_time / options.flow_step));
    std::vector<double> first(grid.size(), 0.0), second(grid.size(), 0.0);
    std::vector<Point> vel_sum(grid.size(), {0.0, 0.0});
    const double dx = grid.spacing();
    for (long k = 0; k < steps; ++k) {
      st = hamiltonian_flow(st, h, options.flow_step, options.flow_step);
      Index idx{static_cast<int>(std::lround(st.x[0] / dx)), static_cast<int>(std::lround(st.x[1] / dx))};
      const std::size_t j = grid.flat(idx);
      (2 * k < steps ? first : second)[j] += 1.0;
      for (int d = 0; d < dim; ++d) vel_sum[j][d] += st.eta[d];
    }
    // Weak convergence: f-suite moments of the two half-time averages agree.
    double gap = 0.0;
    const double half = static_cast<double>(steps) / 2.0;
    for (const TrigFunction& f : f_suite(dim)) {
      double a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double fv = f.value(grid.point(j), dim);
        a += fv * first[j] / half;
        b += fv * second[j] / half;
      }
      gap = std::max(gap, std::abs(a - b));
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double c = first[j] + second[j];
      m.sigma[j] = c / static_cast<double>(steps);
      if (c > 0.0) {
        for (int d = 0; d < dim; ++d) velocity[j][d] = vel_sum[j][d] / c;
      }
    }
    if (gap > options.convergence) {
      throw InvariantViolation("empirical Mather measure has not converged (half-time moment gap " +
                               std::to_string(gap) + ")");
    }
  }
  finish_checks(m, s, velocity);
  if (m.closedness_defect > options.tolerance) {
    throw InvariantViolation("Mather measure is not closed: defect " + std::to_string(m.closedness_defect));
  }
  return m;
}

void write_solution_csv(const WeakKAMSolution& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const int dim = s.grid.dim();
  out << (dim == 1 ? "x,v,grad,kink\n" : "x0,x1,v,grad0,grad1,kink\n");
  char buf[160];
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    const Point x = s.grid.point(j);
    if (dim == 1) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", x[0], s.v[j], s.grad[0][j], int(s.kink_mask[j]));
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", x[0], x[1], s.v[j], s.grad[0][j],
                    s.grad[1][j], int(s.kink_mask[j]));
    }
    out << buf;
  }
}

}  // namespace torwig
