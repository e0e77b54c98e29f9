#include "gisfa/atomic_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>

#include "gisfa/errors.hpp"

namespace gisfa {

namespace {

constexpr double kPi = std::numbers::pi;
// 1 / (sqrt(2) pi): radial sine transform to the 3D momentum wavefunction.
const double kTransformPrefactor = 1.0 / (std::numbers::sqrt2 * kPi);

}  // namespace

void PotentialParams::validate() const {
  if (!(mu > 0.0)) throw ConfigError(fmt::format("potential: mu must be positive (got {})", mu));
  if (!std::isfinite(d) || !std::isfinite(g)) throw ConfigError("potential: d and g must be finite");
}

double potential_value(double r, const PotentialParams& params) {
  if (!(r > 0.0)) throw DomainError(fmt::format("potential_value: r must be positive (got {})", r));
  return -(params.d + params.g / r) * std::exp(-params.mu * r);
}

double potential_ft(double k, const PotentialParams& params) {
  const double s = params.mu * params.mu + k * k;
  return -(8.0 * kPi * params.d * params.mu / (s * s) + 4.0 * kPi * params.g / s);
}

double potential_ft_azimuthal(double a, double b, const PotentialParams& params) {
  const double disc = a * a - b * b;
  const double root = std::sqrt(disc);
  return -(8.0 * kPi * params.d * params.mu * 2.0 * kPi * a / (disc * root) +
           4.0 * kPi * params.g * 2.0 * kPi / root);
}

namespace {

struct Grid {
  double h;
  int n;  // last index
  std::vector<double> k2;  // 2 (E - V), k2[0] unused
};

Grid make_grid(const PotentialParams& params, const SolverConfig& cfg, double energy) {
  Grid grid;
  grid.n = static_cast<int>(std::lround(cfg.r_max / cfg.step));
  grid.h = cfg.r_max / grid.n;
  grid.k2.resize(grid.n + 1);
  grid.k2[0] = 0.0;
  for (int i = 1; i <= grid.n; ++i) {
    grid.k2[i] = 2.0 * (energy - potential_value(grid.h * i, params));
  }
  return grid;
}

// Power series u = sum a_k r^k (a_1 = 1) of the regular solution of
// u'' = 2 (V - E) u, using the expansion V - E = -g/r + sum_j c_j r^j.
double regular_series(const PotentialParams& p, double energy, double r) {
  constexpr int kTerms = 12;
  std::array<double, kTerms + 1> c{};
  double fact = 1.0;
  for (int j = 0; j <= kTerms; ++j) {
    if (j > 0) fact *= j;
    const double mj = std::pow(-p.mu, j);
    c[j] = -p.d * mj / fact - p.g * mj * (-p.mu) / (fact * (j + 1));
  }
  c[0] -= energy;
  std::array<double, kTerms + 2> a{};
  a[1] = 1.0;
  for (int k = 2; k <= kTerms + 1; ++k) {
    double rhs = -p.g * a[k - 1];
    for (int j = 0; k - 2 - j >= 1; ++j) rhs += c[j] * a[k - 2 - j];
    a[k] = 2.0 * rhs / (k * (k - 1.0));
  }
  double u = 0.0;
  for (int k = kTerms + 1; k >= 1; --k) u = u * r + a[k];
  return u * r;
}

// Outward Numerov from the origin; returns u (unnormalized, u'(0) = 1).
std::vector<double> integrate_outward(const Grid& grid, const PotentialParams& params,
                                      double energy, int last) {
  const double h2 = grid.h * grid.h / 12.0;
  std::vector<double> u(last + 1, 0.0);
  u[1] = regular_series(params, energy, grid.h);
  // F_0 u_0 -> h^2/12 * lim k^2 u = h^2/12 * 2 g (u'(0) = 1).
  double prev = h2 * 2.0 * params.g;
  for (int i = 1; i < last; ++i) {
    const double fi = 1.0 + h2 * grid.k2[i];
    const double fnext = 1.0 + h2 * grid.k2[i + 1];
    u[i + 1] = ((12.0 - 10.0 * fi) * u[i] - prev) / fnext;
    prev = fi * u[i];
    if (std::abs(u[i + 1]) > 1e250) {
      // rescale to stay finite; only signs and ratios matter downstream
      for (int j = 0; j <= i + 1; ++j) u[j] *= 1e-250;
      prev *= 1e-250;
    }
  }
  return u;
}

int count_sign_changes(const std::vector<double>& u, int from) {
  int nodes = 0;
  for (std::size_t i = from + 1; i < u.size(); ++i) {
    if ((u[i] < 0.0) != (u[i - 1] < 0.0) && u[i] != 0.0) ++nodes;
  }
  return nodes;
}

int outward_nodes(const PotentialParams& params, const SolverConfig& cfg, double energy) {
  const Grid grid = make_grid(params, cfg, energy);
  return count_sign_changes(integrate_outward(grid, params, energy, grid.n), 1);
}

struct Matched {
  std::vector<double> u;
  double mismatch;
};

Matched integrate_matched(const PotentialParams& params, const SolverConfig& cfg, double energy) {
  const Grid grid = make_grid(params, cfg, energy);
  const int n = grid.n;
  const double h2 = grid.h * grid.h / 12.0;
  // outermost classical turning point
  int m = n / 4;
  for (int i = n - 1; i > 2; --i) {
    if (grid.k2[i] > 0.0) {
      m = i;
      break;
    }
  }
  m = std::clamp(m, 2, n - 3);
  std::vector<double> u = integrate_outward(grid, params, energy, m + 1);
  u.resize(n + 1);
  const double kappa = std::sqrt(std::max(-2.0 * energy, 1e-30));
  std::vector<double> v(n + 1, 0.0);
  v[n] = 1e-200;
  v[n - 1] = v[n] * std::exp(kappa * grid.h);
  for (int i = n - 1; i > m - 1; --i) {
    const double fi = 1.0 + h2 * grid.k2[i];
    const double fnext = 1.0 + h2 * grid.k2[i + 1];
    const double fprev = 1.0 + h2 * grid.k2[i - 1];
    v[i - 1] = ((12.0 - 10.0 * fi) * v[i] - fnext * v[i + 1]) / fprev;
    if (std::abs(v[i - 1]) > 1e100) {
      for (int j = i - 1; j <= n; ++j) v[j] *= 1e-100;
    }
  }
  const double scale = u[m] / v[m];
  const double fm = 1.0 + h2 * grid.k2[m];
  const double fprev = 1.0 + h2 * grid.k2[m - 1];
  const double fnext = 1.0 + h2 * grid.k2[m + 1];
  const double mismatch =
      (fprev * u[m - 1] + fnext * scale * v[m + 1] - (12.0 - 10.0 * fm) * u[m]) / u[m];
  for (int i = m + 1; i <= n; ++i) u[i] = scale * v[i];
  return {std::move(u), mismatch};
}

}  // namespace

BoundState solve_bound_state(const PotentialParams& params, const SolverConfig& cfg) {
  params.validate();
  if (!(cfg.step > 0.0) || !(cfg.r_max > 100.0 * cfg.step)) {
    throw ConfigError("solver: need r_max > 100 * step > 0");
  }
  double lo = cfg.energy_floor;
  double hi = -1e-9;
  if (params.vanishes() || outward_nodes(params, cfg, hi) == 0) {
    throw ModelError(fmt::format(
        "solve_bound_state: no s-wave bound state in [{}, {}] for d={}, g={}, mu={} "
        "(outward solution has no node below threshold)",
        lo, hi, params.d, params.g, params.mu));
  }
  if (outward_nodes(params, cfg, lo) != 0) {
    throw ModelError(fmt::format("solve_bound_state: energy floor {} lies above the ground state", lo));
  }
  // Sturm bracketing: nodes(E) = number of eigenvalues below E.
  while (hi - lo > 1e-6 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (outward_nodes(params, cfg, mid) == 0 ? lo : hi) = mid;
  }
  // Refine on the Numerov matching condition.
  double d_lo = integrate_matched(params, cfg, lo).mismatch;
  double d_hi = integrate_matched(params, cfg, hi).mismatch;
  for (int widen = 0; (d_lo < 0.0) == (d_hi < 0.0) && widen < 20; ++widen) {
    lo -= (hi - lo);
    hi += 0.5 * std::min(hi - lo, std::abs(hi));
    d_lo = integrate_matched(params, cfg, lo).mismatch;
    d_hi = integrate_matched(params, cfg, hi).mismatch;
  }
  if ((d_lo < 0.0) == (d_hi < 0.0)) {
    throw NumericError("solve_bound_state: matching condition has no sign change near ground state");
  }
  for (int i = 0; i < 200 && hi - lo > cfg.energy_tolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double dm = integrate_matched(params, cfg, mid).mismatch;
    if ((dm < 0.0) == (d_lo < 0.0)) {
      lo = mid;
      d_lo = dm;
    } else {
      hi = mid;
    }
    if (mid == lo && mid == hi) break;
  }
  BoundState state;
  state.energy = 0.5 * (lo + hi);
  Matched sol = integrate_matched(params, cfg, state.energy);
  const int n = static_cast<int>(sol.u.size()) - 1;
  state.step = cfg.r_max / n;
  state.r.resize(n + 1);
  for (int i = 0; i <= n; ++i) state.r[i] = state.step * i;
  state.u = std::move(sol.u);
  std::vector<double> u2(state.u.size());
  std::transform(state.u.begin(), state.u.end(), u2.begin(), [](double x) { return x * x; });
  const double kappa = state.kappa();
  const double norm = simpson(u2, state.step) + u2.back() / (2.0 * kappa);
  const double sign = state.u[1] < 0.0 ? -1.0 : 1.0;
  const double s = sign / std::sqrt(norm);
  for (double& x : state.u) x *= s;
  if (!std::isfinite(state.energy) || !std::isfinite(s)) {
    throw NumericError("solve_bound_state: non-finite result");
  }
  return state;
}

double BoundState::kappa() const { return std::sqrt(-2.0 * energy); }

double BoundState::norm() const {
  std::vector<double> u2(u.size());
  std::transform(u.begin(), u.end(), u2.begin(), [](double x) { return x * x; });
  return simpson(u2, step) + u2.back() / (2.0 * kappa());
}

int BoundState::interior_nodes() const {
  // ignore the exponentially small tail where roundoff dominates
  const double peak = *std::max_element(u.begin(), u.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
  int nodes = 0;
  for (std::size_t i = 2; i < u.size(); ++i) {
    if (std::abs(u[i]) < 1e-10 * std::abs(peak)) continue;
    if ((u[i] < 0.0) != (u[i - 1] < 0.0)) ++nodes;
  }
  return nodes;
}

double BoundState::potential_expectation(const PotentialParams& params) const {
  std::vector<double> f(u.size(), 0.0);
  for (std::size_t i = 1; i < u.size(); ++i) f[i] = potential_value(r[i], params) * u[i] * u[i];
  return simpson(f, step);
}

double BoundState::kinetic_expectation(const PotentialParams& params) const {
  return energy - potential_expectation(params);
}

void BoundState::write_csv(std::ostream& out) const {
  out << "r,u\n";
  for (std::size_t i = 0; i < r.size(); ++i) out << fmt::format("{:.17g},{:.17g}\n", r[i], u[i]);
}

namespace {

// int_0^inf f(r) sin(p r) dr / p with f sampled on the state grid (f(0) = 0
// contribution vanishes) plus an optional exponential tail f_N exp(-k (r - R)).
double sine_transform(const BoundState& s, const std::vector<double>& f, double p, double tail_kappa) {
  const double R = s.r.back();
  const double fN = f.back();
  if (p < 1e-8) {
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = s.r[i] * f[i];
    double tail = 0.0;
    if (tail_kappa > 0.0) tail = fN * (R / tail_kappa + 1.0 / (tail_kappa * tail_kappa));
    return simpson(g, s.step) + tail;
  }
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * std::sin(p * s.r[i]);
  double tail = 0.0;
  if (tail_kappa > 0.0) {
    tail = fN * (tail_kappa * std::sin(p * R) + p * std::cos(p * R)) / (tail_kappa * tail_kappa + p * p);
  }
  return (simpson(g, s.step) + tail) / p;
}

std::vector<double> v_times_u(const BoundState& s, const PotentialParams& params) {
  std::vector<double> f(s.u.size(), 0.0);
  for (std::size_t i = 1; i < s.u.size(); ++i) f[i] = potential_value(s.r[i], params) * s.u[i];
  return f;
}

}  // namespace

double momentum_wavefunction(const BoundState& state, double p) {
  if (p < 0.0) throw DomainError("momentum_wavefunction: p must be non-negative");
  return kTransformPrefactor * sine_transform(state, state.u, p, state.kappa());
}

double v_phi_transform(const BoundState& state, const PotentialParams& params, double p) {
  if (p < 0.0) throw DomainError("v_phi_transform: p must be non-negative");
  return kTransformPrefactor * sine_transform(state, v_times_u(state, params), p, 0.0);
}

namespace {

// Simpson sums of u sin(pr) and V u sin(pr) over the state grid for one p;
// sin/cos advance by rotation and are re-synchronized every block.
std::pair<double, double> paired_sine_sums(const BoundState& s, const std::vector<double>& vu,
                                           double p) {
  constexpr std::size_t kBlock = 128;
  const std::size_t n = s.u.size();
  const double c1 = std::cos(p * s.step);
  const double s1 = std::sin(p * s.step);
  double acc_u = 0.0;
  double acc_v = 0.0;
  double sn = 0.0;
  double cn = 1.0;
  // composite Simpson weights: requires an even number of intervals
  for (std::size_t i = 0; i < n; ++i) {
    if (i % kBlock == 0) {
      sn = std::sin(p * s.r[i]);
      cn = std::cos(p * s.r[i]);
    }
    const double wt = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc_u += wt * s.u[i] * sn;
    acc_v += wt * vu[i] * sn;
    const double next_s = sn * c1 + cn * s1;
    cn = cn * c1 - sn * s1;
    sn = next_s;
  }
  return {acc_u * s.step / 3.0, acc_v * s.step / 3.0};
}

}  // namespace

MomentumTables MomentumTables::build(const BoundState& state, const PotentialParams& params,
                                     const MomentumTableConfig& cfg) {
  if (!(cfg.p_max > 0.0) || cfg.n_points < 8 || !(cfg.map_scale > 0.0)) {
    throw ConfigError("momentum tables: need p_max > 0, map_scale > 0, n_points >= 8");
  }
  MomentumTables t;
  t.energy_ = state.energy;
  t.p_max_ = cfg.p_max;
  t.scale_ = cfg.map_scale;
  const double x_max = std::asinh(cfg.p_max / cfg.map_scale);
  const double dx = x_max / (cfg.n_points - 1);
  const std::vector<double> vu = v_times_u(state, params);
  const bool even_intervals = (state.u.size() - 1) % 2 == 0;
  const double kappa = state.kappa();
  const double R = state.r.back();
  const double uN = state.u.back();
  std::vector<double> phi(cfg.n_points);
  std::vector<double> w(cfg.n_points);
  for (int i = 0; i < cfg.n_points; ++i) {
    const double p = cfg.map_scale * std::sinh(dx * i);
    if (i == 0 || !even_intervals) {
      phi[i] = kTransformPrefactor * sine_transform(state, state.u, p, kappa);
      w[i] = kTransformPrefactor * sine_transform(state, vu, p, 0.0);
      continue;
    }
    const auto [su, sv] = paired_sine_sums(state, vu, p);
    const double tail = uN * (kappa * std::sin(p * R) + p * std::cos(p * R)) / (kappa * kappa + p * p);
    phi[i] = kTransformPrefactor * (su + tail) / p;
    w[i] = kTransformPrefactor * sv / p;
  }
  t.phi0_ = UniformCubic(0.0, dx, std::move(phi));
  t.w_ = UniformCubic(0.0, dx, std::move(w));
  return t;
}

double MomentumTables::x_of(double p) const {
  const double ap = std::abs(p);
  if (ap > p_max_ * (1.0 + 1e-12)) {
    throw DomainError(fmt::format(
        "momentum tables: |p| = {} exceeds table range {}; extend p_max", ap, p_max_));
  }
  return std::asinh(ap / scale_);
}

double MomentumTables::phi0(double p) const { return phi0_(x_of(p)); }
double MomentumTables::w(double p) const { return w_(x_of(p)); }

std::vector<double> MomentumTables::momenta() const {
  std::vector<double> p(phi0_.values().size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = scale_ * std::sinh(phi0_.step() * i);
  return p;
}

double MomentumTables::norm() const { return norm_within(p_max_); }

double MomentumTables::norm_within(double q) const {
  q = std::min(q, p_max_);
  const double x_max = std::asinh(q / scale_);
  const int n = std::max(64, static_cast<int>(std::ceil(x_max / phi0_.step())) * 2);
  const Rule rule = composite_gauss_legendre(0.0, x_max, n - n % 16 + 16);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    const double p = scale_ * std::sinh(x);
    const double f = phi0_(x);
    s += rule.weights[i] * f * f * p * p * scale_ * std::cosh(x);
  }
  return 4.0 * kPi * s;
}

void MomentumTables::write_csv(std::ostream& out) const {
  out << "p,phi0,W\n";
  const auto p = momenta();
  const auto phi = phi0_.values();
  const auto w = w_.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", p[i], phi[i], w[i]);
  }
}

}  // namespace gisfa
