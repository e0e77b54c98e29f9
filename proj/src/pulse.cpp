#include "gisfa/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <ostream>

#include "gisfa/errors.hpp"

namespace gisfa {

double omega_from_period_as(double period_as) {
  return 2.0 * std::numbers::pi / (period_as / kAtomicTimeAs);
}

double omega_from_wavelength_nm(double wavelength_nm) {
  const double lambda_au = wavelength_nm / kBohrNm;
  return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_au;
}

PulseParams PulseParams::defaults(double cep) {
  PulseParams p;
  p.cep = cep;
  return p;
}

double envelope(double t, const PulseParams& params) {
  return std::exp(-t * t / (2.0 * params.tau * params.tau));
}

double vector_potential(double t, const PulseParams& params) {
  return params.E0 / params.omega * envelope(t, params) * std::sin(params.omega * t + params.cep);
}

double electric_field(double t, const PulseParams& params) {
  const double f = envelope(t, params);
  const double df = -t / (params.tau * params.tau) * f;
  const double phase = params.omega * t + params.cep;
  return -params.E0 / params.omega * (df * std::sin(phase) + params.omega * f * std::cos(phase));
}

double intensity_fwhm_analytic(const PulseParams& params) {
  return 2.0 * params.tau * std::sqrt(std::numbers::ln2);
}

double intensity_fwhm_numeric(const PulseParams& params) {
  auto intensity = [&](double t) {
    const double f = envelope(t, params);
    return f * f;
  };
  double lo = 0.0;
  double hi = params.tau;
  while (intensity(hi) > 0.5) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * params.tau; ++i) {
    const double mid = 0.5 * (lo + hi);
    (intensity(mid) > 0.5 ? lo : hi) = mid;
  }
  return lo + hi;  // symmetric envelope: width = 2 * half-crossing
}

double max_abs_vector_potential(const PulseParams& params) {
  const int n = 4096;
  const double a = params.t_start;
  const double h = (params.t_end - params.t_start) / n;
  int best = 0;
  double best_val = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(vector_potential(a + h * i, params));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = a + h * (best - 1);
  double hi = a + h * (best + 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) { return -std::abs(vector_potential(t, params)); };
  for (int i = 0; i < 100; ++i) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    (f(x1) < f(x2) ? hi : lo) = (f(x1) < f(x2) ? x2 : x1);
  }
  return std::max(best_val, std::abs(vector_potential(0.5 * (lo + hi), params)));
}

void PulseParams::validate() const {
  if (!(E0 > 0.0)) throw ConfigError(fmt::format("pulse: E0 must be positive (got {})", E0));
  if (!(omega > 0.0)) throw ConfigError(fmt::format("pulse: omega must be positive (got {})", omega));
  if (!(tau > 0.0)) throw ConfigError(fmt::format("pulse: tau must be positive (got {})", tau));
  if (!(t_start < t_end)) {
    throw ConfigError(fmt::format("pulse: t_start ({}) must be below t_end ({})", t_start, t_end));
  }
  if (!std::isfinite(cep)) throw ConfigError("pulse: cep must be finite");
  const double peak = max_abs_vector_potential(*this);
  const double edge = std::max(std::abs(vector_potential(t_start, *this)),
                               std::abs(vector_potential(t_end, *this)));
  if (!(edge < 1e-6 * peak)) {
    throw ConfigError(fmt::format(
        "pulse: window [{}, {}] does not contain the pulse (|A| at edge {:.3e} vs peak {:.3e})",
        t_start, t_end, edge, peak));
  }
}

PulseTables PulseTables::build(const PulseParams& params, std::size_t n_steps) {
  params.validate();
  if (n_steps < 16) throw ConfigError("pulse tables: need at least 16 steps");
  PulseTables tables;
  tables.params_ = params;
  const double h = (params.t_end - params.t_start) / static_cast<double>(n_steps);
  tables.step_ = h;
  const std::size_t n = n_steps + 1;
  tables.times_.resize(n);
  std::vector<double> a(n);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> beta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    tables.times_[i] = params.t_start + h * static_cast<double>(i);
    a[i] = vector_potential(tables.times_[i], params);
  }
  // Simpson per interval with the midpoint taken from the analytic A.
  for (std::size_t i = 1; i < n; ++i) {
    const double am = vector_potential(tables.times_[i - 1] + 0.5 * h, params);
    alpha[i] = alpha[i - 1] + h / 6.0 * (a[i - 1] + 4.0 * am + a[i]);
    beta[i] = beta[i - 1] + h / 6.0 * (a[i - 1] * a[i - 1] + 4.0 * am * am + a[i] * a[i]);
  }
  tables.A_ = UniformCubic(params.t_start, h, std::move(a));
  tables.alpha_ = UniformCubic(params.t_start, h, std::move(alpha));
  tables.beta_ = UniformCubic(params.t_start, h, std::move(beta));
  return tables;
}

double PulseTables::A(double t) const { return A_(t); }
double PulseTables::alpha(double t) const { return alpha_(t); }
double PulseTables::beta(double t) const {
  // the integrand is non-negative: keep the interpolant inside the bracketing values
  const auto v = beta_.values();
  const double s = std::floor((t - beta_.x0()) / beta_.step());
  const auto i = static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(v.size() - 2)));
  return std::clamp(beta_(t), v[i], v[i + 1]);
}

TimeSample PulseTables::sample(double t) const { return {t, A_(t), alpha_(t), beta(t)}; }

void PulseTables::write_csv(std::ostream& out) const {
  out << "t,A,alpha,beta\n";
  const auto a = A_.values();
  const auto al = alpha_.values();
  const auto be = beta_.values();
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", times_[i], a[i], al[i], be[i]);
  }
}

}  // namespace gisfa
