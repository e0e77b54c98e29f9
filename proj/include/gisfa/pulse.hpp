#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gisfa/numerics.hpp"

namespace gisfa {

/// Atomic unit of time in attoseconds.
inline constexpr double kAtomicTimeAs = 24.18884;
/// Speed of light in atomic units.
inline constexpr double kSpeedOfLight = 137.035999;
/// Bohr radius in nanometres.
inline constexpr double kBohrNm = 0.0529177210903;

double omega_from_period_as(double period_as);
double omega_from_wavelength_nm(double wavelength_nm);

/// Linearly polarized (along z) Gaussian pulse
///   A(t) = (E0/omega) exp(-t^2 / 2 tau^2) sin(omega t + cep).
/// Everything in atomic units.
struct PulseParams {
  double E0 = 10.0;
  double omega = omega_from_period_as(240.0);
  double cep = 0.0;
  double tau = 1.94;
  double t_start = -6.0 * 1.94;
  double t_end = 6.0 * 1.94;

  /// E0 = 10, T = 240 as, tau = 1.94, window [-6 tau, 6 tau].
  static PulseParams defaults(double cep = 0.0);

  /// Throws ConfigError if parameters are out of range or the window does not
  /// contain the pulse (|A| at both ends below 1e-6 of the peak).
  void validate() const;

  double peak_vector_potential() const { return E0 / omega; }
};

double envelope(double t, const PulseParams& params);
double vector_potential(double t, const PulseParams& params);
double electric_field(double t, const PulseParams& params);

/// Analytic full width at half maximum of the intensity envelope f(t)^2.
double intensity_fwhm_analytic(const PulseParams& params);
/// FWHM of f(t)^2 found by bisection on the half-maximum crossing.
double intensity_fwhm_numeric(const PulseParams& params);

/// max_t |A(t)| located by dense sampling plus golden-section refinement.
double max_abs_vector_potential(const PulseParams& params);

/// Field values at one instant: A(t) and the cumulative integrals
/// alpha(t) = int_{t_i}^t A ds, beta(t) = int_{t_i}^t A^2 ds.
struct TimeSample {
  double t = 0.0;
  double A = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Uniform-grid tables of A, alpha and beta with cubic interpolation.
/// Immutable once built.
class PulseTables {
 public:
  static constexpr int kInterpolationOrder = 3;
  static constexpr std::size_t kDefaultSteps = std::size_t{1} << 16;

  static PulseTables build(const PulseParams& params, std::size_t n_steps = kDefaultSteps);

  const PulseParams& params() const { return params_; }
  double t_start() const { return params_.t_start; }
  double t_end() const { return params_.t_end; }
  double step() const { return step_; }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }

  double A(double t) const;
  double alpha(double t) const;
  double beta(double t) const;
  TimeSample sample(double t) const;

  double alpha_total() const { return alpha_.values().back(); }
  double beta_total() const { return beta_.values().back(); }

  /// Columns t,A,alpha,beta.
  void write_csv(std::ostream& out) const;

 private:
  PulseParams params_;
  double step_ = 0.0;
  std::vector<double> times_;
  UniformCubic A_;
  UniformCubic alpha_;
  UniformCubic beta_;
};

}  // namespace gisfa
