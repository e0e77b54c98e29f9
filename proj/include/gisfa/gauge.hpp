#pragma once

#include "gisfa/pulse.hpp"

namespace gisfa {

/// Member of the dipole-compatible gauge class chi = gamma * z * A(t).
/// gamma = 0 is the velocity gauge, gamma = 1 removes the vector potential
/// entirely (length-gauge-like).
struct GaugeParam {
  double gamma = 0.0;
};

/// Volkov action for canonical momentum (p_z, p_t) between t_prime and t:
///   S_V = p^2 (t - t')/2 + p_z [alpha(t) - alpha(t')] + [beta(t) - beta(t')]/2.
/// Requires t_i <= t' <= t <= t_f. Phases are never wrapped.
double volkov_phase(double pz, double pt, double t, double t_prime, const PulseTables& tables);
double volkov_phase(double pz, double pt, const TimeSample& later, const TimeSample& earlier);

/// Coefficient of z in chi_gamma(r, t): gamma * A(t) inside the window and
/// exactly zero at or outside its ends.
double gauge_chi(double t, GaugeParam gauge, const PulseTables& tables);

/// <p| U_gF(t, t') |q> = delta^3(p - q + gamma A(t') z - gamma A(t) z)
///                       * exp(-i S_V(p - gamma A(t) z; t, t')).
/// `ket_shift_z` is q_z - p_z for the single q the delta selects.
struct ShiftedKernel {
  double ket_shift_z = 0.0;
  double phase = 0.0;
};

ShiftedKernel shifted_volkov_kernel(double pz, double pt, double t, double t_prime, GaugeParam gauge,
                                    const PulseTables& tables);

/// Same kernel from precomputed samples; chi_later / chi_earlier are the
/// gauge_chi values at the two instants.
ShiftedKernel shifted_volkov_kernel(double pz, double pt, const TimeSample& later, double chi_later,
                                    const TimeSample& earlier, double chi_earlier);

}  // namespace gisfa
