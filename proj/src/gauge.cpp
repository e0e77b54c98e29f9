#include "gisfa/gauge.hpp"

#include <fmt/format.h>

#include "gisfa/errors.hpp"

namespace gisfa {

double volkov_phase(double pz, double pt, const TimeSample& later, const TimeSample& earlier) {
  const double p2 = pz * pz + pt * pt;
  return 0.5 * p2 * (later.t - earlier.t) + pz * (later.alpha - earlier.alpha) +
         0.5 * (later.beta - earlier.beta);
}

double volkov_phase(double pz, double pt, double t, double t_prime, const PulseTables& tables) {
  const double slack = 1e-12 * (tables.t_end() - tables.t_start());
  if (t_prime > t || t_prime < tables.t_start() - slack || t > tables.t_end() + slack) {
    throw DomainError(fmt::format("volkov_phase: need t_i <= t' <= t <= t_f (t'={}, t={})", t_prime, t));
  }
  return volkov_phase(pz, pt, tables.sample(t), tables.sample(t_prime));
}

double gauge_chi(double t, GaugeParam gauge, const PulseTables& tables) {
  if (gauge.gamma == 0.0 || t <= tables.t_start() || t >= tables.t_end()) return 0.0;
  return gauge.gamma * tables.A(t);
}

ShiftedKernel shifted_volkov_kernel(double pz, double pt, const TimeSample& later, double chi_later,
                                    const TimeSample& earlier, double chi_earlier) {
  ShiftedKernel k;
  k.ket_shift_z = chi_earlier - chi_later;
  k.phase = volkov_phase(pz - chi_later, pt, later, earlier);
  return k;
}

ShiftedKernel shifted_volkov_kernel(double pz, double pt, double t, double t_prime, GaugeParam gauge,
                                    const PulseTables& tables) {
  const double slack = 1e-12 * (tables.t_end() - tables.t_start());
  if (t_prime > t || t_prime < tables.t_start() - slack || t > tables.t_end() + slack) {
    throw DomainError(
        fmt::format("shifted_volkov_kernel: need t_i <= t' <= t <= t_f (t'={}, t={})", t_prime, t));
  }
  return shifted_volkov_kernel(pz, pt, tables.sample(t), gauge_chi(t, gauge, tables),
                               tables.sample(t_prime), gauge_chi(t_prime, gauge, tables));
}

}  // namespace gisfa
