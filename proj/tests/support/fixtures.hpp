#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "gisfa/amplitudes.hpp"
#include "gisfa/atomic_model.hpp"
#include "gisfa/pulse.hpp"

namespace gisfa::testing {

inline const BoundState& default_state() {
  static const BoundState state = solve_bound_state(PotentialParams{});
  return state;
}

inline const MomentumTables& default_momenta() {
  static const MomentumTables tables = MomentumTables::build(default_state(), PotentialParams{});
  return tables;
}

inline const PulseTables& default_pulse(double cep) {
  static std::mutex m;
  static std::map<double, std::unique_ptr<PulseTables>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[cep];
  if (!slot) slot = std::make_unique<PulseTables>(PulseTables::build(PulseParams::defaults(cep)));
  return *slot;
}

/// Coarse but representative quadrature for tests that sweep many points.
inline QuadratureSpec small_spec() {
  QuadratureSpec s;
  s.n_t = 1024;
  s.n_qz = 64;
  s.n_qt = 32;
  return s;
}

inline QuadratureSpec audit_spec() {
  QuadratureSpec s;
  s.n_t = 2048;
  s.n_qz = 128;
  s.n_qt = 64;
  return s;
}

}  // namespace gisfa::testing
