#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gisfa/amplitudes.hpp"
#include "gisfa/atomic_model.hpp"
#include "gisfa/observables.hpp"
#include "gisfa/pulse.hpp"

namespace gisfa {

struct GridSpec {
  std::string name = "axis";
  MomentumGrid grid = MomentumGrid::axis(8.0, 321);
};

/// Fully resolved run parameters. Physical values in atomic units.
struct RunConfig {
  double E0 = 10.0;
  double omega = omega_from_period_as(240.0);
  std::optional<double> period_as;
  std::optional<double> wavelength_nm;
  double tau = 1.94;
  std::vector<double> ceps = {0.0};
  /// Window is [-window_tau * tau, window_tau * tau].
  double window_tau = 6.0;
  std::size_t table_steps = PulseTables::kDefaultSteps;

  PotentialParams potential;
  SolverConfig solver;
  MomentumTableConfig momentum;

  std::vector<double> gammas = {0.0};
  std::vector<Selector> selectors = {Selector::m0, Selector::m0_m1, Selector::sfa};
  SfaVariant sfa_variant = SfaVariant::full;
  std::vector<GridSpec> grids = {GridSpec{}};
  QuadratureSpec quadrature;

  std::filesystem::path output_dir = ".";
  std::string run_name = "run";
  Normalization normalization = Normalization::peak;
  int workers = 1;
  /// Momentum points used for the M1 gauge residual in the summary (0 = skip).
  int gauge_audit_points = 3;

  PulseParams pulse(double cep) const;
  bool needs_m1() const;
};

/// Parses the sectioned key = value format. '#' and ';' start comments.
/// Numbers accept products and quotients of literals and 'pi' ("pi/2",
/// "-3*pi/4"). Lists are comma separated. Throws ConfigError with the line
/// number on unknown sections or keys, bad values, out-of-range values, and
/// a period/wavelength pair that disagrees by more than 1%.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of every resolved parameter; parse_config(echo) echoes
/// identically.
std::string echo_config(const RunConfig& config);

/// Evaluates a numeric literal expression; throws ConfigError.
double parse_number(std::string_view text);

/// Dataset behind the published figures: on-axis 321-point spectra and a
/// 161 x 81 map, CEP 0 and pi/2, every selector, velocity gauge.
RunConfig paper_figures_config(RunConfig base = {});

}  // namespace gisfa
