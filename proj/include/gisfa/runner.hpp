#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gisfa/amplitudes.hpp"
#include "gisfa/config.hpp"

namespace gisfa {

/// Filename tokens: gamma "0", "0.5"; cep "0", "0.5pi", otherwise decimal.
std::string gamma_token(double gamma);
std::string cep_token(double cep);

/// Twenty fixed momentum points with |p| below 2 a.u.
std::vector<MomentumPoint> gauge_audit_points();

/// Smaller q and time grids used for the node-by-node gauge-dressed M1.
QuadratureSpec audit_quadrature(const QuadratureSpec& base);

struct GaugeAuditPoint {
  MomentumPoint p;
  double m0_residual = 0.0;  // (max - min) / max of |M0| over gammas
  double m1_residual = 0.0;  // same for the dressed |M1|
  double m1_bound = 0.0;     // 10 x declared relative error of M1
  double m1_error = 0.0;     // declared absolute error of M1
  double tv_residual = 0.0;  // (max - min) / max of |T_V| over gammas
  double tv_difference = 0.0;  // | |T_V(0)| - |T_V(1)| |
  double tv_bound = 0.0;       // 10 x (error of T_V(0) + error of T_V(1))
};

struct GaugeAuditReport {
  std::vector<double> gammas;
  std::vector<GaugeAuditPoint> points;
  QuadratureSpec m1_spec;
  double max_m0_residual = 0.0;
  double max_m1_residual = 0.0;
  double max_m1_ratio = 0.0;  // max of m1_residual / m1_bound
  double max_tv_residual = 0.0;
  int tv_control_points = 0;  // points with tv_difference > 100 x tv_bound
  double wall_seconds = 0.0;

  bool m0_ok() const { return max_m0_residual < 1e-10; }
  bool m1_ok() const { return max_m1_ratio < 1.0; }
  bool tv_ok() const { return tv_control_points >= 5 || std::ssize(points) < 5; }
  bool passed() const { return m0_ok() && m1_ok() && tv_ok(); }
};

/// M0 and M1 through gauge-gamma kernels, T_V in every gamma. gammas must
/// contain 0 and 1 for the T_V control. M1 uses audit_quadrature(spec),
/// T_V uses spec.
GaugeAuditReport gauge_audit(const PulseTables& pulse, const MomentumTables& momenta,
                             const PotentialParams& potential, const QuadratureSpec& spec,
                             const std::vector<MomentumPoint>& points, const std::vector<double>& gammas,
                             int workers);

void write_gauge_report(std::ostream& out, const GaugeAuditReport& report);

struct RunOptions {
  bool resume = false;
  /// Stop after computing this many M1 nodes (0 = no limit). The run then
  /// ends with status=incomplete, keeps its checkpoints and writes no spectra.
  std::size_t m1_budget = 0;
  /// Progress and the resolved configuration go here (nullptr: silent).
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::filesystem::path> files;
  std::filesystem::path summary_path;
  bool complete = true;
};

/// bound state -> pulse tables per CEP -> direct amplitudes for every gamma
/// -> M1 (checkpointed) -> CSVs and `<run_name>_summary.txt`. On failure the
/// summary is still written with status=failed and the failing stage, and
/// the exception is rethrown with the stage name prepended.
RunSummary run(const RunConfig& config, const RunOptions& options = {});

/// Gauge audit on gauge_audit_points() for gammas {0, 0.5, 1} at the first
/// CEP. Writes the report to `out` and to `<run_name>_gauge_check.txt`.
GaugeAuditReport check_gauge(const RunConfig& config, std::ostream& out);

/// Pulse tables per CEP, bound state and momentum tables as CSV.
std::vector<std::filesystem::path> dump_tables(const RunConfig& config);

}  // namespace gisfa
