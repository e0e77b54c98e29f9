#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gisfa/amplitudes.hpp"

namespace gisfa {

enum class Selector { m0, m0_m1, sfa };

/// Filename-safe token: M0, M0M1, SFA.
std::string_view selector_token(Selector s);
/// Accepts M0, M0+M1, M0M1, SFA (case-insensitive).
Selector parse_selector(std::string_view text);

/// Uniform p_z samples symmetric about zero and uniform p_t samples from 0.
struct MomentumGrid {
  std::vector<double> pz;
  std::vector<double> pt;

  static MomentumGrid axis(double pz_max, int n_pz, double pt = 0.0);
  static MomentumGrid map(double pz_max, int n_pz, double pt_max, int n_pt);

  void validate() const;
  bool on_axis() const { return pt.size() == 1; }
  std::size_t size() const { return pz.size() * pt.size(); }
  /// Row-major node order: index = iz * pt.size() + it.
  MomentumPoint at(std::size_t index) const;
};

enum class Normalization { none, peak, integral };

std::string_view normalization_token(Normalization n);
Normalization parse_normalization(std::string_view text);

struct SpectrumResult {
  Selector selector = Selector::m0;
  double gamma = 0.0;
  MomentumGrid grid;
  std::vector<double> w;        // |M|^2 per node, row-major
  std::vector<double> w_error;  // propagated quadrature error of w
  std::vector<double> rho;      // transverse-integrated spectrum per p_z (maps only)
  Normalization mode = Normalization::none;
  double w_constant = 1.0;
  double rho_constant = 1.0;
  std::string warning;

  double at(std::size_t iz, std::size_t it) const { return w[iz * grid.pt.size() + it]; }
  double max_error() const;
};

struct SweepOptions {
  int workers = 1;
  SfaVariant sfa_variant = SfaVariant::full;
  bool with_m1 = true;
};

/// Calls fn(i) for every i in [begin, end) on up to `workers` threads and
/// rethrows the first exception. fn must only write to slot i.
void parallel_for(std::size_t begin, std::size_t end, int workers,
                  const std::function<void(std::size_t)>& fn);

/// Amplitudes at every grid node. Nodes are processed in fixed blocks and each
/// node's values depend only on the node, so the result does not depend on
/// the worker count.
std::vector<AmplitudeSet> evaluate_grid(const AmplitudeEngine& engine, const MomentumGrid& grid,
                                        GaugeParam gauge, const SweepOptions& options = {});

/// |amplitude|^2 for the selector from precomputed amplitudes.
SpectrumResult spectrum_from(const std::vector<AmplitudeSet>& amplitudes, const MomentumGrid& grid,
                             Selector selector, double gamma);

/// evaluate_grid + spectrum_from, computing M1 only when the selector needs it.
SpectrumResult sweep(const AmplitudeEngine& engine, const MomentumGrid& grid, Selector selector,
                     GaugeParam gauge, SweepOptions options = {});

/// rho(p_z) = (1/4 pi^2) int w(p_z, p_t) p_t dp_t over the p_t grid.
/// Sets `warning` when the last p_t interval still carries more than 1e-4 of
/// the integral at some p_z.
std::vector<double> integrate_transverse(SpectrumResult& result);

/// Divides w (and rho, separately) by their maximum (peak) or by their
/// integral over the grid. Records the constants. Throws NumericError on an
/// all-zero spectrum.
SpectrumResult normalize(SpectrumResult result, Normalization mode);

/// sum |w(p_z) - w(-p_z)| / sum w over the grid (p_z grid is symmetric).
double asymmetry(const SpectrumResult& result);

/// || a - b ||_2 / sqrt(||a|| ||b||) after peak-normalizing both w arrays.
double normalized_l2_distance(const SpectrumResult& a, const SpectrumResult& b);

/// CSV with '#' metadata lines then a column header and rows:
/// axis grid: p_z,w,log10_w; map: p_z,p_t,w,log10_w.
void write_spectrum_csv(std::ostream& out, const SpectrumResult& result,
                        const std::vector<std::pair<std::string, std::string>>& metadata);
/// Transverse-integrated spectrum: p_z,rho,log10_rho.
void write_rho_csv(std::ostream& out, const SpectrumResult& result,
                   const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace gisfa
