#pragma once

#include <complex>
#include <memory>

#include "gisfa/atomic_model.hpp"
#include "gisfa/gauge.hpp"
#include "gisfa/numerics.hpp"
#include "gisfa/pulse.hpp"

namespace gisfa {

using Complex = std::complex<double>;

/// Final canonical momentum in cylindrical form; the problem is symmetric
/// about the polarization axis, so only (p_z, p_t) enter.
struct MomentumPoint {
  double pz = 0.0;
  double pt = 0.0;
};

/// Quadrature layout for the time and intermediate-momentum integrals.
/// Time nodes are composite Gauss-Legendre over the pulse window; q_z and q_t
/// nodes are composite Gauss-Legendre in x with q = map_scale * sinh(x).
struct QuadratureSpec {
  int n_t = 8192;
  double qz_max = 8.0;
  int n_qz = 512;
  double qt_max = 8.0;
  int n_qt = 256;
  double map_scale = 1.0;
  /// Allowed fraction of the bound-state norm outside the q ball.
  double coverage_tolerance = 1e-4;

  enum class Dimension { time, qz, qt };

  void validate() const;
  /// Every dimension halved.
  QuadratureSpec halved() const;
  /// One dimension halved; used for the error estimates.
  QuadratureSpec halved_in(Dimension d) const;
  /// Every dimension doubled.
  QuadratureSpec doubled() const;
};

struct QuadratureNodes {
  Rule time;
  Rule qz;
  Rule qt;
};

QuadratureNodes make_nodes(const QuadratureSpec& spec, const PulseTables& pulse);

struct Estimate {
  Complex value;
  double error = 0.0;
};

/// How the standard SFA amplitude is assembled: the full expression
/// (boundary terms plus potential term) or only the potential term that
/// survives for long pulses.
enum class SfaVariant { full, potential_only };

struct AmplitudeSet {
  Complex m0;
  Complex m1;
  Complex m_sfa;
  double gamma = 0.0;
  double m1_error = 0.0;
  double sfa_error = 0.0;
  QuadratureSpec spec;
};

/// Closed form of the gauge-invariant zeroth-order amplitude
///   phi0 * exp(i Phi2) * (exp(i Delta) - 1),
///   Phi2  = (p^2/2 - eps) t_f,
///   Delta = (p^2/2 - eps)(t_i - t_f) - p_z alpha_tot - beta_tot / 2.
Complex m0_closed_form(double phi0, MomentumPoint p, double energy, double t_i, double t_f,
                       double alpha_tot, double beta_tot);

/// Evaluates the amplitude families at momentum points. Holds immutable views
/// of the pulse and momentum tables (which must outlive it) plus prepared
/// quadrature for the nominal spec and for each dimension halved. All evaluation methods are
/// const and safe to call concurrently.
class AmplitudeEngine {
 public:
  AmplitudeEngine(const PulseTables& pulse, const MomentumTables& momenta,
                  const PotentialParams& potential, const QuadratureSpec& spec = {});
  ~AmplitudeEngine();
  AmplitudeEngine(AmplitudeEngine&&) noexcept;
  AmplitudeEngine& operator=(AmplitudeEngine&&) noexcept;

  const QuadratureSpec& spec() const;
  const QuadratureNodes& nodes() const;
  const PulseTables& pulse() const;
  const MomentumTables& momenta() const;
  const PotentialParams& potential() const;
  double energy() const;

  /// Zeroth order, closed form.
  Complex m0(MomentumPoint p) const;
  /// Zeroth order assembled from gauge-gamma propagator kernels between the
  /// window ends.
  Complex m0_in_gauge(MomentumPoint p, GaugeParam gauge) const;

  /// First order in the potential (rescattering). The time integral is
  /// factorized and the azimuth of q done in closed form.
  Complex m1(MomentumPoint p) const;
  /// m1 with error = sum over time, q_z, q_t of |m1(spec) - m1(spec with that
  /// dimension halved)|.
  Estimate m1_estimate(MomentumPoint p) const;
  /// m1 evaluated node by node through gauge-gamma kernels on both sides of
  /// the potential. Reference path for the gauge audit; much slower.
  Complex m1_in_gauge(MomentumPoint p, GaugeParam gauge) const;

  /// Standard SFA in the velocity gauge as the time integral of the
  /// interaction p_z A + A^2/2. Error from halving the time rule.
  Estimate sfa_direct(MomentumPoint p) const;
  /// Potential term -i int dt <p|U_gF(t_f,t) V|phi_i(t)> in gauge gamma.
  Estimate potential_term(MomentumPoint p, GaugeParam gauge) const;
  /// Standard SFA in gauge gamma. gamma = 0 with the full variant is the
  /// direct time integral; otherwise m0 + potential_term (or the potential
  /// term alone for SfaVariant::potential_only).
  Estimate sfa(MomentumPoint p, GaugeParam gauge, SfaVariant variant = SfaVariant::full) const;

  /// <p|V|phi_0> as the momentum-space convolution (2 pi)^-3 int d^3q V~ phi0
  /// on the q nodes. Independent of the W table; limited by the q range.
  double v_phi_convolution(MomentumPoint p) const;
  /// Leading term of the first-order iteration after integration by parts,
  /// +i int dt <p|U_F(t_f,t) V|phi_i(t)>, on its own time rule.
  Complex rescattering_boundary_term(MomentumPoint p) const;

  AmplitudeSet evaluate(MomentumPoint p, GaugeParam gauge, SfaVariant variant = SfaVariant::full,
                        bool with_m1 = true) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gisfa
