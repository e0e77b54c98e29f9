#pragma once

#include <iosfwd>
#include <vector>

#include "gisfa/numerics.hpp"

namespace gisfa {

/// Screened short-range potential V(r) = -(d + g/r) exp(-mu r).
struct PotentialParams {
  double d = 1.0;
  double g = 1.0;
  double mu = 1.56;

  void validate() const;
  bool vanishes() const { return d == 0.0 && g == 0.0; }
};

double potential_value(double r, const PotentialParams& params);

/// Fourier transform with the convention V~(k) = int d^3r exp(-i k.r) V(r):
///   V~(k) = -[8 pi d mu / (mu^2 + k^2)^2 + 4 pi g / (mu^2 + k^2)].
double potential_ft(double k, const PotentialParams& params);

/// int_0^{2 pi} dphi V~(sqrt(a - b cos phi)) with a = mu^2 + |k|^2-part and
/// b = 2 p_t q_t, i.e. mu^2 + |p - q|^2 = a - b cos phi. Requires a > |b|.
double potential_ft_azimuthal(double a, double b, const PotentialParams& params);

struct SolverConfig {
  double r_max = 60.0;
  double step = 0.0025;
  double energy_floor = -50.0;
  double energy_tolerance = 1e-13;
};

/// Ground s-state on the uniform grid r_n = n * step; u is the reduced radial
/// function (u = r R), normalized so that int u^2 dr = 1.
struct BoundState {
  double energy = 0.0;
  double step = 0.0;
  std::vector<double> r;
  std::vector<double> u;

  double kappa() const;
  double norm() const;
  int interior_nodes() const;
  double potential_expectation(const PotentialParams& params) const;
  double kinetic_expectation(const PotentialParams& params) const;

  /// Columns r,u.
  void write_csv(std::ostream& out) const;
};

BoundState solve_bound_state(const PotentialParams& params, const SolverConfig& config = {});

/// Momentum-space wavefunction <p|phi_0> for the s-state, with plane waves
/// normalized as (2 pi)^{-3/2} exp(i p.r):
///   phi0(p) = 1/(sqrt(2) pi p) int_0^inf u(r) sin(p r) dr.
/// The exponential tail beyond r_max is added analytically.
double momentum_wavefunction(const BoundState& state, double p);

/// <p|V|phi_0> = 1/(sqrt(2) pi p) int_0^inf V(r) u(r) sin(p r) dr.
double v_phi_transform(const BoundState& state, const PotentialParams& params, double p);

struct MomentumTableConfig {
  double p_max = 40.0;
  double map_scale = 0.25;
  int n_points = 4096;
};

/// phi0(p) and W(p) = <p|V|phi_0> tabulated on p = scale * sinh(x), x uniform,
/// with cubic interpolation in x.
class MomentumTables {
 public:
  static constexpr int kInterpolationOrder = 3;

  static MomentumTables build(const BoundState& state, const PotentialParams& params,
                              const MomentumTableConfig& config = {});

  double p_max() const { return p_max_; }
  double energy() const { return energy_; }
  double phi0(double p) const;
  double w(double p) const;

  std::vector<double> momenta() const;
  /// 4 pi int phi0^2 p^2 dp over the table range.
  double norm() const;
  /// 4 pi int_0^q phi0^2 p^2 dp.
  double norm_within(double q) const;

  /// Columns p,phi0,W.
  void write_csv(std::ostream& out) const;

 private:
  double x_of(double p) const;

  double energy_ = 0.0;
  double p_max_ = 0.0;
  double scale_ = 1.0;
  UniformCubic phi0_;
  UniformCubic w_;
};

}  // namespace gisfa
