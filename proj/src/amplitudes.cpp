#include "gisfa/amplitudes.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "gisfa/errors.hpp"

namespace gisfa {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvTwoPiCubed = 1.0 / (8.0 * kPi * kPi * kPi);
constexpr Complex kI{0.0, 1.0};

Complex expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

void require_finite(Complex z, const char* what, MomentumPoint p) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw NumericError(fmt::format("{}: non-finite value at p_z={}, p_t={}", what, p.pz, p.pt));
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  if (n_t < 8 || n_qz < 8 || n_qt < 8) {
    throw ConfigError(fmt::format("quadrature: n_t, n_qz, n_qt must be >= 8 (got {}, {}, {})", n_t,
                                  n_qz, n_qt));
  }
  if (!(qz_max > 0.0) || !(qt_max > 0.0) || !(map_scale > 0.0)) {
    throw ConfigError("quadrature: qz_max, qt_max and map_scale must be positive");
  }
  if (!(coverage_tolerance > 0.0 && coverage_tolerance < 1.0)) {
    throw ConfigError("quadrature: coverage_tolerance must lie in (0, 1)");
  }
}

QuadratureSpec QuadratureSpec::halved() const {
  QuadratureSpec s = *this;
  s.n_t = std::max(8, n_t / 2);
  s.n_qz = std::max(8, n_qz / 2);
  s.n_qt = std::max(8, n_qt / 2);
  return s;
}

QuadratureSpec QuadratureSpec::halved_in(Dimension d) const {
  QuadratureSpec s = *this;
  if (d == Dimension::time) s.n_t = std::max(8, n_t / 2);
  if (d == Dimension::qz) s.n_qz = std::max(8, n_qz / 2);
  if (d == Dimension::qt) s.n_qt = std::max(8, n_qt / 2);
  return s;
}

QuadratureSpec QuadratureSpec::doubled() const {
  QuadratureSpec s = *this;
  s.n_t = 2 * n_t;
  s.n_qz = 2 * n_qz;
  s.n_qt = 2 * n_qt;
  return s;
}

QuadratureNodes make_nodes(const QuadratureSpec& spec, const PulseTables& pulse) {
  spec.validate();
  QuadratureNodes nodes;
  nodes.time = composite_gauss_legendre(pulse.t_start(), pulse.t_end(), spec.n_t, 16);
  nodes.qz = sinh_mapped_rule(-spec.qz_max, spec.qz_max, spec.map_scale, spec.n_qz, 16);
  nodes.qt = sinh_mapped_rule(0.0, spec.qt_max, spec.map_scale, spec.n_qt, 16);
  return nodes;
}

Complex m0_closed_form(double phi0, MomentumPoint p, double energy, double t_i, double t_f,
                       double alpha_tot, double beta_tot) {
  const double e = 0.5 * (p.pz * p.pz + p.pt * p.pt) - energy;
  const double phi2 = e * t_f;
  const double delta = e * (t_i - t_f) - p.pz * alpha_tot - 0.5 * beta_tot;
  return phi0 * expi(phi2) * (expi(delta) - 1.0);
}

namespace {

struct Prepared {
  QuadratureSpec spec;
  QuadratureNodes nodes;
  std::vector<TimeSample> samples;
  // Q(iz, n) = exp(-i tau_n qz^2 / 2 - i alpha_n qz)
  Eigen::MatrixXcd q_phase;
  // E(n, j) = exp(-i tau_n qt_j^2 / 2)
  Eigen::MatrixXcd e_phase;
  // wz wt qt phi0(|q|)
  Eigen::MatrixXd base;
  Eigen::MatrixXd phi;

  Prepared(const QuadratureSpec& s, const PulseTables& pulse, const MomentumTables& momenta)
      : spec(s), nodes(make_nodes(s, pulse)) {
    const double t_i = pulse.t_start();
    const auto nt = static_cast<Eigen::Index>(nodes.time.size());
    const auto nz = static_cast<Eigen::Index>(nodes.qz.size());
    const auto nq = static_cast<Eigen::Index>(nodes.qt.size());
    samples.reserve(nt);
    for (double t : nodes.time.nodes) samples.push_back(pulse.sample(t));
    q_phase.resize(nz, nt);
    e_phase.resize(nt, nq);
    for (Eigen::Index n = 0; n < nt; ++n) {
      const double tau = samples[n].t - t_i;
      for (Eigen::Index iz = 0; iz < nz; ++iz) {
        const double qz = nodes.qz.nodes[iz];
        q_phase(iz, n) = expi(-0.5 * tau * qz * qz - samples[n].alpha * qz);
      }
      for (Eigen::Index j = 0; j < nq; ++j) {
        const double qt = nodes.qt.nodes[j];
        e_phase(n, j) = expi(-0.5 * tau * qt * qt);
      }
    }
    base.resize(nz, nq);
    phi.resize(nz, nq);
    for (Eigen::Index iz = 0; iz < nz; ++iz) {
      for (Eigen::Index j = 0; j < nq; ++j) {
        const double qz = nodes.qz.nodes[iz];
        const double qt = nodes.qt.nodes[j];
        phi(iz, j) = momenta.phi0(std::hypot(qz, qt));
        base(iz, j) = nodes.qz.weights[iz] * nodes.qt.weights[j] * qt * phi(iz, j);
      }
    }
  }
};

}  // namespace

struct AmplitudeEngine::Impl {
  const PulseTables* pulse;
  const MomentumTables* momenta;
  PotentialParams potential;
  double energy;
  Prepared fine;
  // n_t, n_qz, n_qt halved one at a time
  Prepared half_t;
  Prepared half_qz;
  Prepared half_qt;
  TimeSample start;
  TimeSample end;

  Impl(const PulseTables& p, const MomentumTables& m, const PotentialParams& v, const QuadratureSpec& s)
      : pulse(&p),
        momenta(&m),
        potential(v),
        energy(m.energy()),
        fine(s, p, m),
        half_t(s.halved_in(QuadratureSpec::Dimension::time), p, m),
        half_qz(s.halved_in(QuadratureSpec::Dimension::qz), p, m),
        half_qt(s.halved_in(QuadratureSpec::Dimension::qt), p, m),
        start(p.sample(p.t_start())),
        end(p.sample(p.t_end())) {}

  Complex m1(MomentumPoint p, const Prepared& prep) const;
  Complex sfa_direct(MomentumPoint p, const Prepared& prep) const;
  Complex potential_term(MomentumPoint p, GaugeParam gauge, const Prepared& prep) const;
};

AmplitudeEngine::AmplitudeEngine(const PulseTables& pulse, const MomentumTables& momenta,
                                 const PotentialParams& potential, const QuadratureSpec& spec) {
  spec.validate();
  potential.validate();
  const double q_ball = std::min(spec.qz_max, spec.qt_max);
  if (std::hypot(spec.qz_max, spec.qt_max) > momenta.p_max()) {
    throw ConfigError(fmt::format("quadrature: q grid corner {} exceeds momentum table range {}",
                                  std::hypot(spec.qz_max, spec.qt_max), momenta.p_max()));
  }
  const double covered = momenta.norm_within(q_ball);
  if (!(covered >= 1.0 - spec.coverage_tolerance)) {
    throw ConfigError(fmt::format(
        "quadrature: q range {} covers only {:.6f} of the bound-state norm (need >= {})", q_ball,
        covered, 1.0 - spec.coverage_tolerance));
  }
  impl_ = std::make_unique<Impl>(pulse, momenta, potential, spec);
}

AmplitudeEngine::~AmplitudeEngine() = default;
AmplitudeEngine::AmplitudeEngine(AmplitudeEngine&&) noexcept = default;
AmplitudeEngine& AmplitudeEngine::operator=(AmplitudeEngine&&) noexcept = default;

const QuadratureSpec& AmplitudeEngine::spec() const { return impl_->fine.spec; }
const QuadratureNodes& AmplitudeEngine::nodes() const { return impl_->fine.nodes; }
const PulseTables& AmplitudeEngine::pulse() const { return *impl_->pulse; }
const MomentumTables& AmplitudeEngine::momenta() const { return *impl_->momenta; }
const PotentialParams& AmplitudeEngine::potential() const { return impl_->potential; }
double AmplitudeEngine::energy() const { return impl_->energy; }

Complex AmplitudeEngine::m0(MomentumPoint p) const {
  const auto& s = *impl_;
  const double phi0 = s.momenta->phi0(std::hypot(p.pz, p.pt));
  return m0_closed_form(phi0, p, s.energy, s.pulse->t_start(), s.pulse->t_end(), s.end.alpha,
                        s.end.beta);
}

Complex AmplitudeEngine::m0_in_gauge(MomentumPoint p, GaugeParam gauge) const {
  const auto& s = *impl_;
  const double t_i = s.pulse->t_start();
  const double t_f = s.pulse->t_end();
  const double chi_f = gauge_chi(t_f, gauge, *s.pulse);
  const double chi_i = gauge_chi(t_i, gauge, *s.pulse);
  const ShiftedKernel k = shifted_volkov_kernel(p.pz, p.pt, s.end, chi_f, s.start, chi_i);
  const double p2 = p.pz * p.pz + p.pt * p.pt;
  const Complex propagated = expi(0.5 * p2 * t_f - k.phase - s.energy * t_i) *
                             s.momenta->phi0(std::hypot(p.pz + k.ket_shift_z, p.pt));
  const Complex overlap = expi(0.5 * p2 * t_f - s.energy * t_f) * s.momenta->phi0(std::hypot(p.pz, p.pt));
  return propagated - overlap;
}

Complex AmplitudeEngine::Impl::m1(MomentumPoint p, const Prepared& prep) const {
  if (potential.vanishes()) return 0.0;
  const auto nt = prep.e_phase.rows();
  const auto nz = prep.q_phase.rows();
  const auto nq = prep.e_phase.cols();
  const double t_i = pulse->t_start();
  const double p2 = p.pz * p.pz + p.pt * p.pt;
  Eigen::RowVectorXcd pvec(nt);
  for (Eigen::Index n = 0; n < nt; ++n) {
    const double tau = prep.samples[n].t - t_i;
    pvec(n) = prep.nodes.time.weights[n] * expi(0.5 * tau * p2 + prep.samples[n].alpha * p.pz);
  }
  const Eigen::MatrixXcd h = prep.q_phase.array().rowwise() * pvec.array();
  const Eigen::MatrixXcd g = h * prep.e_phase;
  const double mu2 = potential.mu * potential.mu;
  Complex sum = 0.0;
  for (Eigen::Index j = 0; j < nq; ++j) {
    const double qt = prep.nodes.qt.nodes[j];
    const double b = 2.0 * p.pt * qt;
    Complex col = 0.0;
    for (Eigen::Index iz = 0; iz < nz; ++iz) {
      const double dz = p.pz - prep.nodes.qz.nodes[iz];
      const double a = mu2 + dz * dz + p.pt * p.pt + qt * qt;
      col += prep.base(iz, j) * potential_ft_azimuthal(a, b, potential) * g(iz, j);
    }
    sum += col;
  }
  const double phase = -energy * t_i + 0.5 * p2 * t_i - p.pz * end.alpha - 0.5 * end.beta;
  const Complex result = -kI * expi(phase) * kInvTwoPiCubed * sum;
  require_finite(result, "m1", p);
  return result;
}

Complex AmplitudeEngine::m1(MomentumPoint p) const { return impl_->m1(p, impl_->fine); }

Estimate AmplitudeEngine::m1_estimate(MomentumPoint p) const {
  const auto& s = *impl_;
  const Complex fine = s.m1(p, s.fine);
  const double error = std::abs(fine - s.m1(p, s.half_t)) + std::abs(fine - s.m1(p, s.half_qz)) +
                       std::abs(fine - s.m1(p, s.half_qt));
  return {fine, error};
}

Complex AmplitudeEngine::m1_in_gauge(MomentumPoint p, GaugeParam gauge) const {
  const auto& s = *impl_;
  if (s.potential.vanishes()) return 0.0;
  const Prepared& prep = s.fine;
  const double t_i = s.pulse->t_start();
  const double t_f = s.pulse->t_end();
  const double chi_f = gauge_chi(t_f, gauge, *s.pulse);
  const double chi_i = gauge_chi(t_i, gauge, *s.pulse);
  const double mu2 = s.potential.mu * s.potential.mu;
  Complex total = 0.0;
  for (std::size_t n = 0; n < prep.samples.size(); ++n) {
    const TimeSample& mid = prep.samples[n];
    const double chi_mid = gauge_chi(mid.t, gauge, *s.pulse);
    // <p| U_gF(t_f, t2): selects the intermediate momentum after V
    const ShiftedKernel outer = shifted_volkov_kernel(p.pz, p.pt, s.end, chi_f, mid, chi_mid);
    const double k_z = p.pz + outer.ket_shift_z;
    Complex inner = 0.0;
    for (std::size_t iz = 0; iz < prep.nodes.qz.size(); ++iz) {
      // intermediate momentum before V, integrated on nodes co-moving with chi
      const double kp_z = prep.nodes.qz.nodes[iz] + chi_mid;
      for (std::size_t j = 0; j < prep.nodes.qt.size(); ++j) {
        const double qt = prep.nodes.qt.nodes[j];
        const ShiftedKernel before = shifted_volkov_kernel(kp_z, qt, mid, chi_mid, s.start, chi_i);
        const double q0_z = kp_z + before.ket_shift_z;
        const double dz = k_z - kp_z;
        const double a = mu2 + dz * dz + p.pt * p.pt + qt * qt;
        const double vaz = potential_ft_azimuthal(a, 2.0 * p.pt * qt, s.potential);
        const double w = prep.nodes.qz.weights[iz] * prep.nodes.qt.weights[j] * qt;
        inner += w * vaz * s.momenta->phi0(std::hypot(q0_z, qt)) * expi(-before.phase);
      }
    }
    total += prep.nodes.time.weights[n] * expi(-outer.phase) * inner;
  }
  const double p2 = p.pz * p.pz + p.pt * p.pt;
  const Complex result = -kI * expi(0.5 * p2 * t_f - s.energy * t_i) * kInvTwoPiCubed * total;
  require_finite(result, "m1_in_gauge", p);
  return result;
}

Complex AmplitudeEngine::Impl::sfa_direct(MomentumPoint p, const Prepared& prep) const {
  const double t_f = pulse->t_end();
  const double p2 = p.pz * p.pz + p.pt * p.pt;
  Complex sum = 0.0;
  for (std::size_t n = 0; n < prep.samples.size(); ++n) {
    const TimeSample& s = prep.samples[n];
    const double interaction = p.pz * s.A + 0.5 * s.A * s.A;
    const double theta = 0.5 * p2 * t_f - volkov_phase(p.pz, p.pt, end, s) - energy * s.t;
    sum += prep.nodes.time.weights[n] * interaction * expi(theta);
  }
  const Complex result = -kI * momenta->phi0(std::sqrt(p2)) * sum;
  require_finite(result, "sfa_direct", p);
  return result;
}

Estimate AmplitudeEngine::sfa_direct(MomentumPoint p) const {
  const Complex fine = impl_->sfa_direct(p, impl_->fine);
  return {fine, std::abs(fine - impl_->sfa_direct(p, impl_->half_t))};
}

Complex AmplitudeEngine::Impl::potential_term(MomentumPoint p, GaugeParam gauge,
                                              const Prepared& prep) const {
  if (potential.vanishes()) return 0.0;
  const double t_f = pulse->t_end();
  const double chi_f = gauge_chi(t_f, gauge, *pulse);
  Complex sum = 0.0;
  for (std::size_t n = 0; n < prep.samples.size(); ++n) {
    const TimeSample& s = prep.samples[n];
    const double chi = gauge_chi(s.t, gauge, *pulse);
    const ShiftedKernel k = shifted_volkov_kernel(p.pz, p.pt, end, chi_f, s, chi);
    const double w = momenta->w(std::hypot(p.pz + k.ket_shift_z, p.pt));
    sum += prep.nodes.time.weights[n] * w * expi(-k.phase - energy * s.t);
  }
  const Complex result = -kI * expi(0.5 * (p.pz * p.pz + p.pt * p.pt) * t_f) * sum;
  require_finite(result, "potential_term", p);
  return result;
}

Estimate AmplitudeEngine::potential_term(MomentumPoint p, GaugeParam gauge) const {
  const Complex fine = impl_->potential_term(p, gauge, impl_->fine);
  return {fine, std::abs(fine - impl_->potential_term(p, gauge, impl_->half_t))};
}

Estimate AmplitudeEngine::sfa(MomentumPoint p, GaugeParam gauge, SfaVariant variant) const {
  if (variant == SfaVariant::potential_only) return potential_term(p, gauge);
  if (gauge.gamma == 0.0) return sfa_direct(p);
  const Estimate tv = potential_term(p, gauge);
  return {m0(p) + tv.value, tv.error};
}

double AmplitudeEngine::v_phi_convolution(MomentumPoint p) const {
  const auto& s = *impl_;
  const Prepared& prep = s.fine;
  const double mu2 = s.potential.mu * s.potential.mu;
  double sum = 0.0;
  for (std::size_t j = 0; j < prep.nodes.qt.size(); ++j) {
    const double qt = prep.nodes.qt.nodes[j];
    double col = 0.0;
    for (std::size_t iz = 0; iz < prep.nodes.qz.size(); ++iz) {
      const double dz = p.pz - prep.nodes.qz.nodes[iz];
      const double a = mu2 + dz * dz + p.pt * p.pt + qt * qt;
      col += prep.base(static_cast<Eigen::Index>(iz), static_cast<Eigen::Index>(j)) *
             potential_ft_azimuthal(a, 2.0 * p.pt * qt, s.potential);
    }
    sum += col;
  }
  return kInvTwoPiCubed * sum;
}

Complex AmplitudeEngine::rescattering_boundary_term(MomentumPoint p) const {
  const auto& s = *impl_;
  if (s.potential.vanishes()) return 0.0;
  const double t_f = s.pulse->t_end();
  const double p2 = p.pz * p.pz + p.pt * p.pt;
  // separate node set: 10-point panels, 25% more nodes than the nominal rule
  const int n = 10 * ((s.fine.spec.n_t * 5 / 4 + 9) / 10);
  const Rule rule = composite_gauss_legendre(s.pulse->t_start(), t_f, n, 10);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const TimeSample ts = s.pulse->sample(rule.nodes[k]);
    sum += rule.weights[k] * expi(-volkov_phase(p.pz, p.pt, s.end, ts) - s.energy * ts.t);
  }
  const Complex result = kI * expi(0.5 * p2 * t_f) * s.momenta->w(std::sqrt(p2)) * sum;
  require_finite(result, "rescattering_boundary_term", p);
  return result;
}

AmplitudeSet AmplitudeEngine::evaluate(MomentumPoint p, GaugeParam gauge, SfaVariant variant,
                                       bool with_m1) const {
  AmplitudeSet set;
  set.gamma = gauge.gamma;
  set.spec = spec();
  set.m0 = gauge.gamma == 0.0 ? m0(p) : m0_in_gauge(p, gauge);
  if (with_m1) {
    const Estimate e = m1_estimate(p);
    set.m1 = e.value;
    set.m1_error = e.error;
  }
  const Estimate s = sfa(p, gauge, variant);
  set.m_sfa = s.value;
  set.sfa_error = s.error;
  return set;
}

}  // namespace gisfa
