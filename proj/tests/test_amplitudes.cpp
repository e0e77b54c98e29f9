#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>
#include <tuple>
#include <numbers>
#include <random>
#include <thread>

#include "gisfa/amplitudes.hpp"
#include "gisfa/errors.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace gisfa;
using namespace gisfa::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

const AmplitudeEngine& engine(double cep, const QuadratureSpec& spec) {
  static std::map<std::tuple<double, int, int, int>, std::unique_ptr<AmplitudeEngine>> cache;
  auto& slot = cache[{cep, spec.n_t, spec.n_qz, spec.n_qt}];
  if (!slot) {
    slot = std::make_unique<AmplitudeEngine>(default_pulse(cep), default_momenta(), PotentialParams{}, spec);
  }
  return *slot;
}

const AmplitudeEngine& nominal(double cep) { return engine(cep, QuadratureSpec{}); }

std::vector<MomentumPoint> random_points(int n, unsigned seed, double pz_max, double pt_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> z(-pz_max, pz_max);
  std::uniform_real_distribution<double> t(0.0, pt_max);
  std::vector<MomentumPoint> out;
  for (int i = 0; i < n; ++i) out.push_back({z(rng), t(rng)});
  return out;
}

}  // namespace

TEST_CASE("quadrature spec validation and coverage") {
  QuadratureSpec s;
  CHECK_NOTHROW(s.validate());
  s.n_qz = 4;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK(QuadratureSpec{}.halved().n_t == QuadratureSpec{}.n_t / 2);
  CHECK(QuadratureSpec{}.doubled().n_qt == 2 * QuadratureSpec{}.n_qt);

  QuadratureSpec narrow = small_spec();
  narrow.qz_max = 0.5;
  narrow.qt_max = 0.5;
  CHECK_THROWS_AS(AmplitudeEngine(default_pulse(0.0), default_momenta(), PotentialParams{}, narrow), ConfigError);
  QuadratureSpec wide = small_spec();
  wide.qz_max = 39.0;
  wide.qt_max = 39.0;
  CHECK_THROWS_AS(AmplitudeEngine(default_pulse(0.0), default_momenta(), PotentialParams{}, wide), ConfigError);
}

TEST_CASE("m0 closed form") {
  const AmplitudeEngine& e = nominal(0.3);
  const PulseTables& t = default_pulse(0.3);
  CHECK(m0_closed_form(0.7, {1.0, 0.5}, -0.03, 2.0, 2.0, 0.0, 0.0) == Complex(0.0, 0.0));
  for (const auto& p : random_points(12, 7, 6.0, 4.0)) {
    const double phi0 = default_momenta().phi0(std::hypot(p.pz, p.pt));
    const double e_kin = 0.5 * (p.pz * p.pz + p.pt * p.pt) - e.energy();
    const double delta = e_kin * (t.t_start() - t.t_end()) - p.pz * t.alpha_total() - 0.5 * t.beta_total();
    const Complex m = e.m0(p);
    CHECK(std::abs(m) == doctest::Approx(2.0 * std::abs(phi0) * std::abs(std::sin(0.5 * delta))).epsilon(1e-12));
    // both terms evaluated separately through the propagator
    CHECK(rel(m, e.m0_in_gauge(p, GaugeParam{0.0})) < 1e-11);
  }
}

TEST_CASE("m0 symmetry for an even field") {
  const AmplitudeEngine& e = nominal(0.0);
  for (double pz : {0.1, 0.8, 2.3, 5.5}) {
    for (double pt : {0.0, 1.0}) {
      CHECK(std::abs(e.m0({pz, pt})) == doctest::Approx(std::abs(e.m0({-pz, pt}))).epsilon(1e-12));
    }
  }
}

TEST_CASE("m0 through gauge kernels is identical for every gamma") {
  const AmplitudeEngine& e = nominal(kPi / 2);
  for (const auto& p : random_points(10, 11, 3.0, 2.0)) {
    const Complex ref = e.m0_in_gauge(p, GaugeParam{0.0});
    for (double g : {0.5, 1.0, -0.3}) CHECK(e.m0_in_gauge(p, GaugeParam{g}) == ref);
  }
}

TEST_CASE("vanishing potential or field") {
  PotentialParams zero;
  zero.d = 0.0;
  zero.g = 0.0;
  const AmplitudeEngine e(default_pulse(0.0), default_momenta(), zero, small_spec());
  for (const auto& p : random_points(4, 3, 3.0, 2.0)) {
    CHECK(e.m1(p) == Complex(0.0, 0.0));
    CHECK(e.m1_in_gauge(p, GaugeParam{1.0}) == Complex(0.0, 0.0));
    CHECK(e.potential_term(p, GaugeParam{0.0}).value == Complex(0.0, 0.0));
    CHECK(e.potential_term(p, GaugeParam{1.0}).value == Complex(0.0, 0.0));
    CHECK(e.rescattering_boundary_term(p) == Complex(0.0, 0.0));
  }

  PulseParams weak = PulseParams::defaults();
  weak.E0 = 1e-20;
  const PulseTables t = PulseTables::build(weak);
  const AmplitudeEngine f(t, default_momenta(), PotentialParams{}, small_spec());
  for (const auto& p : random_points(4, 5, 3.0, 2.0)) CHECK(std::abs(f.sfa_direct(p).value) < 1e-17);
}

TEST_CASE("m1 matches a brute-force 4D quadrature on a tiny grid") {
  QuadratureSpec tiny;
  tiny.n_t = 16;
  tiny.n_qz = 8;
  tiny.n_qt = 8;
  const PulseTables& t = default_pulse(kPi / 2);
  const AmplitudeEngine e(t, default_momenta(), PotentialParams{}, tiny);
  for (MomentumPoint p : {MomentumPoint{0.5, 0.0}, MomentumPoint{-1.2, 0.7}, MomentumPoint{2.0, 1.5}}) {
    const Complex ref = brute_force_m1(t, default_momenta(), PotentialParams{}, tiny, p, 256);
    CHECK(std::abs(ref) > 0.0);
    CHECK(rel(e.m1(p), ref) < 1e-6);
  }
}

TEST_CASE("m1 dressed evaluation agrees with the factorized one") {
  const AmplitudeEngine& e = engine(kPi / 2, small_spec());
  for (MomentumPoint p : {MomentumPoint{0.4, 0.3}, MomentumPoint{-1.0, 0.8}}) {
    const Complex fast = e.m1(p);
    for (double g : {0.0, 0.5, 1.0}) CHECK(rel(e.m1_in_gauge(p, GaugeParam{g}), fast) < 1e-10);
  }
}

TEST_CASE("doubling every dimension changes m1 by less than the declared error") {
  const QuadratureSpec base = audit_spec();
  const AmplitudeEngine& e = engine(0.0, base);
  const AmplitudeEngine& d = engine(0.0, base.doubled());
  for (const auto& p : random_points(10, 2024, 5.0, 3.0)) {
    const Estimate est = e.m1_estimate(p);
    CHECK(std::abs(d.m1(p) - est.value) < est.error);
  }
}

TEST_CASE("standard SFA symmetry for an even field") {
  const AmplitudeEngine& e = nominal(0.0);
  for (double pz : {0.3, 1.7, 4.0}) {
    const double a = std::abs(e.sfa_direct({pz, 0.0}).value);
    const double b = std::abs(e.sfa_direct({-pz, 0.0}).value);
    CHECK(std::abs(a - b) / std::max(a, b) < 1e-10);
  }
}

TEST_CASE("regrouping identities") {
  for (double cep : {0.0, kPi / 2}) {
    const AmplitudeEngine& e = nominal(cep);
    for (const auto& p : random_points(6, 99, 5.0, 3.0)) {
      const Complex direct = e.sfa_direct(p).value;
      const Complex tv = e.potential_term(p, GaugeParam{0.0}).value;
      CHECK(rel(direct, e.m0(p) + tv) < 1e-6);
      // first term of the first-order iteration cancels the potential term
      const Complex boundary = e.rescattering_boundary_term(p);
      CHECK(std::abs(boundary + tv) < 1e-8 * std::abs(tv));
      for (double g : {0.5, 1.0}) {
        CHECK(rel(e.sfa(p, GaugeParam{g}).value, e.m0(p) + e.potential_term(p, GaugeParam{g}).value) < 1e-14);
      }
    }
  }
}

TEST_CASE("potential term depends on the gauge") {
  const AmplitudeEngine& e = nominal(0.0);
  int distinct = 0;
  for (MomentumPoint p : {MomentumPoint{0.0, 0.2}, MomentumPoint{0.5, 0.5}, MomentumPoint{-1.0, 0.1},
                          MomentumPoint{2.5, 0.0}}) {
    const Estimate a = e.potential_term(p, GaugeParam{0.0});
    const Estimate b = e.potential_term(p, GaugeParam{1.0});
    if (std::abs(std::abs(a.value) - std::abs(b.value)) > 10.0 * (a.error + b.error)) ++distinct;
  }
  CHECK(distinct == 4);
}

TEST_CASE("potential term reports tables out of range") {
  const AmplitudeEngine& e = nominal(0.0);
  CHECK_THROWS_AS(e.potential_term({35.0, 0.0}, GaugeParam{1.0}), DomainError);
}

TEST_CASE("concurrent evaluation is deterministic") {
  const AmplitudeEngine& e = engine(0.0, small_spec());
  const auto points = random_points(8, 1, 4.0, 2.0);
  std::vector<AmplitudeSet> serial;
  for (const auto& p : points) serial.push_back(e.evaluate(p, GaugeParam{1.0}));
  std::vector<AmplitudeSet> parallel(points.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < points.size(); ++i) {
      pool.emplace_back([&, i] { parallel[i] = e.evaluate(points[i], GaugeParam{1.0}); });
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(parallel[i].m0 == serial[i].m0);
    CHECK(parallel[i].m1 == serial[i].m1);
    CHECK(parallel[i].m_sfa == serial[i].m_sfa);
    CHECK(parallel[i].m1_error == serial[i].m1_error);
  }
}
