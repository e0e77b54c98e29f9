#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "gisfa/errors.hpp"
#include "gisfa/observables.hpp"
#include "support/fixtures.hpp"

using namespace gisfa;
using namespace gisfa::testing;

namespace {

constexpr double kPi = std::numbers::pi;

SpectrumResult constant_map(double c, double pt_max, int n_pt) {
  SpectrumResult r;
  r.grid = MomentumGrid::map(2.0, 9, pt_max, n_pt);
  r.w.assign(r.grid.size(), c);
  r.w_error.assign(r.grid.size(), 0.0);
  return r;
}

const AmplitudeEngine& small_engine(double cep) {
  static std::map<double, std::unique_ptr<AmplitudeEngine>> cache;
  auto& slot = cache[cep];
  if (!slot) slot = std::make_unique<AmplitudeEngine>(default_pulse(cep), default_momenta(), PotentialParams{}, small_spec());
  return *slot;
}

}  // namespace

TEST_CASE("momentum grids") {
  const MomentumGrid a = MomentumGrid::axis(8.0, 321);
  CHECK(a.on_axis());
  CHECK(a.size() == 321);
  CHECK(a.pz.front() == -8.0);
  CHECK(a.pz[160] == 0.0);
  for (std::size_t i = 0; i < a.pz.size(); ++i) CHECK(a.pz[i] == -a.pz[a.pz.size() - 1 - i]);
  const MomentumGrid m = MomentumGrid::map(8.0, 161, 8.0, 81);
  CHECK(m.pt.front() == 0.0);
  CHECK(m.pt.back() == 8.0);
  CHECK(m.at(81).pz == m.pz[1]);
  CHECK(m.at(81).pt == 0.0);
  MomentumGrid bad = m;
  bad.pz[0] = -7.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(MomentumGrid::axis(8.0, 1), ConfigError);
}

TEST_CASE("selector and normalization tokens") {
  CHECK(parse_selector("M0") == Selector::m0);
  CHECK(parse_selector("M0+M1") == Selector::m0_m1);
  CHECK(parse_selector("m0m1") == Selector::m0_m1);
  CHECK(parse_selector("SFA") == Selector::sfa);
  CHECK(selector_token(Selector::m0_m1) == "M0M1");
  CHECK_THROWS_AS(parse_selector("M2"), ConfigError);
  CHECK(parse_normalization("integral") == Normalization::integral);
  CHECK_THROWS_AS(parse_normalization("max"), ConfigError);
}

TEST_CASE("transverse integration") {
  SpectrumResult r = constant_map(2.5, 3.0, 31);
  const auto rho = integrate_transverse(r);
  for (double v : rho) CHECK(v == doctest::Approx(2.5 * 9.0 / (8.0 * kPi * kPi)).epsilon(1e-13));
  CHECK_FALSE(r.warning.empty());

  // decaying in p_t, independent of p_z
  SpectrumResult d = constant_map(1.0, 10.0, 201);
  for (std::size_t i = 0; i < d.w.size(); ++i) d.w[i] = std::exp(-d.grid.at(i).pt * d.grid.at(i).pt);
  integrate_transverse(d);
  CHECK(d.warning.empty());
  for (double v : d.rho) CHECK(v == doctest::Approx(d.rho.front()).epsilon(1e-15));
  CHECK(d.rho.front() == doctest::Approx(0.5 / (4.0 * kPi * kPi)).epsilon(1e-8));
}

TEST_CASE("transverse integral converges under p_t step halving") {
  const AmplitudeEngine& e = small_engine(kPi / 2);
  // the overlap term oscillates in p_t at a rate of about (t_f - t_i) p_t
  const MomentumGrid coarse = MomentumGrid::map(6.0, 25, 3.0, 601);
  const MomentumGrid fine = MomentumGrid::map(6.0, 25, 3.0, 1201);
  SweepOptions o;
  o.with_m1 = false;
  SpectrumResult a = sweep(e, coarse, Selector::m0, GaugeParam{0.0}, o);
  SpectrumResult b = sweep(e, fine, Selector::m0, GaugeParam{0.0}, o);
  REQUIRE(a.rho.size() == b.rho.size());
  CHECK(a.warning.find("under-resolves") == std::string::npos);
  const SpectrumResult sparse = sweep(e, MomentumGrid::map(6.0, 25, 8.0, 81), Selector::m0, GaugeParam{0.0}, o);
  CHECK(sparse.warning.find("under-resolves") != std::string::npos);
  for (std::size_t i = 0; i < a.rho.size(); ++i) {
    CHECK(a.rho[i] >= 0.0);
    CHECK(std::abs(a.rho[i] - b.rho[i]) < 1e-4 * b.rho[i]);
  }
}

TEST_CASE("normalization") {
  SpectrumResult r = constant_map(1.0, 3.0, 7);
  for (std::size_t i = 0; i < r.w.size(); ++i) r.w[i] = 1.0 + std::sin(static_cast<double>(i));
  integrate_transverse(r);
  const auto argmax = std::max_element(r.w.begin(), r.w.end()) - r.w.begin();
  const SpectrumResult p = normalize(r, Normalization::peak);
  CHECK(*std::max_element(p.w.begin(), p.w.end()) == 1.0);
  CHECK(*std::max_element(p.rho.begin(), p.rho.end()) == 1.0);
  CHECK(std::max_element(p.w.begin(), p.w.end()) - p.w.begin() == argmax);
  CHECK(p.mode == Normalization::peak);
  const SpectrumResult twice = normalize(p, Normalization::peak);
  CHECK(twice.w == p.w);
  CHECK(twice.rho == p.rho);

  SpectrumResult i = normalize(r, Normalization::integral);
  CHECK(i.w_constant > 0.0);
  CHECK(normalize(i, Normalization::integral).w_constant == doctest::Approx(i.w_constant * 1.0).epsilon(1e-12));

  SpectrumResult zero = constant_map(0.0, 3.0, 7);
  CHECK_THROWS_AS(normalize(zero, Normalization::peak), NumericError);
}

TEST_CASE("spectra symmetry under an even field") {
  const AmplitudeEngine e(default_pulse(0.0), default_momenta(), PotentialParams{}, audit_spec());
  const MomentumGrid g = MomentumGrid::axis(5.0, 41);
  SweepOptions o;
  o.workers = 2;
  const auto amps = evaluate_grid(e, g, GaugeParam{0.0}, o);
  const SpectrumResult m0 = spectrum_from(amps, g, Selector::m0, 0.0);
  for (std::size_t i = 0; i < g.pz.size(); ++i) CHECK(m0.w[i] == m0.w[g.pz.size() - 1 - i]);
  CHECK(asymmetry(m0) == 0.0);
  const SpectrumResult sfa = spectrum_from(amps, g, Selector::sfa, 0.0);
  CHECK(asymmetry(sfa) < 1e-10);

  const SpectrumResult full = spectrum_from(amps, g, Selector::m0_m1, 0.0);
  double err = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < full.w.size(); ++i) {
    err += 2.0 * full.w_error[i];
    total += full.w[i];
  }
  CHECK(asymmetry(full) > err / total);

  const AmplitudeEngine& odd = small_engine(kPi / 2);
  SweepOptions no_m1;
  no_m1.with_m1 = false;
  CHECK(asymmetry(sweep(odd, g, Selector::m0, GaugeParam{0.0}, no_m1)) > 1e-3);
  CHECK(asymmetry(sweep(odd, g, Selector::sfa, GaugeParam{0.0}, no_m1)) > 1e-3);
}

TEST_CASE("no field gives an empty SFA spectrum in every gauge") {
  PulseParams weak = PulseParams::defaults();
  weak.E0 = 1e-20;
  const PulseTables t = PulseTables::build(weak);
  const AmplitudeEngine e(t, default_momenta(), PotentialParams{}, small_spec());
  const MomentumGrid g = MomentumGrid::axis(3.0, 13);
  SweepOptions o;
  o.with_m1 = false;
  const SpectrumResult r = sweep(e, g, Selector::sfa, GaugeParam{0.0}, o);
  for (double w : r.w) CHECK(w < 1e-30);
  const SpectrumResult g1 = sweep(e, g, Selector::sfa, GaugeParam{1.0}, o);
  for (double w : g1.w) CHECK(w < 1e-20);

  PotentialParams zero;
  zero.d = 0.0;
  zero.g = 0.0;
  const AmplitudeEngine free(t, default_momenta(), zero, small_spec());
  o.sfa_variant = SfaVariant::potential_only;
  for (double w : sweep(free, g, Selector::sfa, GaugeParam{1.0}, o).w) CHECK(w == 0.0);
  for (double w : sweep(free, g, Selector::m0_m1, GaugeParam{0.0}).w) CHECK(w > 0.0);
}

TEST_CASE("grid sweep does not depend on the worker count") {
  const AmplitudeEngine& e = small_engine(kPi / 2);
  const MomentumGrid g = MomentumGrid::map(3.0, 9, 2.0, 5);
  const auto one = evaluate_grid(e, g, GaugeParam{1.0}, SweepOptions{1});
  for (int w : {4, 8}) {
    SweepOptions o;
    o.workers = w;
    const auto many = evaluate_grid(e, g, GaugeParam{1.0}, o);
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(many[i].m0 == one[i].m0);
      CHECK(many[i].m1 == one[i].m1);
      CHECK(many[i].m_sfa == one[i].m_sfa);
    }
  }
}

TEST_CASE("errors carry grid coordinates") {
  const AmplitudeEngine& e = small_engine(0.0);
  const MomentumGrid g = MomentumGrid::axis(39.5, 3);
  try {
    evaluate_grid(e, g, GaugeParam{1.0}, SweepOptions{2, SfaVariant::full, false});
    FAIL("expected an error");
  } catch (const DomainError& ex) {
    CHECK(std::string(ex.what()).find("p_z=-39.5") != std::string::npos);
  }
}

TEST_CASE("gauge comparison at the observable level") {
  const AmplitudeEngine& e = small_engine(0.0);
  const MomentumGrid g = MomentumGrid::axis(1.5, 7, 0.3);
  const auto a0 = evaluate_grid(e, g, GaugeParam{0.0});
  const auto a1 = evaluate_grid(e, g, GaugeParam{1.0});
  std::vector<AmplitudeSet> dressed = a1;
  for (std::size_t i = 0; i < g.size(); ++i) dressed[i].m1 = e.m1_in_gauge(g.at(i), GaugeParam{1.0});
  const SpectrumResult w0 = spectrum_from(a0, g, Selector::m0_m1, 0.0);
  const SpectrumResult w1 = spectrum_from(dressed, g, Selector::m0_m1, 1.0);
  const SpectrumResult s0 = spectrum_from(a0, g, Selector::sfa, 0.0);
  const SpectrumResult s1 = spectrum_from(a1, g, Selector::sfa, 1.0);
  int sfa_differs = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(w0.w[i] - w1.w[i]) <= 10.0 * w0.w_error[i]);
    if (std::abs(s0.w[i] - s1.w[i]) > 10.0 * (s0.w_error[i] + s1.w_error[i])) ++sfa_differs;
  }
  CHECK(sfa_differs > 0);
}

TEST_CASE("csv output") {
  SpectrumResult r = constant_map(1.0, 2.0, 3);
  r.selector = Selector::sfa;
  r.w[0] = 0.0;
  std::ostringstream out;
  write_spectrum_csv(out, r, {{"E0", "10"}});
  const std::string text = out.str();
  CHECK(text.rfind("# E0=10\n", 0) == 0);
  CHECK(text.find("# selector=SFA\n") != std::string::npos);
  CHECK(text.find("\np_z,p_t,w,log10_w\n") != std::string::npos);
  CHECK(text.find(",0.000000000000e+00,-inf\n") != std::string::npos);

  SpectrumResult axis;
  axis.grid = MomentumGrid::axis(1.0, 3);
  axis.w = {1.0, 10.0, 100.0};
  axis.w_error = {0.0, 0.0, 0.0};
  std::ostringstream a;
  write_spectrum_csv(a, axis, {});
  CHECK(a.str().find("p_z,w,log10_w\n-1.0000000000,1.000000000000e+00,0.000000000000e+00\n") != std::string::npos);

  integrate_transverse(r);
  std::ostringstream rho;
  write_rho_csv(rho, r, {});
  CHECK(rho.str().find("\np_z,rho,log10_rho\n") != std::string::npos);
}
