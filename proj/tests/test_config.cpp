#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "gisfa/config.hpp"
#include "gisfa/errors.hpp"

using namespace gisfa;

namespace {

const char* const kDefaults = R"(# defaults
[pulse]
E0 = 10
period_as = 240
tau = 1.94
cep = 0

[potential]
d = 1
g = 1
mu = 1.56
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults parse and round-trip") {
  const RunConfig c = parse_config(kDefaults);
  CHECK(c.E0 == 10.0);
  CHECK(c.omega == omega_from_period_as(240.0));
  CHECK(c.tau == 1.94);
  CHECK(c.ceps == std::vector<double>{0.0});
  CHECK(c.potential.d == 1.0);
  CHECK(c.potential.mu == 1.56);
  CHECK(c.pulse(0.0).t_start == -6.0 * 1.94);
  const std::string echo = echo_config(c);
  CHECK(echo_config(parse_config(echo)) == echo);
  CHECK(echo_config(parse_config(kDefaults)) == echo);
}

TEST_CASE("every key round-trips") {
  const std::string text = std::string(kDefaults) + R"(
[solver]
r_max = 50
step = 0.005
[momentum_tables]
p_max = 30
[gauge]
gammas = 0, 0.5, 1
[amplitudes]
selectors = SFA, M0+M1
sfa_variant = potential_only
[grid]
name = cut
kind = axis
pz_max = 4
n_pz = 11
pt = 0.5
[grid]
kind = map
pz_max = 3
n_pz = 7
pt_max = 2
n_pt = 5
[quadrature]
n_t = 1024
qz_max = 6
[output]
directory = somewhere
run_name = trial
normalization = integral
[run]
workers = 3
gauge_audit_points = 0
)";
  const RunConfig c = parse_config(text);
  CHECK(c.gammas.size() == 3);
  CHECK(c.selectors == std::vector<Selector>{Selector::sfa, Selector::m0_m1});
  CHECK(c.sfa_variant == SfaVariant::potential_only);
  REQUIRE(c.grids.size() == 2);
  CHECK(c.grids[0].name == "cut");
  CHECK(c.grids[0].grid.pt == std::vector<double>{0.5});
  CHECK(c.grids[1].name == "map1");
  CHECK(c.grids[1].grid.pt.size() == 5);
  CHECK(c.quadrature.n_t == 1024);
  CHECK(c.quadrature.qz_max == 6.0);
  CHECK(c.normalization == Normalization::integral);
  CHECK(c.workers == 3);
  const std::string echo = echo_config(c);
  CHECK(echo_config(parse_config(echo)) == echo);
}

TEST_CASE("numeric literals") {
  CHECK(parse_number("pi/2") == doctest::Approx(1.5707963));
  CHECK(parse_number("pi/2") == std::numbers::pi / 2);
  CHECK(parse_number("-3*pi/4") == doctest::Approx(-3.0 * std::numbers::pi / 4.0));
  CHECK(parse_number("-pi") == -std::numbers::pi);
  CHECK(parse_number(" 2.5e-1 ") == 0.25);
  CHECK(parse_number("-0.5") == -0.5);
  CHECK_THROWS_AS(parse_number("two"), ConfigError);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number(""), ConfigError);

  const std::string text = std::string(kDefaults);
  const RunConfig c = parse_config(text.substr(0, text.find("cep = 0")) + "cep = 0, pi/2" +
                                   text.substr(text.find("cep = 0") + 7));
  CHECK(c.ceps[1] == doctest::Approx(1.5707963));
}

TEST_CASE("empty file lists the required keys") {
  const std::string e = error_of("");
  CHECK(contains(e, "missing required keys"));
  for (const char* k : {"E0", "period_as or wavelength_nm", "tau", "cep", "[potential] d", "[potential] g", "mu"}) {
    CHECK(contains(e, k));
  }
  CHECK(contains(error_of("# only comments\n\n"), "tau"));
}

TEST_CASE("errors carry line numbers") {
  CHECK(contains(error_of(std::string(kDefaults) + "colour = red\n"), "line 12: unknown key 'colour'"));
  CHECK(contains(error_of(std::string(kDefaults) + "[laser]\n"), "line 12: unknown section [laser]"));
  std::string neg = kDefaults;
  neg.replace(neg.find("tau = 1.94"), 10, "tau = -1");
  CHECK(contains(error_of(neg), "line 5:"));
  CHECK(contains(error_of(neg), "out of range"));
  std::string dup = std::string(kDefaults) + "mu = 2\n";
  CHECK(contains(error_of(dup), "line 12: duplicate key 'mu'"));
  CHECK(contains(error_of(std::string(kDefaults) + "[run]\nworkers = 0\n"), "line 13:"));
  CHECK(contains(error_of(std::string(kDefaults) + "[run]\nworkers = two\n"), "not an integer"));
  CHECK(contains(error_of(std::string(kDefaults) + "[amplitudes]\nselectors = M0, M7\n"), "line 13:"));
  CHECK(contains(error_of(std::string(kDefaults) + "[grid]\nkind = axis\nn_pt = 5\n"), "line 14:"));
  CHECK(contains(error_of("E0 = 1\n"), "line 1: key outside of any section"));
  std::string narrow = kDefaults;
  narrow.replace(narrow.find("[potential]"), 11, "window_tau = 3\n[potential]");
  CHECK(contains(error_of(narrow), "does not contain the pulse"));
}

TEST_CASE("wavelength and period must agree") {
  const std::string base = kDefaults;
  const std::string ok = base.substr(0, base.find("tau")) + "wavelength_nm = 72\n" + base.substr(base.find("tau"));
  const RunConfig c = parse_config(ok);
  CHECK(c.omega == omega_from_period_as(240.0));
  CHECK(c.wavelength_nm.value() == 72.0);
  CHECK(echo_config(parse_config(echo_config(c))) == echo_config(c));

  const std::string bad = base.substr(0, base.find("tau")) + "wavelength_nm = 80\n" + base.substr(base.find("tau"));
  const std::string e = error_of(bad);
  CHECK(contains(e, "line 5:"));
  CHECK(contains(e, "disagree"));

  std::string only_lambda = kDefaults;
  only_lambda.replace(only_lambda.find("period_as = 240"), 15, "wavelength_nm = 72");
  CHECK(parse_config(only_lambda).omega == omega_from_wavelength_nm(72.0));
}

TEST_CASE("config files") {
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
  const std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << kDefaults;
  }
  CHECK(load_config(path).E0 == 10.0);
}

TEST_CASE("figure preset") {
  const RunConfig c = paper_figures_config();
  CHECK(c.ceps.size() == 2);
  CHECK(c.ceps[1] == std::numbers::pi / 2);
  REQUIRE(c.grids.size() == 2);
  CHECK(c.grids[0].grid.size() == 321);
  CHECK(c.grids[1].grid.pz.size() == 161);
  CHECK(c.grids[1].grid.pt.size() == 81);
  CHECK(c.selectors.size() == 3);
  CHECK(c.run_name == "paper");
  const std::string echo = echo_config(c);
  CHECK(echo_config(parse_config(echo)) == echo);
}
