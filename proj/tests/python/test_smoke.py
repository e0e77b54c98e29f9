import cmath
import math

import pytest

import gisfa


@pytest.fixture(scope="module")
def state():
    return gisfa.solve_bound_state()


@pytest.fixture(scope="module")
def momenta(state):
    return gisfa.MomentumTables(state)


@pytest.fixture(scope="module")
def engine(momenta):
    pulse = gisfa.PulseTables(gisfa.PulseParams(0.0))
    return gisfa.AmplitudeEngine(pulse, momenta, spec=gisfa.QuadratureSpec(512, 32, 16))


def test_omega_from_period():
    assert gisfa.omega_from_period_as(240.0) == pytest.approx(0.633262, abs=1e-6)


def test_vector_potential_closed_form():
    p = gisfa.PulseParams(math.pi / 2)
    assert gisfa.vector_potential(0.0, p) == pytest.approx(p.E0 / p.omega, rel=1e-14)
    tables = gisfa.PulseTables(p)
    assert tables.A(0.0) == pytest.approx(p.E0 / p.omega, rel=1e-9)


def test_bound_state(state, momenta):
    assert state.energy == pytest.approx(-0.0277026, abs=1e-6)
    assert state.interior_nodes == 0
    assert momenta.norm == pytest.approx(1.0, abs=1e-6)


def test_amplitudes(engine):
    a = engine.m0(0.5, 0.1)
    b = engine.m0_in_gauge(0.5, 0.1, 1.0)
    assert abs(a - b) < 1e-10 * abs(a)
    assert abs(engine.m0(0.7)) == pytest.approx(abs(engine.m0(-0.7)), rel=1e-12)
    value, error = engine.m1(0.5)
    assert cmath.isfinite(value)
    assert error >= 0.0
    sfa, _ = engine.sfa(0.5, gamma=0.0)
    assert cmath.isfinite(sfa)


def test_config_round_trip():
    text = """
[pulse]
E0 = 10
period_as = 240
tau = 1.94
cep = 0, pi/2

[potential]
d = 1
g = 1
mu = 1.56
"""
    c = gisfa.parse_config(text)
    assert c.ceps == pytest.approx([0.0, math.pi / 2])
    assert gisfa.echo_config(gisfa.parse_config(gisfa.echo_config(c))) == gisfa.echo_config(c)


def test_config_errors_raise():
    with pytest.raises(gisfa.ConfigError):
        gisfa.parse_config("[pulse]\nwavelength = 3\n")
