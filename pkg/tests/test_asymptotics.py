import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftedschur import constants, saddle_z0, tau1_closed_form
from shiftedschur.asymptotics import (c_alternative, saddle_equation, sigma_prime, sigma_second,
                                      sigma_third_closed)
from shiftedschur.errors import DomainError, ValidationError

GRID = [(a, t) for a in (0.1, 0.3, 0.5, 0.7, 0.9) for t in (0.5, 0.8, 1.0, 1.25, 2.0) if a * a < t < 1 / (a * a)]


def _z0_mp(a, tau):
    """Saddle point refined in 50-digit arithmetic from the float root."""
    mpmath.mp.dps = 50
    a, tau = mpmath.mpf(a), mpmath.mpf(tau)
    f = lambda z: tau * (1 + a * a * z * z) / (1 - a * a * z * z) ** 2 - (a * a + z * z) / (z * z - a * a) ** 2
    return mpmath.findroot(f, mpmath.mpf(saddle_z0(float(a), float(tau))))


def test_square_case_saddle_is_one():
    for a in (0.1, 0.5, 0.9):
        assert saddle_z0(a, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert saddle_equation(1.0, a, 1.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("a,tau", GRID)
def test_saddle_against_high_precision(a, tau):
    z0 = saddle_z0(a, tau)
    assert a < z0 < 1 / a
    assert z0 == pytest.approx(float(_z0_mp(a, tau)), rel=1e-13)


def test_saddle_equation_increasing():
    a, tau = 0.5, 2.0
    zs = [a + (1 / a - a) * k / 400 for k in range(1, 400)]
    vals = [saddle_equation(z, a, tau) for z in zs]
    assert all(y > x for x, y in zip(vals, vals[1:]))
    assert vals[0] < 0 < vals[-1]
    z0 = saddle_z0(a, tau)
    assert abs(saddle_equation(z0, a, tau)) <= 1e-11 * (1 + abs(saddle_equation(zs[0], a, tau)))


@pytest.mark.parametrize("a,tau", GRID)
def test_double_saddle(a, tau):
    k = constants(a, tau)
    assert abs(sigma_prime(k.z0, a, tau, k.c)) <= 1e-11
    assert abs(sigma_second(k.z0, a, tau, k.c)) <= 1e-9
    assert k.c == pytest.approx(c_alternative(k.z0, a), rel=1e-10)
    assert k.sigma3 > 0 and k.g > 0 and k.c > 0
    assert k.g == pytest.approx((2 / k.sigma3) ** (1 / 3) / k.z0)


@pytest.mark.parametrize("a,tau", GRID)
def test_sigma3_against_mp_derivative(a, tau):
    mpmath.mp.dps = 50
    z0 = _z0_mp(a, tau)
    A, T = mpmath.mpf(a), mpmath.mpf(tau)
    c = 2 * A * z0 * (T / (1 - A * A * z0 * z0) + 1 / (z0 * z0 - A * A))
    sig = lambda z: T * mpmath.log((1 + A * z) / (1 - A * z)) + mpmath.log((z - A) / (z + A)) - c * mpmath.log(z)
    exact = mpmath.diff(sig, z0, 3)
    assert sigma_third_closed(float(z0), a) == pytest.approx(float(exact), rel=1e-12)
    assert constants(a, tau).c == pytest.approx(float(c), rel=1e-12)


def test_closed_forms():
    c1, c2 = tau1_closed_form(0.5)
    assert c1 == pytest.approx(8 / 3, rel=1e-15)
    assert c2 == pytest.approx(2.5625 ** (1 / 3) / 0.75, rel=1e-15)
    k = constants(0.5, 1.0)
    assert k.c1 == pytest.approx(c1, abs=1e-10) and k.c2 == pytest.approx(c2, abs=1e-10)


@given(st.floats(min_value=0.02, max_value=0.98))
def test_closed_forms_match_general_route(a):
    c1, c2 = tau1_closed_form(a)
    k = constants(a, 1.0)
    assert k.c1 == pytest.approx(c1, rel=1e-10)
    assert k.c2 == pytest.approx(c2, rel=1e-10)


def test_small_alpha_limits():
    a = 1e-6
    c1, c2 = tau1_closed_form(a)
    assert c1 / (4 * a) == pytest.approx(1, rel=1e-10)
    assert c2 / (2 * a) ** (1 / 3) == pytest.approx(1, rel=1e-5)


def test_sigma3_positive_on_grid():
    for k in range(1, 10):
        a = k / 10
        for tau in (a * a * 1.01, 0.5, 1.0, 2.0, 0.99 / (a * a)):
            if a * a < tau < 1 / (a * a):
                assert constants(a, tau).sigma3 > 0


def test_domain_errors():
    with pytest.raises(DomainError):
        constants(0.5, 5.0)
    with pytest.raises(DomainError):
        saddle_z0(0.5, 0.2)
    with pytest.raises(ValidationError):
        constants(1.2, 1.0)
    with pytest.raises(ValidationError):
        tau1_closed_form(0.0)


def test_line_format():
    line = constants(0.5, 1.0).line()
    assert [kv.split("=")[0] for kv in line.split()] == ["z0", "c1", "c2", "g", "sigma3"]
    assert float(line.split()[1].split("=")[1]) == pytest.approx(8 / 3)
    assert math.isclose(float(line.split()[0].split("=")[1]), 1.0)
