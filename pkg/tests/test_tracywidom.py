import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from shiftedschur import airy_ai, airy_ai_prime, airy_kernel, f2
from shiftedschur.errors import ValidationError
from shiftedschur.tracywidom import airy_eval, f2_block_det, f2_density, ks_against_f2, tw_median


@pytest.mark.parametrize("x", np.linspace(-12, 12, 241))
def test_airy_against_scipy(x):
    ai, aip, _, _ = scipy.special.airy(x)
    v = airy_eval(x)
    assert v.accurate
    assert abs(v.ai - ai) <= 1e-10 and abs(v.aip - aip) <= 1e-10


@given(st.floats(min_value=-30, max_value=30))
def test_airy_wide_range(x):
    ai, aip, _, _ = scipy.special.airy(x)
    scale = max(1.0, abs(x)) ** 0.25
    assert abs(airy_ai(x) - ai) <= 1e-9 * scale
    assert abs(airy_ai_prime(x) - aip) <= 1e-9 * scale * max(1.0, abs(x)) ** 0.5


@pytest.mark.parametrize("x", np.linspace(0, 12, 97))
def test_airy_relative_accuracy_on_decay_side(x):
    ai, aip, _, _ = scipy.special.airy(x)
    assert airy_ai(x) == pytest.approx(ai, rel=1e-13)
    assert airy_ai_prime(x) == pytest.approx(aip, rel=1e-13)


def test_airy_origin():
    assert airy_ai(0.0) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-15)


def test_airy_flags_and_vectors():
    assert not airy_eval(13.0).accurate and not airy_eval(-20.0).accurate
    xs = np.array([[0.0, 1.0], [-2.0, 3.0]])
    assert airy_ai(xs).shape == (2, 2)
    assert airy_ai(xs)[1, 0] == airy_ai(-2.0)
    with pytest.raises(ValidationError):
        airy_eval(math.nan)


def test_airy_decay():
    xs = np.linspace(1, 12, 56)
    v = airy_ai(xs)
    assert np.all(v > 0) and np.all(np.diff(v) < 0)
    assert np.all(airy_ai(np.linspace(0, 12, 49)) > 0)


def test_airy_ode_residual():
    h = 1e-3
    for x in np.linspace(-8, 8, 33):
        f = [airy_ai(x + k * h) for k in (-2, -1, 0, 1, 2)]
        second = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        assert abs(second - x * f[2]) <= 1e-6


def test_kernel_symmetry_and_diagonal():
    for x, y in [(-3.0, 1.5), (0.2, -0.7), (4.0, 2.0)]:
        assert airy_kernel(x, y) == pytest.approx(airy_kernel(y, x), rel=1e-14)
    for x in np.linspace(-6, 3, 19):
        d = 1e-4
        off = airy_kernel(x - d / 2, x + d / 2)
        assert airy_kernel(x, x) == pytest.approx(off, abs=1e-7)
    assert all(airy_kernel(x, x) > 0 for x in np.linspace(-10, 0, 21))


def test_kernel_diagonal_matches_integral_form():
    # K(x, x) = int_x^inf Ai(t)^2 dt
    import scipy.integrate
    for x in (-2.0, 0.0, 1.5):
        val, _ = scipy.integrate.quad(lambda t: scipy.special.airy(t)[0] ** 2, x, np.inf)
        assert airy_kernel(x, x) == pytest.approx(val, rel=1e-9)


def test_f2_basic_properties():
    assert f2(6.0) >= 1 - 1e-8
    assert f2(-6.0) <= 1e-4 and f2(4.0) >= 1 - 1e-5
    grid = np.linspace(-8, 5, 60)
    vals = [f2(s) for s in grid]
    assert all(0 <= v <= 1 for v in vals) and all(b >= a for a, b in zip(vals, vals[1:]))


def test_f2_order_consistency():
    for s in np.linspace(-6, 4, 21):
        assert abs(f2(s, 40) - f2(s, 80)) <= 1e-9


def test_f2_reference_values():
    # standard values for the GUE law: median -1.8049, mean -1.7711
    assert tw_median() == pytest.approx(-1.8049, abs=2e-4)
    assert -2.0 < tw_median() < -1.5
    mean = sum(s * f2_density(s) * 0.05 for s in np.arange(-8, 6, 0.05))
    assert mean == pytest.approx(-1.7711, abs=2e-3)


def test_block_determinant_is_square():
    for s in (-4.0, -1.0, 1.0):
        assert f2_block_det(s) == pytest.approx(f2(s) ** 2, abs=1e-12)


def test_f2_validation():
    with pytest.raises(ValidationError):
        f2(0.0, order=10)
    with pytest.raises(ValidationError):
        f2(math.inf)


def test_ks_against_f2():
    # samples placed at quantiles of the rescaled law have a small distance
    c1, c2, n = 2.0, 1.0, 1000
    scale = c2 * n ** (1 / 3)
    grid = np.arange(int(c1 * n - 8 * scale), int(c1 * n + 6 * scale))
    cdf = np.array([f2((h + 0.5 - c1 * n) / scale) for h in grid])
    u = (np.arange(2000) + 0.5) / 2000
    samples = grid[np.searchsorted(cdf, u)]
    assert ks_against_f2(samples, c1, c2, n) < 0.01
    assert ks_against_f2(samples + 10, c1, c2, n) > 0.3
    with pytest.raises(ValidationError):
        ks_against_f2([], c1, c2, n)
