import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftedschur import MeasureParams, Seed, exact_distribution_small, poisson_L, sample_lambda1_batch, sample_matrix
from shiftedschur.errors import SizeGuardError, ValidationError
from shiftedschur.gessel import cdf_table
from shiftedschur.sampler import (entry_pmf, poisson_L_direct, poisson_L_symmetric, poisson_points,
                                  sample_lambda1, _draw)


def test_entry_pmf_values():
    assert entry_pmf(0.5, 0, False) == pytest.approx(0.6)
    assert entry_pmf(0.5, 1, False) + entry_pmf(0.5, 1, True) == pytest.approx(0.3)
    assert entry_pmf(0.5, 0, True) == 0
    a = Fraction(1, 3)
    assert entry_pmf(a, 2, True) == Fraction(8, 10) * Fraction(1, 81)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100),
       st.integers(min_value=0, max_value=30))
def test_entry_pmf_normalization(a, K):
    q = a * a
    total = entry_pmf(a, 0, False) + sum(entry_pmf(a, k, mk) for k in range(1, K + 1) for mk in (False, True))
    assert total + 2 * q ** (K + 1) / (1 + q) == 1


def test_params_validation():
    with pytest.raises(ValidationError):
        MeasureParams(0, 2, 0.5)
    with pytest.raises(ValidationError):
        MeasureParams(2, 2, 1.0)
    assert MeasureParams(3, 6, "1/2").tau == Fraction(1, 2)
    with pytest.raises(ValidationError):
        Seed(-1)


def test_sampler_determinism():
    p = MeasureParams(4, 5, 0.5)
    assert sample_matrix(p, Seed(11, 3)) == sample_matrix(p, Seed(11, 3))
    assert sample_matrix(p, Seed(11, 3)) != sample_matrix(p, Seed(11, 4))
    batch = sample_lambda1_batch(p, 11, 20)
    singles = [sample_lambda1(p, Seed(11, k)) for k in range(20)]
    assert batch.tolist() == singles
    assert sample_lambda1_batch(p, 11, 10, start=10).tolist() == singles[10:]


def test_zero_frequency():
    rng = Seed(5).generator()
    zeros = draws = 0
    for _ in range(10):
        vals, marks = _draw(MeasureParams(100, 100, 0.5), rng)
        zeros += int((vals == 0).sum())
        draws += vals.size
        assert not (marks & (vals == 0)).any()
    se = math.sqrt(0.6 * 0.4 / draws)
    assert abs(zeros / draws - 0.6) < 4 * se


def test_entry_law_chi_square():
    a = 0.6
    vals, marks = _draw(MeasureParams(200, 200, a), Seed(9).generator())
    n = vals.size
    for k in range(0, 4):
        for mk in ((False,) if k == 0 else (False, True)):
            obs = int(((vals == k) & (marks == mk)).sum())
            p = entry_pmf(a, k, mk)
            assert abs(obs - n * p) < 5 * math.sqrt(n * p * (1 - p))


def test_small_alpha_gives_zero_matrix():
    p = MeasureParams(3, 3, 0.01)
    zeros = sum(sample_matrix(p, Seed(1, k)).values.sum() == 0 for k in range(2000))
    # P(all zero) = ((1 - q)/(1 + q))^9 ~ 0.9982
    assert zeros >= 0.99 * 2000


def test_one_cell_batch():
    a = 0.5
    reps = 20000
    vals = sample_lambda1_batch(MeasureParams(1, 1, a), 3, reps)
    p0 = (1 - a * a) / (1 + a * a)
    assert abs(np.mean(vals == 0) - p0) < 4 * math.sqrt(p0 * (1 - p0) / reps)


def test_exact_distribution_one_cell():
    a = 0.5
    q = a * a
    ex = exact_distribution_small(MeasureParams(1, 1, a), 12)
    for h in range(13):
        assert ex.cdf(h) == pytest.approx(1 - 2 * q ** (h + 1) / (1 + q), abs=1e-15)
    assert ex.tail_bound == pytest.approx(2 * q ** 13 / (1 + q))


def test_exact_distribution_properties():
    p = MeasureParams(2, 2, Fraction(1, 4))
    ex = exact_distribution_small(p, 8)
    assert ex.tail_bound < 1e-9
    cdf = [ex.cdf(h) for h in range(max(ex.pmf) + 1)]
    assert all(b >= a for a, b in zip(cdf, cdf[1:]))
    assert sum(ex.pmf.values()) + ex.tail_bound >= 1 - 1e-15
    table = cdf_table(p, 10)
    assert all(abs(ex.cdf(h) - table[h]) <= ex.tail_bound + 1e-10 for h in range(11))


def test_exact_distribution_guard():
    with pytest.raises(SizeGuardError):
        exact_distribution_small(MeasureParams(3, 3, 0.5), 8)


def test_monte_carlo_against_exact_law():
    p = MeasureParams(2, 2, 0.25)
    reps = 100_000
    vals = sample_lambda1_batch(p, 2024, reps)
    ex = exact_distribution_small(p, 8)
    band = math.sqrt(math.log(2 / 1e-4) / (2 * reps))   # DKW band at level 1e-4
    worst = max(abs(np.mean(vals <= h) - ex.cdf(h)) for h in range(max(ex.pmf) + 1))
    assert worst <= band


# Poisson limit

def test_poisson_trivial_cases():
    assert poisson_L(0.0, Seed(1)) == 0
    pts = np.array([[0.3, 0.4]])
    assert poisson_L_direct(pts) == poisson_L_symmetric(pts) == 1
    assert poisson_L_direct(np.zeros((0, 2))) == 0


def test_poisson_hand_configuration():
    # up-left chain (0.8,0.1), (0.5,0.2), then up-right (0.6,0.3), (0.9,0.4)
    pts = np.array([[0.8, 0.1], [0.5, 0.2], [0.6, 0.3], [0.9, 0.4]])
    assert poisson_L_direct(pts) == poisson_L_symmetric(pts) == 4


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.5, max_value=8.0), st.integers(min_value=0, max_value=2**32))
def test_poisson_routes_agree(t, seed):
    pts = poisson_points(t, Seed(seed))
    assert poisson_L_direct(pts) == poisson_L_symmetric(pts)


def test_poisson_point_count():
    t = 5.0
    counts = [len(poisson_points(t, Seed(3, k))) for k in range(400)]
    assert abs(np.mean(counts) - 2 * t * t) < 4 * math.sqrt(2 * t * t / 400)
