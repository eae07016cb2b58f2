import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftedschur.errors import DimensionError, ValidationError
from shiftedschur.numkernel import (XONE, XZERO, XScalar, as_rational, det_exact, gauss_legendre,
                                    mp_precision, nested_leading_logdets, pfaffian, sign_logdet, to_mpfr)

finite = st.floats(min_value=-1e150, max_value=1e150, allow_nan=False).filter(lambda x: abs(x) > 1e-150 or x == 0)
small_int = st.integers(min_value=-5, max_value=5)


def _skew(rng, d, lo=-4, hi=5):
    A = np.zeros((d, d), dtype=object)
    for i in range(d):
        for j in range(i + 1, d):
            v = Fraction(int(rng.integers(lo, hi)), int(rng.integers(1, 4)))
            A[i, j], A[j, i] = v, -v
    return A


# XScalar

@given(finite)
def test_xscalar_roundtrip(x):
    assert float(XScalar.from_float(x)) == x


@given(finite, finite)
def test_xscalar_arithmetic_matches_float(x, y):
    X, Y = XScalar.from_float(x), XScalar.from_float(y)
    assert float(X * Y) == pytest.approx(x * y, rel=1e-15, abs=1e-300)
    assert float(X + Y) == pytest.approx(x + y, rel=1e-15, abs=1e-12 * max(abs(x), abs(y)))
    if y != 0:
        assert float(X / Y) == pytest.approx(x / y, rel=1e-15)
    assert (X < Y) == (x < y)


def test_xscalar_beyond_binary64():
    big = XScalar.from_log(1000.0)
    assert (big * big).log_abs() == pytest.approx(2000.0, rel=1e-15)
    assert float(big * big) == math.inf
    assert (big * big / big).log_abs() == pytest.approx(1000.0, rel=1e-15)
    assert big.sqrt().log_abs() == pytest.approx(500.0, rel=1e-15)
    assert float(XScalar.from_log(-1000.0)) == 0.0


def test_xscalar_constants_and_coercion():
    assert float(XONE) == 1.0 and float(XZERO) == 0.0 and not XZERO
    assert float(XScalar.coerce(Fraction(3, 8))) == 0.375
    assert float(XScalar.coerce(10**400) / XScalar.coerce(10**399)) == pytest.approx(10.0)
    assert float(-XScalar.from_float(2.5)) == -2.5


def test_as_rational():
    assert as_rational(0.25) == Fraction(1, 4)
    assert as_rational("3/7") == Fraction(3, 7)


# Pfaffian

def test_pfaffian_small_cases():
    assert pfaffian(np.zeros((0, 0))) == 1
    a = Fraction(5, 3)
    assert pfaffian(np.array([[0, a], [-a, 0]], dtype=object)) == a
    # af - be + cd for the generic 4x4 matrix
    a, b, c, d, e, f = (Fraction(k) for k in (2, 3, 5, 7, 11, 13))
    M = np.array([[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]], dtype=object)
    assert pfaffian(M) == a * f - b * e + c * d


def test_pfaffian_rejects_bad_input():
    with pytest.raises(DimensionError):
        pfaffian(np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        pfaffian(np.array([[0, 1], [1, 0]], dtype=object))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=2**32))
def test_pfaffian_squared_is_determinant(half, seed):
    A = _skew(np.random.default_rng(seed), 2 * half)
    det = sympy.Matrix(A.tolist()).det()
    assert pfaffian(A) ** 2 == Fraction(int(det.p), int(det.q))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=2**32))
def test_pfaffian_congruence(half, seed):
    rng = np.random.default_rng(seed)
    d = 2 * half
    A = _skew(rng, d)
    B = np.array([[Fraction(int(rng.integers(-3, 4))) for _ in range(d)] for _ in range(d)], dtype=object)
    assert pfaffian(B.T.dot(A).dot(B)) == det_exact(B) * pfaffian(A)


def test_pfaffian_float_and_mp_agree_with_exact():
    A = _skew(np.random.default_rng(3), 8)
    exact = pfaffian(A)
    assert pfaffian(np.array(A, dtype=float)) == pytest.approx(float(exact), rel=1e-12)
    with mp_precision(200):
        mp = pfaffian(np.vectorize(to_mpfr, otypes=[object])(A))
        assert abs(mp - gmpy2.mpq(exact.numerator, exact.denominator)) < gmpy2.mpfr(2) ** -150


# determinants

@settings(max_examples=40, deadline=None)
@given(st.lists(small_int, min_size=16, max_size=16))
def test_det_exact_matches_sympy(entries):
    M = np.array(entries, dtype=object).reshape(4, 4)
    assert det_exact(M) == int(sympy.Matrix(M.tolist()).det())


def test_sign_logdet_float_and_object():
    rng = np.random.default_rng(11)
    M = rng.normal(size=(6, 6))
    d = np.linalg.det(M)
    ld = sign_logdet(M)
    assert ld.sign == np.sign(d) and ld.logabs == pytest.approx(math.log(abs(d)))
    obj = np.array([[Fraction(x) for x in row] for row in M], dtype=object)
    lo = sign_logdet(obj)
    assert lo.sign == ld.sign and lo.logabs == pytest.approx(ld.logabs, rel=1e-12)
    xs = np.vectorize(XScalar.from_float, otypes=[object])(M)
    lx = sign_logdet(xs)
    assert lx.sign == ld.sign and lx.logabs == pytest.approx(ld.logabs, rel=1e-12)


def test_sign_logdet_huge_entries_in_xscalar():
    M = np.array([[XScalar.from_log(800.0), XZERO], [XZERO, XScalar.from_log(900.0)]], dtype=object)
    ld = sign_logdet(M)
    assert ld.sign == 1 and ld.logabs == pytest.approx(1700.0)


def test_sign_logdet_singular():
    ld = sign_logdet(np.array([[1, 2], [2, 4]], dtype=object))
    assert ld.sign == 0 and ld.logabs == -math.inf


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32))
def test_nested_leading_logdets_match_direct(N, seed):
    rng = np.random.default_rng(seed)
    X = np.array([[Fraction(int(v), 7) for v in row] for row in rng.integers(-6, 7, (N, N))], dtype=object)
    Y = np.array([[Fraction(int(v), 5) for v in row] for row in rng.integers(-6, 7, (N, N))], dtype=object)
    for h, (sign, logabs) in enumerate(nested_leading_logdets(X, Y)):
        k = h + 1
        d = det_exact(np.eye(k, dtype=int).astype(object) - X[:k, :k].dot(Y[:k, :k]))
        if d == 0:
            continue
        assert sign == (1 if d > 0 else -1)
        assert float(logabs) == pytest.approx(math.log(abs(d)), rel=1e-12, abs=1e-12)


# quadrature

@pytest.mark.parametrize("n", [1, 3, 8, 20])
def test_gauss_legendre_exact_for_polynomials(n):
    rule = gauss_legendre(n)
    assert rule.weights.sum() == pytest.approx(2.0)
    for deg in range(2 * n):
        expect = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert rule.integrate(lambda x: x ** deg) == pytest.approx(expect, abs=1e-13)


def test_gauss_legendre_interval():
    assert gauss_legendre(10).integrate(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    with pytest.raises(ValidationError):
        gauss_legendre(0)
