"""Scalar types and dense linear algebra shared by the other modules.

Three arithmetics are supported throughout:

* exact rationals (``fractions.Fraction``),
* binary64 floats,
* ``XScalar``, a binary64 significand with an unbounded binary exponent,

plus ``gmpy2.mpfr`` multiprecision floats, which the determinant code uses when
cancellation rather than range is the limiting factor.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterator, NamedTuple

import gmpy2
import numpy as np

from .errors import DimensionError, NumericalFailure, ValidationError

Rational = Fraction

_LN2 = math.log(2.0)
_EXP_LIMIT = 2**60
# operands whose binary exponents differ by more than this are not combined
_ALIGN_LIMIT = 80


def as_rational(x) -> Fraction:
    """Convert ints, Fractions and decimal strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str, _RationalABC)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise ValidationError(f"cannot convert {x!r} to a rational")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class XScalar:
    """Extended-range real number ``sign * significand * 2**exponent``.

    The significand is a binary64 value in [1, 2) and the exponent a Python
    int limited to |exponent| <= 2**60, so magnitudes far outside the binary64
    range are representable.  Relative precision is that of binary64.
    """

    sign: int
    significand: float
    exponent: int

    def __post_init__(self):
        if self.sign == 0:
            if self.significand != 0.0 or self.exponent != 0:
                raise ValidationError("zero must be stored as (0, 0.0, 0)")
            return
        if self.sign not in (-1, 1):
            raise ValidationError("sign must be -1, 0 or 1")
        if not 1.0 <= self.significand < 2.0:
            raise ValidationError(f"significand {self.significand} not in [1, 2)")
        if abs(self.exponent) > _EXP_LIMIT:
            raise OverflowError("XScalar exponent out of range")

    @classmethod
    def _make(cls, value: float, exponent: int) -> "XScalar":
        if value == 0.0:
            return XZERO
        if not math.isfinite(value):
            raise NumericalFailure("non-finite significand in XScalar arithmetic")
        m, e = math.frexp(abs(value))
        return cls(1 if value > 0 else -1, m * 2.0, exponent + e - 1)

    @classmethod
    def from_float(cls, x: float) -> "XScalar":
        x = float(x)
        if not math.isfinite(x):
            raise ValidationError("cannot store a non-finite value")
        return cls._make(x, 0)

    @classmethod
    def from_log(cls, logabs: float, sign: int = 1) -> "XScalar":
        """Build ``sign * exp(logabs)``; relative error is about |logabs| * 1e-16."""
        if sign == 0 or logabs == -math.inf:
            return XZERO
        l2 = logabs / _LN2
        e = math.floor(l2)
        return cls._make(sign * 2.0 ** (l2 - e), e)

    @classmethod
    def coerce(cls, x) -> "XScalar":
        if isinstance(x, XScalar):
            return x
        if isinstance(x, Fraction):
            if x == 0:
                return XZERO
            num = cls._from_int(x.numerator)
            return num / cls._from_int(x.denominator)
        if isinstance(x, int):
            return cls._from_int(x)
        if isinstance(x, gmpy2.mpfr(0).__class__):
            if x == 0:
                return XZERO
            e, mant = gmpy2.frexp(x)
            return cls._make(float(mant), int(e))
        return cls.from_float(x)

    @classmethod
    def _from_int(cls, k: int) -> "XScalar":
        if k == 0:
            return XZERO
        shift = max(k.bit_length() - 60, 0)
        return cls._make(float(k >> shift) if k > 0 else -float((-k) >> shift), shift)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return math.ldexp(self.sign * self.significand, self.exponent)
        except OverflowError:
            return self.sign * math.inf

    def log_abs(self) -> float:
        if self.sign == 0:
            return -math.inf
        return math.log(self.significand) + self.exponent * _LN2

    def sqrt(self) -> "XScalar":
        if self.sign < 0:
            raise NumericalFailure("square root of a negative XScalar")
        if self.sign == 0:
            return XZERO
        if self.exponent % 2:
            return XScalar._make(math.sqrt(2.0 * self.significand), (self.exponent - 1) // 2)
        return XScalar._make(math.sqrt(self.significand), self.exponent // 2)

    def __neg__(self):
        if self.sign == 0:
            return self
        return XScalar(-self.sign, self.significand, self.exponent)

    def __abs__(self):
        return XScalar(abs(self.sign), self.significand, self.exponent)

    def __bool__(self):
        return self.sign != 0

    def __add__(self, other):
        b = XScalar.coerce(other)
        a = self
        if a.sign == 0:
            return b
        if b.sign == 0:
            return a
        if a.exponent < b.exponent:
            a, b = b, a
        d = a.exponent - b.exponent
        if d > _ALIGN_LIMIT:
            return a
        v = a.sign * a.significand + math.ldexp(b.sign * b.significand, -d)
        return XScalar._make(v, a.exponent)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-XScalar.coerce(other))

    def __rsub__(self, other):
        return XScalar.coerce(other) + (-self)

    def __mul__(self, other):
        b = XScalar.coerce(other)
        if self.sign == 0 or b.sign == 0:
            return XZERO
        return XScalar._make(self.sign * b.sign * self.significand * b.significand,
                             self.exponent + b.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = XScalar.coerce(other)
        if b.sign == 0:
            raise ZeroDivisionError("XScalar division by zero")
        if self.sign == 0:
            return XZERO
        return XScalar._make(self.sign * b.sign * self.significand / b.significand,
                             self.exponent - b.exponent)

    def __rtruediv__(self, other):
        return XScalar.coerce(other) / self

    def _cmp_key(self):
        if self.sign == 0:
            return (0, 0, 0.0)
        return (self.sign, self.sign * self.exponent, self.sign * self.significand)

    def __eq__(self, other):
        try:
            b = XScalar.coerce(other)
        except (ValidationError, TypeError):
            return NotImplemented
        return (self.sign, self.significand, self.exponent) == (b.sign, b.significand, b.exponent)

    def __hash__(self):
        return hash((self.sign, self.significand, self.exponent))

    def __lt__(self, other):
        return self._cmp_key() < XScalar.coerce(other)._cmp_key()

    def __le__(self, other):
        return self._cmp_key() <= XScalar.coerce(other)._cmp_key()

    def __gt__(self, other):
        return self._cmp_key() > XScalar.coerce(other)._cmp_key()

    def __ge__(self, other):
        return self._cmp_key() >= XScalar.coerce(other)._cmp_key()

    def __repr__(self):
        if self.sign == 0:
            return "XScalar(0)"
        return f"XScalar({self.sign * self.significand!r} * 2**{self.exponent})"


XZERO = XScalar(0, 0.0, 0)
XONE = XScalar(1, 1.0, 0)

_MPFR = type(gmpy2.mpfr(0))


@contextmanager
def mp_precision(bits: int) -> Iterator[None]:
    """Run a block with gmpy2 arithmetic at ``bits`` bits of precision."""
    with gmpy2.context(gmpy2.get_context(), precision=int(bits)):
        yield


def to_mpfr(x):
    """Convert a Fraction, int, float or XScalar to mpfr at the current precision."""
    if isinstance(x, XScalar):
        if x.sign == 0:
            return gmpy2.mpfr(0)
        return gmpy2.mul_2exp(gmpy2.mpfr(x.sign * x.significand), x.exponent)
    if isinstance(x, Fraction):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
    return gmpy2.mpfr(x)


def _as_square(M, name="matrix") -> np.ndarray:
    arr = np.asarray(M, dtype=object if _is_object_like(M) else float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def _is_object_like(M) -> bool:
    if isinstance(M, np.ndarray):
        return M.dtype == object
    for row in M:
        for x in row:
            if not isinstance(x, (float, np.floating)) and not (isinstance(x, int) and not isinstance(x, bool)):
                return True
    return False


def _check_finite(arr: np.ndarray) -> None:
    if arr.dtype == object:
        for x in arr.flat:
            if isinstance(x, float) and not math.isfinite(x):
                raise ValidationError("matrix contains a non-finite entry")
            if isinstance(x, _MPFR) and not gmpy2.is_finite(x):
                raise ValidationError("matrix contains a non-finite entry")
    elif not np.all(np.isfinite(arr)):
        raise ValidationError("matrix contains a non-finite entry")


def pfaffian(A):
    """Pfaffian of an even-order skew-symmetric matrix.

    Uses skew-symmetric Gaussian elimination with pivoting (Parlett-Reid style).
    Entries may be Fractions (the result is exact), floats, XScalars or mpfr;
    the arithmetic of the entries is the arithmetic of the result.
    """
    arr = _as_square(A, "Pfaffian argument")
    d = arr.shape[0]
    if d % 2:
        raise DimensionError("Pfaffian needs an even-order matrix")
    _check_finite(arr)
    exact = arr.dtype == object and all(is_exact(x) for x in arr.flat)
    if exact:
        arr = np.array([[Fraction(x) for x in row] for row in arr], dtype=object)
        if any(arr[i, j] != -arr[j, i] for i in range(d) for j in range(d)):
            raise ValidationError("matrix is not skew-symmetric")
    else:
        scale = max((abs(x) for x in arr.flat), default=0)
        for i in range(d):
            for j in range(i, d):
                if abs(arr[i, j] + arr[j, i]) > 1e-12 * scale:
                    raise ValidationError("matrix is not skew-symmetric")
        arr = arr.copy()
    one = Fraction(1) if exact else (arr[0, 0] * 0 + 1 if d else 1.0)
    if d == 0:
        return one
    pf = one
    for k in range(0, d - 1, 2):
        col = arr[k + 1:, k]
        kp = k + 1 + max(range(len(col)), key=lambda i: abs(col[i]))
        if kp != k + 1:
            arr[[k + 1, kp], :] = arr[[kp, k + 1], :]
            arr[:, [k + 1, kp]] = arr[:, [kp, k + 1]]
            pf = -pf
        if arr[k + 1, k] == 0:
            return pf * 0
        pf = pf * arr[k, k + 1]
        if k + 2 < d:
            tau = arr[k, k + 2:] / arr[k, k + 1]
            arr[k + 2:, k + 2:] = (arr[k + 2:, k + 2:]
                                   + np.multiply.outer(tau, arr[k + 2:, k + 1])
                                   - np.multiply.outer(arr[k + 2:, k + 1], tau))
    return pf


class LogDet(NamedTuple):
    """Sign and natural log of |det|; ``suspect`` marks numerically singular results."""

    sign: int
    logabs: float
    suspect: bool = False


def _log_abs(x):
    if isinstance(x, XScalar):
        return x.log_abs()
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    if isinstance(x, _MPFR):
        return gmpy2.log(abs(x))
    return math.log(abs(x))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def lu_pivots(M) -> tuple[int, list]:
    """Partial-pivoting LU of a square object or float matrix.

    Returns the permutation sign and the list of pivots; an exactly singular
    matrix gives sign 0 and the pivots found so far.
    """
    arr = _as_square(M).copy()
    n = arr.shape[0]
    sign = 1
    pivots = []
    for k in range(n):
        col = arr[k:, k]
        p = k + max(range(n - k), key=lambda i: abs(col[i]))
        if arr[p, k] == 0:
            return 0, pivots
        if p != k:
            arr[[k, p], :] = arr[[p, k], :]
            sign = -sign
        piv = arr[k, k]
        pivots.append(piv)
        if k + 1 < n:
            f = arr[k + 1:, k] / piv
            arr[k + 1:, k + 1:] = arr[k + 1:, k + 1:] - np.multiply.outer(f, arr[k, k + 1:])
    return sign, pivots


def sign_logdet(M) -> LogDet:
    """Sign and log-magnitude of a determinant.

    Float matrices go through LAPACK's pivoted LU; object matrices (XScalar,
    Fraction, mpfr) through a pure-Python partial-pivoting LU in their own
    arithmetic.  A singular matrix gives ``(0, -inf)``.  The ``suspect`` flag
    is set when |det| falls below 2**-60 times the Hadamard bound.
    """
    arr = _as_square(M)
    _check_finite(arr)
    n = arr.shape[0]
    if n == 0:
        return LogDet(1, 0.0, False)
    if arr.dtype != object:
        s, logabs = np.linalg.slogdet(arr)
        if s == 0:
            return LogDet(0, -math.inf, True)
        rows = np.linalg.norm(arr, axis=1)
        hadamard = float(np.sum(np.log(rows)))
        return LogDet(int(s), float(logabs), logabs - hadamard < -60 * _LN2)
    sign, pivots = lu_pivots(arr)
    if sign == 0:
        return LogDet(0, -math.inf, True)
    logabs = 0.0
    for p in pivots:
        sign *= _sign(p)
        logabs += float(_log_abs(p))
    hadamard = 0.0
    for row in arr:
        sq = sum((x * x for x in row[1:]), row[0] * row[0])
        if sq == 0:
            return LogDet(0, -math.inf, True)
        hadamard += 0.5 * float(_log_abs(sq))
    suspect = logabs - hadamard < -60 * _LN2
    return LogDet(sign, logabs, suspect)


def det_exact(M) -> Fraction:
    """Exact determinant of a matrix of ints or Fractions."""
    arr = _as_square(np.asarray(M, dtype=object), "determinant argument")
    if not all(is_exact(x) for x in arr.flat):
        raise ValidationError("det_exact needs integer or Fraction entries")
    arr = np.array([[Fraction(x) for x in row] for row in arr], dtype=object).reshape(arr.shape)
    sign, pivots = lu_pivots(arr)
    out = Fraction(sign)
    for p in pivots:
        out *= p
    return out if sign else Fraction(0)


def nested_leading_logdets(X, Y) -> list[tuple[int, object]]:
    """``(sign, log|det|)`` of ``I - X_h Y_h`` for every leading order h+1.

    ``X_h`` is the leading (h+1)x(h+1) block of X.  The block matrix
    ``[[I, X], [Y, I]]`` with rows and columns interleaved has the wanted
    determinants as its even leading principal minors, so one elimination
    with pivoting restricted to each 2x2 diagonal block yields all of them.
    Log magnitudes are returned in the arithmetic of the entries.
    """
    X = np.asarray(X, dtype=object)
    Y = np.asarray(Y, dtype=object)
    if X.shape != Y.shape or X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError("X and Y must be square and of equal shape")
    N = X.shape[0]
    one = X[0, 0] * 0 + 1
    zero = one * 0
    G = np.empty((2 * N, 2 * N), dtype=object)
    G[0::2, 0::2] = zero
    G[1::2, 1::2] = zero
    for i in range(N):
        G[2 * i, 2 * i] = one
        G[2 * i + 1, 2 * i + 1] = one
    G[0::2, 1::2] = X
    G[1::2, 0::2] = Y
    out = []
    parity = 1
    total_sign = 1
    total_log = zero
    for h in range(N):
        k = 2 * h
        i, j = max(((a, b) for a in (0, 1) for b in (0, 1)),
                   key=lambda ab: abs(G[k + ab[0], k + ab[1]]))
        if G[k + i, k + j] == 0:
            raise NumericalFailure(f"vanishing leading block at order {h + 1}")
        if i:
            G[[k, k + 1], :] = G[[k + 1, k], :]
            parity = -parity
        if j:
            G[:, [k, k + 1]] = G[:, [k + 1, k]]
            parity = -parity
        p1 = G[k, k]
        f = G[k + 1:, k] / p1
        G[k + 1:, k + 1:] = G[k + 1:, k + 1:] - np.multiply.outer(f, G[k, k + 1:])
        p2 = G[k + 1, k + 1]
        if p2 == 0:
            raise NumericalFailure(f"singular leading block at order {h + 1}")
        if k + 2 < 2 * N:
            f = G[k + 2:, k + 1] / p2
            G[k + 2:, k + 2:] = G[k + 2:, k + 2:] - np.multiply.outer(f, G[k + 1, k + 2:])
        block = p1 * p2
        total_sign *= _sign(block)
        total_log = total_log + _log_abs(block)
        out.append((total_sign * parity, total_log))
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        half = 0.5 * (b - a)
        x = 0.5 * (b + a) + half * self.nodes
        return float(half * np.dot(self.weights, f(x)))


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule, exact for polynomials of degree < 2n."""
    if int(n) != n or n < 1:
        raise ValidationError("quadrature order must be a positive integer")
    nodes, weights = np.polynomial.legendre.leggauss(int(n))
    return QuadratureRule(int(n), nodes, weights)


def matmul(A, B):
    """Matrix product that also works for object arrays."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.dtype == object or B.dtype == object:
        return np.dot(A.astype(object), B.astype(object))
    return A @ B


def eye_like(n: int, one) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    zero = one * 0
    out[:] = zero
    for i in range(n):
        out[i, i] = one
    return out
