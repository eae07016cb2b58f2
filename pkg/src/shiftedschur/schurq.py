"""Schur Q-functions of specialized variables.

``q_k`` are the coefficients of ``prod_i (1 + t x_i) / (1 - t x_i)``;
``Q_(r,s)`` and ``Q_lambda`` (a Pfaffian of two-row functions) are built from
them.  A tableau enumerator gives an independent combinatorial value for
small shapes.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CutoffError, SizeGuardError, ValidationError
from .numkernel import XScalar, is_exact, pfaffian, to_mpfr
from .partitions import StrictPartition

MODES = ("rational", "float", "xfloat", "mp")

COMB_MAX_WEIGHT = 12
COMB_MAX_VARS = 6


@dataclass(frozen=True)
class Specialization:
    """A finite list of variable values in [0, 1].

    Values may be exact (int or Fraction) or floats.  ``alpha(m, a)`` is the
    common case of m copies of a single value.
    """

    values: tuple

    def __post_init__(self):
        vals = []
        for v in self.values:
            if isinstance(v, bool):
                raise ValidationError("variable values must be numbers")
            if isinstance(v, str):
                v = Fraction(v)
            if isinstance(v, int):
                v = Fraction(v)
            if not isinstance(v, (Fraction, float)):
                v = float(v)
            if isinstance(v, float) and not math.isfinite(v):
                raise ValidationError("variable values must be finite")
            if not 0 <= v <= 1:
                raise ValidationError(f"variable value {v} outside [0, 1]")
            vals.append(v)
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def alpha(cls, m: int, alpha) -> "Specialization":
        if int(m) != m or m < 0:
            raise ValidationError("number of variables must be a non-negative integer")
        return cls((alpha,) * int(m))

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    @property
    def nonzero(self) -> tuple:
        return tuple(v for v in self.values if v != 0)

    @property
    def strictly_inside(self) -> bool:
        return all(0 < v < 1 for v in self.values)

    def __len__(self):
        return len(self.values)


def _convert(v, mode):
    if mode == "rational":
        if not is_exact(v):
            raise ValidationError("rational mode needs exact variable values")
        return Fraction(v)
    if mode == "float":
        return float(v)
    if mode == "xfloat":
        return XScalar.coerce(v)
    if mode == "mp":
        return to_mpfr(v)
    raise ValidationError(f"unknown arithmetic mode {mode!r}")


def resolve_mode(spec: Specialization, mode: str | None) -> str:
    if mode is None:
        return "rational" if spec.exact else "float"
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class QCoeffTable:
    """q_0..q_K for one specialization, in one arithmetic."""

    spec: Specialization
    K: int
    mode: str
    coeffs: tuple = field(repr=False)

    def __getitem__(self, k: int):
        if k < 0:
            return self.coeffs[0] * 0
        if k > self.K:
            raise CutoffError(f"q_{k} requested from a table of size {self.K}")
        return self.coeffs[k]

    def __len__(self):
        return self.K + 1

    def as_array(self) -> np.ndarray:
        dtype = float if self.mode == "float" else object
        return np.array(self.coeffs, dtype=dtype)


def q_coeffs(spec: Specialization, K: int, mode: str | None = None) -> QCoeffTable:
    """Coefficients q_0..q_K of ``prod (1 + t x)/(1 - t x)``.

    A uniform specialization uses the three-term recurrence
    ``(k+1) q_{k+1} = 2 m a q_k + a^2 (k-1) q_{k-1}``; anything else is
    expanded factor by factor.
    """
    if int(K) != K or K < 0:
        raise ValidationError("K must be a non-negative integer")
    K = int(K)
    mode = resolve_mode(spec, mode)
    vals = [_convert(v, mode) for v in spec.nonzero]
    one = _convert(1, mode)
    zero = one * 0
    if not vals:
        coeffs = [one] + [zero] * K
    elif all(v == vals[0] for v in vals):
        a = vals[0]
        m = len(vals)
        coeffs = [one]
        if K >= 1:
            coeffs.append(2 * m * a)
        a2 = a * a
        for k in range(1, K):
            coeffs.append((2 * m * a * coeffs[k] + a2 * (k - 1) * coeffs[k - 1]) / (k + 1))
    else:
        coeffs = [one] + [zero] * K
        for x in vals:
            # multiply by (1 + x t), then divide by (1 - x t)
            for k in range(K, 0, -1):
                coeffs[k] = coeffs[k] + x * coeffs[k - 1]
            for k in range(1, K + 1):
                coeffs[k] = coeffs[k] + x * coeffs[k - 1]
    return QCoeffTable(spec, K, mode, tuple(coeffs))


def Q_rs(q: QCoeffTable, r: int, s: int):
    """Two-row function ``Q_(r,s) = q_r q_s + 2 sum_{i=1..s} (-1)^i q_{r+i} q_{s-i}``.

    Defined for all r, s >= 0; it is antisymmetric off the origin and
    ``Q_(r,0) = q_r``.  Needs ``r + s <= K``.
    """
    if r < 0 or s < 0:
        raise ValidationError("indices must be non-negative")
    if r + s > q.K:
        raise CutoffError(f"Q_({r},{s}) needs q up to index {r + s}, table has {q.K}")
    total = q[r] * q[s]
    for i in range(1, s + 1):
        term = q[r + i] * q[s - i]
        total = total + 2 * term if i % 2 == 0 else total - 2 * term
    return total


def Q_matrix(q: QCoeffTable, h: int) -> np.ndarray:
    """Matrix ``[Q_(r,s)]_{r,s=0..h}`` with the (0,0) entry set to 0.

    This is the skew-symmetric matrix whose first row and column hold
    ``-q_s`` and ``q_r``.  Needs ``2h <= K``.
    """
    if 2 * h > q.K:
        raise CutoffError(f"Q matrix of order {h + 1} needs q up to index {2 * h}")
    dtype = float if q.mode == "float" else object
    qa = np.array(q.coeffs[: 2 * h + 1], dtype=dtype)
    zero = qa[0] * 0
    out = np.empty((h + 1, h + 1), dtype=dtype)
    for s in range(h + 1):
        # column s, rows r >= s
        col = qa[s:h + 1] * qa[s]
        if s:
            signs = np.array([2 if i % 2 == 0 else -2 for i in range(1, s + 1)], dtype=dtype)
            coef = signs * qa[s - 1::-1][:s]
            window = np.array([qa[s + i:h + 1 + i] for i in range(1, s + 1)], dtype=dtype)
            col = col + np.dot(coef, window)
        out[s:, s] = col
        out[s, s + 1:] = -col[1:]
    out[0, 0] = zero
    for s in range(1, h + 1):
        out[s, s] = zero
    return out


def Q_lambda(q: QCoeffTable, lam: Sequence[int]):
    """``Q_lambda`` as the Pfaffian of ``[Q_(lam_i, lam_j)]``, padding lam with 0 to even length."""
    lam = StrictPartition(lam)
    parts = list(lam) + ([0] if len(lam) % 2 else [])
    d = len(parts)
    if d == 0:
        return q[0]
    need = parts[0] + parts[1]
    if need > q.K:
        raise CutoffError(f"Q_lambda for {list(lam)} needs q up to index {need}")
    dtype = float if q.mode == "float" else object
    M = np.empty((d, d), dtype=dtype)
    zero = q[0] * 0
    for i in range(d):
        M[i, i] = zero
        for j in range(i + 1, d):
            v = Q_rs(q, parts[i], parts[j])
            M[i, j] = v
            M[j, i] = -v
    return pfaffian(M)


def P_lambda(q: QCoeffTable, lam: Sequence[int]):
    lam = StrictPartition(lam)
    return Q_lambda(q, lam) / 2 ** len(lam)


def _tableau_weights(lam: StrictPartition, m: int) -> Counter:
    """Counter of content vectors over marked shifted tableaux with entries <= m."""
    cells = lam.cells()
    index = {c: k for k, c in enumerate(cells)}
    left = [index.get((i, j - 1)) for i, j in cells]
    up = [index.get((i - 1, j)) for i, j in cells]
    fill = [0] * len(cells)
    content = [0] * (m + 1)
    out: Counter = Counter()

    def place(k: int) -> None:
        if k == len(cells):
            out[tuple(content[1:])] += 1
            return
        lo = 1
        lk, uk = left[k], up[k]
        if lk is not None:
            lo = max(lo, fill[lk])
        if uk is not None:
            lo = max(lo, fill[uk])
        for r in range(lo, 2 * m + 1):
            # rank r: letter (r+1)//2, marked when r is odd
            if lk is not None and fill[lk] == r and r % 2 == 1:
                continue
            if uk is not None and fill[uk] == r and r % 2 == 0:
                continue
            fill[k] = r
            content[(r + 1) // 2] += 1
            place(k + 1)
            content[(r + 1) // 2] -= 1

    place(0)
    return out


def Q_lambda_comb(spec: Specialization, lam: Sequence[int]):
    """``Q_lambda`` by enumerating marked shifted tableaux (diagonal marks free).

    Exhaustive, so limited to weight <= 12 and at most 6 variables.
    """
    lam = StrictPartition(lam)
    m = len(spec)
    if lam.weight > COMB_MAX_WEIGHT or m > COMB_MAX_VARS:
        raise SizeGuardError(
            f"tableau enumeration limited to weight <= {COMB_MAX_WEIGHT} and <= {COMB_MAX_VARS} variables")
    vals = list(spec.values)
    total = Fraction(0) if spec.exact else 0.0
    for expo, mult in _tableau_weights(lam, m).items():
        term = mult
        for v, e in zip(vals, expo):
            if e:
                term = term * v ** e
        total += term
    return total


def d_s(lam: Sequence[int], n: int) -> int:
    """Number of marked shifted tableaux of shape lam with letters from 1'..n, i.e. Q_lambda at n ones."""
    if int(n) != n or n < 0:
        raise ValidationError("number of letters must be a non-negative integer")
    val = Q_lambda_comb(Specialization((1,) * int(n)), lam)
    if val.denominator != 1:
        raise ArithmeticError("tableau count is not an integer")
    return int(val)


def count_standard_shifted(lam: Sequence[int]) -> int:
    """Standard shifted tableaux of shape lam, by the product formula."""
    lam = StrictPartition(lam)
    val = Fraction(math.factorial(lam.weight))
    for p in lam:
        val /= math.factorial(p)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            val *= Fraction(lam[i] - lam[j], lam[i] + lam[j])
    if val.denominator != 1:
        raise ArithmeticError("standard shifted tableau count is not an integer")
    return int(val)
