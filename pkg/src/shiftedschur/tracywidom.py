"""Airy functions, the Airy kernel and the GUE largest-eigenvalue law F2.

F2(s) is the Fredholm determinant ``det(I - K_Ai)`` on ``L^2(s, inf)``, computed
by Nystrom discretization with Gauss-Legendre nodes mapped to the half line
through ``x = s + 10 (1 + u)/(1 - u)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import gmpy2
import numpy as np

from .errors import ValidationError
from .numkernel import gauss_legendre, mp_precision

MIN_ORDER = 20
DEFAULT_ORDER = 60
_MAP_SCALE = 10.0
_CONFLUENT = 1e-6
_MP_BITS = 192

with mp_precision(_MP_BITS):
    _AI0_MP = 1 / (gmpy2.root(gmpy2.mpfr(9), 3) * gmpy2.gamma(gmpy2.mpfr(2) / 3))
    _AIP0_MP = -1 / (gmpy2.root(gmpy2.mpfr(3), 3) * gmpy2.gamma(gmpy2.mpfr(1) / 3))
_AI0 = float(_AI0_MP)
_AIP0 = float(_AIP0_MP)


class AiryValue(NamedTuple):
    ai: float
    aip: float
    accurate: bool


def _series_terms(x, one, tol):
    """Maclaurin pieces f, g (Ai = c1 f - c2 g) and their derivatives, as term lists."""
    x3 = x * x * x
    f, g, fp, gp = [one], [x * one], [], [one]
    tf, tg, tfp, tgp = one, x * one, x * x / 2, one
    fp.append(tfp)
    k = 0
    while True:
        tf = tf * x3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * x3 / ((3 * k + 3) * (3 * k + 4))
        tgp = tgp * x3 / ((3 * k + 1) * (3 * k + 3))
        tfp = tfp * x3 / ((3 * k + 3) * (3 * k + 5))
        f.append(tf)
        g.append(tg)
        fp.append(tfp)
        gp.append(tgp)
        k += 1
        if k > 4 and max(abs(tf), abs(tg), abs(tfp), abs(tgp)) < tol:
            return f, g, fp, gp


def _airy_series_float(x: float) -> tuple[float, float]:
    f, g, fp, gp = _series_terms(x, 1.0, 1e-22)
    ai = math.fsum([_AI0 * t for t in f] + [_AIP0 * t for t in g])
    aip = math.fsum([_AI0 * t for t in fp] + [_AIP0 * t for t in gp])
    return ai, aip


def _airy_series_mp(x: float) -> tuple[float, float]:
    with mp_precision(_MP_BITS):
        X = gmpy2.mpfr(x)
        f, g, fp, gp = _series_terms(X, gmpy2.mpfr(1), gmpy2.mpfr(2) ** -200)
        ai = _AI0_MP * sum(f) + _AIP0_MP * sum(g)
        aip = _AI0_MP * sum(fp) + _AIP0_MP * sum(gp)
        return float(ai), float(aip)


def _u_coeffs(n: int) -> list[float]:
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return u


_U = _u_coeffs(60)
_V = [1.0] + [-(6 * k + 1) / (6 * k - 1) * _U[k] for k in range(1, 60)]


def _asym_sum(coeffs, zeta, alternate=True, start=0, step=1):
    """Sum of ``(-1)^j c_{start + step j} zeta^-(start + step j)``, stopped at the smallest term."""
    total = 0.0
    prev = math.inf
    j = 0
    while start + step * j < len(coeffs):
        k = start + step * j
        term = coeffs[k] * zeta ** (-k)
        if abs(term) > prev:
            break
        total += -term if (alternate and j % 2) else term
        prev = abs(term)
        if prev < 1e-18 * abs(total):
            break
        j += 1
    return total


def _airy_asym_pos(x: float) -> tuple[float, float]:
    zeta = 2.0 / 3.0 * x ** 1.5
    e = math.exp(-zeta) / (2 * math.sqrt(math.pi))
    ai = e / x ** 0.25 * _asym_sum(_U, zeta)
    aip = -e * x ** 0.25 * _asym_sum(_V, zeta)
    return ai, aip


def _airy_asym_neg(x: float) -> tuple[float, float]:
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    th = zeta - math.pi / 4
    c, s = math.cos(th), math.sin(th)
    pre = 1 / math.sqrt(math.pi)
    ai = pre / z ** 0.25 * (c * _asym_sum(_U, zeta, True, 0, 2) + s * _asym_sum(_U, zeta, True, 1, 2))
    aip = pre * z ** 0.25 * (s * _asym_sum(_V, zeta, True, 0, 2) - c * _asym_sum(_V, zeta, True, 1, 2))
    return ai, aip


def airy_eval(x: float) -> AiryValue:
    """Ai and Ai' at a real point.

    Series in binary64 on [-6, 2], series in 192-bit arithmetic on [-12, -6)
    and (2, 9] where binary64 cancellation would cost relative accuracy,
    asymptotic expansions beyond.  ``accurate`` is False outside [-12, 12].
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError("Airy argument must be finite")
    if -6.0 <= x <= 2.0:
        ai, aip = _airy_series_float(x)
    elif x > 9.0:
        ai, aip = _airy_asym_pos(x)
    elif x >= -12.0:
        ai, aip = _airy_series_mp(x)
    else:
        ai, aip = _airy_asym_neg(x)
    return AiryValue(ai, aip, -12.0 <= x <= 12.0)


def airy_ai(x):
    if np.ndim(x) == 0:
        return airy_eval(x).ai
    return np.array([airy_eval(v).ai for v in np.ravel(x)]).reshape(np.shape(x))


def airy_ai_prime(x):
    if np.ndim(x) == 0:
        return airy_eval(x).aip
    return np.array([airy_eval(v).aip for v in np.ravel(x)]).reshape(np.shape(x))


def _airy_arrays(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals = [airy_eval(v) for v in x]
    return np.array([v.ai for v in vals]), np.array([v.aip for v in vals])


def airy_kernel(x, y):
    """``(Ai(x) Ai'(y) - Ai'(x) Ai(y))/(x - y)``, with ``Ai'(x)^2 - x Ai(x)^2`` on the diagonal."""
    ax, apx, _ = airy_eval(x)
    if abs(x - y) < _CONFLUENT:
        return apx * apx - x * ax * ax
    ay, apy, _ = airy_eval(y)
    return (ax * apy - apx * ay) / (x - y)


def _kernel_matrix(x: np.ndarray) -> np.ndarray:
    ai, aip = _airy_arrays(x)
    dx = x[:, None] - x[None, :]
    close = np.abs(dx) < _CONFLUENT
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / np.where(close, 1.0, dx)
    diag = aip * aip - x * ai * ai
    K[close] = np.broadcast_to(diag[:, None], K.shape)[close]
    return K


def _nodes(s: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    rule = gauss_legendre(order)
    u, w = rule.nodes, rule.weights
    x = s + _MAP_SCALE * (1 + u) / (1 - u)
    wx = w * 2 * _MAP_SCALE / (1 - u) ** 2
    return x, wx


def _check_order(order: int) -> int:
    if int(order) != order or order < MIN_ORDER:
        raise ValidationError(f"quadrature order must be an integer >= {MIN_ORDER}")
    return int(order)


def f2(s: float, order: int = DEFAULT_ORDER) -> float:
    """GUE largest-eigenvalue distribution function F2 at s."""
    order = _check_order(order)
    s = float(s)
    if not math.isfinite(s):
        raise ValidationError("s must be finite")
    x, w = _nodes(s, order)
    sw = np.sqrt(w)
    A = np.eye(order) - sw[:, None] * _kernel_matrix(x) * sw[None, :]
    return min(max(float(np.linalg.det(A)), 0.0), 1.0)


def f2_table(s_values, order: int = DEFAULT_ORDER) -> np.ndarray:
    return np.array([f2(s, order) for s in s_values])


def f2_block_det(s: float, order: int = DEFAULT_ORDER) -> float:
    """Determinant of the discretization of ``K_Ai`` doubled block-diagonally; equals F2(s)^2."""
    order = _check_order(order)
    x, w = _nodes(float(s), order)
    sw = np.sqrt(w)
    B = sw[:, None] * _kernel_matrix(x) * sw[None, :]
    Z = np.zeros_like(B)
    big = np.block([[B, Z], [Z, B]])
    return float(np.linalg.det(np.eye(2 * order) - big))


def f2_density(s: float, order: int = DEFAULT_ORDER, h: float = 1e-3) -> float:
    return (f2(s + h, order) - f2(s - h, order)) / (2 * h)


def tw_median(order: int = DEFAULT_ORDER) -> float:
    lo, hi = -3.0, 0.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if f2(mid, order) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_against_f2(samples, c1: float, c2: float, n: int, order: int = DEFAULT_ORDER) -> float:
    """Kolmogorov distance between integer samples and the rescaled F2 law.

    The empirical ``P(X <= h)`` is compared with ``F2((h + 1/2 - c1 n)/(c2 n^(1/3)))``
    at every integer h spanning the sample, the half accounting for the lattice.
    """
    x = np.sort(np.asarray(samples, dtype=np.int64))
    if x.size == 0:
        raise ValidationError("no samples")
    hs = np.arange(x[0] - 1, x[-1] + 1)
    emp = np.searchsorted(x, hs, side="right") / x.size
    scale = c2 * n ** (1 / 3)
    model = np.array([f2((h + 0.5 - c1 * n) / scale, order) for h in hs])
    return float(np.max(np.abs(emp - model)))
