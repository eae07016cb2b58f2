"""Determinantal formula for the distribution of lambda_1 and its checks.

For specializations x and y the weighted sum of ``Q_lambda(x) P_lambda(y)`` over
strict lambda with ``lambda_1 <= h`` equals ``sqrt(det(I - K_h(x) K_h(y)))``,
where ``K_h`` is the (h+1)x(h+1) matrix with ``K_0s = -q_s/sqrt2``,
``K_r0 = q_r/sqrt2`` and ``K_rs = Q_(r,s)/2``.  Conjugating by
``diag(1, 1/sqrt2, ...)`` removes the square roots: the determinant is
``det(I - A_x W A_y W)`` with ``A = [Q_(r,s)]`` and ``W = diag(1, 1/2, 1/2, ...)``.

Dividing by the partition function gives ``P(lambda_1 <= h)``.  The
determinant suffers heavy cancellation once mn is moderately large, so the
default ``"mp"`` mode runs in gmpy2 multiprecision and raises the working
precision until two precisions agree.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from .errors import CutoffError, NumericalFailure, ResourceError, ValidationError
from .numkernel import (XScalar, det_exact, is_exact, lu_pivots, mp_precision, nested_leading_logdets,
                        sign_logdet, to_mpfr)
from .partitions import enumerate_strict, enumerate_strict_bounded
from .sampler import MeasureParams
from .schurq import MODES, P_lambda, Q_lambda, Q_matrix, Specialization, q_coeffs

CDF_SLACK = 1e-9
MP_AGREEMENT = 1e-12
MP_MAX_BITS = 1 << 15


def partition_function(spec_x: Specialization, spec_y: Specialization):
    """``prod_{i,j} (1 + x_i y_j)/(1 - x_i y_j)``; exact for exact inputs."""
    if spec_x.exact and spec_y.exact:
        z = Fraction(1)
        for x in spec_x.values:
            for y in spec_y.values:
                z *= (1 + x * y) / (1 - x * y)
        return z
    return math.exp(log_partition_function(spec_x, spec_y))


def log_partition_function(spec_x: Specialization, spec_y: Specialization) -> float:
    total = []
    for x in spec_x.values:
        for y in spec_y.values:
            p = float(x) * float(y)
            if p >= 1:
                raise ValidationError("partition function diverges when some x_i y_j >= 1")
            total.append(math.log1p(p) - math.log1p(-p))
    return math.fsum(total)


def log_Z(params: MeasureParams) -> float:
    """``mn log((1 + alpha^2)/(1 - alpha^2))``."""
    q = float(params.q)
    return params.m * params.n * (math.log1p(q) - math.log1p(-q))


def _specs(params: MeasureParams):
    return params.specializations()


def _weights(h: int, one):
    half = one / 2
    return np.array([one] + [half] * h, dtype=object if not isinstance(one, float) else float)


@dataclass(frozen=True)
class KMatrix:
    """The matrix ``K_h`` of one specialization.

    ``A`` holds ``[Q_(r,s)]`` (zero at the origin) in the arithmetic of the
    q-table; ``K`` is the float matrix with the square-root factors applied.
    """

    h: int
    A: np.ndarray
    mode: str

    @property
    def K(self) -> np.ndarray:
        s = np.array([1.0] + [1 / math.sqrt(2.0)] * self.h)
        return np.array(self.A, dtype=float) * np.outer(s, s)


def build_K(q, h: int) -> KMatrix:
    if int(h) != h or h < 0:
        raise ValidationError("h must be a non-negative integer")
    if 2 * h > q.K:
        raise CutoffError(f"K_{h} needs q up to index {2 * h}, table has {q.K}")
    return KMatrix(int(h), Q_matrix(q, int(h)), q.mode)


def _det_matrix(Ax: np.ndarray, Ay: np.ndarray, one) -> np.ndarray:
    h = Ax.shape[0] - 1
    w = _weights(h, one)
    By = Ay * np.multiply.outer(w, w)
    if Ax.dtype == object:
        prod = np.dot(Ax, By)
        I = np.empty_like(prod)
        I[:] = one * 0
        for i in range(h + 1):
            I[i, i] = one
        return I - prod
    return np.eye(h + 1) - Ax @ By


def _exact_sqrt(v: Fraction):
    if v < 0:
        return None
    a, b = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if a * a == v.numerator and b * b == v.denominator:
        return Fraction(a, b)
    return None


def gessel_det(spec_x: Specialization, spec_y: Specialization, h: int, mode: str = "rational"):
    """``det(I - K_h(x) K_h(y))`` in rational, float or XScalar arithmetic."""
    if mode not in ("rational", "float", "xfloat"):
        raise ValidationError("gessel_det supports rational, float and xfloat modes")
    qx = q_coeffs(spec_x, 2 * h, mode)
    qy = q_coeffs(spec_y, 2 * h, mode)
    one = qx[0] * 0 + 1
    M = _det_matrix(build_K(qx, h).A, build_K(qy, h).A, one)
    if mode == "rational":
        return det_exact(M)
    sign, logabs, _ = sign_logdet(M)
    if mode == "float":
        return sign * math.exp(logabs) if sign else 0.0
    return XScalar.from_log(logabs, sign)


def gessel_rhs(spec_x: Specialization, spec_y: Specialization, h: int, mode: str = "rational"):
    """Square root of the Gessel determinant.

    Rational mode returns an exact Fraction (the determinant of exact inputs is
    a perfect square); float mode a float; xfloat mode an XScalar.  Tiny
    negative determinants (relative to the squared partition function) are
    clamped to zero with a warning; larger ones raise NumericalFailure.
    """
    d = gessel_det(spec_x, spec_y, h, mode)
    if mode == "rational":
        root = _exact_sqrt(d)
        if root is None:
            raise NumericalFailure(f"determinant {d} is not the square of a rational")
        return root
    scale = partition_function(spec_x, spec_y) ** 2
    if d < 0:
        if abs(float(d)) <= 1e-10 * float(scale):
            warnings.warn("tiny negative determinant clamped to zero", RuntimeWarning)
            return d * 0
        raise NumericalFailure(f"negative determinant {float(d)} at h={h}")
    return math.sqrt(d) if mode == "float" else d.sqrt()


def gessel_lhs(spec_x: Specialization, spec_y: Specialization, h: int, N: int):
    """Sum of ``Q_lambda(x) P_lambda(y)`` over strict lambda with lambda_1 <= h, |lambda| <= N.

    Returns ``(value, tail)`` where ``tail`` bounds the omitted terms: it is
    the partition function minus the sum over all strict lambda of weight <= N.
    Terms with more parts than nonzero variables vanish and are skipped.
    """
    if int(N) != N or N < 0:
        raise ValidationError("N must be a non-negative integer")
    mode = "rational" if spec_x.exact and spec_y.exact else "float"
    maxlen = min(len(spec_x.nonzero), len(spec_y.nonzero))
    K = 2 * int(N)
    qx = q_coeffs(spec_x, K, mode)
    qy = q_coeffs(spec_y, K, mode)
    value = qx[0] * 0
    for lam in enumerate_strict_bounded(h, N):
        if len(lam) <= maxlen:
            value += Q_lambda(qx, lam) * P_lambda(qy, lam)
    partial = cauchy_weight_sums(spec_x, spec_y, N, qx, qy)
    tail = partition_function(spec_x, spec_y) - sum(partial)
    return value, tail


def cauchy_weight_sums(spec_x, spec_y, N, qx=None, qy=None) -> list:
    """``S_k = sum_{|lambda| = k} Q_lambda(x) P_lambda(y)`` for k = 0..N."""
    mode = "rational" if spec_x.exact and spec_y.exact else "float"
    if qx is None:
        qx = q_coeffs(spec_x, 2 * N, mode)
    if qy is None:
        qy = q_coeffs(spec_y, 2 * N, mode)
    maxlen = min(len(spec_x.nonzero), len(spec_y.nonzero))
    out = []
    for k in range(N + 1):
        s = qx[0] * 0
        for lam in enumerate_strict(k):
            if len(lam) <= maxlen:
                s += Q_lambda(qx, lam) * P_lambda(qy, lam)
        out.append(s)
    return out


def product_specialization(spec_x: Specialization, spec_y: Specialization) -> Specialization:
    """The variables ``x_i y_j``; its q-coefficients are the graded pieces of the Cauchy sum."""
    return Specialization(tuple(x * y for x in spec_x.values for y in spec_y.values))


def select_cauchy_cutoff(spec_x, spec_y, eps: float, N_max: int = 200) -> int:
    """Smallest N whose omitted Cauchy mass, bounded through the product series, is below eps."""
    Z = partition_function(spec_x, spec_y)
    prod = product_specialization(spec_x, spec_y)
    q = q_coeffs(prod, N_max)
    acc = q[0] * 0
    for N in range(N_max + 1):
        acc += q[N]
        if Z - acc < eps:
            return N
    raise ResourceError(f"Cauchy remainder still above {eps} at N={N_max}")


# ---------------------------------------------------------------- probabilities


def _bits_estimate(spec_x, spec_y, H: int) -> int:
    ex = max(c.exponent for c in q_coeffs(spec_x, 2 * H, "xfloat").coeffs)
    ey = max(c.exponent for c in q_coeffs(spec_y, 2 * H, "xfloat").coeffs)
    return 64 + 3 * (max(ex, 0) + max(ey, 0))


def _mp_log_partition(spec_x, spec_y):
    total = gmpy2.mpfr(0)
    for x in spec_x.values:
        for y in spec_y.values:
            p = to_mpfr(x) * to_mpfr(y)
            total += gmpy2.log1p(p) - gmpy2.log1p(-p)
    return total


def _mp_eval(spec_x, spec_y, H: int, nested: bool, bits: int):
    """``(sign, log P)`` pairs where ``log P = log|det|/2 - log Z``, evaluated at ``bits``."""
    with mp_precision(bits):
        qx = q_coeffs(spec_x, 2 * H, "mp")
        qy = q_coeffs(spec_y, 2 * H, "mp")
        Ax = Q_matrix(qx, H)
        Ay = Q_matrix(qy, H)
        one = qx[0] * 0 + 1
        logZ = _mp_log_partition(spec_x, spec_y)
        if nested:
            w = _weights(H, one)
            res = nested_leading_logdets(Ax, Ay * np.multiply.outer(w, w))
        else:
            sign, pivots = lu_pivots(_det_matrix(Ax, Ay, one))
            if sign == 0:
                return [(0, -math.inf)]
            total = one * 0
            for p in pivots:
                sign *= 1 if p > 0 else -1
                total += gmpy2.log(abs(p))
            res = [(sign, total)]
        return [(s, float(l / 2 - logZ)) for s, l in res]


def _mp_logdets(spec_x, spec_y, H: int, nested: bool, bits: int | None = None):
    """Log-determinants at an adaptively chosen precision.

    Two evaluations 64 bits apart must agree to MP_AGREEMENT in every log;
    otherwise the precision is doubled.
    """
    p = bits or _bits_estimate(spec_x, spec_y, H)
    while p <= MP_MAX_BITS:
        try:
            lo = _mp_eval(spec_x, spec_y, H, nested, p)
            hi = _mp_eval(spec_x, spec_y, H, nested, p + 64)
        except NumericalFailure:
            p *= 2
            continue
        ok = all(a[0] == b[0] and (a[1] == b[1] or abs(a[1] - b[1]) <= MP_AGREEMENT * max(1.0, abs(b[1])))
                 for a, b in zip(lo, hi))
        if ok:
            return hi, p + 64
        p *= 2
    raise ResourceError(f"no agreement between precisions up to {MP_MAX_BITS} bits")


def _prob_from_log(sign: int, logp: float, h: int) -> float:
    """Probability from the sign of the determinant and ``log|det|/2 - log Z``."""
    if sign <= 0:
        if sign < 0 and 2 * logp > math.log(1e-10):
            raise NumericalFailure(f"negative determinant at h={h}")
        if sign < 0:
            warnings.warn(f"tiny negative determinant clamped to zero at h={h}", RuntimeWarning)
        return 0.0
    p = math.exp(logp)
    if p > 1 + CDF_SLACK:
        raise NumericalFailure(f"probability {p} exceeds 1 at h={h}")
    return min(p, 1.0)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")


def cdf_exact(params: MeasureParams, h: int, mode: str = "mp"):
    """``P(lambda_1 <= h)`` from the determinant.

    ``rational`` needs an exact alpha and returns a Fraction; the other modes
    return a float.  ``mp`` is the robust default.
    """
    _check_mode(mode)
    if int(h) != h or h < 0:
        raise ValidationError("h must be a non-negative integer")
    h = int(h)
    sx, sy = _specs(params)
    if mode == "rational":
        if not is_exact(params.alpha):
            raise ValidationError("rational mode needs an exact alpha")
        return gessel_rhs(sx, sy, h, "rational") / partition_function(sx, sy)
    if mode == "mp":
        logs, _ = _mp_logdets(sx, sy, h, nested=False)
        sign, logp = logs[0]
        return _prob_from_log(sign, logp, h)
    qx = q_coeffs(sx, 2 * h, mode)
    qy = q_coeffs(sy, 2 * h, mode)
    one = qx[0] * 0 + 1
    sign, ld, _ = sign_logdet(_det_matrix(build_K(qx, h).A, build_K(qy, h).A, one))
    return _prob_from_log(sign, 0.5 * ld - log_Z(params), h)


def cdf_table(params: MeasureParams, h_max: int, mode: str = "mp", bits: int | None = None) -> np.ndarray:
    """``P(lambda_1 <= h)`` for h = 0..h_max.

    In ``mp`` mode all values come from a single interleaved elimination, so
    the cost is that of one determinant of order 2(h_max+1).
    """
    _check_mode(mode)
    if int(h_max) != h_max or h_max < 0:
        raise ValidationError("h_max must be a non-negative integer")
    h_max = int(h_max)
    if mode != "mp":
        return np.array([float(cdf_exact(params, h, mode)) for h in range(h_max + 1)])
    sx, sy = _specs(params)
    logs, _ = _mp_logdets(sx, sy, h_max, nested=True, bits=bits)
    out = np.array([_prob_from_log(s, l, h) for h, (s, l) in enumerate(logs)])
    if np.any(np.diff(out) < -CDF_SLACK):
        raise NumericalFailure("distribution function is not monotone")
    return np.maximum.accumulate(out)


@dataclass(frozen=True)
class CdfCurve:
    h: np.ndarray
    cdf: np.ndarray


def cdf_curve(params: MeasureParams, eps: float = 1e-6, h_ceiling: int = 4096,
              mode: str = "mp") -> CdfCurve:
    """``P(lambda_1 <= h)`` from h = 0 until it first reaches 1 - eps."""
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0, 1)")
    H = 8
    try:
        from .asymptotics import constants
        c = constants(params.alpha, params.tau)
        n = params.n
        H = max(H, int(math.ceil(c.c1 * n + 6 * c.c2 * n ** (1 / 3))))
    except ValidationError:
        pass
    while True:
        H = min(H, h_ceiling)
        table = cdf_table(params, H, mode)
        hit = np.nonzero(table >= 1 - eps)[0]
        if hit.size:
            k = int(hit[0])
            return CdfCurve(np.arange(k + 1), table[: k + 1])
        if H >= h_ceiling:
            raise ResourceError(f"1 - eps not reached by h = {h_ceiling}")
        H *= 2


# -------------------------------------------------------------- operator checks


@dataclass(frozen=True)
class OperatorReport:
    R1: float
    R2: float
    R3: float
    R4: float
    t: float
    h_scalar: float
    M: int
    K: int

    def line(self) -> str:
        return (f"R1={self.R1:.3e},R2={self.R2:.3e},R3={self.R3:.3e},R4={self.R4:.3e},"
                f"t={self.t:.12g},h_scalar={self.h_scalar:.12g}")


def _q_cutoff(spec: Specialization, K0: int, rel_bits: int) -> int:
    K = K0
    while True:
        q = q_coeffs(spec, K, "xfloat").coeffs
        top = max(c.log_abs() for c in q if c.sign)
        tail = q[-1].log_abs() if q[-1].sign else -math.inf
        if tail - top < -rel_bits * math.log(2) and q[-1] <= q[-2]:
            return K
        K *= 2


def _fro(M) -> float:
    return math.sqrt(sum(float(x) ** 2 for x in np.asarray(M).flat))


def _symbol(qa: np.ndarray, qb: np.ndarray, n_max: int):
    """Coefficients ``sum_k qa[n+k] (-1)^k qb[k]`` for n = 0..n_max."""
    K = len(qa) - 1
    alt = np.array([qb[k] if k % 2 == 0 else -qb[k] for k in range(len(qb))], dtype=qb.dtype)
    return [np.dot(qa[n:], alt[: K + 1 - n]) for n in range(n_max + 1)]


def operator_residuals(spec_x: Specialization, spec_y: Specialization, M: int,
                       mode: str = "float", bits: int = 256) -> OperatorReport:
    """Frobenius residuals of the operator identities on M x M truncations.

    R1: the two factorizations of L agree.  R2: L is symmetric.  R3: the
    shift relation ``L_{i-1,j} + L_{i,j-1} = q_i q_j - [i=j=0]``.  R4:
    ``(I + L_x L_y)(I - H_1 H_2) = I``.  Also returns the scalars ``t`` (the
    constant term of ``Q_x(z) Q_y(-1/z)``) and ``h_scalar = <H_1 H_2 e, e>``.
    """
    if mode not in ("float", "mp"):
        raise ValidationError("operator residuals support float and mp modes")
    if int(M) != M or M < 2:
        raise ValidationError("M must be an integer >= 2")
    M = int(M)
    rel_bits = 60 if mode == "float" else bits + 16
    K = max(_q_cutoff(spec_x, 2 * M + 2, rel_bits), _q_cutoff(spec_y, 2 * M + 2, rel_bits))
    with mp_precision(bits):
        m = None if mode == "float" else "mp"
        qx = q_coeffs(spec_x, K, m or "float").as_array()
        qy = q_coeffs(spec_y, K, m or "float").as_array()
        dtype = float if mode == "float" else object
        one = qx[0] * 0 + 1
        zero = one * 0

        def mats(q):
            H = np.empty((M, M), dtype=dtype)
            Hinv = np.empty((M, M), dtype=dtype)
            T = np.empty((M, M), dtype=dtype)
            Tinv = np.empty((M, M), dtype=dtype)
            for j in range(M):
                for k in range(M):
                    H[j, k] = q[j + k + 1]
                    Hinv[j, k] = q[j + k + 1] if (j + k + 1) % 2 == 0 else -q[j + k + 1]
                    d = k - j
                    T[j, k] = q[d] if d >= 0 else zero
                    Tinv[j, k] = (q[d] if d % 2 == 0 else -q[d]) if d >= 0 else zero
            J = np.array([one if j % 2 == 0 else -one for j in range(M)], dtype=dtype)
            L1 = np.dot(H, Tinv) * J[None, :]
            L2 = -(J[:, None] * np.dot(Hinv, T))
            return L1, L2

        Lx, Lx2 = mats(qx)
        Ly, _ = mats(qy)
        R1 = _fro(Lx - Lx2)
        R2 = _fro(Lx - Lx.T)
        E = -np.multiply.outer(qx[:M], qx[:M])
        E[1:, :] = E[1:, :] + Lx[:-1, :]
        E[:, 1:] = E[:, 1:] + Lx[:, :-1]
        E[0, 0] = E[0, 0] + one
        R3 = _fro(E)
        phi1 = _symbol(qx, qy, 2 * M)
        phi2 = _symbol(qy, qx, 2 * M)
        H1 = np.array([[phi1[j + k + 1] for k in range(M)] for j in range(M)], dtype=dtype)
        H2 = np.array([[phi2[j + k + 1] for k in range(M)] for j in range(M)], dtype=dtype)
        I = np.eye(M) if mode == "float" else np.array(
            [[one if i == j else zero for j in range(M)] for i in range(M)], dtype=object)
        R4 = _fro(np.dot(I + np.dot(Lx, Ly), I - np.dot(H1, H2)) - I)
        t = float(phi1[0])
        h_scalar = float(sum(phi1[k + 1] * phi2[k + 1] for k in range(len(phi1) - 1)))
    return OperatorReport(R1, R2, R3, R4, t, h_scalar, M, K)


def operator_scalars(spec_x: Specialization, spec_y: Specialization, bits: int = 256) -> tuple[float, float]:
    """``(t, h_scalar)`` in multiprecision with the series summed to full length."""
    rel_bits = bits + 16
    K = max(_q_cutoff(spec_x, 64, rel_bits), _q_cutoff(spec_y, 64, rel_bits))
    with mp_precision(bits):
        qx = q_coeffs(spec_x, K, "mp").as_array()
        qy = q_coeffs(spec_y, K, "mp").as_array()
        phi1 = _symbol(qx, qy, K)
        phi2 = _symbol(qy, qx, K)
        t = float(phi1[0])
        h = float(sum(phi1[k + 1] * phi2[k + 1] for k in range(K)))
    return t, h
