"""Sampling from the marked geometric matrix model and its Poisson limit.

Each entry of an m x n matrix is independent with
``P(a = 0) = (1 - q)/(1 + q)`` and ``P(a = k, marked or not) = (1 - q) q^k / (1 + q)``
for ``k >= 1``, where ``q = alpha^2``.  The image of such a matrix under the
largest-row statistic is the one-parameter shifted Schur measure.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ascent import PMatrix, lambda1_arrays
from .errors import SizeGuardError, ValidationError

EXACT_MAX_STATES = 2_000_000


@dataclass(frozen=True)
class MeasureParams:
    """Matrix size m x n and parameter 0 < alpha < 1."""

    m: int
    n: int
    alpha: object

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ValidationError(f"{name} must be a positive integer")
        a = self.alpha
        if isinstance(a, str):
            a = Fraction(a)
            object.__setattr__(self, "alpha", a)
        if not 0 < a < 1:
            raise ValidationError("alpha must lie strictly between 0 and 1")

    @property
    def q(self):
        return self.alpha * self.alpha

    @property
    def tau(self) -> Fraction:
        return Fraction(int(self.m), int(self.n))

    def specializations(self):
        from .schurq import Specialization
        return Specialization.alpha(self.m, self.alpha), Specialization.alpha(self.n, self.alpha)


@dataclass(frozen=True)
class Seed:
    """Counter-based stream key: the master seed and a replica index."""

    master: int
    replica: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master) < 2**64 or int(self.replica) < 0:
            raise ValidationError("seed must be a 64-bit non-negative integer, replica >= 0")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.master), spawn_key=(int(self.replica),))
        return np.random.Generator(np.random.Philox(ss))


def entry_pmf(alpha, k: int, marked: bool):
    """Probability of one entry being ``k`` with the given mark."""
    q = alpha * alpha
    if k < 0 or (k == 0 and marked):
        return q * 0
    base = (1 - q) / (1 + q)
    return base if k == 0 else base * q ** k


def _draw(params: MeasureParams, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    q = float(params.q)
    shape = (params.m, params.n)
    # P(a >= k) = 2 q^k / (1 + q) for k >= 1, inverted from one uniform
    v = 1.0 - rng.random(shape)
    x = np.log(v * (1.0 + q) / 2.0) / math.log(q)
    vals = np.where(x >= 1.0, np.floor(x), 0.0).astype(np.int64)
    marks = (rng.random(shape) < 0.5) & (vals > 0)
    return vals, marks


def sample_matrix(params: MeasureParams, seed: Seed) -> PMatrix:
    vals, marks = _draw(params, seed.generator())
    return PMatrix(vals, marks)


def sample_lambda1(params: MeasureParams, seed: Seed) -> int:
    vals, marks = _draw(params, seed.generator())
    return lambda1_arrays(vals, marks)


def sample_lambda1_batch(params: MeasureParams, master: int, reps: int, start: int = 0) -> np.ndarray:
    """lambda_1 for replicas start..start+reps-1 of the given master seed."""
    if int(reps) != reps or reps < 0:
        raise ValidationError("reps must be a non-negative integer")
    out = np.empty(int(reps), dtype=np.int64)
    for k in range(int(reps)):
        out[k] = sample_lambda1(params, Seed(master, start + k))
    return out


@dataclass(frozen=True)
class ExactDistribution:
    """Law of lambda_1 restricted to matrices with all entries <= K."""

    pmf: dict
    K: int
    tail_bound: float

    def cdf(self, h: int) -> float:
        return math.fsum(p for k, p in self.pmf.items() if k <= h)


def exact_distribution_small(params: MeasureParams, K: int) -> ExactDistribution:
    """Enumerate every matrix with entries <= K and accumulate lambda_1.

    The missing mass is at most ``m n 2 q^(K+1) / (1 + q)``.
    """
    m, n = params.m, params.n
    cell_states = [(0, False)] + [(k, mk) for k in range(1, K + 1) for mk in (False, True)]
    total = len(cell_states) ** (m * n)
    if total > EXACT_MAX_STATES:
        raise SizeGuardError(f"{total} matrices exceed the enumeration limit {EXACT_MAX_STATES}")
    a = float(params.alpha)
    probs = [entry_pmf(a, k, mk) for k, mk in cell_states]
    vals = np.zeros((m, n), dtype=np.int64)
    marks = np.zeros((m, n), dtype=bool)
    acc: dict[int, list] = {}
    for combo in itertools.product(range(len(cell_states)), repeat=m * n):
        p = 1.0
        for c, s in enumerate(combo):
            k, mk = cell_states[s]
            vals[c // n, c % n] = k
            marks[c // n, c % n] = mk
            p *= probs[s]
        acc.setdefault(lambda1_arrays(vals, marks), []).append(p)
    pmf = {k: math.fsum(v) for k, v in sorted(acc.items())}
    q = float(params.q)
    return ExactDistribution(pmf, K, m * n * 2 * q ** (K + 1) / (1 + q))


# Poisson limit: points of intensity 2 in the unit square, total mean 2 t^2


def _lis_strict(seq) -> list[int]:
    """Length of the longest strictly increasing run ending at each index."""
    import bisect
    tails: list = []
    out = []
    for x in seq:
        i = bisect.bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
        out.append(i + 1)
    return out


def poisson_points(t: float, seed: Seed) -> np.ndarray:
    """Poisson(2 t^2) uniform points in the unit square, as an (N, 2) array of (x, y)."""
    if not t >= 0:
        raise ValidationError("t must be non-negative")
    rng = seed.generator()
    N = rng.poisson(2.0 * t * t)
    pts = rng.random((N, 2))
    return pts


def poisson_L_direct(pts: np.ndarray) -> int:
    """Longest single-turn path: up-left from the bottom edge, then up-right."""
    if len(pts) == 0:
        return 0
    order = np.argsort(pts[:, 1], kind="stable")
    xs = pts[order, 0]
    # up-left chains ending at each point, up-right chains starting at each point
    A = _lis_strict(list(-xs))
    B = _lis_strict(list(-xs[::-1]))[::-1]
    best = max(max(A), max(B))
    prefix = 0
    for k in range(len(xs)):
        if k:
            best = max(best, prefix + B[k])
        prefix = max(prefix, A[k])
    return best


def poisson_L_symmetric(pts: np.ndarray) -> int:
    """Longest increasing chain in the configuration symmetrized across x = 0."""
    if len(pts) == 0:
        return 0
    both = np.concatenate([pts, np.column_stack([-pts[:, 0], pts[:, 1]])])
    order = np.argsort(both[:, 0], kind="stable")
    return max(_lis_strict(list(both[order, 1])))


def poisson_L(t: float, seed: Seed) -> int:
    """Poisson limit of lambda_1; the two routes are checked against each other."""
    pts = poisson_points(t, seed)
    a = poisson_L_direct(pts)
    b = poisson_L_symmetric(pts)
    if a != b:
        raise ArithmeticError(f"Poisson routes disagree: {a} vs {b}")
    return a
