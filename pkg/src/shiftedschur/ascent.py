"""Marked matrices, their biwords, and the longest ascent pair statistic.

Letters of the marked alphabet ``1' < 1 < 2' < 2 < ...`` are handled through
their rank ``2k - 1`` (for ``k'``) or ``2k`` (for ``k``), so marked letters have
odd rank.

For a word ``w``, an ascent pair is ``(psi, phi)`` with ``psi`` a subword of the
reversed word, ``phi`` a subword of ``w``, both weakly increasing, unmarked
letters used at most once in ``psi``, marked letters at most once in ``phi``, and
the last letter of ``psi`` at the same position of ``w`` as the first letter of
``phi``.  ``L(w)`` is the largest ``|psi| + |phi| - 1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numba
import numpy as np

from .errors import SizeGuardError, ValidationError

BRUTE_MAX_LENGTH = 14
CONVENTIONS = ("shared", "free")


class PLetter(NamedTuple):
    value: int
    marked: bool = False

    @property
    def rank(self) -> int:
        return 2 * self.value - (1 if self.marked else 0)

    @classmethod
    def from_rank(cls, r: int) -> "PLetter":
        return cls((r + 1) // 2, r % 2 == 1)

    def __str__(self):
        return f"{self.value}'" if self.marked else str(self.value)


def parse_letter(tok: str) -> PLetter:
    m = re.fullmatch(r"(\d+)('?)", tok.strip())
    if not m or int(m.group(1)) < 1:
        raise ValidationError(f"bad letter {tok!r}")
    return PLetter(int(m.group(1)), bool(m.group(2)))


@dataclass(frozen=True)
class Biword:
    tops: tuple
    bottoms: tuple

    def __len__(self):
        return len(self.tops)

    def __str__(self):
        return " ".join(map(str, self.tops)) + "\n" + " ".join(map(str, self.bottoms))


class PMatrix:
    """An m x n matrix of non-negative integers with optional marks on positive entries.

    ``values[i-1, j-1]`` is the entry in row i (rows counted from the bottom)
    and column j.  The text form lists rows top to bottom, entries ``0``,
    ``k`` or ``k'``.
    """

    def __init__(self, values, marks=None):
        v = np.array(values, dtype=np.int64, ndmin=2)
        if v.size == 0:
            raise ValidationError("matrix must be non-empty")
        mk = np.zeros(v.shape, dtype=bool) if marks is None else np.array(marks, dtype=bool, ndmin=2)
        if mk.shape != v.shape:
            raise ValidationError("marks must have the shape of the values")
        if np.any(v < 0):
            raise ValidationError("entries must be non-negative")
        if np.any(mk & (v == 0)):
            raise ValidationError("zero entries cannot be marked")
        self.values = v
        self.marks = mk
        self.values.setflags(write=False)
        self.marks.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def weight(self) -> int:
        return int(self.values.sum())

    @classmethod
    def from_text(cls, text: str) -> "PMatrix":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValidationError("matrix rows must be non-empty and of equal length")
        vals, marks = [], []
        for row in reversed(rows):
            vr, mr = [], []
            for tok in row:
                m = re.fullmatch(r"(\d+)('?)", tok)
                if not m:
                    raise ValidationError(f"bad matrix entry {tok!r}")
                val, mk = int(m.group(1)), bool(m.group(2))
                if mk and val == 0:
                    raise ValidationError("a zero entry cannot be marked")
                vr.append(val)
                mr.append(mk)
            vals.append(vr)
            marks.append(mr)
        return cls(vals, marks)

    def to_text(self) -> str:
        lines = []
        for i in range(self.shape[0] - 1, -1, -1):
            lines.append(" ".join(f"{v}'" if mk else str(v) for v, mk in zip(self.values[i], self.marks[i])))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (isinstance(other, PMatrix) and np.array_equal(self.values, other.values)
                and np.array_equal(self.marks, other.marks))

    def __repr__(self):
        return f"PMatrix({self.values.tolist()}, marks={self.marks.astype(int).tolist()})"


def to_biword(A: PMatrix) -> Biword:
    """Columns left to right, rows bottom to top within a column.

    An entry ``a`` at (i, j) contributes ``a`` copies of the pair (j, i); when
    it is marked the first copy carries ``i'``.
    """
    tops, bottoms = [], []
    m, n = A.shape
    for j in range(n):
        for i in range(m):
            a = int(A.values[i, j])
            for c in range(a):
                tops.append(j + 1)
                bottoms.append(PLetter(i + 1, bool(A.marks[i, j]) and c == 0))
    return Biword(tuple(tops), tuple(bottoms))


def _ranks(w: Sequence) -> list[int]:
    out = []
    for x in w:
        if isinstance(x, PLetter):
            out.append(x.rank)
        elif isinstance(x, str):
            out.append(parse_letter(x).rank)
        else:
            raise ValidationError(f"word entries must be letters, got {x!r}")
    return out


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValidationError(f"convention must be one of {CONVENTIONS}")


def L_word_brute(w: Sequence, convention: str = "shared") -> int:
    """Exhaustive search over all admissible subwords; words of length <= 14."""
    _check_convention(convention)
    r = _ranks(w)
    N = len(r)
    if N > BRUTE_MAX_LENGTH:
        raise SizeGuardError(f"exhaustive search limited to length {BRUTE_MAX_LENGTH}")
    if N == 0:
        return 0
    # psi_best[p][rank of last letter]: longest psi whose last letter sits at p
    psi_best = [dict() for _ in range(N)]
    phi_best = [dict() for _ in range(N)]

    def grow_psi(pos, last, length):
        # psi read along the reversed word: next letter lies to the left of pos
        d = psi_best[pos]
        if d.get(last, 0) < length:
            d[last] = length
        for p in range(pos - 1, -1, -1):
            x = r[p]
            if x > last or (x == last and x % 2 == 1):
                grow_psi(p, x, length + 1)

    def grow_phi(pos, first, last, length):
        d = phi_best[first]
        if d.get(r[first], 0) < length:
            d[r[first]] = length
        for p in range(pos + 1, N):
            x = r[p]
            if x > last or (x == last and x % 2 == 0):
                grow_phi(p, first, x, length + 1)

    for p in range(N):
        grow_psi(p, r[p], 1)
        grow_phi(p, p, r[p], 1)

    if convention == "shared":
        return max(psi_best[p][r[p]] + phi_best[p][r[p]] - 1 for p in range(N))
    psis = [(last, ln) for d in psi_best for last, ln in d.items()]
    phis = [(first, ln) for d in phi_best for first, ln in d.items()]
    return max(a + b - 1 for la, a in psis for fb, b in phis if la <= fb)


class _MaxFenwick:
    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)

    def update(self, i: int, v: int) -> None:
        while i <= self.size:
            if self.tree[i] < v:
                self.tree[i] = v
            i += i & -i

    def query(self, i: int) -> int:
        out = 0
        while i > 0:
            if self.tree[i] > out:
                out = self.tree[i]
            i -= i & -i
        return out


def ascent_profiles(w: Sequence) -> tuple[list[int], list[int]]:
    """Per-position lengths A[p] (best psi ending at p) and B[p] (best phi starting at p)."""
    r = _ranks(w)
    N = len(r)
    V = max(r, default=0)
    fa = _MaxFenwick(V)          # indexed by rank
    fb = _MaxFenwick(V)          # indexed by V + 1 - rank
    A = [0] * N
    B = [0] * N
    for p in range(N - 1, -1, -1):
        x = r[p]
        marked = x % 2 == 1
        # psi continues to later positions with a larger letter; equal allowed if marked
        A[p] = 1 + fa.query(x if marked else x - 1)
        # phi continues to later positions with a larger letter; equal allowed if unmarked
        B[p] = 1 + fb.query(V + 1 - x if not marked else V - x)
        fa.update(x, A[p])
        fb.update(V + 1 - x, B[p])
    return A, B


def L_word(w: Sequence, convention: str = "shared") -> int:
    """Longest ascent pair length in O(N log N)."""
    _check_convention(convention)
    r = _ranks(w)
    if not r:
        return 0
    A, B = ascent_profiles(w)
    if convention == "shared":
        return max(a + b - 1 for a, b in zip(A, B))
    V = max(r)
    bestA = [0] * (V + 2)
    bestB = [0] * (V + 2)
    for x, a, b in zip(r, A, B):
        bestA[x] = max(bestA[x], a)
        bestB[x] = max(bestB[x], b)
    out = 0
    run = 0
    for x in range(1, V + 1):
        run = max(run, bestA[x])
        if bestB[x]:
            out = max(out, run + bestB[x] - 1)
    return out


@numba.njit(cache=True)
def _lambda1_kernel(values, marks):
    m, n = values.shape
    V = 2 * m
    fa = np.zeros(V + 1, dtype=np.int64)
    fb = np.zeros(V + 1, dtype=np.int64)
    best = 0
    for j in range(n - 1, -1, -1):
        for i in range(m - 1, -1, -1):
            a = values[i, j]
            if a == 0:
                continue
            mk = 1 if marks[i, j] else 0
            u = a - mk
            ru = 2 * (i + 1)
            rm = ru - 1
            if u > 0:
                # unmarked copies: psi may not repeat them, phi chains through them
                q = rm
                top = 0
                while q > 0:
                    if fa[q] > top:
                        top = fa[q]
                    q -= q & -q
                a_u = 1 + top
                q = V + 1 - ru
                top = 0
                while q > 0:
                    if fb[q] > top:
                        top = fb[q]
                    q -= q & -q
                b_u = u + top
                if a_u + b_u - 1 > best:
                    best = a_u + b_u - 1
                q = ru
                while q <= V:
                    if fa[q] < a_u:
                        fa[q] = a_u
                    q += q & -q
                q = V + 1 - ru
                while q <= V:
                    if fb[q] < b_u:
                        fb[q] = b_u
                    q += q & -q
            if mk:
                q = rm
                top = 0
                while q > 0:
                    if fa[q] > top:
                        top = fa[q]
                    q -= q & -q
                a_m = 1 + top
                q = V + 1 - ru
                top = 0
                while q > 0:
                    if fb[q] > top:
                        top = fb[q]
                    q -= q & -q
                b_m = 1 + top
                if a_m + b_m - 1 > best:
                    best = a_m + b_m - 1
                q = rm
                while q <= V:
                    if fa[q] < a_m:
                        fa[q] = a_m
                    q += q & -q
                q = V + 1 - rm
                while q <= V:
                    if fb[q] < b_m:
                        fb[q] = b_m
                    q += q & -q
    return best


def lambda1(A: PMatrix) -> int:
    """``L`` of the bottom row of the biword of A, computed cell by cell."""
    return int(_lambda1_kernel(np.ascontiguousarray(A.values), np.ascontiguousarray(A.marks)))


def lambda1_arrays(values: np.ndarray, marks: np.ndarray) -> int:
    return int(_lambda1_kernel(values, marks))
