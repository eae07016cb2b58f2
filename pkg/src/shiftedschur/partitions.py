"""Strict partitions and their shifted diagrams."""
from __future__ import annotations

from typing import Iterable, Iterator

from .errors import ValidationError


class StrictPartition(tuple):
    """A strictly decreasing tuple of positive integers.

    >>> StrictPartition([4, 2, 1]).weight
    7
    """

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(parts)
        for p in parts:
            if isinstance(p, bool) or int(p) != p or p < 1:
                raise ValidationError(f"parts must be positive integers, got {parts}")
        parts = tuple(int(p) for p in parts)
        if any(a <= b for a, b in zip(parts, parts[1:])):
            raise ValidationError(f"parts must be strictly decreasing, got {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def cells(self) -> list[tuple[int, int]]:
        return shifted_cells(self)

    def __repr__(self):
        return f"StrictPartition({list(self)})"


def shifted_cells(lam: Iterable[int]) -> list[tuple[int, int]]:
    """Cells (row, column) of the shifted diagram, 1-based; row i starts at column i."""
    lam = StrictPartition(lam)
    return [(i, j) for i, part in enumerate(lam, start=1) for j in range(i, i + part)]


def _strict_parts(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    # strict partitions of n with all parts <= largest, lexicographically descending
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        if first * (first + 1) // 2 < n:
            break
        for rest in _strict_parts(n - first, first - 1):
            yield (first,) + rest


def enumerate_strict(n: int) -> list[StrictPartition]:
    """All strict partitions of n, lexicographically descending."""
    if int(n) != n or n < 0:
        raise ValidationError("weight must be a non-negative integer")
    return [StrictPartition(p) for p in _strict_parts(int(n), int(n))]


def enumerate_strict_bounded(h: int, N: int) -> list[StrictPartition]:
    """Strict partitions with largest part <= h and weight <= N.

    Ordered by weight, then lexicographically descending.
    """
    if int(h) != h or h < 0 or int(N) != N or N < 0:
        raise ValidationError("bounds must be non-negative integers")
    out = []
    for n in range(int(N) + 1):
        out.extend(StrictPartition(p) for p in _strict_parts(n, int(h)))
    return out
