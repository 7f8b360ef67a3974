"""Complexity of surfaces and of generalized Heegaard splittings.

Only Euler characteristics are tracked.  A surface is a multiset of
component characteristics; a splitting is reduced to its thick levels.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass


class CompressionError(ValueError):
    pass


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class SurfaceComplexity:
    chis: tuple[int, ...] = ()

    def __post_init__(self):
        chis = tuple(sorted(int(x) for x in self.chis))
        if any(x > 2 for x in chis):
            raise ValueError(f"component Euler characteristic above 2 in {chis}")
        object.__setattr__(self, "chis", chis)

    @classmethod
    def of(cls, *chis: int) -> SurfaceComplexity:
        return cls(tuple(chis))

    def __str__(self):
        return "{" + ", ".join(map(str, self.chis)) + "}"


@dataclass(frozen=True)
class SymbolicGHS:
    thick_levels: tuple[SurfaceComplexity, ...]

    def __post_init__(self):
        object.__setattr__(self, "thick_levels", tuple(self.thick_levels))

    def key(self) -> tuple[int, ...]:
        return tuple(sorted((complexity(f) for f in self.thick_levels), reverse=True))


def complexity(f: SurfaceComplexity) -> int:
    return sum((2 - x) ** 2 for x in f.chis)


def compare_ghs(a: SymbolicGHS, b: SymbolicGHS) -> Ordering:
    ka, kb = a.key(), b.key()
    if ka < kb:
        return Ordering.LESS
    if ka > kb:
        return Ordering.GREATER
    return Ordering.EQUAL


def compress(
    f: SurfaceComplexity,
    chi: int,
    separating: bool,
    split: tuple[int, int] | None = None,
) -> SurfaceComplexity:
    """Result of compressing one component with characteristic ``chi``.

    A separating compression must name the characteristics of both sides;
    each side must have characteristic at most 0, since a side that is a
    sphere means the compressing curve bounded a disk in the surface.
    """
    if chi not in f.chis:
        raise CompressionError(f"no component with chi {chi} in {f}")
    if chi == 2:
        raise CompressionError("a sphere has no compression")
    if chi > 0:
        raise CompressionError(f"chi {chi} component is not compressible")
    rest = Counter(f.chis)
    rest[chi] -= 1
    if not separating:
        if split is not None:
            raise CompressionError("split given for a non-separating compression")
        rest[chi + 2] += 1
        return SurfaceComplexity(tuple(rest.elements()))
    if split is None:
        raise CompressionError("separating compression needs a split")
    a, b = split
    if a + b != chi + 2:
        raise CompressionError(f"split {split} does not sum to {chi + 2}")
    if a > 2 or b > 2:
        raise CompressionError(f"split {split} has a side above 2")
    if a >= 2 or b >= 2:
        raise CompressionError(f"split {split} cuts off a sphere; the curve was inessential")
    rest[a] += 1
    rest[b] += 1
    return SurfaceComplexity(tuple(rest.elements()))
