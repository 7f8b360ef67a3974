"""Normal curves on the boundary of a single tetrahedron.

A normal curve is recorded by its corner-arc counts: on each face ``f``
(the face opposite vertex ``f``) and each vertex ``v`` of that face there is
a count of parallel arcs cutting off the corner at ``v``.  Counts determine
the curve up to normal isotopy; this module realizes them explicitly
(points ordered along each edge, arcs joining them), assembles the loops,
and answers connectivity and disjointness questions by inspection of the
realization.  Everything here is brute force by design: it is the ground
truth the piece taxonomy is built from.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

VERTICES = (0, 1, 2, 3)

# Edge e and edge 5 - e are opposite.
EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {pair: i for i, pair in enumerate(EDGES)}
EDGE_INDEX.update({(b, a): i for (a, b), i in list(EDGE_INDEX.items())})

# Opposite-edge pair p consists of edges p and 5 - p.
OPPOSITE_PAIRS = ((0, 5), (1, 4), (2, 3))

# Corner arcs in a fixed order: (face, vertex) with vertex != face.
CORNERS = tuple((f, v) for f in VERTICES for v in VERTICES if v != f)
CORNER_INDEX = {c: i for i, c in enumerate(CORNERS)}

DEFAULT_MAX_LENGTH = 24


class CurveBoundError(ValueError):
    pass


def edge_of(a: int, b: int) -> int:
    return EDGE_INDEX[(a, b)]


def face_vertices(f: int) -> tuple[int, int, int]:
    return tuple(v for v in VERTICES if v != f)


def faces_of_edge(e: int) -> tuple[int, int]:
    """The two faces containing edge ``e`` (opposite the two other vertices)."""
    a, b = EDGES[e]
    return tuple(v for v in VERTICES if v not in (a, b))


@dataclass(frozen=True, order=True)
class NormalCurve:
    """Corner-arc counts of a (possibly disconnected) normal curve."""

    arcs: tuple[int, ...]

    def __post_init__(self):
        if len(self.arcs) != 12 or any(x < 0 for x in self.arcs):
            raise ValueError(f"bad arc vector {self.arcs!r}")
        for e, (a, b) in enumerate(EDGES):
            f, g = faces_of_edge(e)
            if self.arc(f, a) + self.arc(f, b) != self.arc(g, a) + self.arc(g, b):
                raise ValueError(f"arc counts do not match across edge {a}{b}")

    def arc(self, face: int, vertex: int) -> int:
        return self.arcs[CORNER_INDEX[(face, vertex)]]

    @property
    def edge_weights(self) -> tuple[int, ...]:
        out = []
        for e, (a, b) in enumerate(EDGES):
            f = faces_of_edge(e)[0]
            out.append(self.arc(f, a) + self.arc(f, b))
        return tuple(out)

    @property
    def length(self) -> int:
        # every arc has two endpoints, every crossing is shared by two arcs
        return sum(self.arcs)

    def __add__(self, other: NormalCurve) -> NormalCurve:
        return NormalCurve(tuple(x + y for x, y in zip(self.arcs, other.arcs)))

    def scaled(self, k: int) -> NormalCurve:
        return NormalCurve(tuple(k * x for x in self.arcs))

    @classmethod
    def from_edge_weights(cls, weights) -> NormalCurve:
        """Build the curve with the given edge weights.

        Raises ``ValueError`` when a face violates the triangle inequality or
        has odd perimeter.
        """
        arcs = [0] * 12
        for f in VERTICES:
            for v in face_vertices(f):
                x, y = (u for u in face_vertices(f) if u != v)
                twice = weights[edge_of(v, x)] + weights[edge_of(v, y)] - weights[edge_of(x, y)]
                if twice < 0 or twice % 2:
                    raise ValueError(f"weights {tuple(weights)} are not normal on face {f}")
                arcs[CORNER_INDEX[(f, v)]] = twice // 2
        return cls(tuple(arcs))

    def realize(self) -> Realization:
        return realize(self)

    @property
    def is_connected(self) -> bool:
        return self.length > 0 and len(realize(self).components) == 1

    def __str__(self):
        return "w(" + ",".join(map(str, self.edge_weights)) + ")"


@dataclass(frozen=True)
class Arc:
    face: int
    corner: int
    rank: int  # 0 is nearest the corner vertex

    def endpoints(self):
        x, y = (u for u in face_vertices(self.face) if u != self.corner)
        return (point_on(self.corner, x, self.rank), point_on(self.corner, y, self.rank))


def point_on(near: int, far: int, rank_from_near: int):
    # keyed from the lower vertex once the edge weight is known (Realization._key)
    return (edge_of(near, far), (near, far, rank_from_near))


@dataclass
class Component:
    arcs: list[Arc]  # cyclic order
    points: list[tuple[int, int]]  # points[i] is between arcs[i-1] and arcs[i]
    curve: NormalCurve


class Realization:
    """Explicit normal position of a curve on the tetrahedron boundary."""

    def __init__(self, curve: NormalCurve):
        self.curve = curve
        self.weights = curve.edge_weights
        self.arcs = [
            Arc(f, v, k) for (f, v) in CORNERS for k in range(curve.arc(f, v))
        ]
        self._ends = {arc: tuple(self._key(p) for p in arc.endpoints()) for arc in self.arcs}
        self.components = self._assemble()

    def _key(self, raw):
        e, (near, far, rank) = raw
        if near < far:
            return (e, rank)
        return (e, self.weights[e] - 1 - rank)

    def endpoints(self, arc: Arc) -> tuple[tuple[int, int], tuple[int, int]]:
        return self._ends[arc]

    def _assemble(self) -> list[Component]:
        at_point: dict[tuple[int, int], list[Arc]] = {}
        for arc in self.arcs:
            for p in self._ends[arc]:
                at_point.setdefault(p, []).append(arc)
        seen: set[Arc] = set()
        comps = []
        for start in self.arcs:
            if start in seen:
                continue
            order, pts = [], []
            arc, entry = start, self._ends[start][0]
            while True:
                seen.add(arc)
                order.append(arc)
                pts.append(entry)
                p, q = self._ends[arc]
                exit_ = q if p == entry else p
                a, b = at_point[exit_]
                nxt = b if a == arc else a
                entry = exit_
                if nxt is start:
                    break
                arc = nxt
            counts = [0] * 12
            for a in order:
                counts[CORNER_INDEX[(a.face, a.corner)]] += 1
            comps.append(Component(order, pts, NormalCurve(tuple(counts))))
        return comps

    def component_of(self) -> dict[Arc, int]:
        return {a: i for i, c in enumerate(self.components) for a in c.arcs}


@lru_cache(maxsize=4096)
def realize(curve: NormalCurve) -> Realization:
    return Realization(curve)


def _face_arcs(weights):
    """Corner-arc counts for edge weights, or None if some face is not normal."""
    arcs = []
    for f, v in CORNERS:
        x, y = (u for u in face_vertices(f) if u != v)
        twice = weights[edge_of(v, x)] + weights[edge_of(v, y)] - weights[edge_of(x, y)]
        if twice < 0 or twice & 1:
            return None
        arcs.append(twice >> 1)
    return arcs


# (face, corner) -> the two edges the corner arc joins, and whether the corner
# vertex is the lower endpoint of each
_CORNER_EDGES = []
for _f, _v in CORNERS:
    _x, _y = (u for u in face_vertices(_f) if u != _v)
    _CORNER_EDGES.append(((edge_of(_v, _x), _v < _x), (edge_of(_v, _y), _v < _y)))


def loop_count(weights, arcs=None) -> int:
    """Number of loops in the realization with these edge weights.

    Lean union-find over crossing points; used by the exhaustive search
    where building full ``Realization`` objects would dominate the runtime.
    """
    if arcs is None:
        arcs = _face_arcs(weights)
    offsets = [0] * 6
    for e in range(1, 6):
        offsets[e] = offsets[e - 1] + weights[e - 1]
    n = offsets[5] + weights[5]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    loops = n
    for count, ((e1, low1), (e2, low2)) in zip(arcs, _CORNER_EDGES):
        w1, w2 = weights[e1], weights[e2]
        for k in range(count):
            p = offsets[e1] + (k if low1 else w1 - 1 - k)
            q = offsets[e2] + (k if low2 else w2 - 1 - k)
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[rp] = rq
                loops -= 1
    return loops


def _triangle_ok(a, b, c):
    return not (a + b + c) & 1 and a <= b + c and b <= a + c and c <= a + b


def _weight_vectors(max_length: int):
    """Nonzero edge weights, total at most ``max_length``, normal on every face.

    Faces are checked as soon as their three weights are fixed.
    """
    L = max_length
    r = range(L + 1)
    for w01 in r:
        for w02 in range(L + 1 - w01):
            for w12 in range(L + 1 - w01 - w02):
                if not _triangle_ok(w01, w02, w12):
                    continue
                used3 = w01 + w02 + w12
                for w03 in range(L + 1 - used3):
                    for w13 in range(L + 1 - used3 - w03):
                        if not _triangle_ok(w01, w03, w13):
                            continue
                        used5 = used3 + w03 + w13
                        for w23 in range(L + 1 - used5):
                            if _triangle_ok(w02, w03, w23) and _triangle_ok(w12, w13, w23):
                                w = (w01, w02, w03, w12, w13, w23)
                                if used5 + w23:
                                    yield w


@lru_cache(maxsize=None)
def _enumerate(max_length: int) -> tuple[NormalCurve, ...]:
    found = []
    for w in _weight_vectors(max_length):
        arcs = _face_arcs(w)
        if arcs is not None and loop_count(w, arcs) == 1:
            found.append(NormalCurve(tuple(arcs)))
    found.sort(key=lambda c: (c.length, c.arcs))
    return tuple(found)


def enumerate_curves(max_length: int, bound: int = DEFAULT_MAX_LENGTH) -> list[NormalCurve]:
    """All connected normal curve types of length at most ``max_length``.

    Output is sorted by (length, arc vector).
    """
    if max_length < 1:
        raise ValueError("max_length must be positive")
    if max_length > bound:
        raise CurveBoundError(f"max_length {max_length} exceeds bound {bound}")
    return list(_enumerate(max_length))


def curves_of_length(n: int, bound: int = DEFAULT_MAX_LENGTH) -> list[NormalCurve]:
    return [c for c in enumerate_curves(max(n, 1), bound=max(bound, n)) if c.length == n]


def component_multiset(curve: NormalCurve) -> Counter:
    return Counter(c.curve for c in realize(curve).components)


def realizable_together(curves) -> bool:
    """True iff the given connected curves (with repeats) embed disjointly.

    A consistent interleaving of the arcs in every face corner is exactly a
    labelling of the arcs of the summed system that is constant along each
    of its loops, so the collection is realizable iff the loops of the
    normal realization of the sum are, as a multiset, the collection itself.
    """
    curves = list(curves)
    if not curves:
        return True
    total = curves[0]
    for c in curves[1:]:
        total = total + c
    return component_multiset(total) == Counter(curves)


def disjointly_realizable(a: NormalCurve, b: NormalCurve) -> bool:
    return realizable_together([a, b])


def long_length_conflicts(curves) -> list[tuple[NormalCurve, NormalCurve]]:
    """Pairs of connected curves with different lengths, both multiples of 4,
    that embed disjointly.  Empty when no such pair exists."""
    longs = sorted({c for c in curves if c.length % 4 == 0 and c.is_connected})
    return [
        (a, b)
        for i, a in enumerate(longs)
        for b in longs[i + 1 :]
        if a.length != b.length and disjointly_realizable(a, b)
    ]


def vertex_link(v: int) -> NormalCurve:
    arcs = [0] * 12
    for f in VERTICES:
        if f != v:
            arcs[CORNER_INDEX[(f, v)]] = 1
    return NormalCurve(tuple(arcs))


def long_curve_family(curve: NormalCurve) -> int:
    """Opposite-edge pair carrying the largest weight of a long curve."""
    w = curve.edge_weights
    return max(range(3), key=lambda p: (w[OPPOSITE_PAIRS[p][0]] + w[OPPOSITE_PAIRS[p][1]], -p))
