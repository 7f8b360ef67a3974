"""Elementary pieces inside one tetrahedron and the coordinate layout.

Disk pieces are identified by their boundary curves, which are taken from
the curve oracle rather than tabulated: triangles are the length-3 curves,
quadrilaterals the length-4 ones, and so on.  Families of long pieces are
indexed by the pair of opposite edges that carries the largest weight
(quads: the pair they miss).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import curves
from .curves import NormalCurve, OPPOSITE_PAIRS

PIECE_LENGTHS = {"tri": 3, "quad": 4, "oct": 8, "dodec": 12}
MAX_PIECE_LENGTH = 12


class PieceLengthError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PieceKind:
    kind: str  # one of PIECE_LENGTHS
    index: int

    def __post_init__(self):
        if self.kind not in PIECE_LENGTHS:
            raise ValueError(f"unknown piece kind {self.kind!r}")
        if not 0 <= self.index < len(taxonomy()[self.kind]):
            raise ValueError(f"no {self.kind} with index {self.index}")

    @property
    def length(self) -> int:
        return PIECE_LENGTHS[self.kind]

    @property
    def is_normal(self) -> bool:
        return self.kind in ("tri", "quad")

    @property
    def label(self) -> str:
        return f"{self.kind}{self.index}"

    def __str__(self):
        return self.label


def Triangle(v: int) -> PieceKind:
    return PieceKind("tri", v)


def Quad(pair: int) -> PieceKind:
    return PieceKind("quad", pair)


def Octagon(pair: int) -> PieceKind:
    return PieceKind("oct", pair)


def Dodecagon(family: int) -> PieceKind:
    return PieceKind("dodec", family)


def _quad_pair(c: NormalCurve) -> int:
    w = c.edge_weights
    return next(p for p, (e, f) in enumerate(OPPOSITE_PAIRS) if w[e] == 0 and w[f] == 0)


@lru_cache(maxsize=None)
def taxonomy() -> dict[str, tuple[NormalCurve, ...]]:
    """Boundary curves for every piece kind, in index order."""
    found = curves.enumerate_curves(MAX_PIECE_LENGTH)
    by_len: dict[int, list[NormalCurve]] = {}
    for c in found:
        by_len.setdefault(c.length, []).append(c)
    tris = sorted(by_len[3], key=lambda c: next(v for v in range(4) if c == curves.vertex_link(v)))
    quads = sorted(by_len[4], key=_quad_pair)
    octs = sorted(by_len[8], key=curves.long_curve_family)
    dodecs = sorted(by_len[12], key=lambda c: (curves.long_curve_family(c), c.edge_weights))
    assert set(by_len) <= set(PIECE_LENGTHS.values())
    return {"tri": tuple(tris), "quad": tuple(quads), "oct": tuple(octs), "dodec": tuple(dodecs)}


def dodecagon_count() -> int:
    return len(taxonomy()["dodec"])


def all_kinds() -> list[PieceKind]:
    """Per-tetrahedron kinds in layout order."""
    tax = taxonomy()
    return [PieceKind(k, i) for k in PIECE_LENGTHS for i in range(len(tax[k]))]


def boundary_curve(kind: PieceKind) -> NormalCurve:
    return taxonomy()[kind.kind][kind.index]


def register_piece(curve: NormalCurve) -> PieceKind:
    """Return the piece kind bounded by ``curve``.

    Disks whose boundary is longer than 12 are not pieces of any surface
    this package represents, and are refused.
    """
    if curve.length > MAX_PIECE_LENGTH:
        raise PieceLengthError(f"{curve.length}-gon exceeds the {MAX_PIECE_LENGTH}-gon cap")
    if not curve.is_connected:
        raise ValueError("piece boundary must be a single normal loop")
    for kind in all_kinds():
        if boundary_curve(kind) == curve:
            return kind
    raise PieceLengthError(f"no piece with boundary of length {curve.length}")


@lru_cache(maxsize=None)
def compatible(a: PieceKind, b: PieceKind) -> bool:
    """Whether pieces of kinds ``a`` and ``b`` fit disjointly in one tetrahedron."""
    return curves.disjointly_realizable(boundary_curve(a), boundary_curve(b))


def vertex_sides(kind: PieceKind) -> tuple[int, int, int, int]:
    """Side (0 or 1) of the piece on which each tetrahedron vertex lies.

    Vertex 0 is on side 0; crossing the piece an odd number of times along
    an edge changes side.
    """
    w = boundary_curve(kind).edge_weights
    return (0,) + tuple(w[curves.edge_of(0, v)] % 2 for v in (1, 2, 3))


@dataclass(frozen=True)
class CoordinateLayout:
    """Dense column indexing: tetrahedron-major, kinds in ``all_kinds`` order."""

    tet_count: int
    kinds: tuple[PieceKind, ...]

    @classmethod
    def for_tets(cls, tet_count: int) -> CoordinateLayout:
        return cls(tet_count, tuple(all_kinds()))

    @property
    def per_tet(self) -> int:
        return len(self.kinds)

    @property
    def dimension(self) -> int:
        return self.tet_count * self.per_tet

    def index(self, tet: int, kind: PieceKind) -> int:
        return tet * self.per_tet + self.kinds.index(kind)

    def coordinate(self, i: int) -> tuple[int, PieceKind]:
        return divmod(i, self.per_tet)[0], self.kinds[i % self.per_tet]

    @property
    def labels(self) -> list[str]:
        return [f"t{t}:{k.label}" for t in range(self.tet_count) for k in self.kinds]

    def tet_slice(self, tet: int) -> range:
        return range(tet * self.per_tet, (tet + 1) * self.per_tet)

    @property
    def metadata(self) -> dict:
        dodecs = [k for k in self.kinds if k.kind == "dodec"]
        quads = [k for k in self.kinds if k.kind == "quad"]
        return {
            "per_tet": self.per_tet,
            "dodecagon_families": len(dodecs),
            "dodecagon_quad_compatible": any(compatible(d, q) for d in dodecs for q in quads),
        }


class IncompatiblePieces(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TubeDecoration:
    """An unknotted tube running along a tetrahedron edge.

    ``slots`` are crossing positions along edge ``edge`` of ``tet``, counted
    from the lower-numbered vertex of that edge, within the tetrahedron's
    stack of pieces.  A tube joins the pieces owning the two slots; when both
    slots belong to one piece the tube joins that piece to itself.  ``flip``
    records the attachment side (self tubes) or an inside-out pants leg; it
    does not change the combinatorics.
    """

    tet: int
    edge: int
    slots: tuple[int, int]
    flip: bool = False

    def __post_init__(self):
        lo, hi = self.slots
        if not 0 <= self.edge < 6 or lo < 0 or hi <= lo:
            raise ValueError(f"bad tube decoration {self!r}")

    @property
    def adjacent(self) -> bool:
        return self.slots[1] == self.slots[0] + 1

    def as_dict(self) -> dict:
        return {"tet": self.tet, "edge": self.edge, "slots": list(self.slots), "flip": self.flip}

    @classmethod
    def from_dict(cls, d) -> TubeDecoration:
        return cls(d["tet"], d["edge"], tuple(d["slots"]), bool(d.get("flip", False)))


PieceCopy = tuple  # (PieceKind, copy index)


class TetStack:
    """The pieces of one tetrahedron realized together on its boundary.

    Copies of one kind are parallel; copy 0 is the one whose first crossing
    point (in (edge, position) order) comes first.
    """

    def __init__(self, counts: dict[PieceKind, int]):
        self.counts = {k: c for k, c in sorted(counts.items()) if c}
        total = NormalCurve((0,) * 12)
        for k, c in self.counts.items():
            total = total + boundary_curve(k).scaled(c)
        self.realization = curves.realize(total)
        self.weights = total.edge_weights
        by_curve = {boundary_curve(k): k for k in self.counts}
        groups: dict[PieceKind, list] = {}
        for comp in self.realization.components:
            kind = by_curve.get(comp.curve)
            if kind is None:
                raise IncompatiblePieces("pieces cannot be realized disjointly")
            groups.setdefault(kind, []).append(comp)
        for k, c in self.counts.items():
            if len(groups.get(k, ())) != c:
                raise IncompatiblePieces(f"{k} copies do not embed disjointly")
        self.components: dict[PieceCopy, curves.Component] = {}
        for k, comps in groups.items():
            comps.sort(key=lambda comp: min(comp.points))
            for i, comp in enumerate(comps):
                self.components[(k, i)] = comp
        self.owner: dict[tuple[int, int], PieceCopy] = {}
        for pc, comp in self.components.items():
            for p in comp.points:
                self.owner[p] = pc

    def pieces(self) -> list[PieceCopy]:
        return sorted(self.components)

    def crossings(self, piece: PieceCopy, edge: int) -> list[int]:
        return sorted(pos for (e, pos) in self.components[piece].points if e == edge)

    def own_rank(self, piece: PieceCopy, arc: curves.Arc) -> int:
        """Rank of ``arc`` among the piece's own arcs at the same corner."""
        return sum(
            1
            for a in self.components[piece].arcs
            if a.face == arc.face and a.corner == arc.corner and a.rank < arc.rank
        )


@lru_cache(maxsize=1 << 16)
def _cached_stack(items: tuple) -> TetStack:
    return TetStack(dict(items))


def tet_stack(counts: dict[PieceKind, int]) -> TetStack:
    """Shared, cached ``TetStack``; callers must not mutate it."""
    return _cached_stack(tuple(sorted((k, c) for k, c in counts.items() if c)))
