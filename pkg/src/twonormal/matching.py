"""Matching equations and admissibility of piece vectors.

Arc types on a face are indexed by the face vertex they cut off, and a
gluing permutation carries the arc type at vertex ``v`` of face ``f`` to the
arc type at ``p(v)`` of face ``p(f)``.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

from .curves import CORNER_INDEX
from .pieces import (
    CoordinateLayout,
    IncompatiblePieces,
    PieceKind,
    TetStack,
    tet_stack,
    TubeDecoration,
    boundary_curve,
    compatible,
)
from .triangulation import Triangulation


class NotClosedError(ValueError):
    pass


class AdmissibilityMode(enum.Enum):
    NORMAL = "normal"
    ALMOST_NORMAL = "almost"
    TWO_NORMAL = "2normal"

    @classmethod
    def parse(cls, text: str) -> AdmissibilityMode:
        aliases = {"almost_normal": "almost", "almostnormal": "almost", "two_normal": "2normal"}
        return cls(aliases.get(text.lower(), text.lower()))


class SurfaceClass(enum.Enum):
    NORMAL = "Normal"
    ALMOST_NORMAL_OCT = "AlmostNormalOct"
    ALMOST_NORMAL_TUBE = "AlmostNormalTube"
    TWO_OCTAGONS = "TwoOctagons"
    TWO_TUBES = "TwoTubes"
    OCTAGON_AND_TUBE = "OctagonAndTube"
    DODECAGON = "Dodecagon"

    @property
    def is_two_normal(self) -> bool:
        return self in TWO_NORMAL_CLASSES

    def __str__(self):
        return self.value


TWO_NORMAL_CLASSES = frozenset(
    {
        SurfaceClass.TWO_OCTAGONS,
        SurfaceClass.TWO_TUBES,
        SurfaceClass.OCTAGON_AND_TUBE,
        SurfaceClass.DODECAGON,
    }
)

MODE_CLASSES = {
    AdmissibilityMode.NORMAL: frozenset({SurfaceClass.NORMAL}),
    AdmissibilityMode.ALMOST_NORMAL: frozenset(
        {SurfaceClass.ALMOST_NORMAL_OCT, SurfaceClass.ALMOST_NORMAL_TUBE}
    ),
    AdmissibilityMode.TWO_NORMAL: TWO_NORMAL_CLASSES,
}


@dataclass
class MatchingSystem:
    matrix: list[list[int]]
    row_labels: list[str]
    column_labels: list[str]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.column_labels)

    def apply(self, v) -> list[int]:
        return [sum(a * x for a, x in zip(row, v) if a) for row in self.matrix]

    def in_kernel(self, v) -> bool:
        return not any(self.apply(v))


def build_matching_system(tri: Triangulation, layout: CoordinateLayout) -> MatchingSystem:
    if not tri.closed:
        raise NotClosedError("matching equations need a closed triangulation")
    rows, labels = [], []
    for t, f, u, p in tri.face_pairs():
        g = p(f)
        for v in (x for x in range(4) if x != f):
            row = [0] * layout.dimension
            for kind in layout.kinds:
                row[layout.index(t, kind)] += boundary_curve(kind).arc(f, v)
                row[layout.index(u, kind)] -= boundary_curve(kind).arc(g, p(v))
            rows.append(row)
            labels.append(f"t{t}f{f}v{v}=t{u}f{g}v{p(v)}")
    return MatchingSystem(rows, labels, layout.labels)


@dataclass
class ExceptionalPattern:
    octagons: list[tuple[int, int, int]] = field(default_factory=list)  # (tet, family, multiplicity)
    dodecagons: list[tuple[int, int, int]] = field(default_factory=list)
    tubes: list[TubeDecoration] = field(default_factory=list)

    @property
    def exceptional_count(self) -> int:
        return (
            sum(m for _, _, m in self.octagons)
            + sum(m for _, _, m in self.dodecagons)
            + len(self.tubes)
        )

    def surface_class(self) -> SurfaceClass | None:
        """The taxonomy label this pattern matches, or None if it matches none."""
        octs = sum(m for _, _, m in self.octagons)
        dods = sum(m for _, _, m in self.dodecagons)
        tubes = len(self.tubes)
        if dods:
            return SurfaceClass.DODECAGON if (dods, octs, tubes) == (1, 0, 0) else None
        if (octs, tubes) == (0, 0):
            return SurfaceClass.NORMAL
        if (octs, tubes) == (1, 0):
            return SurfaceClass.ALMOST_NORMAL_OCT
        if (octs, tubes) == (0, 1):
            return SurfaceClass.ALMOST_NORMAL_TUBE
        if (octs, tubes) == (2, 0):
            if len({t for t, _, _ in self.octagons}) == 2:
                return SurfaceClass.TWO_OCTAGONS
            return None
        if (octs, tubes) == (0, 2):
            return SurfaceClass.TWO_TUBES
        if (octs, tubes) == (1, 1):
            return SurfaceClass.OCTAGON_AND_TUBE
        return None

    def as_dict(self) -> dict:
        return {
            "octagons": [list(x) for x in self.octagons],
            "dodecagons": [list(x) for x in self.dodecagons],
            "tubes": [t.as_dict() for t in self.tubes],
        }


@dataclass
class Violation:
    code: str
    detail: str

    def as_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail}


@dataclass
class AdmissibilityReport:
    violations: list[Violation]
    pattern: ExceptionalPattern
    surface_class: SurfaceClass | None

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "class": None if self.surface_class is None else self.surface_class.value,
            "violations": [v.as_dict() for v in self.violations],
        }


def tet_counts(v, layout: CoordinateLayout, tet: int) -> dict[PieceKind, int]:
    return {
        layout.kinds[i]: v[j]
        for i, j in enumerate(layout.tet_slice(tet))
        if v[j]
    }


def extract_pattern(v, tubes, layout: CoordinateLayout) -> ExceptionalPattern:
    pat = ExceptionalPattern(tubes=sorted(tubes))
    for t in range(layout.tet_count):
        for kind, c in tet_counts(v, layout, t).items():
            if kind.kind == "oct":
                pat.octagons.append((t, kind.index, c))
            elif kind.kind == "dodec":
                pat.dodecagons.append((t, kind.index, c))
    return pat


def is_admissible(
    v,
    tubes,
    mode: AdmissibilityMode,
    layout: CoordinateLayout,
    *,
    allow_nested_tubes: bool = False,
) -> AdmissibilityReport:
    """Check a piece vector plus tube decorations against ``mode``.

    Returns a report whose truth value is admissibility; the report lists
    every violation found with a machine-readable code.
    """
    v = list(v)
    tubes = list(tubes)
    if len(v) != layout.dimension:
        raise ValueError(f"vector has length {len(v)}, layout dimension is {layout.dimension}")
    bad: list[Violation] = []
    if any(x < 0 for x in v):
        bad.append(Violation("NEGATIVE_COORDINATE", "coordinates must be nonnegative"))
        return AdmissibilityReport(bad, ExceptionalPattern(), None)

    stacks: dict[int, TetStack] = {}
    for t in range(layout.tet_count):
        counts = tet_counts(v, layout, t)
        quads = [k for k in counts if k.kind == "quad"]
        if len(quads) > 1:
            bad.append(Violation("QUAD_CONDITION", f"tet {t} has quad families {[q.index for q in quads]}"))
        kinds = sorted(counts)
        for i, a in enumerate(kinds):
            for b in kinds[i:]:
                if a == b and not compatible(a, a):
                    bad.append(Violation("INCOMPATIBLE_PIECES", f"tet {t}: copies of {a} collide"))
                elif a != b and not compatible(a, b):
                    bad.append(Violation("INCOMPATIBLE_PIECES", f"tet {t}: {a} and {b} collide"))
        for k, c in counts.items():
            if not k.is_normal and c > 1:
                bad.append(Violation("EXCEPTIONAL_MULTIPLICITY", f"tet {t}: {k} has coordinate {c}"))
        if not any(x.code in ("INCOMPATIBLE_PIECES",) for x in bad):
            try:
                stacks[t] = tet_stack(counts)
            except IncompatiblePieces as exc:
                bad.append(Violation("INCOMPATIBLE_PIECES", f"tet {t}: {exc}"))

    pattern = extract_pattern(v, tubes, layout)
    if not bad:
        bad.extend(_check_tubes(tubes, stacks, layout, allow_nested_tubes))

    cls = pattern.surface_class()
    if cls is None:
        if pattern.octagons and len({t for t, _, _ in pattern.octagons}) < sum(m for *_, m in pattern.octagons):
            bad.append(Violation("OCTAGONS_SAME_TET", "two octagons must lie in different tetrahedra"))
        bad.append(Violation("UNLISTED_PATTERN", _describe(pattern)))
    elif cls not in MODE_CLASSES[mode]:
        bad.append(Violation("MODE_MISMATCH", f"{cls.value} is not a {mode.value} pattern"))
    return AdmissibilityReport(bad, pattern, cls if not bad else None)


def _describe(p: ExceptionalPattern) -> str:
    return (
        f"octagons={sum(m for *_, m in p.octagons)} "
        f"dodecagons={sum(m for *_, m in p.dodecagons)} tubes={len(p.tubes)}"
    )


def tube_ends(tube: TubeDecoration, stack: TetStack):
    """The piece copies owning the two slots of ``tube``."""
    return stack.owner[(tube.edge, tube.slots[0])], stack.owner[(tube.edge, tube.slots[1])]


def _check_tubes(tubes, stacks, layout, allow_nested) -> list[Violation]:
    bad = []
    ends = {}
    for tube in tubes:
        if not 0 <= tube.tet < layout.tet_count:
            bad.append(Violation("TUBE_TET_RANGE", f"{tube}: no such tetrahedron"))
            continue
        stack = stacks[tube.tet]
        if tube.slots[1] >= stack.weights[tube.edge]:
            bad.append(Violation("TUBE_SLOT_RANGE", f"{tube}: edge carries {stack.weights[tube.edge]} crossings"))
            continue
        a, b = tube_ends(tube, stack)
        ends[tube] = (a, b)
        if a == b:
            if a[0].kind != "oct":
                bad.append(Violation("SELF_TUBE_LENGTH", f"{tube}: self tube on {a[0]} (only length-8 pieces)"))
            elif len(stack.crossings(a, tube.edge)) < 2:
                bad.append(Violation("SELF_TUBE_LENGTH", f"{tube}: piece meets the edge once"))
        else:
            for pc in (a, b):
                if pc[0].length > 8:
                    bad.append(Violation("ANNULUS_BOUNDARY", f"{tube}: annulus boundary of length {pc[0].length}"))
        if not tube.adjacent:
            inner = (tube.tet, tube.edge, (tube.slots[0] + 1, tube.slots[1] - 1))
            if any((t.tet, t.edge, t.slots) == inner for t in tubes):
                if not allow_nested:
                    bad.append(Violation("NESTED_TUBES", f"{tube} encloses another tube"))
            else:
                bad.append(Violation("TUBE_NOT_ADJACENT", f"{tube}: slots are not adjacent"))
    if bad:
        return bad

    keys = [(t.tet, t.edge, t.slots) for t in tubes]
    if len(set(keys)) < len(keys):
        bad.append(Violation("TUBE_DUPLICATE", "two tubes on the same slots"))
        return bad
    if len(tubes) == 2:
        (ta, (a1, b1)), (tb, (a2, b2)) = ends.items()
        pair1 = {(ta.tet, a1), (ta.tet, b1)}
        pair2 = {(tb.tet, a2), (tb.tet, b2)}
        nested = not ta.adjacent or not tb.adjacent
        if pair1 == pair2 and not nested:
            bad.append(Violation("TUBE_REPEATED_PAIR", "both tubes join the same two pieces"))
        shared = pair1 & pair2
        if len(pair1) == 2 and len(pair2) == 2 and len(shared) == 1:
            # pair of pants: every leg must be a normal disk
            for _, pc in pair1 | pair2:
                if pc[0].length not in (3, 4):
                    bad.append(Violation("PANTS_BOUNDARY", f"pants leg {pc[0]} has length {pc[0].length}"))
    return bad
