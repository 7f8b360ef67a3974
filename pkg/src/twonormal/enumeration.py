"""Extreme rays of {x : Ax = 0, x >= 0} and vertex-surface enumeration.

``extreme_rays`` is the double description method in exact integer
arithmetic; ``brute_force_rays`` is an independent oracle that walks
column supports.  The vertex-surface enumerator runs the former once per
type restriction (at most one quad family per tetrahedron, plus the
exceptional pieces the mode asks for) and then filters with the
admissibility check.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .matching import (
    AdmissibilityMode,
    ExceptionalPattern,
    SurfaceClass,
    build_matching_system,
    is_admissible,
)
from .pieces import (
    CoordinateLayout,
    Dodecagon,
    Octagon,
    PieceKind,
    IncompatiblePieces,
    Quad,
    TetStack,
    tet_stack,
    Triangle,
    TubeDecoration,
    compatible,
    dodecagon_count,
)
from .matching import tet_counts, tube_ends
from .surface import piece_components, reconstruct
from .triangulation import Triangulation, compute_skeleton

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_DIM = 16


@dataclass(frozen=True)
class TypeRestriction:
    """Columns allowed to be nonzero, plus the exceptional coordinates
    that must equal one in an accepted ray."""

    columns: tuple[int, ...]
    required: tuple[int, ...] = ()
    note: str = ""


@dataclass(frozen=True, order=True)
class Ray:
    vector: tuple[int, ...]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.vector) if x)


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def extreme_rays(A, restriction: TypeRestriction | None = None, dimension: int | None = None) -> list[Ray]:
    """Primitive extreme rays of the cone, sorted lexicographically.

    ``A`` is a list of integer rows; with no rows, ``dimension`` gives the
    ambient dimension.  Columns outside ``restriction.columns`` are held
    at zero.
    """
    n = len(A[0]) if A else dimension
    if n is None:
        raise ValueError("dimension is required when A has no rows")
    cols = list(restriction.columns) if restriction is not None else list(range(n))
    m = len(cols)
    rows = [[row[c] for c in cols] for row in A]
    rows = [r for r in rows if any(r)]

    full = (1 << m) - 1
    # (vector, mask of zero coordinates)
    rays = [(tuple(1 if j == i else 0 for j in range(m)), full & ~(1 << i)) for i in range(m)]
    for row in rows:
        vals = [sum(a * x for a, x in zip(row, vec) if a and x) for vec, _ in rays]
        zero = [r for r, s in zip(rays, vals) if s == 0]
        pos = [(r, s) for r, s in zip(rays, vals) if s > 0]
        neg = [(r, s) for r, s in zip(rays, vals) if s < 0]
        new = list(zero)
        masks = [z for _, z in rays]
        for (pv, pz), ps in pos:
            for (nv, nz), ns in neg:
                common = pz & nz
                if _adjacent(common, masks, pz, nz):
                    vec = tuple(ps * b - ns * a for a, b in zip(pv, nv))
                    vec = _primitive(vec)
                    new.append((vec, _zero_mask(vec)))
        rays = new
    out = []
    for vec, _ in rays:
        full_vec = [0] * n
        for c, x in zip(cols, vec):
            full_vec[c] = x
        out.append(Ray(tuple(full_vec)))
    return sorted(set(out))


def _zero_mask(vec) -> int:
    mask = 0
    for i, x in enumerate(vec):
        if x == 0:
            mask |= 1 << i
    return mask


def _adjacent(common: int, masks, pz: int, nz: int) -> bool:
    # combinatorial test: no third ray is zero wherever both are
    for z in masks:
        if z & common == common and z != pz and z != nz:
            return False
    return True


def _kernel_basis(A, cols):
    """Exact kernel of A restricted to ``cols``; list of Fraction vectors."""
    rows = [[Fraction(row[c]) for c in cols] for row in A]
    m = len(cols)
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * m
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        basis.append(vec)
    return basis


def _rank(A, cols) -> int:
    """Rank of the columns ``cols`` of A, by integer elimination."""
    rows = [[row[c] for c in cols] for row in A]
    rows = [r for r in rows if any(r)]
    rank = 0
    for c in range(len(cols)):
        piv = next((r for r in rows if r[c]), None)
        if piv is None:
            continue
        rows.remove(piv)
        p = piv[c]
        nxt = []
        for r in rows:
            if r[c]:
                r = [p * x - r[c] * y for x, y in zip(r, piv)]
            if any(r):
                nxt.append(r)
        rows = nxt
        rank += 1
    return rank


def brute_force_rays(A, dimension: int | None = None, max_dim: int = BRUTE_FORCE_MAX_DIM) -> list[Ray]:
    """Extreme rays by exhaustive search over supports.

    A ray is extreme iff the columns on its support have a one-dimensional
    kernel; that kernel vector must have constant sign and full support.
    Supersets of an accepted support can never qualify, so they are skipped,
    as are supports wider than rank(A) + 1.
    """
    n = len(A[0]) if A else dimension
    if n is None:
        raise ValueError("dimension is required when A has no rows")
    if n > max_dim:
        raise ValueError(f"brute force limited to dimension {max_dim}, got {n}")
    rank = _rank(A, range(n)) if A else 0
    found: list[int] = []
    out = []
    for size in range(1, min(n, rank + 1) + 1):
        for support in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in support)
            if any(f & mask == f for f in found):
                continue
            if A and _rank(A, support) != size - 1:
                continue
            basis = _kernel_basis(A, support) if A else ([[Fraction(1)]] if size == 1 else [None] * 2)
            if len(basis) != 1:
                continue
            vec = basis[0]
            if all(x > 0 for x in vec) or all(x < 0 for x in vec):
                den = 1
                for x in vec:
                    den = den * x.denominator // gcd(den, x.denominator)
                ints = [abs(int(x * den)) for x in vec]
                full_vec = [0] * n
                for c, x in zip(support, _primitive(ints)):
                    full_vec[c] = x
                found.append(mask)
                out.append(Ray(tuple(full_vec)))
    return sorted(out)


# ---------------------------------------------------------------------------
# vertex surfaces


@dataclass(frozen=True, order=True)
class VertexSurface:
    vector: tuple[int, ...]
    tubes: tuple[TubeDecoration, ...] = ()
    surface_class: SurfaceClass = field(default=SurfaceClass.NORMAL, compare=False)
    pattern: ExceptionalPattern | None = field(default=None, compare=False, repr=False)


def _tet_columns(layout: CoordinateLayout, t: int, kinds) -> list[int]:
    return [layout.index(t, k) for k in kinds]


def _quad_options(extra: PieceKind | None):
    quads = [Quad(q) for q in range(3)]
    if extra is None:
        return [[q] for q in quads]
    ok = [q for q in quads if compatible(extra, q)]
    return [[q] for q in ok] or [[]]


def restrictions(layout: CoordinateLayout, exceptional: dict[int, PieceKind]) -> list[TypeRestriction]:
    """All quad choices with the given exceptional piece per tetrahedron."""
    tris = [Triangle(v) for v in range(4)]
    per_tet = []
    for t in range(layout.tet_count):
        extra = exceptional.get(t)
        opts = []
        for qs in _quad_options(extra):
            kinds = tris + qs + ([extra] if extra is not None else [])
            opts.append(_tet_columns(layout, t, kinds))
        per_tet.append(opts)
    required = tuple(sorted(layout.index(t, k) for t, k in exceptional.items()))
    note = ",".join(f"t{t}:{k}" for t, k in sorted(exceptional.items()))
    out = []
    for combo in itertools.product(*per_tet):
        cols = tuple(sorted(c for group in combo for c in group))
        out.append(TypeRestriction(cols, required, note))
    return out


def mode_restrictions(layout: CoordinateLayout, mode: AdmissibilityMode) -> dict[str, list[TypeRestriction]]:
    """Type restrictions grouped by the ray family they feed."""
    T = layout.tet_count
    groups: dict[str, list[TypeRestriction]] = {"normal": restrictions(layout, {})}
    if mode is AdmissibilityMode.NORMAL:
        return groups
    groups["oct"] = [
        r for t in range(T) for o in range(3) for r in restrictions(layout, {t: Octagon(o)})
    ]
    if mode is AdmissibilityMode.TWO_NORMAL:
        groups["oct2"] = [
            r
            for s, t in itertools.combinations(range(T), 2)
            for o1 in range(3)
            for o2 in range(3)
            for r in restrictions(layout, {s: Octagon(o1), t: Octagon(o2)})
        ]
        groups["dodec"] = [
            r
            for t in range(T)
            for d in range(dodecagon_count())
            for r in restrictions(layout, {t: Dodecagon(d)})
        ]
    return groups


def _rays_for(args):
    A, restriction = args
    rays = extreme_rays(A, restriction)
    return [r for r in rays if all(r.vector[c] == 1 for c in restriction.required)]


def _fan_out(A, rs: list[TypeRestriction], workers: int) -> list[list[Ray]]:
    jobs = [(A, r) for r in rs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_rays_for, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_rays_for(j) for j in jobs]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("TWONORMAL_THREADS", "1")))
    except ValueError:
        return 1


def candidate_tubes(v, layout: CoordinateLayout, *, allow_nested: bool = False, count: int = 1):
    """Tube decorations of ``v``: all ``count``-element sets of candidate tubes.

    Single candidates join adjacent slots along a tetrahedron edge, one per
    pair of pieces (the first edge found); a tube joining a piece to itself
    is offered per edge and on both sides.  With
    ``allow_nested`` a second tube may enclose an adjacent one.
    """
    singles = []
    seen: set = set()
    for t in range(layout.tet_count):
        counts = tet_counts(v, layout, t)
        if not counts:
            continue
        try:
            st = tet_stack(counts)
        except IncompatiblePieces:
            return []
        for e in range(6):
            for i in range(st.weights[e] - 1):
                a, b = st.owner[(e, i)], st.owner[(e, i + 1)]
                # tubes joining two distinct pieces inside one region are isotopic
                key = (t, a, e) if a == b else (t, a, b)
                if key in seen:
                    continue
                seen.add(key)
                singles.append(TubeDecoration(t, e, (i, i + 1)))
                if a == b:
                    singles.append(TubeDecoration(t, e, (i, i + 1), flip=True))
    if count == 1:
        return [(s,) for s in singles]
    if count != 2:
        raise ValueError("at most two tubes")
    out = [tuple(p) for p in itertools.combinations(singles, 2)]
    if allow_nested:
        for s in singles:
            lo, hi = s.slots
            if s.flip or lo == 0:
                continue
            outer = TubeDecoration(s.tet, s.edge, (lo - 1, hi + 1))
            st_w = tet_stack(tet_counts(v, layout, s.tet)).weights[s.edge]
            if hi + 1 < st_w:
                out.append((outer, s))
    return out


def _connects(tubes, comps, v, layout: CoordinateLayout) -> bool:
    """Whether ``tubes`` join all components of the base surface into one."""
    parent = {c: c for c in set(comps.values())}

    def find(c):
        while parent[c] != c:
            c = parent[c]
        return c

    groups = len(parent)
    for tube in tubes:
        st = tet_stack(tet_counts(v, layout, tube.tet))
        a, b = tube_ends(tube, st)
        ra, rb = find(comps[(tube.tet, *a)]), find(comps[(tube.tet, *b)])
        if ra != rb:
            parent[ra] = rb
            groups -= 1
    return groups == 1


def tube_bases(rays, normal_rays) -> list[tuple[int, ...]]:
    """Vectors a tube may decorate: each ray, and each ray plus a normal ray."""
    out = set(rays)
    for a in rays:
        for b in normal_rays:
            out.add(tuple(x + y for x, y in zip(a, b)))
    return sorted(out)


def enumerate_vertex_surfaces(
    tri: Triangulation,
    mode: AdmissibilityMode,
    *,
    allow_nested_tubes: bool = False,
    workers: int | None = None,
) -> list[VertexSurface]:
    """Vertex surfaces of ``tri`` admissible in ``mode``, sorted by (vector, tubes).

    Ray families come from per-restriction double description runs.  Tube
    patterns decorate each base ray, and each base ray plus one normal ray,
    with every admissible choice of tubes that leaves the surface connected;
    the base is normal, or an octagon ray for the octagon-and-tube pattern.
    """
    if not tri.closed:
        raise ValueError("enumeration needs a closed triangulation")
    layout = CoordinateLayout.for_tets(tri.tet_count)
    A = build_matching_system(tri, layout).matrix
    workers = default_workers() if workers is None else workers
    groups = mode_restrictions(layout, mode)
    rays: dict[str, set[tuple[int, ...]]] = {}
    for name, rs in groups.items():
        results = _fan_out(A, rs, workers)
        rays[name] = {r.vector for batch in results for r in batch}
        log.debug("%s: %d restrictions, %d rays", name, len(rs), len(rays[name]))

    sk = compute_skeleton(tri)

    def tubed(bases, count):
        out = set()
        for v in bases:
            options = candidate_tubes(v, layout, count=count, allow_nested=allow_nested_tubes)
            if not options:
                continue
            comps = piece_components(reconstruct(tri, v, (), layout, sk))
            for ts in options:
                if _connects(ts, comps, v, layout):
                    out.add((v, tuple(sorted(ts))))
        return out

    candidates: set[tuple[tuple[int, ...], tuple[TubeDecoration, ...]]] = set()
    if mode is AdmissibilityMode.NORMAL:
        candidates |= {(v, ()) for v in rays["normal"]}
    elif mode is AdmissibilityMode.ALMOST_NORMAL:
        candidates |= {(v, ()) for v in rays["oct"]}
        candidates |= tubed(tube_bases(rays["normal"], rays["normal"]), 1)
    else:
        candidates |= {(v, ()) for v in rays["oct2"] | rays["dodec"]}
        candidates |= tubed(tube_bases(rays["oct"], rays["normal"]), 1)
        candidates |= tubed(tube_bases(rays["normal"], rays["normal"]), 2)

    out = []
    for v, ts in sorted(candidates):
        rep = is_admissible(v, ts, mode, layout, allow_nested_tubes=allow_nested_tubes)
        if rep.ok:
            out.append(VertexSurface(v, ts, rep.surface_class, rep.pattern))
    return out
