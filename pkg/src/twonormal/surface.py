"""Cell-complex reconstruction of piece vectors, Euler characteristic,
components, orientability and classification.

Cells of the reconstructed surface:

* vertices -- crossing points of the surface with the 1-skeleton (glued
  around edge classes), plus four hole corners per tube end;
* edges -- normal arcs (one per glued pair of arcs across a face), plus
  the slit and hole edges of each tube end and two seams per tube;
* faces -- one per piece copy, plus two bands per tube.

A tube end is a square hole cut from its piece, reached from a corner of
the piece by a slit so that the piece stays a single 2-cell.  Whether the
two bands of a tube glue the holes by a reflection or by the identity is
decided by the side of each piece the tube sits on, so orientability of
tubed surfaces reflects the embedding.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import EDGES, Arc, edge_of, face_vertices
from .matching import ExceptionalPattern, SurfaceClass, extract_pattern, tet_counts, tube_ends
from .pieces import (
    CoordinateLayout,
    PieceKind,
    TetStack,
    tet_stack,
    TubeDecoration,
    boundary_curve,
    vertex_sides,
)
from .triangulation import Skeleton, Triangulation, compute_skeleton


class ReconstructionError(ValueError):
    pass


class InconsistencyError(AssertionError):
    """Two independent computations disagree; indicates a bug, never data."""


class UnclassifiableError(ValueError):
    pass


@dataclass
class SurfaceComplex:
    vertex_count: int
    edges: list[tuple[int, int]]
    faces: list[list[tuple[int, int]]]  # boundary words of (edge, +1/-1)
    face_tags: list[tuple]  # ("piece", tet, kind, copy) or ("tube", index, band)
    tubes: list[TubeDecoration]
    vector: tuple[int, ...]
    layout: CoordinateLayout
    skeleton: Skeleton
    edge_weights: list[int]  # surface vertices on each edge class
    tube_flips: list[bool] = field(default_factory=list)

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - len(self.edges) + len(self.faces)


@dataclass
class ComponentReport:
    chi: int
    orientable: bool
    surface_class: SurfaceClass | None
    faces: int

    @property
    def is_sphere(self) -> bool:
        return self.orientable and self.chi == 2

    def as_dict(self) -> dict:
        return {
            "chi": self.chi,
            "orientable": self.orientable,
            "sphere": self.is_sphere,
            "class": None if self.surface_class is None else self.surface_class.value,
        }


@dataclass
class SurfaceReport:
    euler_characteristic: int
    components: list[ComponentReport]
    edge_weights: list[int]
    combinatorial_euler: int

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def orientable(self) -> bool:
        return all(c.orientable for c in self.components)


def _positive_cycle(f: int) -> tuple[int, int, int]:
    """Vertices of face ``f`` in the cyclic order of its outward orientation."""
    a, b, c = face_vertices(f)
    return (a, b, c) if f % 2 == 0 else (a, c, b)


def _next_in_face(f: int, v: int) -> tuple[int, int]:
    cyc = _positive_cycle(f)
    i = cyc.index(v)
    return cyc[(i + 1) % 3], cyc[(i + 2) % 3]


def _point(stack: TetStack, near: int, far: int, rank: int) -> tuple[int, int]:
    e = edge_of(near, far)
    return (e, rank if near < far else stack.weights[e] - 1 - rank)


def _stacks(v, layout: CoordinateLayout) -> list[TetStack]:
    return [tet_stack(tet_counts(v, layout, t)) for t in range(layout.tet_count)]


def reconstruct(
    tri: Triangulation,
    v,
    tubes=(),
    layout: CoordinateLayout | None = None,
    skeleton: Skeleton | None = None,
) -> SurfaceComplex:
    """Build the closed cell complex of vector ``v`` decorated with ``tubes``.

    The vector must satisfy the matching equations and be realizable in
    every tetrahedron; tubes must reference existing adjacent slots.
    """
    layout = layout or CoordinateLayout.for_tets(tri.tet_count)
    sk = skeleton or compute_skeleton(tri)
    v = tuple(v)
    tubes = list(tubes)
    if len(v) != layout.dimension:
        raise ReconstructionError("vector does not fit the layout")
    if not tri.closed:
        raise ReconstructionError("reconstruction needs a closed triangulation")
    try:
        stacks = _stacks(v, layout)
    except ValueError as exc:
        raise ReconstructionError(str(exc)) from None

    # crossing points -> surface vertices
    point_ids: dict[tuple[int, int, int], int] = {}
    for t, st in enumerate(stacks):
        for e in range(6):
            for pos in range(st.weights[e]):
                point_ids[(t, e, pos)] = len(point_ids)
    parent = list(range(len(point_ids)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # arcs glued across faces -> surface edges
    arc_edge: dict[tuple[int, Arc], tuple[int, int]] = {}
    edge_ends: list[tuple[tuple, tuple]] = []
    for t, f, u, p in tri.face_pairs():
        g = p(f)
        st, su = stacks[t], stacks[u]
        for c in face_vertices(f):
            count = st.realization.curve.arc(f, c)
            if count != su.realization.curve.arc(g, p(c)):
                raise ReconstructionError(f"matching fails across tet {t} face {f}")
            x, y = (w for w in face_vertices(f) if w != c)
            sign = 1 if p(x) < p(y) else -1
            for k in range(count):
                eid = len(edge_ends)
                arc_edge[(t, Arc(f, c, k))] = (eid, 1)
                arc_edge[(u, Arc(g, p(c), k))] = (eid, sign)
                ends = []
                for w in (x, y):
                    a = _point(st, c, w, k)
                    b = _point(su, p(c), p(w), k)
                    ra, rb = find(point_ids[(t, *a)]), find(point_ids[(u, *b)])
                    if ra != rb:
                        parent[ra] = rb
                    ends.append((t, *a))
                edge_ends.append(tuple(ends))

    roots = sorted({find(i) for i in range(len(point_ids))})
    vid = {r: i for i, r in enumerate(roots)}
    vertex_of = {key: vid[find(i)] for key, i in point_ids.items()}
    edges = [(vertex_of[a], vertex_of[b]) for a, b in edge_ends]
    vertex_count = len(roots)

    faces: list[list[tuple[int, int]]] = []
    tags: list[tuple] = []
    face_index: dict[tuple[int, PieceKind, int], int] = {}
    face_points: list[list[tuple[int, int]]] = []
    for t, st in enumerate(stacks):
        for (kind, copy) in st.pieces():
            comp = st.components[(kind, copy)]
            word, agree = [], set()
            sides = vertex_sides(kind)
            n = len(comp.arcs)
            for i, arc in enumerate(comp.arcs):
                start = comp.points[i]
                c = arc.corner
                lo = min(w for w in face_vertices(arc.face) if w != c)
                local = 1 if start == _point(st, c, lo, arc.rank) else -1
                eid, sign = arc_edge[(t, arc)]
                word.append((eid, local * sign))
                # geometric direction: normal toward side 1
                gx, _gy = _next_in_face(arc.face, c)
                sigma = sides[c] ^ (st.own_rank((kind, copy), arc) & 1)
                geo_from = gx if sigma == 1 else _gy
                agree.add(start == _point(st, c, geo_from, arc.rank))
            if len(agree) != 1:
                raise InconsistencyError(f"piece {kind} in tet {t} has no consistent orientation")
            pts = list(comp.points)
            if agree == {False}:
                word = [(e, -s) for e, s in reversed(word)]
                # reversed word[j] starts where the old word[n - 1 - j] ended
                pts = [comp.points[(n - j) % n] for j in range(n)]
            face_index[(t, kind, copy)] = len(faces)
            faces.append(word)
            face_points.append(pts)
            tags.append(("piece", t, kind, copy))

    # tubes
    holes: dict[int, list[tuple[int, list]]] = {}
    flips = []
    for ti, tube in enumerate(tubes):
        if not 0 <= tube.tet < tri.tet_count:
            raise ReconstructionError(f"{tube}: no such tetrahedron")
        st = stacks[tube.tet]
        if tube.slots[1] >= st.weights[tube.edge]:
            raise ReconstructionError(f"{tube}: slot out of range")
        a_pc, b_pc = tube_ends(tube, st)
        a_lo = EDGES[tube.edge][0]
        side_a = _tube_side(st, a_pc, tube.edge, tube.slots[0], after=True, low=a_lo)
        side_b = _tube_side(st, b_pc, tube.edge, tube.slots[1], after=False, low=a_lo)
        reflect = side_a == side_b
        flips.append(not reflect)
        # hole corners and edges
        hv = {}
        he = {}
        for end in ("a", "b"):
            hv[end] = list(range(vertex_count, vertex_count + 4))
            vertex_count += 4
            he[end] = []
            for k in range(4):
                he[end].append(len(edges))
                edges.append((hv[end][k], hv[end][(k + 1) % 4]))
        for end, pc, slot in (("a", a_pc, tube.slots[0]), ("b", b_pc, tube.slots[1])):
            fidx = face_index[(tube.tet, pc[0], pc[1])]
            at = vertex_of[(tube.tet, tube.edge, slot)]
            slit = len(edges)
            edges.append((at, hv[end][0]))
            pos = face_points[fidx].index((tube.edge, slot))
            insert = [(slit, 1)] + [(he[end][k], -1) for k in (3, 2, 1, 0)] + [(slit, -1)]
            holes.setdefault(fidx, []).append((pos, insert))
        pi = (lambda k: (-k) % 4) if reflect else (lambda k: k)
        l0 = len(edges)
        edges.append((hv["a"][0], hv["b"][pi(0)]))
        l2 = len(edges)
        edges.append((hv["a"][2], hv["b"][pi(2)]))
        hb = he["b"]
        if reflect:
            b_path1 = [(hb[2], 1), (hb[3], 1)]  # h2 -> h3 -> h0
            b_path2 = [(hb[0], 1), (hb[1], 1)]  # h0 -> h1 -> h2
        else:
            b_path1 = [(hb[1], -1), (hb[0], -1)]  # h2 -> h1 -> h0
            b_path2 = [(hb[3], -1), (hb[2], -1)]  # h0 -> h3 -> h2
        ha = he["a"]
        band1 = [(ha[0], 1), (ha[1], 1), (l2, 1)] + b_path1 + [(l0, -1)]
        band2 = [(ha[2], 1), (ha[3], 1), (l0, 1)] + b_path2 + [(l2, -1)]
        faces.extend([band1, band2])
        tags.extend([("tube", ti, 0), ("tube", ti, 1)])

    for fidx, inserts in holes.items():
        word = faces[fidx]
        # a hole inserted at vertex position i goes before word[i]
        for pos, ins in sorted(inserts, key=lambda x: -x[0]):
            word[pos:pos] = ins

    weights = [0] * sk.E
    for (t, e, pos) in point_ids:
        emb0 = sk.edges[sk.edge_class_of[(t, e)]].embeddings[0]
        if (emb0.tet, emb0.edge) == (t, e):
            weights[sk.edge_class_of[(t, e)]] += 1

    return SurfaceComplex(vertex_count, edges, faces, tags, tubes, v, layout, sk, weights, flips)


def _tube_side(st: TetStack, pc, edge: int, slot: int, *, after: bool, low: int) -> int:
    """Side of piece ``pc`` just after (or before) its crossing at ``slot``."""
    crossings = st.crossings(pc, edge)
    j = crossings.index(slot)
    passed = j + 1 if after else j
    return vertex_sides(pc[0])[low] ^ (passed & 1)


def _components_and_orientability(cx: SurfaceComplex):
    nf = len(cx.faces)
    incid: dict[int, list[tuple[int, int]]] = {}
    for fi, word in enumerate(cx.faces):
        for e, s in word:
            incid.setdefault(e, []).append((fi, s))
    parent = list(range(nf))
    parity = [0] * nf

    def find(i):
        path = []
        while parent[i] != i:
            path.append(i)
            i = parent[i]
        acc = 0
        for node in reversed(path):
            acc ^= parity[node]
            parity[node] = acc
            parent[node] = i
        return i, (parity[path[0]] if path else 0)

    bad_roots = set()
    conflicts = []
    for e in range(len(cx.edges)):
        inc = incid.get(e, [])
        if len(inc) != 2:
            raise InconsistencyError(f"surface edge {e} lies on {len(inc)} face sides")
        (f1, s1), (f2, s2) = inc
        # orientations o1, o2 in {0,1}; consistent iff s1*(-1)^o1 == -s2*(-1)^o2
        need = 0 if s1 == -s2 else 1
        r1, p1 = find(f1)
        r2, p2 = find(f2)
        if r1 == r2:
            if p1 ^ p2 != need:
                conflicts.append(r1)
        else:
            parent[r1] = r2
            parity[r1] = p1 ^ p2 ^ need
    for r in conflicts:
        bad_roots.add(find(r)[0])
    comp_of = [find(i)[0] for i in range(nf)]
    return comp_of, {find(r)[0] for r in bad_roots}


def piece_components(cx: SurfaceComplex) -> dict[tuple[int, PieceKind, int], int]:
    """Component index (0, 1, ...) of every piece copy ``(tet, kind, copy)``."""
    comp_of, _ = _components_and_orientability(cx)
    index: dict[int, int] = {}
    out = {}
    for fi, tag in enumerate(cx.face_tags):
        if tag[0] == "piece":
            out[tag[1:]] = index.setdefault(comp_of[fi], len(index))
    return out


def combinatorial_euler(v, n_tubes: int, layout: CoordinateLayout, sk: Skeleton) -> int:
    """Euler characteristic from the vector alone.

    Each piece contributes one face, half of each boundary arc, and
    ``1/degree`` of each crossing point; each tube removes two.
    """
    total = Fraction(0)
    for i, x in enumerate(v):
        if not x:
            continue
        t, kind = layout.coordinate(i)
        curve = boundary_curve(kind)
        corner = sum(
            Fraction(w, sk.edges[sk.edge_class_of[(t, e)]].degree)
            for e, w in enumerate(curve.edge_weights)
            if w
        )
        total += x * (1 - Fraction(curve.length, 2) + corner)
    total -= 2 * n_tubes
    if total.denominator != 1:
        raise InconsistencyError(f"non-integral Euler characteristic {total}")
    return int(total)


def vector_edge_weights(v, layout: CoordinateLayout, sk: Skeleton) -> list[int]:
    """Crossings of the surface with each edge class, read off the vector.

    Every embedding of an edge class must report the same count.
    """
    out = []
    for ec in sk.edges:
        seen = set()
        for emb in ec.embeddings:
            seen.add(
                sum(
                    v[layout.index(emb.tet, k)] * boundary_curve(k).edge_weights[emb.edge]
                    for k in layout.kinds
                    if v[layout.index(emb.tet, k)]
                )
            )
        if len(seen) != 1:
            raise InconsistencyError(f"edge class weights disagree across embeddings: {sorted(seen)}")
        out.append(seen.pop())
    return out


def report(cx: SurfaceComplex) -> SurfaceReport:
    comp_of, nonorientable = _components_and_orientability(cx)
    roots = sorted(set(comp_of), key=comp_of.index)
    faces_in = Counter(comp_of)
    edges_in = Counter()
    verts_in: dict[int, set] = {r: set() for r in roots}
    edge_face = {}
    for fi, word in enumerate(cx.faces):
        for e, _ in word:
            edge_face[e] = fi
    for e, (a, b) in enumerate(cx.edges):
        r = comp_of[edge_face[e]]
        edges_in[r] += 1
        verts_in[r].update((a, b))
    layout = cx.layout
    pieces_by_root: dict[int, list] = {r: [] for r in roots}
    tubes_by_root: dict[int, list] = {r: [] for r in roots}
    for fi, tag in enumerate(cx.face_tags):
        if tag[0] == "piece":
            pieces_by_root[comp_of[fi]].append(tag)
        elif tag[2] == 0:
            tubes_by_root[comp_of[fi]].append(cx.tubes[tag[1]])
    comps = []
    for r in roots:
        chi = len(verts_in[r]) - edges_in[r] + faces_in[r]
        pat = ExceptionalPattern(tubes=tubes_by_root[r])
        octs, dods = Counter(), Counter()
        for _, t, kind, _copy in pieces_by_root[r]:
            if kind.kind == "oct":
                octs[(t, kind.index)] += 1
            elif kind.kind == "dodec":
                dods[(t, kind.index)] += 1
        pat.octagons = [(t, i, m) for (t, i), m in sorted(octs.items())]
        pat.dodecagons = [(t, i, m) for (t, i), m in sorted(dods.items())]
        comps.append(ComponentReport(chi, r not in nonorientable, pat.surface_class(), faces_in[r]))
    comps.sort(key=lambda c: (-c.faces, c.chi, not c.orientable))
    chi = cx.euler_characteristic
    if sum(c.chi for c in comps) != chi:
        raise InconsistencyError("component Euler characteristics do not add up")
    comb = combinatorial_euler(cx.vector, len(cx.tubes), layout, cx.skeleton)
    if comb != chi:
        raise InconsistencyError(f"Euler characteristic {chi} from cells but {comb} from pieces")
    vw = vector_edge_weights(cx.vector, layout, cx.skeleton)
    if vw != cx.edge_weights:
        raise InconsistencyError("edge weights from cells disagree with the vector")
    return SurfaceReport(chi, comps, vw, comb)


def classify(v, tubes, layout: CoordinateLayout) -> SurfaceClass:
    cls = extract_pattern(v, tubes, layout).surface_class()
    if cls is None:
        raise UnclassifiableError("exceptional pieces match no listed pattern")
    return cls
