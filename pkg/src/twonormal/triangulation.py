"""Gluing tables for triangulated 3-manifolds and their skeleta.

Conventions: face ``i`` of a tetrahedron is the face opposite vertex ``i``;
a gluing of face ``f`` of tetrahedron ``t`` is a pair ``(t', p)`` where the
permutation ``p`` carries vertex labels of ``t`` to vertex labels of ``t'``
(so face ``f`` lands on face ``p(f)`` of ``t'``).

Text format, one line per tetrahedron::

    # comment
    tet 0: 1:0123 1:0123 1:0123 1:0123
    tet 1: 0:0123 0:0123 0:0123 0:0123

with ``-`` marking an unglued face.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations

from .curves import EDGES, edge_of


class TriangulationError(ValueError):
    """Raised for malformed or inconsistent gluing tables.

    ``line`` is the 1-based source line when the error came from parsing.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, order=True)
class Perm4:
    images: tuple[int, int, int, int]

    def __post_init__(self):
        if sorted(self.images) != [0, 1, 2, 3]:
            raise ValueError(f"not a permutation of 0123: {self.images!r}")

    @classmethod
    def parse(cls, text: str) -> Perm4:
        if len(text) != 4 or not text.isdigit():
            raise ValueError(f"bad permutation {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def identity(cls) -> Perm4:
        return cls((0, 1, 2, 3))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> Perm4:
        inv = [0] * 4
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm4(tuple(inv))

    def __mul__(self, other: Perm4) -> Perm4:
        # (self * other)(i) = self(other(i))
        return Perm4(tuple(self.images[other.images[i]] for i in range(4)))

    def sign(self) -> int:
        s, seen = 1, set()
        for i in range(4):
            if i in seen:
                continue
            j, n = i, 0
            while j not in seen:
                seen.add(j)
                j = self.images[j]
                n += 1
            if n % 2 == 0:
                s = -s
        return s

    def __str__(self):
        return "".join(map(str, self.images))


ALL_PERMS = tuple(Perm4(p) for p in permutations(range(4)))


@dataclass(frozen=True)
class Triangulation:
    """A finite set of tetrahedra with (some) faces glued in pairs."""

    gluings: tuple[tuple[tuple[int, Perm4] | None, ...], ...]

    def __post_init__(self):
        if not self.gluings:
            raise TriangulationError("triangulation has no tetrahedra")
        n = len(self.gluings)
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                raise TriangulationError(f"tet {t} needs 4 face entries")
            for f, g in enumerate(row):
                if g is None:
                    continue
                u, p = g
                if not 0 <= u < n:
                    raise TriangulationError(f"tet {t} face {f}: dangling tetrahedron index {u}")
                if u == t and p(f) == f:
                    raise TriangulationError(f"tet {t} face {f}: face glued to itself")
                back = self.gluings[u][p(f)]
                if back is None or back[0] != t or back[1] != p.inverse():
                    raise TriangulationError(
                        f"tet {t} face {f}: non-involutive gluing (partner tet {u} face {p(f)})"
                    )

    @property
    def tet_count(self) -> int:
        return len(self.gluings)

    @property
    def closed(self) -> bool:
        return all(g is not None for row in self.gluings for g in row)

    def glued(self, t: int, f: int) -> tuple[int, Perm4] | None:
        return self.gluings[t][f]

    @classmethod
    def from_gluings(cls, n: int, pairs) -> Triangulation:
        """Build from one-sided gluings ``(t, f, u, perm)``; partners are filled in."""
        table = [[None] * 4 for _ in range(n)]
        for t, f, u, p in pairs:
            if isinstance(p, str):
                p = Perm4.parse(p)
            elif not isinstance(p, Perm4):
                p = Perm4(tuple(p))
            table[t][f] = (u, p)
            table[u][p(f)] = (t, p.inverse())
        return cls(tuple(tuple(row) for row in table))

    def to_text(self) -> str:
        lines = []
        for t, row in enumerate(self.gluings):
            cells = ["-" if g is None else f"{g[0]}:{g[1]}" for g in row]
            lines.append(f"tet {t}: " + " ".join(cells))
        return "\n".join(lines) + "\n"

    def face_pairs(self):
        """Each glued face pair once, as ``(t, f, u, perm)`` with (t, f) < (u, perm(f))."""
        for t, row in enumerate(self.gluings):
            for f, g in enumerate(row):
                if g is not None and (t, f) < (g[0], g[1](f)):
                    yield t, f, g[0], g[1]


_LINE = re.compile(r"^\s*tet\s+(\d+)\s*:\s*(.*)$")
_CELL = re.compile(r"^(\d+):([0-3]{4})$")


def parse_triangulation(text: str) -> Triangulation:
    rows: dict[int, tuple[int, list]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise TriangulationError(f"malformed line {raw.strip()!r}", lineno)
        t = int(m.group(1))
        if t in rows:
            raise TriangulationError(f"tet {t} listed twice", lineno)
        cells = m.group(2).split()
        if len(cells) != 4:
            raise TriangulationError(f"tet {t} needs 4 face entries, got {len(cells)}", lineno)
        row = []
        for cell in cells:
            if cell == "-":
                row.append(None)
                continue
            cm = _CELL.match(cell)
            if not cm:
                raise TriangulationError(f"bad gluing entry {cell!r}", lineno)
            try:
                perm = Perm4.parse(cm.group(2))
            except ValueError as exc:
                raise TriangulationError(str(exc), lineno) from None
            row.append((int(cm.group(1)), perm))
        rows[t] = (lineno, row)
    if not rows:
        raise TriangulationError("no tetrahedra found")
    if sorted(rows) != list(range(len(rows))):
        raise TriangulationError("tetrahedra must be numbered 0..n-1 without gaps")
    n = len(rows)
    for t, (lineno, row) in rows.items():
        for g in row:
            if g is not None and g[0] >= n:
                raise TriangulationError(f"dangling tetrahedron index {g[0]}", lineno)
    try:
        return Triangulation(tuple(tuple(rows[t][1]) for t in range(n)))
    except TriangulationError as exc:
        t = _tet_of(str(exc))
        raise TriangulationError(str(exc), rows[t][0] if t in rows else None) from None


def _tet_of(message: str) -> int | None:
    m = re.match(r"tet (\d+)", message)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class EdgeEmbedding:
    tet: int
    edge: int
    reversed: bool  # class direction runs from the higher to the lower vertex of the tet edge


@dataclass
class EdgeClass:
    embeddings: list[EdgeEmbedding]  # cyclic (link traversal) order
    boundary: bool = False
    self_reversed: bool = False

    @property
    def degree(self) -> int:
        return len(self.embeddings)


@dataclass
class Skeleton:
    edges: list[EdgeClass]
    vertices: list[list[tuple[int, int]]]
    faces: list[list[tuple[int, int]]]
    tets: int
    edge_class_of: dict[tuple[int, int], int] = field(repr=False)
    vertex_class_of: dict[tuple[int, int], int] = field(repr=False)
    face_class_of: dict[tuple[int, int], int] = field(repr=False)

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        return len(self.faces)

    @property
    def T(self) -> int:
        return self.tets

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F - self.T

    @property
    def degrees(self) -> list[int]:
        return [e.degree for e in self.edges]


def compute_skeleton(tri: Triangulation) -> Skeleton:
    n = tri.tet_count

    # faces
    face_class_of, faces = {}, []
    for t in range(n):
        for f in range(4):
            if (t, f) in face_class_of:
                continue
            members = [(t, f)]
            g = tri.glued(t, f)
            if g is not None:
                members.append((g[0], g[1](f)))
            for m in members:
                face_class_of[m] = len(faces)
            faces.append(members)

    # vertices
    vertex_class_of, vertices = {}, []
    for t in range(n):
        for v in range(4):
            if (t, v) in vertex_class_of:
                continue
            idx = len(vertices)
            members, stack = [], [(t, v)]
            vertex_class_of[(t, v)] = idx
            while stack:
                s, w = stack.pop()
                members.append((s, w))
                for f in range(4):
                    g = tri.glued(s, f) if f != w else None
                    if g is None:
                        continue
                    nxt = (g[0], g[1](w))
                    if nxt not in vertex_class_of:
                        vertex_class_of[nxt] = idx
                        stack.append(nxt)
            vertices.append(sorted(members))

    # edges, walked around their links
    edge_class_of, edges = {}, []
    for t in range(n):
        for e, (a, b) in enumerate(EDGES):
            if (t, e) in edge_class_of:
                continue
            c, d = (x for x in range(4) if x not in (a, b))
            ec = _walk_edge(tri, t, a, b, c, d)
            idx = len(edges)
            for emb in ec.embeddings:
                edge_class_of[(emb.tet, emb.edge)] = idx
            edges.append(ec)

    return Skeleton(edges, vertices, faces, n, edge_class_of, vertex_class_of, face_class_of)


def _walk_edge(tri: Triangulation, t, a, b, c, d) -> EdgeClass:
    """Walk around edge ab of tet t.

    A state (t, a, b, c, d) means: edge ab, next exit through the face
    opposite ``d``.  After crossing, the entry face becomes the one we do not
    exit through, so the labels c and d swap roles.
    """

    def step(state):
        t, a, b, c, d = state
        g = tri.glued(t, d)
        if g is None:
            return None
        u, p = g
        return (u, p(a), p(b), p(d), p(c))

    def emb(state):
        t, a, b = state[:3]
        return EdgeEmbedding(t, edge_of(a, b), a > b)

    start = (t, a, b, c, d)
    forward = [start]
    seen = {(t, edge_of(a, b)): start}
    state = step(start)
    boundary = False
    self_reversed = False
    while state is not None and state != start:
        key = (state[0], edge_of(state[1], state[2]))
        if key in seen:
            # returned to the same tet edge in a different state: either reversed
            # (invalid edge) or via the other face ordering
            if seen[key][1:3] != state[1:3]:
                self_reversed = True
            break
        seen[key] = state
        forward.append(state)
        state = step(state)
    if state is None:
        boundary = True
        # walk the other way from the start to collect the rest
        back = []
        s = (t, a, b, d, c)
        s = step(s)
        while s is not None:
            key = (s[0], edge_of(s[1], s[2]))
            if key in seen:
                break
            seen[key] = s
            back.append(s)
            s = step(s)
        forward = list(reversed(back)) + forward
    return EdgeClass([emb(s) for s in forward], boundary, self_reversed)


def vertex_link_euler(tri: Triangulation, sk: Skeleton) -> list[int]:
    """Euler characteristic of each vertex link, from counts alone.

    The link is triangulated by one triangle per tetrahedron corner; its
    vertices are edge ends and its edges are glued face corners.
    """
    out = []
    for members in sk.vertices:
        cls = sk.vertex_class_of[members[0]]
        faces_ = len(members)
        glued_sides = sum(1 for (t, v) in members for f in range(4) if f != v and tri.glued(t, f))
        free_sides = 3 * faces_ - glued_sides
        edges_ = glued_sides // 2 + free_sides
        ends = set()
        for (t, v) in members:
            for w in range(4):
                if w != v:
                    ec = sk.edge_class_of[(t, edge_of(v, w))]
                    ends.add((ec, _end_key(tri, sk, t, v, w, cls)))
        out.append(len(ends) - edges_ + faces_)
    return out


def _end_key(tri, sk, t, v, w, cls):
    # which end of its edge class the corner v of tet edge vw sits on
    ec = sk.edges[sk.edge_class_of[(t, edge_of(v, w))]]
    for emb in ec.embeddings:
        if emb.tet == t and emb.edge == edge_of(v, w):
            lo = min(v, w)
            at_start = (v == lo) != emb.reversed
            return at_start
    raise AssertionError("embedding missing")


def is_closed_manifold(tri: Triangulation) -> bool:
    """Closed, no edge identified with itself in reverse, all vertex links spheres."""
    if not tri.closed:
        return False
    sk = compute_skeleton(tri)
    if any(e.self_reversed for e in sk.edges):
        return False
    return all(x == 2 for x in vertex_link_euler(tri, sk))


def is_orientable(tri: Triangulation) -> bool:
    """Whether tetrahedra can be oriented so every gluing reverses orientation."""
    side: dict[int, int] = {}
    for start in range(tri.tet_count):
        if start in side:
            continue
        side[start] = 1
        todo = [start]
        while todo:
            t = todo.pop()
            for g in tri.gluings[t]:
                if g is None:
                    continue
                u, p = g
                want = -side[t] * p.sign()
                if u not in side:
                    side[u] = want
                    todo.append(u)
                elif side[u] != want:
                    return False
    return True


BUILTINS = {
    "tet1": "# single tetrahedron, no gluings\ntet 0: - - - -\n",
    "double2": (
        "# double of a tetrahedron (the 3-sphere)\n"
        "tet 0: 1:0123 1:0123 1:0123 1:0123\n"
        "tet 1: 0:0123 0:0123 0:0123 0:0123\n"
    ),
}


def builtin(name: str) -> Triangulation:
    try:
        return parse_triangulation(BUILTINS[name])
    except KeyError:
        raise KeyError(f"unknown built-in triangulation {name!r}") from None
