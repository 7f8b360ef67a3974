"""Acceptance suite.

Each criterion prints one PASS/FAIL line.  Run directly with
``python3 tests/test_acceptance.py`` or through pytest.
"""

from __future__ import annotations

import itertools
import random
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from conftest import data_names, load_data
from test_matching import L2, vec, vertex_link_vectors
from twonormal import curves
from twonormal.enumeration import brute_force_rays, enumerate_vertex_surfaces, extreme_rays
from twonormal.ghs_order import CompressionError, SurfaceComplexity, complexity, compress
from twonormal.matching import TWO_NORMAL_CLASSES, AdmissibilityMode, is_admissible
from twonormal.pieces import (
    CoordinateLayout,
    Dodecagon,
    Octagon,
    PieceLengthError,
    Triangle,
    TubeDecoration,
    register_piece,
    taxonomy,
    tet_stack,
)
from twonormal.surface import combinatorial_euler, reconstruct, report
from twonormal.triangulation import builtin, compute_skeleton

N, A, TWO = AdmissibilityMode.NORMAL, AdmissibilityMode.ALMOST_NORMAL, AdmissibilityMode.TWO_NORMAL


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(n: int, title: str):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            with capsys.disabled():
                status = "PASS" if ok else "FAIL"
                print(f"\n[{status}] criterion {n}: {title} ({time.perf_counter() - t0:.2f}s)")

    return run


def test_connected_curve_lengths(criterion):
    with criterion(1, "connected curve lengths are 3 or a positive multiple of 4"):
        curves._enumerate.cache_clear()
        t0 = time.perf_counter()
        found = curves.enumerate_curves(24)
        elapsed = time.perf_counter() - t0
        lengths = {c.length for c in found}
        assert all(c.is_connected for c in found)
        assert all(n == 3 or (n % 4 == 0 and n > 0) for n in lengths), lengths
        assert {3, 4, 8, 12, 16, 20, 24} <= lengths
        assert elapsed < 10


def test_long_curves_of_distinct_lengths_never_coexist(criterion):
    with criterion(2, "long curves of distinct lengths are never disjoint"):
        long = [c for c in curves.enumerate_curves(24) if c.length % 4 == 0]
        pairs = [(a, b) for a, b in itertools.combinations(long, 2) if a.length != b.length]
        assert pairs
        assert not [p for p in pairs if curves.disjointly_realizable(*p)]


def test_piece_length_cap(criterion):
    with criterion(3, "pieces have boundary length 3, 4, 8 or 12 only"):
        lengths = {c.length for group in taxonomy().values() for c in group}
        assert lengths == {3, 4, 8, 12}
        for n in (16, 20):
            big = curves.curves_of_length(n)
            assert big
            for c in big:
                with pytest.raises(PieceLengthError):
                    register_piece(c)


def test_double_description_matches_brute_force(criterion):
    with criterion(4, "double description equals brute force on 120 random systems"):
        rng = random.Random(20240601)
        t0 = time.perf_counter()
        for _ in range(120):
            n = rng.randint(1, 12)
            rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(rng.randint(0, n))]
            dd = extreme_rays(rows, dimension=n)
            assert dd == brute_force_rays(rows, dimension=n), rows
            assert len(set(dd)) == len(dd)
        assert time.perf_counter() - t0 < 60


def test_double2_normal_census(criterion, double2):
    with criterion(5, "double2 vertex links and Euler characteristic agreement"):
        t0 = time.perf_counter()
        sk = compute_skeleton(double2)
        found = enumerate_vertex_surfaces(double2, N)
        vectors = {s.vector for s in found}
        links = [tuple(v) for v in vertex_link_vectors(double2)]
        assert len(links) == 4 and set(links) <= vectors
        for v in links:
            r = report(reconstruct(double2, v, (), L2, sk))
            assert r.component_count == 1 and r.euler_characteristic == 2
        for s in found:
            r = report(reconstruct(double2, s.vector, s.tubes, L2, sk))
            assert r.euler_characteristic == r.combinatorial_euler
            assert r.euler_characteristic == combinatorial_euler(s.vector, len(s.tubes), L2, sk)
        assert time.perf_counter() - t0 < 30


def _small_triangulations():
    yield "double2", builtin("double2")
    for name in data_names():
        tri = load_data(name)
        if tri.tet_count <= 4:
            yield name, tri


def test_two_normal_classes_are_exhaustive(criterion):
    with criterion(6, "two-normal records fall in the four classes; bad patterns rejected"):
        seen = 0
        for name, tri in _small_triangulations():
            for s in enumerate_vertex_surfaces(tri, TWO):
                assert s.surface_class in TWO_NORMAL_CLASSES, (name, s)
                seen += 1
        assert seen
        bad = [
            vec(L2, {(0, Octagon(0)): 1, (1, Dodecagon(0)): 1}),
            vec(L2, {(0, Octagon(1)): 1, (0, Dodecagon(0)): 1}),
            vec(L2, {(0, Octagon(0)): 1, (0, Octagon(1)): 1}),
            vec(L2, {(1, Octagon(2)): 2}),
        ]
        for v in bad:
            assert not is_admissible(v, [], TWO, L2)
        assert is_admissible(vec(L2, {(0, Octagon(0)): 1, (1, Octagon(1)): 1}), [], TWO, L2)


def _find_slots(counts, pattern):
    """First (edge, slot) whose consecutive owners have the given kinds."""
    st = tet_stack(counts)
    for e in range(6):
        for i in range(st.weights[e] - len(pattern) + 1):
            owners = [st.owner[(e, i + j)] for j in range(len(pattern))]
            if [o[0].kind for o in owners] == pattern and len(set(owners)) == len(owners):
                return e, i
            if pattern == ["self"] and i + 1 < st.weights[e] and st.owner[(e, i)] == st.owner[(e, i + 1)]:
                return e, i
    raise AssertionError(f"no slots for {pattern}")


def test_tube_accounting(criterion, double2):
    with criterion(7, "tubes cost 2 in Euler characteristic; self tubes and pants legs restricted"):
        checked = 0
        for tri in (double2, load_data("t3_0.tri"), load_data("z2_t2_0.tri")):
            lay = CoordinateLayout.for_tets(tri.tet_count)
            sk = compute_skeleton(tri)
            for mode in (A, TWO):
                for s in enumerate_vertex_surfaces(tri, mode):
                    if not s.tubes:
                        continue
                    base = report(reconstruct(tri, s.vector, (), lay, sk)).euler_characteristic
                    for k in range(1, len(s.tubes) + 1):
                        for part in itertools.combinations(s.tubes, k):
                            r = report(reconstruct(tri, s.vector, part, lay, sk))
                            assert r.euler_characteristic == base - 2 * k
                            checked += 1
        assert checked

        def self_tube(kind):
            counts = {kind: 1}
            e, i = _find_slots(counts, ["self"])
            v = vec(L2, {(0, kind): 1})
            return is_admissible(v, [TubeDecoration(0, e, (i, i + 1))], A if kind.kind == "oct" else TWO, L2)

        oct_report = self_tube(Octagon(0))
        assert "SELF_TUBE_LENGTH" not in oct_report.codes
        assert "SELF_TUBE_LENGTH" in self_tube(Dodecagon(0)).codes
        tri_counts = {Triangle(0): 2}
        e, i = _find_slots(tri_counts, ["tri", "tri"])
        rep = is_admissible(vec(L2, {(0, Triangle(0)): 2}), [TubeDecoration(0, e, (i, i + 1))], A, L2)
        assert rep and "SELF_TUBE_LENGTH" not in rep.codes

        normal_legs = {Triangle(0): 3, Triangle(1): 1}
        v = vec(L2, {(0, k): c for k, c in normal_legs.items()})
        e, i = _find_slots({Triangle(0): 3}, ["tri", "tri", "tri"])
        tubes = [TubeDecoration(0, e, (i, i + 1)), TubeDecoration(0, e, (i + 1, i + 2))]
        assert "PANTS_BOUNDARY" not in is_admissible(v, tubes, TWO, L2).codes

        oct_legs = {Triangle(0): 1, Octagon(0): 1, Triangle(2): 1}
        e, i = _find_slots(oct_legs, ["tri", "oct", "tri"])
        v = vec(L2, {(0, k): c for k, c in oct_legs.items()})
        tubes = [TubeDecoration(0, e, (i, i + 1)), TubeDecoration(0, e, (i + 1, i + 2))]
        assert "PANTS_BOUNDARY" in is_admissible(v, tubes, TWO, L2).codes


def test_compression_lowers_complexity(criterion):
    with criterion(8, "every valid compression strictly lowers complexity"):
        t0 = time.perf_counter()
        values = range(-10, 3)
        valid = 0
        for size in (1, 2, 3):
            for chis in itertools.combinations_with_replacement(values, size):
                f = SurfaceComplexity(chis)
                for chi in set(chis):
                    attempts = [(False, None)]
                    attempts += [(True, (a, chi + 2 - a)) for a in range(chi - 2, 5)]
                    for separating, split in attempts:
                        try:
                            g = compress(f, chi, separating, split)
                        except (CompressionError, ValueError):
                            continue
                        assert complexity(g) < complexity(f), (f, chi, split, g)
                        valid += 1
        assert valid
        assert time.perf_counter() - t0 < 5


def _census_without_version():
    out = subprocess.run(
        [sys.executable, "-m", "twonormal", "enumerate", "--mode", "2normal", "double2", "--format", "json"],
        capture_output=True,
        check=True,
    ).stdout
    lines = out.splitlines(keepends=True)
    kept = [ln for ln in lines if not ln.lstrip().startswith(b'"version"')]
    assert len(kept) == len(lines) - 1
    return b"".join(kept)


def test_census_is_deterministic(criterion):
    with criterion(9, "two enumerate runs give byte-identical censuses"):
        first = _census_without_version()
        second = _census_without_version()
        assert first == second
        assert b'"surfaces"' in first


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", *sys.argv[1:]]))
