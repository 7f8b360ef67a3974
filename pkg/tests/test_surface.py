from __future__ import annotations

import pytest

from conftest import data_names, load_data
from homology import h1_mod2
from test_matching import L2, vec, vertex_link_vectors
from twonormal.enumeration import enumerate_vertex_surfaces
from twonormal.matching import AdmissibilityMode, SurfaceClass
from twonormal.pieces import CoordinateLayout, Octagon, Quad, Triangle, TubeDecoration
from twonormal.surface import (
    ReconstructionError,
    UnclassifiableError,
    classify,
    combinatorial_euler,
    reconstruct,
    report,
)
from twonormal.triangulation import builtin, compute_skeleton, is_orientable

N, A, TWO = AdmissibilityMode.NORMAL, AdmissibilityMode.ALMOST_NORMAL, AdmissibilityMode.TWO_NORMAL


def rep(tri, v, tubes=()):
    return report(reconstruct(tri, v, tubes))


def test_vertex_links_are_spheres(double2):
    for v in vertex_link_vectors(double2):
        r = rep(double2, v)
        assert r.euler_characteristic == 2 and r.component_count == 1 and r.components[0].is_sphere


def test_quad_sphere_and_edge_weights(double2):
    r = rep(double2, vec(L2, {(0, Quad(0)): 1, (1, Quad(0)): 1}))
    assert r.euler_characteristic == 2 and r.orientable
    assert sorted(r.edge_weights) == [0, 0, 1, 1, 1, 1]


def test_empty_surface(double2):
    r = rep(double2, [0] * 32)
    assert r.euler_characteristic == 0 and r.component_count == 0


def test_parallel_copies_are_separate(double2):
    r = rep(double2, vec(L2, {(0, Triangle(2)): 3, (1, Triangle(2)): 3}))
    assert r.component_count == 3 and r.euler_characteristic == 6


def test_tube_joins_two_spheres(double2):
    v = vec(L2, {(0, Triangle(0)): 2, (1, Triangle(0)): 2})
    r = rep(double2, v, [TubeDecoration(0, 0, (0, 1))])
    assert r.euler_characteristic == 2 and r.component_count == 1 and r.orientable


def test_tube_between_different_vertex_links(double2):
    v = vec(L2, {(0, Triangle(0)): 1, (1, Triangle(0)): 1, (0, Triangle(1)): 1, (1, Triangle(1)): 1})
    r = rep(double2, v, [TubeDecoration(1, 0, (0, 1))])
    assert (r.euler_characteristic, r.component_count, r.orientable) == (2, 1, True)


@pytest.mark.parametrize("flip", [False, True])
def test_self_tube_on_octagon_is_torus(double2, flip):
    v = vec(L2, {(0, Octagon(0)): 1, (1, Octagon(0)): 1})
    assert rep(double2, v).euler_characteristic == 2
    r = rep(double2, v, [TubeDecoration(0, 0, (0, 1), flip)])
    assert r.euler_characteristic == 0 and r.component_count == 1 and r.orientable


def test_three_parallel_tubed_into_pants(double2):
    v = vec(L2, {(0, Triangle(0)): 3, (1, Triangle(0)): 3})
    r = rep(double2, v, [TubeDecoration(0, 0, (0, 1)), TubeDecoration(0, 0, (1, 2))])
    assert (r.euler_characteristic, r.component_count) == (2, 1)


def test_two_tubes_same_pair_make_torus(double2):
    v = vec(L2, {(0, Triangle(0)): 2, (1, Triangle(0)): 2})
    r = rep(double2, v, [TubeDecoration(0, 0, (0, 1)), TubeDecoration(1, 0, (0, 1))])
    assert (r.euler_characteristic, r.component_count, r.orientable) == (0, 1, True)


def test_bad_vectors(double2):
    with pytest.raises(ReconstructionError):
        reconstruct(double2, vec(L2, {(0, Quad(0)): 1}))
    with pytest.raises(ReconstructionError):
        reconstruct(double2, [0] * 5)
    with pytest.raises(ReconstructionError):
        reconstruct(double2, vec(L2, {(0, Quad(0)): 1, (0, Quad(1)): 1, (1, Quad(0)): 1, (1, Quad(1)): 1}))
    with pytest.raises(ReconstructionError):
        reconstruct(builtin("tet1"), [0] * 16)


def test_classify(double2):
    assert classify(vec(L2, {(0, Octagon(0)): 1, (1, Octagon(1)): 1}), [], L2) is SurfaceClass.TWO_OCTAGONS
    with pytest.raises(UnclassifiableError):
        classify(vec(L2, {(0, Octagon(0)): 1, (0, Octagon(1)): 1}), [], L2)


def _names():
    return ["double2"] + [n for n in data_names() if n.startswith(("z2_", "t2_", "t3_"))]


def _tri(name):
    return builtin(name) if name == "double2" else load_data(name)


@pytest.mark.parametrize("name", _names())
def test_census_invariants(name):
    """Both Euler characteristics agree, tubes cost 2 each, and one-sided
    surfaces appear only where H1(M; Z/2) allows them."""
    tri = _tri(name)
    lay = CoordinateLayout.for_tets(tri.tet_count)
    sk = compute_skeleton(tri)
    no_one_sided = h1_mod2(tri) == 0 and is_orientable(tri)
    for mode in (N, A):
        for s in enumerate_vertex_surfaces(tri, mode):
            r = report(reconstruct(tri, s.vector, s.tubes, lay, sk))
            base = report(reconstruct(tri, s.vector, (), lay, sk))
            assert r.euler_characteristic == r.combinatorial_euler
            assert r.euler_characteristic == combinatorial_euler(s.vector, len(s.tubes), lay, sk)
            assert r.euler_characteristic == base.euler_characteristic - 2 * len(s.tubes)
            if no_one_sided:
                assert r.orientable


@pytest.mark.parametrize("name", ["t3_0.tri", "t3_1.tri", "z2_t3_0.tri", "double2"])
def test_orientability_matches_doubling(name):
    """In an orientable manifold a connected surface is orientable iff it is
    two-sided, iff doubling it gives two parallel copies."""
    tri = _tri(name)
    assert is_orientable(tri)
    seen = 0
    for mode in (N, A):
        for s in enumerate_vertex_surfaces(tri, mode):
            if s.tubes:
                continue
            r = rep(tri, s.vector)
            if r.component_count != 1:
                continue
            doubled = rep(tri, tuple(2 * x for x in s.vector))
            assert doubled.orientable
            assert r.orientable == (doubled.component_count == 2)
            seen += 1
    assert seen
