import random

import pytest
from conftest import brute_automorphisms
from hypothesis import given, settings
from hypothesis import strategies as st

from wildtori.cluster import enumerate_proper_spheres
from wildtori.surface import (
    DegreeNotThree,
    EdgeNotInTwoFaces,
    FaceNotInSurface,
    SurfaceIsTetrahedron,
    UmbrellaBroken,
    are_isomorphic,
    attach_tetrahedron,
    automorphisms,
    canonical_form,
    isomorphism,
    remove_tetrahedron,
    report,
    tetrahedron,
    validate_surface,
)

DOUBLE = attach_tetrahedron(tetrahedron(), (0, 1, 2))


def test_tetrahedron_counts():
    T = validate_surface([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    assert (T.num_vertices, T.num_edges, T.num_faces) == (4, 6, 4)
    r = report(T)
    assert r.euler_characteristic == 2 and r.genus == 0 and r.orientable


def test_single_face_is_not_closed():
    with pytest.raises(EdgeNotInTwoFaces):
        validate_surface([(1, 2, 3)])


def test_two_tetrahedra_at_one_vertex():
    a = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    b = [(0, 4, 5), (0, 4, 6), (0, 5, 6), (4, 5, 6)]
    with pytest.raises(UmbrellaBroken):
        validate_surface(a + b)


def test_double_tetrahedron():
    assert (DOUBLE.num_vertices, DOUBLE.num_edges, DOUBLE.num_faces) == (5, 9, 6)
    assert report(DOUBLE).euler_characteristic == 2


def test_attach_at_degree_three_vertex():
    apex = max(DOUBLE.vertices)
    f = DOUBLE.faces_of_vertex[apex][0]
    S = attach_tetrahedron(DOUBLE, f)
    assert S.num_faces == 8
    assert len(S.degree_three_vertices()) == 2
    assert report(S).euler_characteristic == 2


def test_attach_unknown_face():
    with pytest.raises(FaceNotInSurface):
        attach_tetrahedron(tetrahedron(), (0, 1, 7))


def test_disjoint_attachments_commute():
    S = attach_tetrahedron(DOUBLE, (0, 1, 3))
    a = attach_tetrahedron(attach_tetrahedron(S, (0, 2, 4)), (1, 3, 5))
    b = attach_tetrahedron(attach_tetrahedron(S, (1, 3, 5)), (0, 2, 4))
    assert are_isomorphic(a, b)


def test_remove_inverts_attach():
    assert remove_tetrahedron(DOUBLE, 4).face_set == tetrahedron().face_set
    with pytest.raises(SurfaceIsTetrahedron):
        remove_tetrahedron(tetrahedron(), 0)
    S = attach_tetrahedron(DOUBLE, (0, 1, 3))
    deg4 = next(v for v in S.vertices if S.degree(v) > 3)
    with pytest.raises(DegreeNotThree):
        remove_tetrahedron(S, deg4)


def test_automorphism_counts():
    assert len(automorphisms(tetrahedron())) == 24
    assert len(automorphisms(DOUBLE)) == 12


@pytest.mark.parametrize("k", [2, 3, 4])
def test_automorphisms_match_brute_force(k):
    for sp in enumerate_proper_spheres(k):
        S = sp.surface
        got = {tuple(m[v] for v in S.vertices) for m in automorphisms(S)}
        want = {tuple(m[v] for v in S.vertices) for m in brute_automorphisms(S.faces)}
        assert got == want


def _relabel_random(S, rng):
    verts = list(S.vertices)
    image = rng.sample(range(100), len(verts))
    return S.relabel(dict(zip(verts, image)))


@pytest.mark.parametrize("k", [1, 3, 5])
def test_canonical_form_relabelling(k):
    rng = random.Random(k)
    for sp in enumerate_proper_spheres(k)[:3]:
        base = canonical_form(sp.surface)
        for _ in range(100):
            T = _relabel_random(sp.surface, rng)
            assert canonical_form(T) == base
            m = isomorphism(sp.surface, T)
            assert sp.surface.relabel(m).face_set == T.face_set


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.data())
def test_surface_counting_identities(k, data):
    spheres = enumerate_proper_spheres(k)
    S = spheres[data.draw(st.integers(0, len(spheres) - 1))].surface
    assert sum(S.degree(v) for v in S.vertices) == 3 * S.num_faces
    assert 2 * S.num_edges == 3 * S.num_faces
    assert all(len(fs) == 2 for fs in S.faces_of_edge.values())
    apex = S.degree_three_vertices()[0]
    f = data.draw(st.sampled_from(S.faces))
    T = attach_tetrahedron(S, f)
    assert remove_tetrahedron(T, max(T.vertices)).face_set == S.face_set
    assert remove_tetrahedron(S, apex).num_faces == S.num_faces - 2


def test_distinct_spheres_are_not_isomorphic():
    a, b = enumerate_proper_spheres(4)
    assert not are_isomorphic(a.surface, b.surface)
