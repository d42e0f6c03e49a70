import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from wildtori import numeric as nm
from wildtori.cluster import build_cluster, double_helix_symbol, enumerate_proper_spheres, helix_symbol, surface_of_cluster
from wildtori.geometry import base_tetrahedron, edge_lengths_of, embedding_with_lengths, r2_parameter, strong_embedding
from wildtori.lengths import LengthTriple
from wildtori.predicates import self_intersects
from wildtori.sommerville import find_perfect_chains, generate_tiling, open_chain
from wildtori.surface import are_isomorphic, report, tetrahedron
from wildtori.torus import (
    HalfSpaceViolated,
    InvalidCertificate,
    T1Certificate,
    _plane,
    build_identified_torus,
    build_mirror_torus,
    census_dedup,
    check_T1,
    colour_matching,
    end_faces,
    fingerprint,
    glue_higher_genus,
    has_reflection_symmetry,
    isometric_automorphisms,
    kabsch,
    mirror_tori_at,
    solve_T1_parameters,
    solve_T2_parameters,
    supporting_faces,
)
from wildtori.wild import compute_wild_colouring

from conftest import brute_automorphisms

SQ5 = math.sqrt(5)
GOLDEN_NORMALISED = (1.0, math.sqrt(150 + 30 * SQ5) / 10, (1 + SQ5) / 2)
SIBLING_RAW = (1.0, math.sqrt(150 - 30 * SQ5) / 10, (SQ5 - 1) / 2)


def _norm(lengths):
    return [float(t) for t in lengths.normalised()]


def _random_rotation(rng, improper=False):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if (np.linalg.det(q) < 0) != improper:
        q[:, 0] *= -1
    return q


def _moved(emb, R, t):
    return emb.transformed([[mpf(float(x)) for x in row] for row in R], [mpf(float(x)) for x in t])


@pytest.fixture(scope="module")
def golden():
    S = enumerate_proper_spheres(7)[1].surface
    certs = solve_T1_parameters(S, (0, 1, 2), (7, 8, 9))
    return S, [build_mirror_torus(c) for c in certs]


@pytest.fixture(scope="module")
def d11():
    r = r2_parameter()
    L = edge_lengths_of(r, 1)
    cs = surface_of_cluster(build_cluster(double_helix_symbol(11)))
    return cs, L, mirror_tori_at(cs.surface, cs.colouring, LengthTriple(L.b, L.a, L.c))


@pytest.fixture(scope="module")
def reclosed():
    g = generate_tiling(2)
    chain = find_perfect_chains(g, 16, limit=1)[0]
    S, f_v, f_w = open_chain(g, chain.cycle)
    certs = solve_T2_parameters(S, f_v, f_w)
    return chain, S, f_v, f_w, certs


# ---------------------------------------------------------------- T1


def test_end_faces_of_helix():
    S = surface_of_cluster(build_cluster(helix_symbol(6))).surface
    v, w, Fv, Fw = end_faces(S)
    assert S.degree(v) == S.degree(w) == 3
    assert len(Fv) == len(Fw) == 3
    assert all(v in f for f in Fv) and all(w in f for f in Fw)


def test_end_faces_needs_two_degree_three():
    with pytest.raises(ValueError):
        end_faces(tetrahedron())


def test_h6_parallel_planes_fail_condition_one():
    from wildtori.surface import validate_surface

    faces = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (3, 4, 6), (3, 5, 6), (2, 3, 5), (2, 4, 5),
             (4, 5, 7), (4, 6, 7), (6, 7, 9), (6, 8, 9), (5, 6, 8), (5, 7, 8), (7, 8, 9)]
    H = validate_surface(faces)
    col = compute_wild_colouring(H)
    L = edge_lengths_of(r2_parameter(), 1)
    for perm in itertools.permutations(L):
        emb = embedding_with_lengths(H, col, LengthTriple(*perm))
        ok, diag = check_T1(H, 1, 9, (1, 2, 3), (7, 8, 9), emb)
        assert not ok
        assert set(diag.on_plane) == {1, 2, 3}


def test_double_tetrahedron_has_no_T1():
    from wildtori.surface import attach_tetrahedron

    S = attach_tetrahedron(tetrahedron(), (1, 2, 3))
    v, w, Fv, Fw = end_faces(S)
    for f_v in Fv:
        for f_w in Fw:
            assert solve_T1_parameters(S, f_v, f_w) == []


def test_golden_torus(golden):
    _, recs = golden
    clean = [r for r in recs if not r.self_intersecting]
    assert clean, "no embedded torus found"
    for r in clean:
        assert r.num_faces == 28
        assert report(r.torus).euler_characteristic == 0
        assert r.reflection_symmetric
        assert r.embedding.strong
        assert np.allclose(_norm(r.lengths), GOLDEN_NORMALISED, atol=1e-10)


def test_self_intersecting_sibling(golden):
    _, recs = golden
    bad = [r for r in recs if r.self_intersecting]
    target = LengthTriple(*(mpf(x) for x in SIBLING_RAW))
    assert any(r.lengths.matches(target, tol=1e-10) for r in bad)
    for r in bad:
        assert r.num_faces == 28 and r.reflection_symmetric


def test_certificates_recheck(golden):
    S, recs = golden
    for r in recs:
        c = r.certificate
        assert c.residual < mpf("1e-20")
        assert build_mirror_torus(c).torus == r.torus


def test_tampered_certificate_rejected(golden):
    S, recs = golden
    c = recs[0].certificate
    from dataclasses import replace

    from wildtori.geometry import Params

    bad = replace(c, params=Params.from_alpha(c.params.alpha + mpf("1e-3"), c.params.h))
    with pytest.raises(InvalidCertificate):
        build_mirror_torus(bad)


def test_d11_torus(d11):
    cs, L, recs = d11
    assert len(recs) >= 1
    r = recs[0]
    assert r.num_faces == 44
    assert report(r.torus).euler_characteristic == 0
    assert not r.self_intersecting
    assert r.reflection_symmetric
    assert r.lengths.matches(L, tol=1e-12, scale_free=False)


@pytest.mark.extended
def test_d23_torus():
    L = edge_lengths_of(r2_parameter(), 1)
    cs = surface_of_cluster(build_cluster(double_helix_symbol(23)))
    recs = mirror_tori_at(cs.surface, cs.colouring, LengthTriple(L.b, L.a, L.c))
    assert recs and recs[0].num_faces == 92
    assert not recs[0].self_intersecting


def test_d11_default_colour_order_has_no_pair(d11):
    cs, L, _ = d11
    assert mirror_tori_at(cs.surface, cs.colouring, L) == []


# ---------------------------------------------------------------- T2


def test_colour_matching_preserves_opposite_colours():
    S = surface_of_cluster(build_cluster(helix_symbol(5))).surface
    col = compute_wild_colouring(S)
    v, w, Fv, Fw = end_faces(S)
    for f_v in Fv:
        for f_w in Fw:
            m = colour_matching(col, f_v, f_w)
            assert m is not None and sorted(m) == sorted(f_v) and sorted(m.values()) == sorted(f_w)
            for x in f_v:
                a, b = [y for y in f_v if y != x]
                c, d = [m[y] for y in f_v if y != x]
                assert col.colour(a, b) == col.colour(c, d)


def test_T2_skips_faces_sharing_vertices():
    S = surface_of_cluster(build_cluster(helix_symbol(2))).surface
    v, w, Fv, Fw = end_faces(S)
    shared = [(a, b) for a in Fv for b in Fw if set(a) & set(b)]
    assert shared
    for a, b in shared:
        assert solve_T2_parameters(S, a, b) == []


def test_sommerville_chain_reclosed(reclosed):
    chain, S, f_v, f_w, certs = reclosed
    assert S.num_faces == 2 * len(chain.cycle) + 2
    assert len(certs) == 1
    rec = build_identified_torus(certs[0])
    assert rec.num_faces == S.num_faces - 2
    assert report(rec.torus).euler_characteristic == 0
    assert are_isomorphic(rec.torus, chain.surface)
    assert np.allclose(_norm(rec.lengths), (1, 1, 2 / math.sqrt(3)), atol=1e-10)
    assert not rec.self_intersecting
    assert not rec.reflection_symmetric


# ---------------------------------------------------------------- classification


def test_self_intersection_isometry_invariant(golden):
    _, recs = golden
    rng = np.random.default_rng(7)
    for r in recs:
        for _ in range(50):
            R = _random_rotation(rng, improper=bool(rng.integers(2)))
            moved = _moved(r.embedding, R, rng.normal(size=3) * 5)
            assert self_intersects(moved) == r.self_intersecting


def _oracle_reflection(emb, tol=1e-8):
    """Every automorphism from permutation exhaustion, fitted by Kabsch."""
    verts = sorted(emb.surface.vertices)
    A = emb.array(verts)
    for g in brute_automorphisms(emb.surface.faces):
        perm = {}
        ok = True
        for (u, v), c in emb.colouring.colours.items():
            d = emb.colouring.colour(g[u], g[v])
            if perm.setdefault(c, d) != d or abs(emb.lengths[c] - emb.lengths[d]) > 1e-12:
                ok = False
                break
        if not ok:
            continue
        R, _, dev = kabsch(A, emb.array([g[v] for v in verts]))
        if dev < tol and np.linalg.det(R) < 0:
            return True
    return False


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.2, 3.0))
def test_reflection_symmetry_matches_oracle(x, h):
    S = surface_of_cluster(build_cluster(helix_symbol(3))).surface
    emb = strong_embedding(S, compute_wild_colouring(S), x=mpf(x), h=mpf(h))
    assert has_reflection_symmetry(emb) == _oracle_reflection(emb)


def test_base_tetrahedron_improper_symmetries():
    emb = base_tetrahedron(mpf("1.3"), mpf("0.7"))
    signs = sorted(s for _, s in isometric_automorphisms(emb))
    # a disphenoid with distinct lengths: the Klein four-group of rotations only
    assert signs == [1, 1, 1, 1]
    assert not has_reflection_symmetry(emb)
    iso = base_tetrahedron(mpf(1), mpf(1))
    assert has_reflection_symmetry(iso)
    assert _oracle_reflection(iso)


def test_kabsch_recovers_improper_map():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(8, 3))
    Q = _random_rotation(rng, improper=True)
    R, t, dev = kabsch(A, A @ Q.T + 1.5)
    assert dev < 1e-12 and np.allclose(R, Q)


# ---------------------------------------------------------------- dedup


def test_dedup_mirror_image_and_relabelling(golden):
    _, recs = golden
    r = recs[0]
    rng = np.random.default_rng(3)
    mirrored = _moved(r.embedding, _random_rotation(rng, improper=True), [1, 2, 3])
    twin = type(r)(r.torus, mirrored, r.self_intersecting, r.reflection_symmetric, r.construction)
    assert fingerprint(twin) == fingerprint(r)
    assert len(census_dedup([r, twin])) == 1


def test_dedup_keeps_distinct_solutions(golden):
    _, recs = golden
    keys = {fingerprint(r) for r in recs}
    assert len(census_dedup(recs)) == len(keys)
    assert len({r.self_intersecting for r in census_dedup(recs)}) == 2


def test_dedup_colour_permutation(d11):
    cs, L, recs = d11
    r = recs[0]
    from wildtori.wild import WildColouring

    swap = {1: 2, 2: 1, 3: 3}
    col = WildColouring({e: swap[c] for e, c in r.embedding.colouring.colours.items()})
    lens = LengthTriple(r.lengths.b, r.lengths.a, r.lengths.c)
    from dataclasses import replace

    twin = replace(r, embedding=replace(r.embedding, colouring=col, lengths=lens))
    assert twin.embedding.max_length_error() < 1e-12
    assert len(census_dedup([r, twin])) == 1


# ---------------------------------------------------------------- gluing


def test_glue_two_d11_tori(d11):
    _, _, recs = d11
    X = recs[0]
    faces = supporting_faces(X.embedding)
    assert faces
    g = glue_higher_genus(X, X, faces[0], faces[0])
    assert (g.genus, g.euler_characteristic) == (2, -2)
    assert g.surface.num_faces == 2 * 44 - 2
    assert not g.self_intersecting


def test_glue_rejects_non_supporting_face(d11):
    _, _, recs = d11
    X = recs[0]
    good = set(supporting_faces(X.embedding))
    bad = next(f for f in X.torus.faces if f not in good)
    with pytest.raises(HalfSpaceViolated):
        glue_higher_genus(X, X, bad, sorted(good)[0])


def test_glue_two_tetrahedra_is_double():
    t = base_tetrahedron(mpf(1), mpf(1))
    f = (0, 1, 2)
    g = glue_higher_genus(t, t, f, f)
    assert g.euler_characteristic == 2 and g.surface.num_faces == 6
