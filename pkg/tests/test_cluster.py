import pytest
from conftest import brute_isomorphic
from hypothesis import given, settings
from hypothesis import strategies as st

from wildtori.cluster import (
    BadColour,
    BadCount,
    CombinatorialCluster,
    FaceAlreadyUsed,
    IndexViolation,
    SymbolSyntaxError,
    build_cluster,
    double_helix_symbol,
    enumerate_proper_spheres,
    helix_symbol,
    make_symbol,
    parse_symbol,
    print_symbol,
    surface_of_cluster,
)
from wildtori.lengths import NotInLambda
from wildtori.surface import canonical_form, report, tetrahedron
from wildtori.wild import verify_colouring


def test_parse_two_entries():
    s = parse_symbol("(1_1 1_2)^(1,1,1)")
    assert s.entries == ((1, 1), (1, 2))
    assert [float(t) for t in s.lengths] == [1, 1, 1]


def test_parse_errors():
    with pytest.raises(IndexViolation):
        parse_symbol("(3_1)^(1,1,1)")
    with pytest.raises(BadColour):
        parse_symbol("(1_5)^(1,1,1)")
    with pytest.raises(SymbolSyntaxError) as exc:
        parse_symbol("(1_1 1_)^(1,1,1)")
    assert exc.value.pos == 6
    with pytest.raises(NotInLambda):
        parse_symbol("(1_1)^(1,1,5)")


def test_empty_symbol_is_one_tetrahedron():
    s = parse_symbol("()^(1,1,1)")
    cs = surface_of_cluster(build_cluster(s))
    assert cs.surface.face_set == tetrahedron().face_set


def test_named_lengths():
    s = parse_symbol("(1_4)^(1, sqrt(2), phi)")
    assert abs(float(s.lengths.c) - 1.6180339887498949) < 1e-15
    assert print_symbol(s) == "(1_4)^(1,sqrt(2),phi)"


def test_chain_of_two():
    c = build_cluster(parse_symbol("(1_4)^(1,1,1)"))
    assert len(c.vertices) == 5
    shared = set(c.tetrahedra[0]) & set(c.tetrahedra[1])
    assert {c.tetra_colouring[v] for v in shared} == {1, 2, 3}


def test_branched_four_cluster():
    c = build_cluster(parse_symbol("(1_4 2_1 2_3)^(1,1,1)"))
    assert len(c.tetrahedra) == 4 and len(c.vertices) == 7
    cs = surface_of_cluster(c)
    assert cs.surface.num_faces == 10 and report(cs.surface).euler_characteristic == 2


def test_helix_five():
    c = build_cluster(parse_symbol("(1_4 2_2 3_3 4_1)^(1,1,1)"))
    assert c.is_chain() and c == build_cluster(helix_symbol(5))


def test_face_used_twice():
    with pytest.raises(FaceAlreadyUsed):
        build_cluster(parse_symbol("(1_4 1_4)^(1,1,1)"))


def test_helix_and_double_helix_symbols():
    assert print_symbol(helix_symbol(7)) == "(1_4 2_2 3_3 4_1 5_4 6_2)^(1,1,1)"
    alpha = ("1", "sqrt(5)*sqrt(6)/5", "3*sqrt(5)/5")
    assert print_symbol(double_helix_symbol(7, alpha)).startswith("(1_1 1_2 2_4 3_4 4_2 5_1)^")
    assert print_symbol(double_helix_symbol(11)) == "(1_1 1_2 2_4 3_4 4_2 5_1 6_3 7_3 8_1 9_2)^(1,1,1)"
    with pytest.raises(BadCount):
        double_helix_symbol(8)
    with pytest.raises(BadCount):
        helix_symbol(0)


@pytest.mark.parametrize("n", [3, 5, 7, 11, 23])
def test_double_helix_is_chain(n):
    c = build_cluster(double_helix_symbol(n))
    # symbol order differs from chain order; the face-adjacency graph is a path
    t = c.tetrahedra
    deg = [sum(len(set(a) & set(b)) == 3 for b in t if b is not a) for a in t]
    assert sorted(deg) == [1, 1] + [2] * (n - 2)
    cs = surface_of_cluster(c)
    assert cs.surface.num_faces == 2 * n + 2
    assert len(cs.surface.degree_three_vertices()) == 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 50), st.integers(1, 4)), max_size=10))
def test_print_parse_round_trip(raw):
    entries = [(min(m, i + 1), k) for i, (m, k) in enumerate(raw)]
    try:
        s = make_symbol(entries)
        c = build_cluster(s)
    except FaceAlreadyUsed:
        return
    t = parse_symbol(print_symbol(s))
    assert t.entries == s.entries
    assert build_cluster(t).tetrahedra == c.tetrahedra


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=9))
def test_chain_clusters(colours):
    # each new tetrahedron glued to its predecessor
    entries = [(i + 1, k) for i, k in enumerate(colours)]
    try:
        c = build_cluster(make_symbol(entries))
    except FaceAlreadyUsed:
        return
    k = len(c.tetrahedra)
    assert len(c.vertices) == k + 3
    cs = surface_of_cluster(c)
    if cs is not None:
        assert verify_colouring(cs.surface, cs.colouring)
        if k >= 2 and report(cs.surface).euler_characteristic == 2:
            assert len(cs.surface.degree_three_vertices()) == 2
            assert cs.surface.num_faces == 2 * k + 2


def test_closed_chain_is_torus():
    # five tetrahedra around an edge do not close; a perfect chain from the
    # face-to-face filling does, with Euler characteristic 0
    from wildtori.sommerville import find_perfect_chains, generate_tiling

    g = generate_tiling(2)
    rec = find_perfect_chains(g, 16, limit=1)[0]
    tets = tuple(tuple(sorted(hash(p) for p in g.cells[i])) for i in rec.cycle)
    c = CombinatorialCluster(tets)
    assert c.is_perfect_chain()
    assert report(surface_of_cluster(c).surface).euler_characteristic == 0


def _independent_chains(k):
    """Surfaces of all chains of k tetrahedra, grown without the library."""
    out = []

    def rec(tets, apex):
        if len(tets) == k:
            faces = {}
            for t in tets:
                for i in range(4):
                    f = tuple(sorted(t[:i] + t[i + 1:]))
                    faces[f] = faces.get(f, 0) + 1
            out.append([f for f, n in faces.items() if n == 1])
            return
        last = tets[-1]
        new = max(max(t) for t in tets) + 1
        for drop in last:
            if drop == apex:
                continue
            face = tuple(v for v in last if v != drop)
            rec(tets + [tuple(sorted(face + (new,)))], new)

    for drop in range(4):
        base = tuple(v for v in range(4) if v != drop)
        rec([(0, 1, 2, 3), tuple(sorted(base + (4,)))], 4)
    return out


@pytest.mark.parametrize("k", [3, 4])
def test_sphere_count_matches_brute_isomorphism(k):
    classes = []
    for faces in _independent_chains(k):
        if not any(brute_isomorphic(faces, c) for c in classes):
            classes.append(faces)
    assert len(enumerate_proper_spheres(k)) == len(classes)


def test_sphere_pool_for_seven_tetrahedra():
    from wildtori.surface import validate_surface

    forms = {canonical_form(validate_surface(f)) for f in _independent_chains(7)}
    spheres = enumerate_proper_spheres(7)
    assert len(spheres) == len(forms) == 25
    assert {sp.label for sp in spheres} == forms
    for sp in spheres:
        assert len(sp.surface.degree_three_vertices()) == 2
