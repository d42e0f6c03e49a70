import json

import numpy as np
import pytest
from mpmath import mpf

from wildtori import io
from wildtori.cluster import build_cluster, double_helix_symbol, enumerate_proper_spheres, helix_symbol, surface_of_cluster
from wildtori.geometry import edge_lengths_of, r2_parameter, strong_embedding
from wildtori.lengths import LengthTriple
from wildtori.sommerville import find_perfect_chains, generate_tiling
from wildtori.torus import glue_higher_genus, mirror_tori_at, supporting_faces
from wildtori.verify import verify_record


@pytest.fixture(scope="module")
def helix_emb():
    cs = surface_of_cluster(build_cluster(helix_symbol(4)))
    return strong_embedding(cs.surface, cs.colouring, x=mpf("1.7"), h=mpf("0.8"))


@pytest.fixture(scope="module")
def d11_record():
    L = edge_lengths_of(r2_parameter(), 1)
    cs = surface_of_cluster(build_cluster(double_helix_symbol(11)))
    return mirror_tori_at(cs.surface, cs.colouring, LengthTriple(L.b, L.a, L.c))[0]


def test_embedding_round_trip_exact(helix_emb):
    d = io.embedding_to_json(helix_emb)
    back = io.embedding_from_json(json.loads(io.dumps(d)))
    assert back.surface == helix_emb.surface
    for v, p in helix_emb.coords.items():
        assert max(abs(a - b) for a, b in zip(p, back.coords[v])) < mpf("1e-48")
    # once written, the decimal strings are a fixed point
    assert io.dumps(io.embedding_to_json(back)) == io.dumps(d)


def test_numbers_are_fifty_digit_strings(helix_emb):
    d = io.embedding_to_json(helix_emb)
    x = d["coords"]["4"][0]
    assert isinstance(x, str)
    assert len(x.lstrip("-").replace(".", "").split("e")[0].lstrip("0")) >= 45


def test_infinite_x_round_trip():
    cs = surface_of_cluster(build_cluster(helix_symbol(2)))
    from mpmath import mp

    emb = strong_embedding(cs.surface, cs.colouring, x=mp.inf, h=mpf(1))
    d = io.embedding_to_json(emb)
    assert d["params"]["x"] == "inf"
    assert io.embedding_from_json(d).params.x == mp.inf


def test_obj_round_trip(helix_emb, tmp_path):
    p = io.write_obj(helix_emb, tmp_path / "h.obj")
    verts, faces = io.read_obj(p)
    order = sorted(helix_emb.surface.vertices)
    assert np.allclose(verts, helix_emb.array(order), atol=1e-15)
    back = {tuple(sorted(order[i] for i in f)) for f in faces}
    assert back == set(helix_emb.surface.faces)


def test_html_export(helix_emb, tmp_path):
    p = io.write_html(helix_emb, tmp_path / "h.html", title="helix")
    text = p.read_text()
    assert text.startswith("<!DOCTYPE html>") and "<canvas" in text and "helix" in text
    assert "http" not in text


def test_surface_lines(tmp_path):
    spheres = enumerate_proper_spheres(4)
    p = tmp_path / "s.jsonl"
    p.write_text("".join(io.surface_line(s.surface, s.label) + "\n" for s in spheres))
    assert [s.surface for s in spheres] == io.read_surface_lines(p)


def test_torus_record_verifies(d11_record):
    d = json.loads(io.dumps(io.record_to_json(d11_record)))
    rep = verify_record(d)
    assert rep.ok, rep.failed
    assert "torus rebuilt from certificate" in rep.passed
    assert d["provenance"]["certificate"]["property"] == "T1"


def test_corrupted_record_fails(d11_record):
    d = io.record_to_json(d11_record)
    d["self_intersecting"] = True
    assert not verify_record(d).ok
    d = io.record_to_json(d11_record)
    d["coords"]["0"][0] = "0.5"
    rep = verify_record(d)
    assert any(f.startswith("edge lengths") for f in rep.failed)


def test_glued_and_sommerville_records_verify(d11_record):
    f = supporting_faces(d11_record.embedding)[0]
    g = glue_higher_genus(d11_record, d11_record, f, f)
    assert verify_record(io.glued_to_json(g)).ok
    t = generate_tiling(2)
    chain = find_perfect_chains(t, 16)[0]
    assert verify_record(io.sommerville_to_json(chain)).ok
    assert verify_record(io.tiling_to_json(t)).ok


def test_tiling_record_catches_bad_colour():
    t = io.tiling_to_json(generate_tiling(1))
    t["adjacency"][0][2] = 3 if t["adjacency"][0][2] != 3 else 1
    assert not verify_record(t).ok


def test_manifest_digests(tmp_path):
    a = io.write_json(tmp_path / "a.json", {"b": 1, "a": [1, 2]})
    m = io.RunManifest("test", {"k": 1})
    m.add_output(a, tmp_path)
    path = m.write(tmp_path / "manifest.json")
    d = io.read_json(path)
    assert d["outputs"] == {"a.json": io.sha256_of(a)}
    assert d["precision_digits"] >= 50
    assert set(d["tolerances"]) >= {"eps_len", "eps_sep"}
    assert a.read_text().index('"a"') < a.read_text().index('"b"')
