import os
from itertools import permutations

import pytest

from wildtori import numeric as nm


def pytest_configure(config):
    nm.set_precision(50)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("WILDTORI_EXTENDED"):
        return
    skip = pytest.mark.skip(reason="extended run; set WILDTORI_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])


def brute_automorphisms(faces):
    """Vertex permutations preserving the face set, by exhaustion."""
    fs = {tuple(sorted(f)) for f in faces}
    verts = sorted({v for f in fs for v in f})
    out = []
    for perm in permutations(verts):
        m = dict(zip(verts, perm))
        if all(tuple(sorted(m[v] for v in f)) in fs for f in fs):
            out.append(m)
    return out


def brute_isomorphic(fa, fb):
    fa = {tuple(sorted(f)) for f in fa}
    fb = {tuple(sorted(f)) for f in fb}
    va = sorted({v for f in fa for v in f})
    vb = sorted({v for f in fb for v in f})
    if len(va) != len(vb) or len(fa) != len(fb):
        return False
    for perm in permutations(vb):
        m = dict(zip(va, perm))
        if {tuple(sorted(m[v] for v in f)) for f in fa} == fb:
            return True
    return False
