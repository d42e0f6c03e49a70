"""Tetra-symbols, clusters and chains of wild tetrahedra.

A tetra-symbol such as ``(1_4 2_2 3_3)^(1,1,1)`` lists, for every tetrahedron
after the first, the index of the earlier tetrahedron it is glued to and the
vertex colour its glued face avoids.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .lengths import LengthTriple, NotInLambda, eval_length
from .surface import (
    SimplicialSurface,
    SurfaceError,
    attach_tetrahedron,
    canonical_labelling,
    tetrahedron,
    validate_surface,
)
from .wild import WildColouring, compute_wild_colouring


class SymbolError(ValueError):
    pass


class SymbolSyntaxError(SymbolError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<*>{text[pos:]}")
        self.pos = pos


class IndexViolation(SymbolError):
    pass


class BadColour(SymbolError):
    pass


class FaceAlreadyUsed(SymbolError):
    pass


class BadCount(ValueError):
    pass


# ---------------------------------------------------------------------------
# symbols


@dataclass(frozen=True)
class TetraSymbol:
    entries: tuple[tuple[int, int], ...]
    lengths: LengthTriple
    length_text: tuple[str, str, str] = ("1", "1", "1")

    def __post_init__(self):
        for i, (m, k) in enumerate(self.entries, start=1):
            if not 1 <= m <= i:
                raise IndexViolation(f"entry {i}: index {m} must lie in 1..{i}")
            if k not in (1, 2, 3, 4):
                raise BadColour(f"entry {i}: colour {k} not in 1..4")

    @property
    def num_tetrahedra(self) -> int:
        return len(self.entries) + 1

    def __str__(self) -> str:
        return print_symbol(self)


def _lengths_from_text(texts: Sequence[str]) -> LengthTriple:
    lt = LengthTriple(*(eval_length(t) for t in texts))
    if not lt.in_lambda():
        raise NotInLambda(f"lengths {texts} are not a triangle")
    return lt


def make_symbol(entries, lengths=("1", "1", "1")) -> TetraSymbol:
    texts = tuple(str(t) for t in lengths)
    return TetraSymbol(tuple((int(m), int(k)) for m, k in entries), _lengths_from_text(texts), texts)


def parse_symbol(text: str) -> TetraSymbol:
    """Parse ``( m_k m_k ... )^(a,b,c)``; whitespace is ignored."""
    s = "".join(text.split())
    # positions refer to the whitespace-free text
    pos = 0

    def expect(ch: str):
        nonlocal pos
        if not s.startswith(ch, pos):
            raise SymbolSyntaxError(f"expected {ch!r}", s, pos)
        pos += len(ch)

    expect("(")
    entries = []
    while pos < len(s) and s[pos] != ")":
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if pos == start:
            raise SymbolSyntaxError("expected an index", s, pos)
        m = int(s[start:pos])
        expect("_")
        if pos >= len(s) or not s[pos].isdigit():
            raise SymbolSyntaxError("expected a colour digit", s, pos)
        k = int(s[pos])
        pos += 1
        i = len(entries) + 1
        if not 1 <= m <= i:
            raise IndexViolation(f"entry {i}: index {m} must lie in 1..{i}")
        if k not in (1, 2, 3, 4):
            raise BadColour(f"entry {i}: colour {k} not in 1..4")
        entries.append((m, k))
    expect(")")
    expect("^")
    expect("(")
    depth, parts, start = 0, [], pos
    while pos < len(s):
        ch = s[pos]
        if ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                break
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(s[start:pos])
            start = pos + 1
        pos += 1
    if pos >= len(s):
        raise SymbolSyntaxError("unterminated length triple", s, pos)
    parts.append(s[start:pos])
    pos += 1
    if pos != len(s):
        raise SymbolSyntaxError("trailing characters", s, pos)
    if len(parts) != 3 or not all(parts):
        raise SymbolSyntaxError("expected three lengths", s, start)
    return TetraSymbol(tuple(entries), _lengths_from_text(parts), tuple(parts))


def print_symbol(sym: TetraSymbol) -> str:
    body = " ".join(f"{m}_{k}" for m, k in sym.entries)
    return f"({body})^({','.join(sym.length_text)})"


HELIX_PERIOD = (4, 2, 3, 1)
DOUBLE_HELIX_PERIOD = (4, 4, 2, 1, 3, 3, 1, 2)


def helix_symbol(k: int, lengths=("1", "1", "1")) -> TetraSymbol:
    """Tetra-helix with k tetrahedra: entries t_{f_t}, f = 4,2,3,1 repeating."""
    if k < 1:
        raise BadCount("a helix needs at least one tetrahedron")
    entries = [(t, HELIX_PERIOD[(t - 1) % 4]) for t in range(1, k)]
    return make_symbol(entries, lengths)


def double_helix_symbol(n: int, lengths=("1", "1", "1")) -> TetraSymbol:
    """Double tetra-helix with n = 2k+1 tetrahedra."""
    if n < 3 or n % 2 == 0:
        raise BadCount("a double helix has an odd number >= 3 of tetrahedra")
    k = (n - 1) // 2
    entries = [(1, 1), (1, 2)]
    entries += [(i + 1, DOUBLE_HELIX_PERIOD[(i - 1) % 8]) for i in range(1, 2 * (k - 1) + 1)]
    return make_symbol(entries, lengths)


# ---------------------------------------------------------------------------
# clusters

# vertex colours of a tetrahedron pair up into the three edge colours
PAIR_COLOUR = {
    frozenset((1, 2)): 1, frozenset((3, 4)): 1,
    frozenset((1, 3)): 2, frozenset((2, 4)): 2,
    frozenset((1, 4)): 3, frozenset((2, 3)): 3,
}


@dataclass(frozen=True)
class CombinatorialCluster:
    tetrahedra: tuple[tuple[int, int, int, int], ...]
    tetra_colouring: dict[int, int] | None = field(default=None, compare=False)
    lengths: LengthTriple | None = field(default=None, compare=False)

    @property
    def vertices(self) -> set[int]:
        return {v for t in self.tetrahedra for v in t}

    def is_chain(self) -> bool:
        return all(
            len(set(a) & set(b)) == 3 for a, b in zip(self.tetrahedra, self.tetrahedra[1:])
        )

    def is_perfect_chain(self) -> bool:
        t = self.tetrahedra
        return len(t) >= 3 and self.is_chain() and len(set(t[0]) & set(t[-1])) == 3

    def edge_colours(self) -> dict[tuple[int, int], int] | None:
        """Edge colouring induced by the tetra-colouring, if it is consistent."""
        if self.tetra_colouring is None:
            return None
        g = self.tetra_colouring
        out: dict[tuple[int, int], int] = {}
        for t in self.tetrahedra:
            for u, v in combinations(sorted(t), 2):
                c = PAIR_COLOUR[frozenset((g[u], g[v]))]
                if out.setdefault((u, v), c) != c:
                    return None
        return out


def build_cluster(sym: TetraSymbol) -> CombinatorialCluster:
    """Reconstruct the cluster described by a tetra-symbol.

    Tetrahedron 1 has vertices 0..3 with colours 1..4; entry (m, k) glues a new
    tetrahedron to the face of tetrahedron m avoiding colour k, and its apex
    inherits colour k.
    """
    colour = {0: 1, 1: 2, 2: 3, 3: 4}
    tets = [(0, 1, 2, 3)]
    used: set[frozenset[int]] = set()
    for i, (m, k) in enumerate(sym.entries, start=1):
        base = tets[m - 1]
        face = frozenset(v for v in base if colour[v] != k)
        if face in used:
            raise FaceAlreadyUsed(f"entry {i}: face {sorted(face)} of tetrahedron {m} is already shared")
        used.add(face)
        apex = len(colour)
        colour[apex] = k
        tets.append(tuple(sorted(face | {apex})))
    return CombinatorialCluster(tuple(tets), colour, sym.lengths)


@dataclass(frozen=True)
class ClusterSurface:
    surface: SimplicialSurface
    colouring: WildColouring | None


def surface_of_cluster(c: CombinatorialCluster) -> ClusterSurface | None:
    """The surface of once-covered faces, or None if it is not a surface."""
    mult = Counter(tuple(sorted(f)) for t in c.tetrahedra for f in combinations(t, 3))
    faces = [f for f, n in mult.items() if n == 1]
    if not faces:
        return None
    try:
        S = validate_surface(faces)
    except SurfaceError:
        return None
    tet_edges = {e for t in c.tetrahedra for e in combinations(sorted(t), 2)}
    if tet_edges != set(S.edges) or c.vertices != set(S.vertices):
        # an edge or vertex interior to the cluster breaks the surface
        return None
    cols = c.edge_colours()
    if cols is not None:
        col = WildColouring({e: cols[e] for e in S.edges})
    else:
        col = compute_wild_colouring(S)
    return ClusterSurface(S, col)


# ---------------------------------------------------------------------------
# proper spheres


@dataclass(frozen=True)
class ProperSphere:
    surface: SimplicialSurface
    label: bytes
    chain: tuple[tuple[int, int, int, int], ...]


def _chain_spheres(k: int):
    """Yield (surface, tetrahedra) for every consecutive attachment sequence."""
    S0 = tetrahedron()
    if k == 1:
        yield S0, ((0, 1, 2, 3),)
        return
    S1 = attach_tetrahedron(S0, (0, 1, 2), 4)
    start = ((0, 1, 2, 3), (0, 1, 2, 4))

    def rec(S, tets, apex):
        if len(tets) == k:
            yield S, tets
            return
        last = tets[-1]
        new = apex + 1
        for f in combinations(last, 3):
            if apex not in f:
                continue
            S2 = attach_tetrahedron(S, f, new)
            yield from rec(S2, tets + (tuple(sorted(f + (new,))),), new)

    yield from rec(S1, start, 4)


def enumerate_proper_spheres(k: int) -> list[ProperSphere]:
    """Pairwise non-isomorphic spheres of chains of k tetrahedra.

    Surfaces are returned relabelled canonically and sorted by label.
    """
    if k < 1:
        raise BadCount("k must be positive")
    seen: dict[bytes, ProperSphere] = {}
    for S, tets in _chain_spheres(k):
        label, relabel = canonical_labelling(S)
        if label in seen:
            continue
        Sc = S.relabel(relabel)
        chain = tuple(tuple(sorted(relabel[v] for v in t)) for t in tets)
        seen[label] = ProperSphere(Sc, label, chain)
    return [seen[k_] for k_ in sorted(seen)]


def count_attachment_sequences(k: int) -> int:
    return sum(1 for _ in _chain_spheres(k))
