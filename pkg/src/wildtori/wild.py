"""Wild colourings: edge 3-colourings that are bijective on every face."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Mapping

from .surface import Edge, Face, SimplicialSurface, edge_key

COLOURS = (1, 2, 3)


@dataclass(frozen=True)
class WildColouring:
    colours: Mapping[Edge, int]

    def __getitem__(self, edge) -> int:
        return self.colours[edge_key(*edge)]

    def colour(self, u: int, v: int) -> int:
        return self.colours[edge_key(u, v)]

    def __hash__(self):
        return hash(tuple(sorted(self.colours.items())))

    def __eq__(self, other):
        return isinstance(other, WildColouring) and dict(self.colours) == dict(other.colours)

    def permuted(self, perm: Mapping[int, int]) -> "WildColouring":
        return WildColouring({e: perm[c] for e, c in self.colours.items()})

    def relabelled(self, mapping: Mapping[int, int]) -> "WildColouring":
        return WildColouring(
            {edge_key(mapping[u], mapping[v]): c for (u, v), c in self.colours.items()}
        )

    def opposite_colour(self, face: Face, vertex: int) -> int:
        """Colour of the edge of ``face`` not containing ``vertex``."""
        u, w = (x for x in face if x != vertex)
        return self.colour(u, w)

    def to_json(self) -> dict:
        return {"edge_colours": [[u, v, c] for (u, v), c in sorted(self.colours.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "WildColouring":
        return cls({edge_key(int(u), int(v)): int(c) for u, v, c in data["edge_colours"]})


def verify_colouring(S: SimplicialSurface, omega: WildColouring | Mapping[Edge, int]) -> bool:
    cols = omega.colours if isinstance(omega, WildColouring) else omega
    try:
        for f in S.faces:
            if sorted(cols[e] for e in combinations(f, 2)) != [1, 2, 3]:
                return False
    except KeyError:
        return False
    return True


def _face_edges(f: Face) -> tuple[Edge, Edge, Edge]:
    a, b, c = f
    return (a, b), (a, c), (b, c)


def _solutions(S: SimplicialSurface, fixed: dict[Edge, int]) -> Iterator[dict[Edge, int]]:
    """Depth-first search over colourings extending ``fixed``.

    Faces with two coloured edges force the third; otherwise branch on an
    uncoloured edge of a face that already has one coloured edge.
    """
    fe = S.faces_of_edge

    def propagate(col: dict[Edge, int], todo: list[Edge]) -> bool:
        while todo:
            e = todo.pop()
            for f in fe[e]:
                es = _face_edges(f)
                known = [col[x] for x in es if x in col]
                if len(known) != len(set(known)):
                    return False
                if len(known) == 2:
                    x = next(x for x in es if x not in col)
                    col[x] = 6 - known[0] - known[1]
                    todo.append(x)
        return True

    def search(col: dict[Edge, int]) -> Iterator[dict[Edge, int]]:
        if len(col) == len(fe):
            yield col
            return
        branch = None
        for f in S.faces:
            es = _face_edges(f)
            n = sum(x in col for x in es)
            if n == 1:
                branch = (next(x for x in es if x not in col), [col[x] for x in es if x in col][0])
                break
        if branch is None:
            # untouched component: its first face is free up to permutation
            f = next(f for f in S.faces if not any(x in col for x in _face_edges(f)))
            for p in permutations(COLOURS):
                trial = dict(col)
                trial.update(zip(_face_edges(f), p))
                if propagate(trial, list(_face_edges(f))):
                    yield from search(trial)
            return
        edge, used = branch
        for c in COLOURS:
            if c == used:
                continue
            trial = dict(col)
            trial[edge] = c
            if propagate(trial, [edge]):
                yield from search(trial)

    col = dict(fixed)
    if propagate(col, list(col)):
        yield from search(col)


def seed_face(S: SimplicialSurface) -> Face:
    return min(S.faces)


def compute_wild_colouring(S: SimplicialSurface) -> WildColouring | None:
    """A wild colouring of S, or None if there is none.

    The result is normalised so that the smallest face carries colours 1, 2, 3
    on its edges in sorted order.
    """
    seed = dict(zip(_face_edges(seed_face(S)), COLOURS))
    for sol in _solutions(S, seed):
        return WildColouring(dict(sorted(sol.items())))
    return None


def all_wild_colourings(S: SimplicialSurface, limit: int | None = None) -> list[WildColouring]:
    """Every wild colouring of S (not normalised)."""
    out = []
    base = _face_edges(seed_face(S))
    for p in permutations(COLOURS):
        for sol in _solutions(S, dict(zip(base, p))):
            out.append(WildColouring(dict(sorted(sol.items()))))
            if limit is not None and len(out) >= limit:
                return out
    return out


def normalise(S: SimplicialSurface, omega: WildColouring) -> WildColouring:
    """Permute colours so the smallest face reads 1, 2, 3 in sorted edge order."""
    es = _face_edges(seed_face(S))
    perm = {omega[e]: i + 1 for i, e in enumerate(es)}
    return omega.permuted(perm)


def extend_colouring(S: SimplicialSurface, fixed: Mapping[Edge, int]) -> WildColouring | None:
    """A wild colouring agreeing with ``fixed`` on its edges, or None."""
    for sol in _solutions(S, dict(fixed)):
        return WildColouring(dict(sorted(sol.items())))
    return None
