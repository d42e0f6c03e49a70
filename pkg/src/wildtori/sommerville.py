"""A face-to-face filling of space by (2, sqrt3, sqrt3) disphenoids.

Cubes of side 2 are centred on the even lattice.  For every pair of
face-adjacent cubes and every edge of their shared square, the tetrahedron
spanned by the two centres and the two edge endpoints is a cell.  All vertex
coordinates are integers, so incidences are exact.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations, product

import mpmath
import numpy as np
from mpmath import mpf

from .cluster import CombinatorialCluster, surface_of_cluster
from .geometry import Embedding
from .lengths import LengthTriple
from .predicates import self_intersects
from .surface import Face, SimplicialSurface, report
from .wild import extend_colouring

IPoint = tuple[int, int, int]
Cell = tuple[IPoint, IPoint, IPoint, IPoint]


@dataclass(frozen=True)
class CellGraph:
    cells: tuple[Cell, ...]
    # colour of every touching pair: shared vertex count 1, 2 or 3
    adjacency: dict[tuple[int, int], int]
    radius: int

    def neighbours(self, i: int, colour: int | None = None) -> list[int]:
        return sorted(self._nbrs(colour).get(i, ()))

    def _nbrs(self, colour):
        key = ("_nbrs", colour)
        cache = self.__dict__.setdefault("_cache", {})
        if key not in cache:
            out = defaultdict(set)
            for (i, j), z in self.adjacency.items():
                if colour is None or z == colour:
                    out[i].add(j)
                    out[j].add(i)
            cache[key] = dict(out)
        return cache[key]

    def colour(self, i: int, j: int) -> int:
        """Contact colour of two cells; 0 if they are disjoint."""
        return self.adjacency.get((min(i, j), max(i, j)), 0)


def model_cell() -> Cell:
    return ((0, 0, 0), (2, 0, 0), (1, 1, 1), (1, 1, -1))


def cell_volume(cell) -> float:
    a, b, c, d = (np.asarray(p, dtype=float) for p in cell)
    return abs(float(np.linalg.det(np.array([b - a, c - a, d - a])))) / 6.0


def _cells_between(cA: IPoint, axis: int) -> list[Cell]:
    cB = tuple(c + 2 * (k == axis) for k, c in enumerate(cA))
    mid = tuple(c + (k == axis) for k, c in enumerate(cA))
    j, k = (d for d in range(3) if d != axis)
    corners = {}
    for sj, sk in product((-1, 1), repeat=2):
        p = list(mid)
        p[j] += sj
        p[k] += sk
        corners[(sj, sk)] = tuple(p)
    square = [((-1, -1), (-1, 1)), ((-1, 1), (1, 1)), ((1, 1), (1, -1)), ((1, -1), (-1, -1))]
    return [tuple(sorted((cA, cB, corners[s], corners[t]))) for s, t in square]


def generate_tiling(radius: int) -> CellGraph:
    """All cells meeting the open box (-2r, 2r)^3."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    lim = 2 * radius
    rng = range(-lim - 2, lim + 1, 2)
    cells = set()
    for cA in product(rng, repeat=3):
        for axis in range(3):
            for cell in _cells_between(cA, axis):
                lo = np.min(cell, axis=0)
                hi = np.max(cell, axis=0)
                if np.all(hi > -lim) and np.all(lo < lim):
                    cells.add(cell)
    ordered = tuple(sorted(cells))
    by_vertex = defaultdict(list)
    for i, c in enumerate(ordered):
        for p in c:
            by_vertex[p].append(i)
    shared = defaultdict(int)
    for ids in by_vertex.values():
        for i, j in combinations(ids, 2):
            shared[(i, j)] += 1
    return CellGraph(ordered, dict(shared), radius)


def point_in_cell(p, cell, eps: float = 0.0) -> bool:
    """Whether p lies strictly inside the cell, at least eps from its faces."""
    a, b, c, d = (np.asarray(q, dtype=float) for q in cell)
    M = np.array([b - a, c - a, d - a]).T
    lam = np.linalg.solve(M, np.asarray(p, dtype=float) - a)
    bary = np.array([1 - lam.sum(), *lam])
    return bool(np.all(bary > eps))


# ---------------------------------------------------------------------------
# cycles


def _canonical_cycle(cyc: list[int]) -> tuple[int, ...]:
    n = len(cyc)
    i = cyc.index(min(cyc))
    fwd = tuple(cyc[(i + k) % n] for k in range(n))
    bwd = tuple(cyc[(i - k) % n] for k in range(n))
    return min(fwd, bwd)


def _runs_ok(cells, path, w) -> bool:
    """Every vertex of w already on the path lies in a run ending at the last
    cell or starting at the first, as a closed chain's surface requires."""
    n = len(path)
    for y in cells[w]:
        pos = [i for i, c in enumerate(path) if y in cells[c]]
        if not pos:
            continue
        if pos == list(range(pos[0], n)):
            continue
        if pos == list(range(len(pos))):
            continue
        if pos[0] == 0 and pos[-1] == n - 1:
            k = next(i for i in range(len(pos)) if pos[i] != i)
            if pos[k:] == list(range(pos[k], n)):
                continue
        return False
    return True


def colour3_cycles(g: CellGraph, max_len: int, strict: bool = True, limit: int | None = None,
                   starts=None, surface_only: bool = False) -> list[tuple[int, ...]]:
    """Cycles of face-adjacent cells, each reported once.

    Strict cycles have no face contact between non-consecutive members; lax
    cycles may have such chords.  With ``surface_only`` the search also prunes
    paths whose cells revisit a vertex after leaving it.  Every cycle starts at
    its smallest cell.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    adj = g._nbrs(3)
    found: dict[tuple[int, ...], None] = {}
    start_cells = range(len(g.cells)) if starts is None else starts
    for s in start_cells:
        # breadth-first distances back to s bound the remaining path length
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj.get(u, ()):
                    if w > s and w not in dist and dist[u] + 1 <= max_len // 2 + 1:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        path = [s]
        on_path = {s}

        def dfs(u):
            # in strict mode a cell touching s by a face must close the cycle
            closing_only = strict and len(path) >= 3 and s in adj.get(u, ())
            for w in sorted(adj.get(u, ())):
                if limit is not None and len(found) >= limit:
                    return
                if w == s and len(path) >= 3:
                    if path[1] < path[-1]:
                        found.setdefault(tuple(path), None)
                    continue
                if closing_only or w <= s or w in on_path or w not in dist:
                    continue
                if len(path) + dist[w] > max_len:
                    continue
                if strict and any(x in adj.get(w, ()) for x in path[1:-1]):
                    continue
                if surface_only and not _runs_ok(g.cells, path, w):
                    continue
                path.append(w)
                on_path.add(w)
                dfs(w)
                path.pop()
                on_path.discard(w)

        dfs(s)
        if limit is not None and len(found) >= limit:
            break
    return [_canonical_cycle(list(c)) for c in found]


@dataclass(frozen=True)
class SommervilleTorus:
    cycle: tuple[int, ...]
    embedding: Embedding
    euler_characteristic: int
    genus: int
    self_intersecting: bool

    @property
    def surface(self):
        return self.embedding.surface


SOMMERVILLE_LENGTHS = ("2", "sqrt(3)", "sqrt(3)")


def cycle_polyhedron(g: CellGraph, cycle) -> SommervilleTorus | None:
    """Embed the surface of the chain given by a cycle of cells, if it is one."""
    ids: dict[IPoint, int] = {}
    tets = []
    for i in cycle:
        tets.append(tuple(ids.setdefault(p, len(ids)) for p in g.cells[i]))
    cs = surface_of_cluster(CombinatorialCluster(tuple(tets)))
    if cs is None:
        return None
    S = cs.surface
    pts = {v: p for p, v in ids.items()}
    # the long edges carry colour 1; the two short classes follow by propagation
    long_edges = {e: 1 for e in S.edges if sum((a - b) ** 2 for a, b in zip(pts[e[0]], pts[e[1]])) == 4}
    colouring = extend_colouring(S, long_edges)
    if colouring is None:
        return None
    coords = {v: tuple(mpf(c) for c in pts[v]) for v in S.vertices}
    L = LengthTriple(mpf(2), mpmath.sqrt(3), mpmath.sqrt(3))
    emb = Embedding(S, colouring, coords, L)
    if not emb.is_weak():
        return None
    emb = emb.with_strong_flag()
    rep = report(S)
    return SommervilleTorus(tuple(cycle), emb, rep.euler_characteristic, rep.genus, self_intersects(emb))


def open_chain(g: CellGraph, cycle) -> tuple[SimplicialSurface, Face, Face]:
    """Cut a closed chain at the face shared by its last and first cells.

    The three vertices of that face get fresh copies in the trailing cells
    that contain them, so the chain bounds a proper sphere.  Returns the
    sphere and the two faces that re-close it, first cell's face first.
    """
    cells = [list(g.cells[i]) for i in cycle]
    closing = set(cells[0]) & set(cells[-1])
    if len(closing) != 3:
        raise ValueError("first and last cells do not share a face")
    for y in closing:
        i = len(cells) - 1
        while y in cells[i]:
            cells[i][cells[i].index(y)] = ("copy", y)
            i -= 1
    ids: dict = {}
    tets = tuple(tuple(sorted(ids.setdefault(p, len(ids)) for p in c)) for c in cells)
    cs = surface_of_cluster(CombinatorialCluster(tets))
    if cs is None:
        raise ValueError("opened chain does not bound a surface")
    f_v = tuple(sorted(ids[y] for y in closing))
    f_w = tuple(sorted(ids[("copy", y)] for y in closing))
    return cs.surface, f_v, f_w


def central_cell(g: CellGraph) -> int:
    cent = np.array([np.mean(c, axis=0) for c in g.cells])
    return int(np.argmin(np.linalg.norm(cent - np.array([0.1, 0.2, 0.3]), axis=1)))


def find_perfect_chains(
    g: CellGraph,
    max_len: int = 20,
    strict: bool = True,
    limit: int | None = 1,
    anchor: int | None = None,
    max_run: int = 8,
) -> list[SommervilleTorus]:
    """Closed chains through one anchor cell whose surfaces embed strongly.

    The filling is cell-transitive, so anchoring at a single cell loses no
    isometry class.  Paths are pruned when a vertex would be shared by more
    than ``max_run`` cells or revisited after the chain has left it.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    adj = g._nbrs(3)
    s = central_cell(g) if anchor is None else anchor
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    out: list[SommervilleTorus] = []
    seen: set[tuple[int, ...]] = set()
    path = [s]
    count: Counter = Counter(g.cells[s])

    def close():
        key = _canonical_cycle(list(path))
        if key in seen or any(count[y] == len(path) for y in g.cells[s]):
            return
        seen.add(key)
        rec = cycle_polyhedron(g, key)
        if rec is not None and rec.embedding.strong:
            out.append(rec)

    def dfs(u):
        for w in sorted(adj[u]):
            if limit is not None and len(out) >= limit:
                return
            if w == s:
                if len(path) >= 4 and path[1] < path[-1]:
                    close()
                continue
            if w in path or len(path) + dist.get(w, max_len) > max_len:
                continue
            if strict and any(x in adj[w] for x in path[1:-1]):
                continue
            if any(count[y] >= max_run for y in g.cells[w]) or not _runs_ok(g.cells, path, w):
                continue
            path.append(w)
            count.update(g.cells[w])
            dfs(w)
            path.pop()
            count.subtract(g.cells[w])

    dfs(s)
    return out
