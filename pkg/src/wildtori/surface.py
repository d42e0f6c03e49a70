"""Closed simplicial surfaces given by their face sets.

A surface is stored as a sorted tuple of sorted vertex triples; vertices and
edges are derived.  Everything here is purely combinatorial.
"""
from __future__ import annotations

import struct
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable


class SurfaceError(ValueError):
    pass


class NotATriangleSet(SurfaceError):
    pass


class EdgeNotInTwoFaces(SurfaceError):
    pass


class UmbrellaBroken(SurfaceError):
    pass


class FaceNotInSurface(SurfaceError):
    pass


class DegreeNotThree(SurfaceError):
    pass


class SurfaceIsTetrahedron(SurfaceError):
    pass


Face = tuple[int, int, int]
Edge = tuple[int, int]


def _face(f) -> Face:
    t = tuple(sorted(int(v) for v in f))
    if len(t) != 3 or len(set(t)) != 3:
        raise NotATriangleSet(f"not a triangle of three distinct vertices: {f!r}")
    return t  # type: ignore[return-value]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SimplicialSurface:
    """A closed, vertex-faithful simplicial surface.

    Instances are built through :func:`validate_surface`; the constructor
    itself does not check the surface axioms.
    """

    faces: tuple[Face, ...]
    _checked: bool = field(default=False, repr=False, compare=False)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for f in self.faces for v in f}))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.faces_of_edge))

    @cached_property
    def faces_of_edge(self) -> dict[Edge, list[Face]]:
        out: dict[Edge, list[Face]] = defaultdict(list)
        for f in self.faces:
            for e in combinations(f, 2):
                out[e].append(f)
        return dict(out)

    @cached_property
    def faces_of_vertex(self) -> dict[int, list[Face]]:
        out: dict[int, list[Face]] = defaultdict(list)
        for f in self.faces:
            for v in f:
                out[v].append(f)
        return dict(out)

    @cached_property
    def neighbours(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = defaultdict(set)
        for u, v in self.faces_of_edge:
            out[u].add(v)
            out[v].add(u)
        return dict(out)

    @cached_property
    def face_set(self) -> frozenset[Face]:
        return frozenset(self.faces)

    def degree(self, v: int) -> int:
        return len(self.faces_of_vertex[v])

    def other_face(self, edge: Edge, face: Face) -> Face:
        a, b = self.faces_of_edge[edge_key(*edge)]
        return b if a == face else a

    def umbrella(self, v: int) -> list[Face]:
        """Faces around ``v`` in cyclic order."""
        fan = self.faces_of_vertex[v]
        order = [fan[0]]
        prev_edge = None
        while True:
            f = order[-1]
            others = [u for u in f if u != v]
            # step across the edge not used to enter f
            nxt = None
            for u in others:
                e = edge_key(v, u)
                if e == prev_edge:
                    continue
                nxt = self.other_face(e, f)
                prev_edge = e
                break
            if nxt == order[0]:
                return order
            order.append(nxt)
            if len(order) > len(fan):
                raise UmbrellaBroken(f"umbrella at vertex {v} does not close")

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.faces_of_edge)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    def degree_three_vertices(self) -> list[int]:
        return [v for v in self.vertices if self.degree(v) == 3]

    def relabel(self, mapping: dict[int, int]) -> "SimplicialSurface":
        return SimplicialSurface(
            tuple(sorted(_face(mapping[v] for v in f) for f in self.faces)), True
        )

    def compact(self) -> "SimplicialSurface":
        """Relabel vertices densely as 0..n-1 preserving their order."""
        return self.relabel({v: i for i, v in enumerate(self.vertices)})

    def to_json(self) -> dict:
        return {"faces": [list(f) for f in self.faces]}


def validate_surface(faces: Iterable[Iterable[int]]) -> SimplicialSurface:
    """Check the surface axioms and return the surface.

    Every edge must lie in exactly two faces and the faces around every
    vertex must form one closed cycle of length at least three.
    """
    fs = sorted({_face(f) for f in faces})
    if not fs:
        raise NotATriangleSet("empty face set")
    S = SimplicialSurface(tuple(fs))
    for e, inc in S.faces_of_edge.items():
        if len(inc) != 2:
            raise EdgeNotInTwoFaces(f"edge {e} lies in {len(inc)} face(s)")
    for v, fan in S.faces_of_vertex.items():
        # the link of v must be a single cycle
        link: dict[int, list[int]] = defaultdict(list)
        for f in fan:
            a, b = (u for u in f if u != v)
            link[a].append(b)
            link[b].append(a)
        if any(len(n) != 2 for n in link.values()):
            raise UmbrellaBroken(f"vertex {v} has a branching link")
        start = next(iter(link))
        prev, cur, steps = None, start, 0
        while True:
            a, b = link[cur]
            nxt = b if a == prev else a
            prev, cur = cur, nxt
            steps += 1
            if cur == start:
                break
        if steps != len(link) or steps < 3:
            raise UmbrellaBroken(f"faces around vertex {v} do not form one umbrella")
    return SimplicialSurface(S.faces, True)


def surface_from_json(data: dict) -> SimplicialSurface:
    return validate_surface(data["faces"])


TETRAHEDRON = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def tetrahedron() -> SimplicialSurface:
    return validate_surface(TETRAHEDRON)


# ---------------------------------------------------------------------------
# invariants


@dataclass(frozen=True)
class SurfaceReport:
    euler_characteristic: int
    orientable: bool
    genus: int
    degree_sequence: tuple[int, ...]
    connected: bool = True


def orientation(S: SimplicialSurface) -> dict[Face, tuple[int, int, int]] | None:
    """Coherent orientation of every face, or None if the surface is non-orientable."""
    oriented: dict[Face, tuple[int, int, int]] = {}
    for seed in S.faces:
        if seed in oriented:
            continue
        oriented[seed] = seed
        queue = deque([seed])
        while queue:
            f = queue.popleft()
            a, b, c = oriented[f]
            for x, y in ((a, b), (b, c), (c, a)):
                g = S.other_face((x, y), f)
                z = next(u for u in g if u != x and u != y)
                want = (y, x, z)
                if g in oriented:
                    if not _same_cycle(oriented[g], want):
                        return None
                else:
                    oriented[g] = want
                    queue.append(g)
    return oriented


def _same_cycle(p, q) -> bool:
    return q in (p, (p[1], p[2], p[0]), (p[2], p[0], p[1]))


def components(S: SimplicialSurface) -> list[list[Face]]:
    seen: set[Face] = set()
    out = []
    for seed in S.faces:
        if seed in seen:
            continue
        comp = []
        queue = deque([seed])
        seen.add(seed)
        while queue:
            f = queue.popleft()
            comp.append(f)
            for e in combinations(f, 2):
                g = S.other_face(e, f)
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
        out.append(comp)
    return out


def report(S: SimplicialSurface) -> SurfaceReport:
    """Euler characteristic, orientability and genus.

    For orientable surfaces genus = (2 - chi) / 2 summed over components; for
    non-orientable ones it is the non-orientable genus 2 - chi.
    """
    chi = S.euler_characteristic()
    orientable = orientation(S) is not None
    ncomp = len(components(S))
    if orientable:
        genus = (2 * ncomp - chi) // 2
    else:
        genus = 2 * ncomp - chi
    degs = tuple(sorted(S.degree(v) for v in S.vertices))
    return SurfaceReport(chi, orientable, genus, degs, ncomp == 1)


# ---------------------------------------------------------------------------
# tetrahedral extension / reduction


def attach_tetrahedron(
    S: SimplicialSurface, f, new_vertex: int | None = None
) -> SimplicialSurface:
    f = _face(f)
    if f not in S.face_set:
        raise FaceNotInSurface(f"{f} is not a face")
    if new_vertex is None:
        new_vertex = max(S.vertices) + 1
    elif new_vertex in S.vertices:
        raise ValueError(f"vertex {new_vertex} already in use")
    a, b, c = f
    t = {f, _face((a, b, new_vertex)), _face((a, c, new_vertex)), _face((b, c, new_vertex))}
    return SimplicialSurface(tuple(sorted(S.face_set ^ t)), True)


def remove_tetrahedron(S: SimplicialSurface, v: int) -> SimplicialSurface:
    if S.num_faces == 4:
        raise SurfaceIsTetrahedron("cannot reduce the simplicial tetrahedron")
    fan = S.faces_of_vertex.get(v)
    if fan is None or len(fan) != 3:
        raise DegreeNotThree(f"vertex {v} has degree {0 if fan is None else len(fan)}")
    base = _face(S.neighbours[v])
    t = set(fan) | {base}
    return validate_surface(S.face_set ^ t)


# ---------------------------------------------------------------------------
# isomorphism
#
# An isomorphism of connected closed surfaces is fixed by the image of one
# flag (face, ordered edge).  Walking the face adjacency from a flag in a fixed
# order therefore yields a labelling that any isomorphism carries along; the
# lexicographically smallest walk is a canonical form.


def _walk(S: SimplicialSurface, face: Face, a: int, b: int) -> tuple[list[int], dict[int, int]]:
    c = next(u for u in face if u != a and u != b)
    label = {a: 0, b: 1, c: 2}
    code = [0, 1, 2]
    seen = {face}
    queue = deque([(face, a, b, c)])
    while queue:
        f, x, y, z = queue.popleft()
        for p, q in ((x, y), (y, z), (z, x)):
            g = S.other_face((p, q), f)
            if g in seen:
                continue
            seen.add(g)
            r = next(u for u in g if u != p and u != q)
            if r not in label:
                label[r] = len(label)
            code.extend((label[q], label[p], label[r]))
            queue.append((g, q, p, r))
    return code, label


def _flags(S: SimplicialSurface, faces: Iterable[Face]):
    for f in faces:
        for a, b in ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)):
            yield f, f[a], f[b]


def _flag_invariant(S: SimplicialSurface, f: Face, a: int, b: int) -> tuple[int, int, int]:
    c = next(u for u in f if u != a and u != b)
    return (S.degree(a), S.degree(b), S.degree(c))


def _start_flags(S: SimplicialSurface, faces: list[Face]):
    flags = list(_flags(S, faces))
    best = min(_flag_invariant(S, *fl) for fl in flags)
    return [fl for fl in flags if _flag_invariant(S, *fl) == best]


def _component_form(S: SimplicialSurface, faces: list[Face]) -> tuple[tuple[int, ...], dict[int, int]]:
    best = None
    best_label: dict[int, int] = {}
    for fl in _start_flags(S, faces):
        code, label = _walk(S, *fl)
        t = tuple(code)
        if best is None or t < best:
            best, best_label = t, label
    return best, best_label  # type: ignore[return-value]


def canonical_labelling(S: SimplicialSurface) -> tuple[bytes, dict[int, int]]:
    """Canonical byte label and the vertex relabelling that realises it."""
    forms = [_component_form(S, comp) for comp in components(S)]
    forms.sort(key=lambda t: (len(t[0]), t[0]))
    label: dict[int, int] = {}
    chunks = [struct.pack(">HH", len(forms), S.num_vertices)]
    offset = 0
    for code, lab in forms:
        chunks.append(struct.pack(">H", len(code) // 3))
        chunks.append(struct.pack(f">{len(code)}H", *code))
        for v, i in lab.items():
            label[v] = i + offset
        offset += len(lab)
    return b"".join(chunks), label


def canonical_form(S: SimplicialSurface) -> bytes:
    return canonical_labelling(S)[0]


def canonical_surface(S: SimplicialSurface) -> SimplicialSurface:
    """The surface relabelled by its canonical labelling."""
    return S.relabel(canonical_labelling(S)[1])


def are_isomorphic(S: SimplicialSurface, T: SimplicialSurface) -> bool:
    if (S.num_vertices, S.num_faces) != (T.num_vertices, T.num_faces):
        return False
    return canonical_form(S) == canonical_form(T)


def isomorphism(S: SimplicialSurface, T: SimplicialSurface) -> dict[int, int] | None:
    """A vertex bijection S -> T preserving faces, if one exists."""
    ls, ms = canonical_labelling(S)
    lt, mt = canonical_labelling(T)
    if ls != lt:
        return None
    inv = {i: v for v, i in mt.items()}
    return {v: inv[i] for v, i in ms.items()}


def automorphisms(S: SimplicialSurface) -> list[dict[int, int]]:
    """All face-preserving vertex permutations of S."""
    comps = components(S)
    if len(comps) != 1:
        return _automorphisms_backtrack(S)
    faces = comps[0]
    base = _start_flags(S, faces)[0]
    code0, lab0 = _walk(S, *base)
    out = []
    for fl in _start_flags(S, faces):
        code, lab = _walk(S, *fl)
        if code == code0:
            inv = {i: v for v, i in lab.items()}
            out.append({v: inv[i] for v, i in lab0.items()})
    out.sort(key=lambda m: tuple(m[v] for v in S.vertices))
    return out


def _automorphisms_backtrack(S: SimplicialSurface) -> list[dict[int, int]]:
    verts = list(S.vertices)
    faces = S.face_set
    deg = {v: S.degree(v) for v in verts}
    out: list[dict[int, int]] = []

    def extend(i: int, m: dict[int, int], used: set[int]):
        if i == len(verts):
            out.append(dict(m))
            return
        v = verts[i]
        for w in verts:
            if w in used or deg[w] != deg[v]:
                continue
            m[v] = w
            ok = all(
                _face(m[u] for u in f) in faces
                for f in S.faces_of_vertex[v]
                if all(u in m for u in f)
            )
            if ok:
                used.add(w)
                extend(i + 1, m, used)
                used.discard(w)
            del m[v]

    extend(0, {}, set())
    return out
