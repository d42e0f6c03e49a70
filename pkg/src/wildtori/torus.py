"""Toroidal polyhedra from proper multi-tetrahedral spheres.

Two constructions are supported.  Mirror doubling: find parameters where the
faces at the two degree-3 vertices are coplanar and isolated on their plane
(property T1), then glue the sphere to its reflection.  Identification: find
parameters where those two faces coincide vertex by vertex (property T2) and
identify them.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import mpmath
import numpy as np
from mpmath import mpf

from . import numeric as nm
from .geometry import (
    BuildPlan,
    Embedding,
    Params,
    attach_via_isometry,
    edge_lengths_of,
    embedding_with_lengths,
    reflect_point,
)
from .lengths import LengthTriple
from .predicates import self_intersects
from .solver import find_roots
from .surface import (
    Face,
    SimplicialSurface,
    SurfaceError,
    automorphisms,
    canonical_form,
    edge_key,
    report,
    validate_surface,
)
from .wild import WildColouring, compute_wild_colouring


class InvalidCertificate(ValueError):
    pass


class HalfSpaceViolated(ValueError):
    pass


# ---------------------------------------------------------------------------
# certificates and records


@dataclass(frozen=True)
class T1Certificate:
    sphere: SimplicialSurface
    colouring: WildColouring
    v: int
    w: int
    f_v: Face
    f_w: Face
    params: Params
    residual: mpf
    plane: tuple  # (point, unit normal)
    conditioning: mpf = mpf(1)


@dataclass(frozen=True)
class T2Certificate:
    sphere: SimplicialSurface
    colouring: WildColouring
    v: int
    w: int
    f_v: Face
    f_w: Face
    matching: dict
    params: Params
    residual: mpf
    conditioning: mpf = mpf(1)


@dataclass(frozen=True)
class TorusRecord:
    torus: SimplicialSurface
    embedding: Embedding
    self_intersecting: bool
    reflection_symmetric: bool
    construction: str
    source_label: bytes = b""
    certificate: object = field(default=None, compare=False)

    @property
    def num_faces(self) -> int:
        return self.torus.num_faces

    @property
    def lengths(self) -> LengthTriple:
        return self.embedding.lengths


def end_faces(S: SimplicialSurface) -> tuple[int, int, list[Face], list[Face]]:
    """The two degree-3 vertices of a proper sphere and their faces."""
    d3 = S.degree_three_vertices()
    if len(d3) != 2:
        raise ValueError(f"expected exactly two degree-3 vertices, found {len(d3)}")
    v, w = d3
    return v, w, sorted(S.faces_of_vertex[v]), sorted(S.faces_of_vertex[w])


# ---------------------------------------------------------------------------
# property T1


def _plane(coords, f: Face):
    p0, p1, p2 = (coords[u] for u in f)
    n = nm.unit(nm.cross(nm.sub(p1, p0), nm.sub(p2, p0)))
    return p0, n


@dataclass
class T1Diagnostics:
    on_plane: set
    in_plane_edges: list
    fold_collisions: list
    strong: bool

    @property
    def ok(self) -> bool:
        return not self.fold_collisions and self.strong and not self.in_plane_edges


def check_T1(
    S: SimplicialSurface, v: int, w: int, f_v: Face, f_w: Face, emb: Embedding
) -> tuple[bool, T1Diagnostics]:
    """Evaluate the three T1 conditions at tolerance EPS_SEP."""
    coords = emb.coords
    origin, n = _plane(coords, f_v)
    dist = {u: nm.dot(nm.sub(coords[u], origin), n) for u in S.vertices}
    on = {u for u, d in dist.items() if abs(d) < nm.EPS_SEP}
    want = set(f_v) | set(f_w)
    allowed = {edge_key(*e) for f in (f_v, f_w) for e in combinations(f, 2)}
    in_plane = [e for e in S.edges if e[0] in on and e[1] in on and e not in allowed]
    # fold every vertex onto the positive side: (r, s, |t|) must stay distinct
    folded = {
        u: (nm.sub(coords[u], nm.scale(2 * dist[u], n)) if dist[u] < 0 else coords[u])
        for u in S.vertices
    }
    verts = list(S.vertices)
    arr = np.array([nm.as_float(folded[u]) for u in verts])
    dd = np.linalg.norm(arr[:, None] - arr[None, :], axis=-1)
    collisions = []
    for i, j in zip(*np.nonzero(dd < 1e-6)):
        if i < j and nm.dist(folded[verts[i]], folded[verts[j]]) <= nm.EPS_SEP:
            collisions.append((verts[i], verts[j]))
    diag = T1Diagnostics(on, in_plane, collisions, emb.injective())
    # the six plane vertices must be distinct for the mirror double to be a surface
    ok = on == want and diag.ok and S.degree(v) == 3 and S.degree(w) == 3
    return ok, diag


def _t1_residual_np(plan: BuildPlan, f_v: Face, f_w: Face):
    idx = {u: i for i, u in enumerate(plan.order)}
    iv = [idx[u] for u in f_v]
    iw = [idx[u] for u in f_w]

    def res(a, h):
        P = plan.evaluate_np(a, h)
        p0, p1, p2 = P[:, iv[0]], P[:, iv[1]], P[:, iv[2]]
        n = np.cross(p1 - p0, p2 - p0)
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        return np.stack([np.sum((P[:, j] - p0) * n, axis=1) for j in iw], axis=1)

    return res


def _t1_residual_mp(plan: BuildPlan, f_v: Face, f_w: Face):
    def res(a, h):
        coords = plan.evaluate(Params.from_alpha(a, h))
        origin, n = _plane(coords, f_v)
        return [nm.dot(nm.sub(coords[u], origin), n) for u in f_w]

    return res


def solve_T1_parameters(
    S: SimplicialSurface,
    f_v: Face,
    f_w: Face,
    colouring: WildColouring | None = None,
    plan: BuildPlan | None = None,
    density: str = "default",
    families: bool = False,
) -> list[T1Certificate]:
    """All verified T1 parameter points found from the seed grid.

    Points on one-parameter families of solutions are skipped unless
    ``families`` is set; only isolated solutions count as certificates.
    """
    colouring = colouring or compute_wild_colouring(S)
    plan = plan or BuildPlan.from_surface(S, colouring)
    v = next(u for u in f_v if S.degree(u) == 3)
    w = next(u for u in f_w if S.degree(u) == 3)
    roots = find_roots(_t1_residual_np(plan, f_v, f_w), _t1_residual_mp(plan, f_v, f_w), density)
    out = []
    for r in roots:
        if not (families or r.isolated):
            continue
        p = Params.from_alpha(r.alpha, r.h)
        coords = plan.evaluate(p)
        emb = Embedding(S, colouring, coords, edge_lengths_of(p), p, False, p.degenerate_flat)
        emb = emb.with_strong_flag()
        ok, _ = check_T1(S, v, w, f_v, f_w, emb)
        if ok:
            out.append(
                T1Certificate(S, colouring, v, w, f_v, f_w, p, r.residual, _plane(coords, f_v), r.conditioning)
            )
    return out


def certificate_embedding(cert) -> Embedding:
    plan = BuildPlan.from_surface(cert.sphere, cert.colouring)
    p = cert.params
    coords = plan.evaluate(p)
    emb = Embedding(cert.sphere, cert.colouring, coords, edge_lengths_of(p), p, False, p.degenerate_flat)
    return emb.with_strong_flag()


def build_mirror_torus(cert: T1Certificate, emb: Embedding | None = None) -> TorusRecord:
    """Glue the sphere to its mirror image across the plane of f_v."""
    S = cert.sphere
    emb = emb or certificate_embedding(cert)
    ok, diag = check_T1(S, cert.v, cert.w, cert.f_v, cert.f_w, emb)
    if not ok:
        raise InvalidCertificate(f"T1 conditions fail: {diag}")
    origin, n = _plane(emb.coords, cert.f_v)
    on = set(cert.f_v) | set(cert.f_w)
    offset = max(S.vertices) + 1
    image = {u: (u if u in on else u + offset) for u in S.vertices}
    coords = dict(emb.coords)
    q1, q2, q3 = (emb.coords[u] for u in cert.f_v)
    for u in S.vertices:
        if u not in on:
            coords[image[u]] = reflect_point(emb.coords[u], q1, q2, q3)
    drop = {tuple(sorted(cert.f_v)), tuple(sorted(cert.f_w))}
    faces = [f for f in S.faces if f not in drop]
    faces += [tuple(sorted(image[u] for u in f)) for f in S.faces if f not in drop]
    try:
        T = validate_surface(faces)
    except SurfaceError as exc:
        raise InvalidCertificate(f"mirror double is not a surface: {exc}") from exc
    cols = {}
    for (a, b), c in cert.colouring.colours.items():
        cols[(a, b)] = c
        cols[edge_key(image[a], image[b])] = c
    col = WildColouring({e: cols[e] for e in T.edges})
    temb = Embedding(T, col, {u: coords[u] for u in T.vertices}, emb.lengths, emb.params, False, emb.degenerate_flat)
    temb = temb.with_strong_flag()
    if not temb.strong:
        raise InvalidCertificate("mirror double is not injective")
    sym = has_reflection_symmetry(temb)
    if not sym:
        raise InvalidCertificate("mirror double lacks the reflection symmetry it was built with")
    return TorusRecord(T, temb, self_intersects(temb), sym, "mirror", canonical_form(S), cert)


# ---------------------------------------------------------------------------
# property T2


def colour_matching(colouring: WildColouring, f_v: Face, f_w: Face) -> dict[int, int] | None:
    """The unique bijection f_v -> f_w preserving opposite-edge colours."""
    out = {}
    for x in f_v:
        c = colouring.opposite_colour(f_v, x)
        y = next(u for u in f_w if colouring.opposite_colour(f_w, u) == c)
        out[x] = y
    return out


def check_T2(S: SimplicialSurface, f_v: Face, f_w: Face, matching: dict, emb: Embedding) -> bool:
    coords = emb.coords
    if any(nm.dist(coords[x], coords[y]) > nm.EPS_SEP for x, y in matching.items()):
        return False
    rest = [u for u in S.vertices if u not in f_v]
    pts = np.array([nm.as_float(coords[u]) for u in rest])
    dd = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    for i, j in zip(*np.nonzero(dd < 1e-6)):
        if i < j and nm.dist(coords[rest[i]], coords[rest[j]]) <= nm.EPS_SEP:
            return False
    return True


def _t2_residual_np(plan, matching):
    idx = {u: i for i, u in enumerate(plan.order)}
    pairs = [(idx[x], idx[y]) for x, y in sorted(matching.items())]

    def res(a, h):
        P = plan.evaluate_np(a, h)
        return np.concatenate([P[:, i] - P[:, j] for i, j in pairs], axis=1)

    return res


def _t2_residual_mp(plan, matching):
    def res(a, h):
        coords = plan.evaluate(Params.from_alpha(a, h))
        out = []
        for x, y in sorted(matching.items()):
            out.extend(nm.sub(coords[x], coords[y]))
        return out

    return res


def solve_T2_parameters(
    S: SimplicialSurface,
    f_v: Face,
    f_w: Face,
    colouring: WildColouring | None = None,
    plan: BuildPlan | None = None,
    density: str = "default",
    families: bool = False,
) -> list[T2Certificate]:
    """Verified parameter points where f_v folds onto f_w.

    Only the reflection-built embedding is searched: folding any step back
    onto its opposite vertex makes two vertices outside f_v coincide, or
    leaves a coincidence that survives in the identified torus.
    """
    colouring = colouring or compute_wild_colouring(S)
    plan = plan or BuildPlan.from_surface(S, colouring)
    matching = colour_matching(colouring, f_v, f_w)
    if matching is None or set(f_v) & set(f_w):
        return []
    v = next(u for u in f_v if S.degree(u) == 3)
    w = next(u for u in f_w if S.degree(u) == 3)
    roots = find_roots(_t2_residual_np(plan, matching), _t2_residual_mp(plan, matching), density)
    out = []
    for r in roots:
        if not (families or r.isolated):
            continue
        p = Params.from_alpha(r.alpha, r.h)
        coords = plan.evaluate(p)
        emb = Embedding(S, colouring, coords, edge_lengths_of(p), p, False, p.degenerate_flat)
        if check_T2(S, f_v, f_w, matching, emb):
            out.append(T2Certificate(S, colouring, v, w, f_v, f_w, matching, p, r.residual, r.conditioning))
    return out


def build_identified_torus(cert: T2Certificate, emb: Embedding | None = None) -> TorusRecord:
    S = cert.sphere
    emb = emb or certificate_embedding(cert)
    if not check_T2(S, cert.f_v, cert.f_w, cert.matching, emb):
        raise InvalidCertificate("T2 conditions fail")
    m = {u: cert.matching.get(u, u) for u in S.vertices}
    drop = {tuple(sorted(cert.f_v)), tuple(sorted(cert.f_w))}
    faces = [tuple(sorted(m[u] for u in f)) for f in S.faces if f not in drop]
    try:
        T = validate_surface(faces)
    except SurfaceError as exc:
        raise InvalidCertificate(f"identification is not a surface: {exc}") from exc
    cols = {}
    for (a, b), c in cert.colouring.colours.items():
        e = edge_key(m[a], m[b])
        if cols.setdefault(e, c) != c:
            raise InvalidCertificate("identified edges carry different colours")
    col = WildColouring({e: cols[e] for e in T.edges})
    temb = Embedding(T, col, {u: emb.coords[u] for u in T.vertices}, emb.lengths, emb.params, False, emb.degenerate_flat)
    temb = temb.with_strong_flag()
    if not temb.strong:
        raise InvalidCertificate("identified torus is not injective")
    return TorusRecord(
        T, temb, self_intersects(temb), has_reflection_symmetry(temb), "identify", canonical_form(S), cert
    )


# ---------------------------------------------------------------------------
# symmetry


def kabsch(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Best orthogonal R (det may be -1) and t with B ~ A R^T + t; returns max deviation."""
    ca, cb = A.mean(axis=0), B.mean(axis=0)
    H = (A - ca).T @ (B - cb)
    U, _, Vt = np.linalg.svd(H)
    R = Vt.T @ U.T
    t = cb - R @ ca
    dev = float(np.max(np.linalg.norm(A @ R.T + t - B, axis=1)))
    return R, t, dev


def _colour_permutation(emb: Embedding, g: dict[int, int]) -> dict[int, int] | None:
    perm: dict[int, int] = {}
    for (u, v), c in emb.colouring.colours.items():
        d = emb.colouring.colour(g[u], g[v])
        if perm.setdefault(c, d) != d:
            return None
    if any(abs(emb.lengths[c] - emb.lengths[d]) > nm.EPS_LEN for c, d in perm.items()):
        return None
    return perm


def isometric_automorphisms(emb: Embedding, tol: float = 1e-8) -> list[tuple[dict, int]]:
    """Automorphisms realised by isometries, with the sign of det R."""
    verts = list(emb.surface.vertices)
    A = emb.array(verts)
    out = []
    for g in automorphisms(emb.surface):
        if _colour_permutation(emb, g) is None:
            continue
        B = emb.array([g[v] for v in verts])
        R, _, dev = kabsch(A, B)
        if dev < tol:
            out.append((g, int(round(np.linalg.det(R)))))
    return out


def has_reflection_symmetry(emb: Embedding, tol: float = 1e-8) -> bool:
    """Whether some automorphism is realised by an orientation-reversing isometry."""
    return any(sign < 0 for _, sign in isometric_automorphisms(emb, tol))


# ---------------------------------------------------------------------------
# dedup


def fingerprint(rec: TorusRecord, digits: int = 6) -> tuple:
    """Isometry- and scale-invariant key of a torus record."""
    emb = rec.embedding
    s = min(emb.lengths)
    P = emb.array() / float(s)
    d = np.linalg.norm(P[:, None] - P[None, :], axis=-1)[np.triu_indices(len(P), 1)]
    dists = tuple(np.round(np.sort(d), digits))
    lens = tuple(round(float(x), digits) for x in emb.lengths.normalised())
    return (canonical_form(rec.torus), lens, dists)


def census_dedup(records) -> list[TorusRecord]:
    """Keep one record per (surface, lengths up to scale, distance multiset)."""
    seen = {}
    for r in records:
        k = fingerprint(r)
        if k not in seen:
            seen[k] = r
    return list(seen.values())


# ---------------------------------------------------------------------------
# higher genus


def _side_check(emb: Embedding, f: Face) -> int:
    origin, n = _plane(emb.coords, f)
    signs = set()
    for u, p in emb.coords.items():
        if u in f:
            continue
        d = nm.dot(nm.sub(p, origin), n)
        if abs(d) <= nm.EPS_SEP:
            raise HalfSpaceViolated(f"vertex {u} lies on the plane of face {f}")
        signs.add(1 if d > 0 else -1)
    if len(signs) != 1:
        raise HalfSpaceViolated(f"vertices on both sides of face {f}")
    return signs.pop()


def supporting_faces(emb: Embedding) -> list[Face]:
    """Faces whose plane has the whole polyhedron strictly on one side."""
    out = []
    for f in emb.surface.faces:
        try:
            _side_check(emb, f)
        except HalfSpaceViolated:
            continue
        out.append(f)
    return out


@dataclass(frozen=True)
class GluedRecord:
    surface: SimplicialSurface
    embedding: Embedding
    euler_characteristic: int
    genus: int
    self_intersecting: bool


def glue_higher_genus(X, Y, f_X: Face, f_Y: Face):
    """Glue two embedded surfaces along supporting faces, outward.

    Euler characteristic drops by two relative to chi(X) + chi(Y).
    """
    ex = X.embedding if hasattr(X, "embedding") else X
    ey = Y.embedding if hasattr(Y, "embedding") else Y
    f_X, f_Y = tuple(sorted(f_X)), tuple(sorted(f_Y))
    _side_check(ex, f_X)
    _side_check(ey, f_Y)
    res = attach_via_isometry(ex, f_X, ey, f_Y, side=1)
    if res is None:
        raise ValueError("glued complex is not a strongly embedded surface")
    Z, emb = res
    rep = report(Z)
    return GluedRecord(Z, emb, rep.euler_characteristic, rep.genus, self_intersects(emb))


# ---------------------------------------------------------------------------
# fixed lengths


def mirror_tori_at(S: SimplicialSurface, colouring: WildColouring, lengths: LengthTriple) -> list[TorusRecord]:
    """Mirror tori of a proper sphere embedded with fixed colour lengths.

    Every end-face pair is tested for T1 at these lengths; no root finding.
    """
    emb = embedding_with_lengths(S, colouring, lengths)
    v, w, Fv, Fw = end_faces(S)
    out = []
    for f_v in Fv:
        for f_w in Fw:
            ok, _ = check_T1(S, v, w, f_v, f_w, emb)
            if not ok:
                continue
            cert = T1Certificate(S, colouring, v, w, f_v, f_w, emb.params, mpf(0), _plane(emb.coords, f_v))
            try:
                out.append(build_mirror_torus(cert, emb))
            except InvalidCertificate:
                continue
    return out
