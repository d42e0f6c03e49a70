"""Embeddings of wild-coloured multi-tetrahedral surfaces in 3-space.

The base tetrahedron has vertices ``v1..v4`` (ids 0..3) at

    (1/2, 0, 0), (-1/2, 0, 0),
    ((x^2-1)/(2(x^2+1)),  x/(x^2+1), h),
    ((1-x^2)/(2(x^2+1)), -x/(x^2+1), h)

with colour 1 on {v1v2, v3v4}, colour 2 on {v1v3, v2v4} and colour 3 on
{v1v4, v2v3}.  Writing cos(a) = (x^2-1)/(x^2+1) the squared lengths are
b^2 = 1/2 - cos(a)/2 + h^2 and c^2 = 1/2 + cos(a)/2 + h^2.  Larger surfaces are
embedded by reflecting across faces, one tetrahedron at a time.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import numeric as nm
from .lengths import LengthTriple, NotInLambda
from .surface import (
    TETRAHEDRON,
    Face,
    SimplicialSurface,
    SurfaceError,
    edge_key,
    remove_tetrahedron,
    validate_surface,
)
from .wild import WildColouring


class GeometryError(ValueError):
    pass


class BothParamsZero(GeometryError):
    pass


class ObtuseTriple(GeometryError):
    pass


class DegeneratePlane(GeometryError):
    pass


class NoBuildOrder(GeometryError):
    pass


class LengthMismatch(GeometryError):
    pass


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class Params:
    """Shape parameters of the base tetrahedron.

    ``x`` may be ``mpmath.inf``; ``alpha`` is the equivalent angle with
    ``cos(alpha) = (x^2-1)/(x^2+1)`` in [0, pi].
    """

    x: mpf
    h: mpf

    def __post_init__(self):
        object.__setattr__(self, "x", mpf(self.x))
        object.__setattr__(self, "h", mpf(self.h))
        if self.x < 0 or self.h < 0:
            raise GeometryError("parameters must be non-negative")
        if self.x == 0 and self.h == 0:
            raise BothParamsZero("(x, h) = (0, 0) is excluded")

    @classmethod
    def from_alpha(cls, alpha, h) -> "Params":
        alpha = mpf(alpha)
        s = mpmath.sin(alpha)
        x = mp.inf if s == 0 and mpmath.cos(alpha) > 0 else (1 + mpmath.cos(alpha)) / s
        return cls(x, h)

    @property
    def cos_alpha(self) -> mpf:
        if mpmath.isinf(self.x):
            return mpf(1)
        x2 = self.x * self.x
        return (x2 - 1) / (x2 + 1)

    @property
    def sin_alpha(self) -> mpf:
        if mpmath.isinf(self.x):
            return mpf(0)
        return 2 * self.x / (self.x * self.x + 1)

    @property
    def alpha(self) -> mpf:
        return mpmath.acos(self.cos_alpha)

    @property
    def degenerate_flat(self) -> bool:
        return self.h == 0 or self.sin_alpha == 0

    def __iter__(self):
        return iter((self.x, self.h))


def _params(x, h, alpha=None) -> Params:
    if isinstance(x, Params):
        return x
    if alpha is not None:
        return Params.from_alpha(alpha, h)
    return Params(x, h)


def base_coordinates(p: Params) -> list[tuple]:
    half = mpf(1) / 2
    ca, sa = p.cos_alpha, p.sin_alpha
    return [
        (half, mpf(0), mpf(0)),
        (-half, mpf(0), mpf(0)),
        (ca / 2, sa / 2, p.h),
        (-ca / 2, -sa / 2, p.h),
    ]


BASE_COLOURS = {(0, 1): 1, (2, 3): 1, (0, 2): 2, (1, 3): 2, (0, 3): 3, (1, 2): 3}


def edge_lengths_of(x, h=None, alpha=None) -> LengthTriple:
    """Lengths of colours 1, 2, 3 measured on the base tetrahedron."""
    p = _params(x, h, alpha)
    v = base_coordinates(p)
    return LengthTriple(nm.dist(v[0], v[1]), nm.dist(v[0], v[2]), nm.dist(v[0], v[3]))


def solve_parameters(b, c) -> Params:
    """Parameters (x, h) of the base tetrahedron with lengths (1, b, c).

    cos(alpha) = c^2 - b^2 and h = sqrt(b^2 - 1/2 + cos(alpha)/2).
    """
    b, c = mpf(b), mpf(c)
    lt = LengthTriple(1, b, c)
    if not lt.in_lambda():
        raise NotInLambda(f"(1, {b}, {c}) violates the triangle inequality")
    if not lt.non_obtuse():
        raise ObtuseTriple(f"(1, {float(b)}, {float(c)}) is an obtuse triangle")
    cos_a = c * c - b * b
    h2 = b * b - mpf(1) / 2 + cos_a / 2
    h = mpmath.sqrt(max(h2, mpf(0)))
    if cos_a >= 1:
        x = mp.inf
    else:
        x = mpmath.sqrt((1 + cos_a) / (1 - cos_a))
    return Params(x, h)


R2_POLYNOMIAL = (1, -10, -5, 6, 1)
R1_BRACKET = (mpf(175013) / 262144, mpf(21877) / 32768)
R2_BRACKET = (mpf(13387) / 16384, mpf(6695) / 8192)


def r2_parameter() -> mpf:
    """Positive square root of the root of x^4 - 10x^3 - 5x^2 + 6x + 1 in R1_BRACKET.

    At (x, h) = (r2, 1) the six-tetrahedron helix has parallel end faces.
    """
    lo, hi = R1_BRACKET
    r1 = mpmath.findroot(lambda t: mpmath.polyval(list(R2_POLYNOMIAL), t), (lo, hi), solver="anderson")
    return mpmath.sqrt(r1)


def params_for_lengths(lengths: LengthTriple) -> tuple[Params, mpf]:
    """Parameters and the scale factor realising an arbitrary triple."""
    a, b, c = lengths
    return solve_parameters(b / a, c / a), a


# ---------------------------------------------------------------------------
# reflections


def reflect_point(p, q1, q2, q3):
    n = nm.cross(nm.sub(q2, q1), nm.sub(q3, q1))
    nn = nm.norm(n)
    if nn <= nm.EPS_AREA:
        raise DegeneratePlane("points do not span a plane")
    n = nm.scale(1 / nn, n)
    d = nm.dot(nm.sub(p, q1), n)
    return nm.sub(p, nm.scale(2 * d, n))


def reflect_np(p, q1, q2, q3):
    """Vectorised reflection of points ``p`` (shape (..., 3)) across planes."""
    n = np.cross(q2 - q1, q3 - q1)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    d = np.sum((p - q1) * n, axis=-1, keepdims=True)
    return p - 2 * d * n


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class Embedding:
    surface: SimplicialSurface
    colouring: WildColouring
    coords: Mapping[int, tuple]
    lengths: LengthTriple
    params: Params | None = None
    strong: bool = False
    degenerate_flat: bool = False

    def point(self, v: int):
        return self.coords[v]

    def max_length_error(self):
        err = mpf(0)
        for (u, v), c in self.colouring.colours.items():
            err = max(err, abs(nm.dist(self.coords[u], self.coords[v]) - self.lengths[c]))
        return err

    def is_weak(self, tol: float = nm.EPS_LEN) -> bool:
        return self.max_length_error() <= tol

    def min_separation(self):
        pts = list(self.coords.values())
        best = mp.inf
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                best = min(best, nm.dist(pts[i], pts[j]))
        return best

    def injective(self, tol: float = nm.EPS_SEP) -> bool:
        arr = self.array()
        d = np.linalg.norm(arr[:, None, :] - arr[None, :, :], axis=-1)
        d[np.diag_indices(len(arr))] = np.inf
        if d.min() > 10 * tol:
            return True
        return self.min_separation() > tol

    def array(self, order: Sequence[int] | None = None) -> np.ndarray:
        order = self.surface.vertices if order is None else order
        return np.array([nm.as_float(self.coords[v]) for v in order], dtype=float)

    def with_strong_flag(self) -> "Embedding":
        return replace(self, strong=self.injective())

    def transformed(self, R, t) -> "Embedding":
        """Apply x -> R x + t (R as nested lists of numbers)."""
        R = [[mpf(r) for r in row] for row in R]
        t = [mpf(s) for s in t]
        new = {
            v: tuple(sum(R[i][j] * p[j] for j in range(3)) + t[i] for i in range(3))
            for v, p in self.coords.items()
        }
        return replace(self, coords=new)


def base_tetrahedron(x=None, h=None, alpha=None) -> Embedding:
    p = _params(x, h, alpha)
    S = validate_surface(TETRAHEDRON)
    coords = dict(enumerate(base_coordinates(p)))
    col = WildColouring(dict(BASE_COLOURS))
    emb = Embedding(S, col, coords, edge_lengths_of(p), p, False, p.degenerate_flat)
    return emb.with_strong_flag()


@dataclass(frozen=True)
class BuildStep:
    vertex: int  # the new apex
    opposite: int  # vertex reflected to obtain it
    face: Face  # the face it is attached over


@dataclass(frozen=True)
class BuildPlan:
    """Base tetrahedron assignment plus a sequence of reflections."""

    base: tuple[int, int, int, int]
    steps: tuple[BuildStep, ...]
    order: tuple[int, ...] = field(default=())

    @classmethod
    def from_surface(cls, S: SimplicialSurface, colouring: WildColouring) -> "BuildPlan":
        removed = []
        cur = S
        while cur.num_faces > 4:
            cands = cur.degree_three_vertices()
            if not cands:
                raise NoBuildOrder("surface is not a multi-tetrahedral sphere")
            v = min(cands)
            base = tuple(sorted(cur.neighbours[v]))
            try:
                cur = remove_tetrahedron(cur, v)
            except SurfaceError as exc:
                raise NoBuildOrder(str(exc)) from exc
            removed.append((v, base))
        if cur.num_vertices != 4:
            raise NoBuildOrder("reduction did not end in a tetrahedron")
        v1 = min(cur.vertices)
        nbr = {colouring.colour(v1, u): u for u in cur.vertices if u != v1}
        base4 = (v1, nbr[1], nbr[2], nbr[3])
        # owner[f] = fourth vertex of the tetrahedron containing face f
        owner = {}
        for f in cur.faces:
            owner[f] = next(u for u in base4 if u not in f)
        steps = []
        for v, (a, b, c) in reversed(removed):
            f = (a, b, c)
            u = owner.pop(f)
            steps.append(BuildStep(v, u, f))
            for g, rest in (((a, b, v), c), ((a, c, v), b), ((b, c, v), a)):
                owner[tuple(sorted(g))] = rest
        order = base4 + tuple(s.vertex for s in steps)
        return cls(base4, tuple(steps), order)

    def evaluate(self, p: Params, choices: Sequence[int] | None = None, scale=1) -> dict[int, tuple]:
        """Coordinates at ``p``; ``choices[i] == 1`` keeps step i on its opposite vertex."""
        coords = {}
        for v, pt in zip(self.base, base_coordinates(p)):
            coords[v] = nm.scale(mpf(scale), pt) if scale != 1 else pt
        for i, s in enumerate(self.steps):
            if choices is not None and choices[i] == 1:
                coords[s.vertex] = coords[s.opposite]
            else:
                a, b, c = s.face
                coords[s.vertex] = reflect_point(coords[s.opposite], coords[a], coords[b], coords[c])
        return coords

    def evaluate_np(self, alpha: np.ndarray, h: np.ndarray) -> np.ndarray:
        """Float coordinates for many parameter points; shape (N, len(order), 3)."""
        alpha = np.asarray(alpha, dtype=float)
        h = np.asarray(h, dtype=float)
        n = alpha.shape[0]
        idx = {v: i for i, v in enumerate(self.order)}
        out = np.zeros((n, len(self.order), 3))
        ca, sa = np.cos(alpha), np.sin(alpha)
        out[:, idx[self.base[0]], 0] = 0.5
        out[:, idx[self.base[1]], 0] = -0.5
        i3, i4 = idx[self.base[2]], idx[self.base[3]]
        out[:, i3, 0], out[:, i3, 1], out[:, i3, 2] = ca / 2, sa / 2, h
        out[:, i4, 0], out[:, i4, 1], out[:, i4, 2] = -ca / 2, -sa / 2, h
        for s in self.steps:
            a, b, c = (idx[t] for t in s.face)
            out[:, idx[s.vertex]] = reflect_np(out[:, idx[s.opposite]], out[:, a], out[:, b], out[:, c])
        return out


def strong_embedding(
    S: SimplicialSurface,
    colouring: WildColouring,
    x=None,
    h=None,
    alpha=None,
    plan: BuildPlan | None = None,
) -> Embedding:
    """The reflection-built embedding; ``strong`` records whether it is injective."""
    p = _params(x, h, alpha)
    plan = plan or BuildPlan.from_surface(S, colouring)
    coords = plan.evaluate(p)
    emb = Embedding(S, colouring, coords, edge_lengths_of(p), p, False, p.degenerate_flat)
    return emb.with_strong_flag()


def weak_embeddings(S: SimplicialSurface, colouring: WildColouring, x=None, h=None, alpha=None):
    """All sign-choice embeddings (reflect or fold back at every step)."""
    p = _params(x, h, alpha)
    plan = BuildPlan.from_surface(S, colouring)
    lengths = edge_lengths_of(p)
    k = len(plan.steps)
    for mask in range(2**k):
        choices = [(mask >> i) & 1 for i in range(k)]
        coords = plan.evaluate(p, choices)
        emb = Embedding(S, colouring, coords, lengths, p, False, p.degenerate_flat)
        yield choices, emb.with_strong_flag()


def embedding_with_lengths(S: SimplicialSurface, colouring: WildColouring, lengths: LengthTriple) -> Embedding:
    """Embed S with arbitrary (non-obtuse) colour lengths by scaling."""
    p, a = params_for_lengths(LengthTriple(*lengths).check())
    plan = BuildPlan.from_surface(S, colouring)
    coords = plan.evaluate(p, scale=a)
    emb = Embedding(S, colouring, coords, LengthTriple(*lengths), p, False, p.degenerate_flat)
    return emb.with_strong_flag()


# ---------------------------------------------------------------------------
# attaching one embedded surface onto another


def _frame(p1, p2, p3, normal_sign=1):
    v = nm.sub(p2, p1)
    w = nm.sub(p3, p1)
    n = nm.cross(v, w)
    if nm.norm(n) <= nm.EPS_AREA:
        raise DegeneratePlane("face is degenerate")
    n = nm.scale(normal_sign, nm.unit(n))
    return mpmath.matrix([[v[i], w[i], n[i]] for i in range(3)])


def _signed_side(points, origin, normal):
    vals = [nm.dot(nm.sub(p, origin), normal) for p in points]
    vals = [v for v in vals if abs(v) > nm.EPS_SEP]
    if not vals:
        return 0
    s = sum(vals)
    return 1 if s > 0 else -1


def face_vertex_matching(
    X: Embedding, f_X: Face, Y: Embedding, f_Y: Face
) -> dict[int, int]:
    """Match vertices of f_Y to f_X by the colour of the opposite edge."""
    out = {}
    for w in f_Y:
        c = Y.colouring.opposite_colour(f_Y, w)
        v = next(u for u in f_X if X.colouring.opposite_colour(f_X, u) == c)
        out[w] = v
    for w, v in out.items():
        c = Y.colouring.opposite_colour(f_Y, w)
        if abs(Y.lengths[c] - X.lengths[c]) > nm.EPS_LEN:
            raise LengthMismatch(f"colour {c} has lengths {Y.lengths[c]} and {X.lengths[c]}")
    return out


def attach_via_isometry(
    X: Embedding, f_X, Y: Embedding, f_Y, side: int = 1
) -> tuple[SimplicialSurface, Embedding] | None:
    """Glue Y onto X so that f_Y lands on f_X.

    ``side=+1`` puts Y on the far side of the plane of f_X from the bulk of
    X; ``side=-1`` on the same side.  Returns None when the glued complex is
    not a surface or two distinct vertices collide.
    """
    f_X = tuple(sorted(f_X))
    f_Y = tuple(sorted(f_Y))
    match = face_vertex_matching(X, f_X, Y, f_Y)
    ws = list(f_Y)
    vs = [match[w] for w in ws]
    MX_pos = _frame(*(X.coords[v] for v in vs))
    nX = nm.unit(nm.cross(nm.sub(X.coords[vs[1]], X.coords[vs[0]]), nm.sub(X.coords[vs[2]], X.coords[vs[0]])))
    x_side = _signed_side([X.coords[v] for v in X.coords if v not in f_X], X.coords[vs[0]], nX)
    offset = max(X.surface.vertices) + 1
    ymap = {w: (match[w] if w in match else w + offset) for w in Y.surface.vertices}

    best = None
    for sign in (1, -1):
        MY = _frame(*(Y.coords[w] for w in ws), normal_sign=sign)
        M = MX_pos * mpmath.inverse(MY)
        o_Y = Y.coords[ws[0]]
        o_X = X.coords[vs[0]]
        new = {}
        for w, p in Y.coords.items():
            d = mpmath.matrix([p[0] - o_Y[0], p[1] - o_Y[1], p[2] - o_Y[2]])
            q = M * d
            new[ymap[w]] = (q[0] + o_X[0], q[1] + o_X[1], q[2] + o_X[2])
        y_side = _signed_side([new[ymap[w]] for w in Y.coords if w not in f_Y], o_X, nX)
        if x_side == 0 or y_side == -x_side * side:
            best = new
            break
    if best is None:
        return None

    for w in f_Y:
        if nm.dist(best[match[w]], X.coords[match[w]]) > nm.EPS_SEP:
            raise LengthMismatch("face frames do not agree")
    coords = dict(X.coords)
    for v, p in best.items():
        if v not in coords:
            coords[v] = p
    faces = set(X.surface.faces) ^ {tuple(sorted(ymap[u] for u in f)) for f in Y.surface.faces}
    try:
        Z = validate_surface(faces)
    except SurfaceError:
        return None
    cols = dict(X.colouring.colours)
    for (u, v), c in Y.colouring.colours.items():
        cols[edge_key(ymap[u], ymap[v])] = c
    col = WildColouring({e: cols[e] for e in Z.edges})
    emb = Embedding(Z, col, {v: coords[v] for v in Z.vertices}, X.lengths, X.params, False, X.degenerate_flat)
    emb = emb.with_strong_flag()
    if not emb.strong:
        return None
    return Z, emb
