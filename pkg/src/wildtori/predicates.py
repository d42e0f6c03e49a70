"""Segment/triangle intersection and polyhedral self-intersection.

Coordinates are certified at high precision elsewhere; the decisions here are
made in float64, whose rounding (~1e-15) sits far below the 1e-9 separation
tolerance.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .numeric import EPS_AREA, EPS_SEP

_TOUCH = 1e-12


def _covered(t0: float, t1: float, intervals: list[tuple[float, float]]) -> bool:
    """Whether [t0, t1] is covered by the union of closed intervals."""
    cur = t0
    for a, b in sorted(intervals):
        if a > cur + 1e-15:
            return False
        cur = max(cur, b)
        if cur >= t1:
            return True
    return cur >= t1


def _far_from_all(p0, p1, excluded: np.ndarray, eps: float) -> bool:
    """Whether the segment p0-p1 has a point farther than eps from every excluded point."""
    d = p1 - p0
    L2 = float(d @ d)
    if L2 < 1e-30:
        return bool(len(excluded) == 0 or np.min(np.linalg.norm(excluded - p0, axis=1)) > eps)
    intervals = []
    for q in excluded:
        # |p0 + t d - q|^2 <= eps^2
        w = p0 - q
        b = float(w @ d)
        c = float(w @ w) - eps * eps
        disc = b * b - L2 * c
        if disc < 0:
            continue
        s = np.sqrt(disc)
        intervals.append(((-b - s) / L2, (-b + s) / L2))
    return not _covered(0.0, 1.0, intervals)


def _clip_segment_to_triangle(p0, p1, t1, t2, t3, n):
    """Coplanar case: parameter range of p0 + t (p1 - p0) inside the triangle."""
    lo, hi = 0.0, 1.0
    d = p1 - p0
    for a, b, c in ((t1, t2, t3), (t2, t3, t1), (t3, t1, t2)):
        # inward normal of edge ab within the plane
        m = np.cross(n, b - a)
        if m @ (c - a) < 0:
            m = -m
        m = m / np.linalg.norm(m)
        f0 = float(m @ (p0 - a)) + _TOUCH
        fd = float(m @ d)
        if abs(fd) < 1e-300:
            if f0 < 0:
                return None
            continue
        t = -f0 / fd
        if fd > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo > hi:
            return None
    return lo, hi


def segment_triangle_meet(s1, s2, t1, t2, t3, excluded: Iterable = (), eps: float = EPS_SEP) -> bool:
    """Whether the closed segment meets the closed triangle away from ``excluded``.

    True iff conv{s1,s2} and conv{t1,t2,t3} share a point farther than ``eps``
    from every excluded point.
    """
    s1, s2, t1, t2, t3 = (np.asarray(p, dtype=float) for p in (s1, s2, t1, t2, t3))
    excl = np.asarray([np.asarray(p, dtype=float) for p in excluded]).reshape(-1, 3)
    n = np.cross(t2 - t1, t3 - t1)
    nn = np.linalg.norm(n)
    if nn <= EPS_AREA:
        from .geometry import DegeneratePlane

        raise DegeneratePlane("triangle is degenerate")
    n = n / nn
    d1 = float(n @ (s1 - t1))
    d2 = float(n @ (s2 - t1))
    tol = 1e-13
    if abs(d1) <= tol and abs(d2) <= tol:
        rng = _clip_segment_to_triangle(s1, s2, t1, t2, t3, n)
        if rng is None:
            return False
        a, b = rng
        p0 = s1 + a * (s2 - s1)
        p1 = s1 + b * (s2 - s1)
        return _far_from_all(p0, p1, excl, eps)
    if (d1 > tol and d2 > tol) or (d1 < -tol and d2 < -tol):
        return False
    if abs(d1) <= tol:
        p = s1
    elif abs(d2) <= tol:
        p = s2
    else:
        p = s1 + (d1 / (d1 - d2)) * (s2 - s1)
    # barycentric test with a tiny touch tolerance
    v0, v1, v2 = t2 - t1, t3 - t1, p - t1
    d00, d01, d11 = v0 @ v0, v0 @ v1, v1 @ v1
    d20, d21 = v2 @ v0, v2 @ v1
    den = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    u = 1 - v - w
    if min(u, v, w) < -_TOUCH:
        return False
    if len(excl) and np.min(np.linalg.norm(excl - p, axis=1)) <= eps:
        return False
    return True


def self_intersection_pairs(surface, coords: dict, first_only: bool = True) -> list[tuple]:
    """Edge/face pairs with disjoint vertex sets whose images meet off their vertices."""
    verts = list(surface.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    P = np.array([np.asarray([float(c) for c in coords[v]]) for v in verts])
    edges = list(surface.edges)
    faces = list(surface.faces)
    E = np.array([[idx[u], idx[v]] for u, v in edges])
    F = np.array([[idx[a], idx[b], idx[c]] for a, b, c in faces])
    emin = np.minimum(P[E[:, 0]], P[E[:, 1]]) - 1e-7
    emax = np.maximum(P[E[:, 0]], P[E[:, 1]]) + 1e-7
    fmin = P[F].min(axis=1) - 1e-7
    fmax = P[F].max(axis=1) + 1e-7
    overlap = np.all((emin[:, None, :] <= fmax[None, :, :]) & (emax[:, None, :] >= fmin[None, :, :]), axis=2)
    share = (
        (E[:, None, 0:1] == F[None, :, :]).any(axis=2) | (E[:, None, 1:2] == F[None, :, :]).any(axis=2)
    )
    out = []
    for i, j in zip(*np.nonzero(overlap & ~share)):
        a, b = E[i]
        x, y, z = F[j]
        excl = P[[a, b, x, y, z]]
        if segment_triangle_meet(P[a], P[b], P[x], P[y], P[z], excl):
            out.append((edges[i], faces[j]))
            if first_only:
                break
    return out


def self_intersects(embedding) -> bool:
    """Whether the embedded polyhedron has an edge crossing a disjoint face."""
    return bool(self_intersection_pairs(embedding.surface, embedding.coords))
