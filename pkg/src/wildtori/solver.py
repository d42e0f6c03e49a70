"""Damped least-squares root search over the base-tetrahedron parameters.

Search runs in float64 over the angle parameterisation (alpha, h), vectorised
across all seeds; every candidate is then polished by Gauss-Newton at working
mpmath precision.  The solver is only a search heuristic: callers re-verify
each root with an independent checker.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from mpmath import mpf

from . import numeric as nm

ALPHA_MIN, ALPHA_MAX = 1e-6, np.pi - 1e-6
H_MIN = 1e-6
BOUNDARY = 1e-4


def seed_grid(density: str = "default") -> tuple[np.ndarray, np.ndarray]:
    """Seeds: alpha in 0.1..3.04 step 0.15 times log-spaced h in [0.05, 5]."""
    if density == "dense":
        alphas = np.arange(0.05, 3.1, 0.075)
        hs = np.geomspace(0.02, 8.0, 60)
    else:
        alphas = np.arange(0.1, 3.04 + 1e-9, 0.15)
        hs = np.geomspace(0.05, 5.0, 30)
    A, H = np.meshgrid(alphas, hs, indexing="ij")
    return A.ravel(), H.ravel()


def _clip(a, h):
    return np.clip(a, ALPHA_MIN, ALPHA_MAX), np.clip(h, H_MIN, 50.0)


def levenberg_marquardt(
    residual: Callable[[np.ndarray, np.ndarray], np.ndarray],
    alpha: np.ndarray,
    h: np.ndarray,
    iters: int = 80,
    step: float = 1e-7,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised LM on all seeds at once.

    ``residual(alpha, h)`` returns an array of shape (N, m).  Returns the final
    parameters and residual norms.
    """
    a, hh = _clip(alpha.astype(float).copy(), h.astype(float).copy())
    lam = np.full(a.shape, 1e-3)
    r = residual(a, hh)
    cost = np.einsum("ij,ij->i", r, r)
    for _ in range(iters):
        ra = residual(a + step, hh)
        rh = residual(a, hh + step)
        Ja = (ra - r) / step
        Jh = (rh - r) / step
        g_a = np.einsum("ij,ij->i", Ja, r)
        g_h = np.einsum("ij,ij->i", Jh, r)
        A11 = np.einsum("ij,ij->i", Ja, Ja)
        A22 = np.einsum("ij,ij->i", Jh, Jh)
        A12 = np.einsum("ij,ij->i", Ja, Jh)
        B11 = A11 * (1 + lam) + 1e-30
        B22 = A22 * (1 + lam) + 1e-30
        det = B11 * B22 - A12 * A12
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        da = -(B22 * g_a - A12 * g_h) / det
        dh = -(-A12 * g_a + B11 * g_h) / det
        # keep steps moderate
        size = np.sqrt(da * da + dh * dh)
        f = np.minimum(1.0, 0.5 / np.maximum(size, 1e-300))
        na, nh = _clip(a + f * da, hh + f * dh)
        nr = residual(na, nh)
        ncost = np.einsum("ij,ij->i", nr, nr)
        ok = np.isfinite(ncost) & (ncost < cost)
        a = np.where(ok, na, a)
        hh = np.where(ok, nh, hh)
        r = np.where(ok[:, None], nr, r)
        cost = np.where(ok, ncost, cost)
        lam = np.where(ok, np.maximum(lam / 3, 1e-12), np.minimum(lam * 4, 1e12))
        if np.all((cost < 1e-26) | (lam >= 1e12)):
            break
    return a, hh, np.sqrt(cost)


def gauss_newton_mp(
    residual: Callable[[mpf, mpf], list],
    alpha,
    h,
    tol: float = nm.EPS_RES,
    max_iter: int = 60,
) -> tuple[mpf, mpf, mpf]:
    """Polish a root at working precision; returns (alpha, h, residual norm)."""
    a, hh = mpf(alpha), mpf(h)
    eps = mpf(10) ** (-(mpmath.mp.dps // 2 - 2))
    r = residual(a, hh)
    nrm = mpmath.sqrt(sum(x * x for x in r))
    for _ in range(max_iter):
        if nrm < tol * mpf(10) ** -6:
            break
        ra_p, ra_m = residual(a + eps, hh), residual(a - eps, hh)
        rh_p, rh_m = residual(a, hh + eps), residual(a, hh - eps)
        Ja = [(p - m) / (2 * eps) for p, m in zip(ra_p, ra_m)]
        Jh = [(p - m) / (2 * eps) for p, m in zip(rh_p, rh_m)]
        A11 = sum(x * x for x in Ja)
        A22 = sum(x * x for x in Jh)
        A12 = sum(x * y for x, y in zip(Ja, Jh))
        g1 = sum(x * y for x, y in zip(Ja, r))
        g2 = sum(x * y for x, y in zip(Jh, r))
        det = A11 * A22 - A12 * A12
        if det == 0:
            break
        da = -(A22 * g1 - A12 * g2) / det
        dh = -(-A12 * g1 + A11 * g2) / det
        t = mpf(1)
        while t > mpf(10) ** -8:
            na, nh = a + t * da, hh + t * dh
            if 0 < na < mpmath.pi and nh > 0:
                nr = residual(na, nh)
                nn = mpmath.sqrt(sum(x * x for x in nr))
                if nn < nrm:
                    a, hh, r, nrm = na, nh, nr, nn
                    break
            t /= 2
        else:
            break
    return a, hh, nrm


@dataclass(frozen=True)
class Root:
    alpha: mpf
    h: mpf
    residual: mpf
    # smallest over largest singular value of the residual Jacobian
    conditioning: mpf = mpf(1)

    @property
    def isolated(self) -> bool:
        """False when the root lies on a curve of roots (rank-deficient Jacobian)."""
        return self.conditioning > ISOLATION_TOL


ISOLATION_TOL = mpf(10) ** -15


def jacobian_conditioning(residual: Callable[[mpf, mpf], list], alpha, h) -> mpf:
    a, hh = mpf(alpha), mpf(h)
    eps = mpf(10) ** (-(mpmath.mp.dps // 2 - 2))
    Ja = [(p - m) / (2 * eps) for p, m in zip(residual(a + eps, hh), residual(a - eps, hh))]
    Jh = [(p - m) / (2 * eps) for p, m in zip(residual(a, hh + eps), residual(a, hh - eps))]
    A11 = sum(x * x for x in Ja)
    A22 = sum(x * x for x in Jh)
    A12 = sum(x * y for x, y in zip(Ja, Jh))
    tr, det = A11 + A22, A11 * A22 - A12 * A12
    disc = mpmath.sqrt(max(tr * tr / 4 - det, mpf(0)))
    lo, hi = tr / 2 - disc, tr / 2 + disc
    if hi <= 0:
        return mpf(0)
    return mpmath.sqrt(max(lo, mpf(0)) / hi)


def find_roots(
    residual_np: Callable[[np.ndarray, np.ndarray], np.ndarray],
    residual_mp: Callable[[mpf, mpf], list],
    density: str = "default",
    float_tol: float = 1e-9,
    dedup_tol: float = 1e-8,
) -> list[Root]:
    """Seed-grid LM search followed by high-precision polishing and dedup."""
    A, H = seed_grid(density)
    with np.errstate(all="ignore"):
        a, h, res = levenberg_marquardt(residual_np, A, H)
    cand = np.nonzero(np.isfinite(res) & (res < float_tol))[0]
    pts: list[tuple[float, float]] = []
    for i in cand[np.argsort(res[cand])]:
        if all(abs(a[i] - p) > dedup_tol * 10 or abs(h[i] - q) > dedup_tol * 10 for p, q in pts):
            pts.append((a[i], h[i]))
    roots: list[Root] = []
    for p, q in pts:
        try:
            ra, rh, rn = gauss_newton_mp(residual_mp, p, q)
        except (ZeroDivisionError, ValueError):
            continue
        # roots that drift to the flat boundary are limits, not solutions
        if rn >= nm.EPS_RES or not (BOUNDARY < ra < mpmath.pi - BOUNDARY) or rh <= BOUNDARY:
            continue
        if any(abs(ra - r.alpha) < dedup_tol and abs(rh - r.h) < dedup_tol for r in roots):
            continue
        roots.append(Root(ra, rh, rn, jacobian_conditioning(residual_mp, ra, rh)))
    roots.sort(key=lambda r: (float(r.alpha), float(r.h)))
    return roots
