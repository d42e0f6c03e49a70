"""Extended-precision arithmetic and the tolerances used throughout.

All certified geometry runs on mpmath at ``mp.dps`` significant digits
(50 by default); numpy float64 is only used for search and screening.
"""
from __future__ import annotations

import contextlib

import mpmath
from mpmath import mp, mpf

DEFAULT_DIGITS = 50

EPS_LEN = 1e-12
EPS_SEP = 1e-9
EPS_AREA = 1e-12
EPS_ANG = 1e-10
EPS_RES = 1e-20

mp.dps = DEFAULT_DIGITS


def set_precision(digits: int) -> None:
    mp.dps = int(digits)


def precision() -> int:
    return mp.dps


@contextlib.contextmanager
def working_precision(digits: int):
    with mpmath.workdps(digits):
        yield


def to_mpf(value) -> mpf:
    if isinstance(value, str):
        return mpf(value)
    return mpf(value)


def fmt(value, digits: int | None = None) -> str:
    """Decimal string with ``digits`` significant digits (default: working precision)."""
    return mpmath.nstr(mpf(value), digits or mp.dps, min_fixed=-mp.inf, max_fixed=mp.inf, strip_zeros=False)


Vec = tuple


def vec(x, y, z) -> Vec:
    return (mpf(x), mpf(y), mpf(z))


def sub(p, q) -> Vec:
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def add(p, q) -> Vec:
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2])


def scale(s, p) -> Vec:
    return (s * p[0], s * p[1], s * p[2])


def dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def cross(p, q) -> Vec:
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def norm(p):
    return mpmath.sqrt(dot(p, p))


def dist(p, q):
    return norm(sub(p, q))


def unit(p) -> Vec:
    n = norm(p)
    return (p[0] / n, p[1] / n, p[2] / n)


def as_float(p) -> tuple[float, float, float]:
    return (float(p[0]), float(p[1]), float(p[2]))
