"""Planar sign predicates and small vector helpers.

Every left/right or crossing decision in the package goes through
:func:`orient2d`, which evaluates the determinant in floating point and
falls back to exact rational arithmetic when the rounding error bound does
not certify the sign.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from enum import Enum

import numpy as np

from .errors import DomainError

# Shewchuk's bound for the 2x2 orientation determinant
_EPS = np.finfo(float).eps / 2.0
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative length tolerance and absolute angle tolerance (radians)."""

    eps_len: float = 1e-9
    eps_ang: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.eps_len < 1e-3:
            raise DomainError(f"eps_len must lie in (0, 1e-3), got {self.eps_len}")
        if not 0.0 < self.eps_ang < 1e-3:
            raise DomainError(f"eps_ang must lie in (0, 1e-3), got {self.eps_ang}")

    @classmethod
    def from_env(cls, var="UNFOLDER_EPS"):
        value = os.environ.get(var)
        if value is None:
            return cls()
        try:
            eps = float(value)
        except ValueError:
            raise DomainError(f"{var}={value!r} is not a number") from None
        return cls(eps_len=eps)


DEFAULT_TOL = TolerancePolicy()


def _orient_exact(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    errbound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _orient_exact(ax, ay, bx, by, cx, cy)


def orient2d_many(a, b, c) -> np.ndarray:
    """Vectorised :func:`orient2d` over broadcastable (..., 2) arrays."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    detleft = (a[..., 0] - c[..., 0]) * (b[..., 1] - c[..., 1])
    detright = (a[..., 1] - c[..., 1]) * (b[..., 0] - c[..., 0])
    det = detleft - detright
    errbound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    sign = np.where(det > errbound, 1, np.where(-det > errbound, -1, 0)).astype(np.int8)
    unsure = np.argwhere(np.abs(det) <= errbound)
    for idx in map(tuple, unsure):
        sign[idx] = _orient_exact(a[idx][0], a[idx][1], b[idx][0], b[idx][1], c[idx][0], c[idx][1])
    return sign


class Crossing(str, Enum):
    DISJOINT = "disjoint"
    TOUCH = "endpoint-touch"
    CROSS = "proper-cross"
    OVERLAP = "overlap"


def _on_segment(p, q, r) -> bool:
    """For collinear p, q, r: does r lie in the closed box spanned by p, q?"""
    return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
            and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))


def _line_point(a, b, c, d):
    """Intersection point of the supporting lines of ab and cd (non-parallel)."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    den = r[0] * s[1] - r[1] * s[0]
    t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / den
    return (a[0] + t * r[0], a[1] + t * r[1])


def segment_intersection(s1, s2, tol: TolerancePolicy = DEFAULT_TOL):
    """Classify how two closed segments meet.

    Returns ``(kind, point)`` where ``kind`` is a :class:`Crossing` and
    ``point`` a witness of the contact (``None`` when disjoint).
    Endpoints closer than ``eps_len`` times the shorter segment length are
    treated as coincident.
    """
    a, b = s1
    c, d = s2
    a, b, c, d = (tuple(map(float, p)) for p in (a, b, c, d))
    if a == b or c == d:
        raise DomainError("segment with coincident endpoints")
    len1 = math.hypot(b[0] - a[0], b[1] - a[1])
    len2 = math.hypot(d[0] - c[0], d[1] - c[1])
    near = tol.eps_len * min(len1, len2)

    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)

    if o1 == 0 and o2 == 0:
        # collinear: compare parameter intervals along ab
        r = (b[0] - a[0], b[1] - a[1])
        rr = r[0] * r[0] + r[1] * r[1]
        tc = ((c[0] - a[0]) * r[0] + (c[1] - a[1]) * r[1]) / rr
        td = ((d[0] - a[0]) * r[0] + (d[1] - a[1]) * r[1]) / rr
        lo, hi = max(0.0, min(tc, td)), min(1.0, max(tc, td))
        if hi - lo > near / len1:
            mid = (lo + hi) / 2
            return Crossing.OVERLAP, (a[0] + mid * r[0], a[1] + mid * r[1])
        if hi - lo >= -near / len1:
            t = (lo + hi) / 2
            return Crossing.TOUCH, (a[0] + t * r[0], a[1] + t * r[1])
        return Crossing.DISJOINT, None

    for p in (a, b):
        for q in (c, d):
            if math.hypot(p[0] - q[0], p[1] - q[1]) <= near:
                return Crossing.TOUCH, p

    if o1 * o2 < 0 and o3 * o4 < 0:
        return Crossing.CROSS, _line_point(a, b, c, d)
    if o1 == 0 and _on_segment(a, b, c):
        return Crossing.TOUCH, c
    if o2 == 0 and _on_segment(a, b, d):
        return Crossing.TOUCH, d
    if o3 == 0 and _on_segment(c, d, a):
        return Crossing.TOUCH, a
    if o4 == 0 and _on_segment(c, d, b):
        return Crossing.TOUCH, b
    return Crossing.DISJOINT, None


def ambient_angle(u, v) -> float:
    """Angle in [0, pi] between two nonzero 3-vectors."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DomainError("ambient_angle of a zero vector")
    # atan2 form keeps full precision near 0 and pi, where arccos does not
    return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v))))


def rotate2(v, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])
