"""Simplicity of planar polylines, weak monotonicity, and a face-overlap oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cut_tree import CutTree
from .development import PlanarPath, UnfoldingLayout, develop_boundary
from .errors import DomainError
from .geom import DEFAULT_TOL, Crossing, orient2d_many, segment_intersection
from .polyhedron import Polyhedron
from .tracing import TracingPath, trace_boundary


@dataclass
class SimplicityReport:
    simple: bool
    first_violation: tuple = None  # (edge i, edge j, (x, y), kind)

    def to_dict(self):
        fv = None
        if self.first_violation is not None:
            i, j, pt, kind = self.first_violation
            fv = {"edges": [int(i), int(j)], "point": [float(pt[0]), float(pt[1])] if pt is not None else None,
                  "kind": str(kind.value if hasattr(kind, "value") else kind)}
        return {"simple": self.simple, "first_violation": fv}


def _segments(path: PlanarPath):
    v = np.array(path.vertices, float)
    if path.closed and len(v) > 1:
        v[-1] = v[0]
    return v[:-1], v[1:]


def _candidate_pairs(A, B, tol):
    """Index pairs (i < j) whose segments are not certified disjoint by a cheap filter."""
    m = len(A)
    lens = np.linalg.norm(B - A, axis=1)
    lo = np.minimum(A, B)
    hi = np.maximum(A, B)
    near = tol.eps_len * np.minimum(lens[:, None], lens[None, :])
    i, j = np.triu_indices(m, 1)
    nij = near[i, j]
    box = np.all((lo[i] <= hi[j] + nij[:, None]) & (lo[j] <= hi[i] + nij[:, None]), axis=1)
    i, j, nij = i[box], j[box], nij[box]
    if len(i) == 0:
        return i, j
    o1 = orient2d_many(A[i], B[i], A[j])
    o2 = orient2d_many(A[i], B[i], B[j])
    o3 = orient2d_many(A[j], B[j], A[i])
    o4 = orient2d_many(A[j], B[j], B[i])
    apart = ((o1 * o2) > 0) | ((o3 * o4) > 0)
    ends = np.stack([A[i] - A[j], A[i] - B[j], B[i] - A[j], B[i] - B[j]])
    close = np.any(np.linalg.norm(ends, axis=-1) <= nij[None, :], axis=0)
    keep = ~apart | close
    return i[keep], j[keep]


def is_simple(path: PlanarPath, tol=DEFAULT_TOL) -> SimplicityReport:
    """Only consecutive edges may meet, and only at their common vertex."""
    A, B = _segments(path)
    m = len(A)
    if m == 0:
        raise DomainError("path has no edges")
    for e in range(m):
        if np.array_equal(A[e], B[e]):
            return SimplicityReport(False, (e, e, tuple(A[e]), Crossing.OVERLAP))
    closed = path.closed and m > 2
    ci, cj = _candidate_pairs(A, B, tol)
    for i, j in sorted(zip(ci.tolist(), cj.tolist())):
        kind, pt = segment_intersection((A[i], B[i]), (A[j], B[j]), tol)
        consecutive = j == i + 1 or (closed and i == 0 and j == m - 1)
        if consecutive:
            if kind in (Crossing.OVERLAP, Crossing.CROSS):
                return SimplicityReport(False, (i, j, pt, kind))
            continue
        if kind != Crossing.DISJOINT:
            return SimplicityReport(False, (i, j, pt, kind))
    return SimplicityReport(True)


def is_weakly_monotone(path: PlanarPath, tol=DEFAULT_TOL) -> bool:
    """Simple, and vertical rays up from the top end and down from the bottom end miss the rest."""
    v = np.asarray(path.vertices, float)
    if len(v) < 2:
        raise DomainError("need at least one edge")
    if v[0][1] == v[-1][1]:
        raise DomainError("endpoint heights must differ")
    if not is_simple(PlanarPath(v, False), tol).simple:
        return False
    top, bot = (len(v) - 1, 0) if v[-1][1] > v[0][1] else (0, len(v) - 1)
    span = float(np.ptp(v[:, 1]))
    reach = 10.0 * span
    rays = [(top, (v[top], v[top] + np.array([0.0, reach]))),
            (bot, (v[bot], v[bot] - np.array([0.0, reach])))]
    m = len(v) - 1
    for base, seg in rays:
        incident = {0} if base == 0 else {m - 1}
        if m == 1:
            incident = {0}
        for e in range(m):
            kind, pt = segment_intersection(seg, (v[e], v[e + 1]), tol)
            if kind == Crossing.DISJOINT:
                continue
            if e in incident and kind == Crossing.TOUCH and pt is not None:
                if np.linalg.norm(np.asarray(pt) - v[base]) <= tol.eps_len * max(span, 1e-300) * 10:
                    continue
            return False
    return True


def two_arc_embedded(boundary: PlanarPath, p0: int, p1: int, tol=DEFAULT_TOL) -> bool:
    """Both boundary arcs between p0 and p1 weakly monotone (boundary assumed to bound an immersed disk)."""
    v = np.asarray(boundary.vertices, float)
    n = len(v) - 1 if boundary.closed else len(v)
    ring = v[:n]
    p0 %= n
    p1 %= n
    if p0 == p1:
        raise DomainError("split indices must differ")
    arc1 = [ring[(p0 + s) % n] for s in range((p1 - p0) % n + 1)]
    arc2 = [ring[(p1 + s) % n] for s in range((p0 - p1) % n + 1)]
    return (is_weakly_monotone(PlanarPath(np.array(arc1)), tol)
            and is_weakly_monotone(PlanarPath(np.array(arc2)), tol))


def unfolding_is_simple(P: Polyhedron, T: CutTree, TP: TracingPath = None, u=None,
                        tol=DEFAULT_TOL) -> SimplicityReport:
    """Simplicity of the unfolding, decided on the developed boundary walk."""
    if TP is None:
        TP = trace_boundary(P, T) if u is None else trace_boundary(P, T, u)
    return is_simple(develop_boundary(P, TP), tol)


def _sat_overlap(p, q, depth):
    """Do convex polygons p and q overlap with penetration depth above ``depth``?"""
    for poly in (p, q):
        e = np.roll(poly, -1, axis=0) - poly
        normals = np.column_stack([-e[:, 1], e[:, 0]])
        nn = np.linalg.norm(normals, axis=1)
        normals = normals[nn > 0] / nn[nn > 0, None]
        pp = p @ normals.T
        qq = q @ normals.T
        overlap = np.minimum(pp.max(0), qq.max(0)) - np.maximum(pp.min(0), qq.min(0))
        if np.any(overlap <= depth):
            return False
    return True


def oracle_layout_overlap(layout: UnfoldingLayout, tol=DEFAULT_TOL, depth_factor=None) -> bool:
    """Brute-force pairwise test: do any two placed faces share positive area?"""
    polys = [np.asarray(p, float) for p in layout.polygons]
    allpts = np.vstack(polys)
    diam = float(np.linalg.norm(allpts.max(0) - allpts.min(0)))
    depth = (tol.eps_len if depth_factor is None else depth_factor) * diam
    lo = np.array([p.min(0) for p in polys])
    hi = np.array([p.max(0) for p in polys])
    i, j = np.triu_indices(len(polys), 1)
    box = np.all((lo[i] < hi[j] - depth) & (lo[j] < hi[i] - depth), axis=1)
    for a, b in zip(i[box].tolist(), j[box].tolist()):
        if _sat_overlap(polys[a], polys[b], depth):
            return True
    return False
