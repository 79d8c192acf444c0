"""Planar developments of surface paths and the face layout of the cut surface."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .cut_tree import CutTree, require_spanning
from .errors import DomainError
from .geom import DEFAULT_TOL
from .polyhedron import Polyhedron
from .tracing import SurfacePath, TracingPath, compose_index, compose, trace_boundary


@dataclass(frozen=True)
class InitialCondition:
    start: tuple = (0.0, 0.0)
    direction: tuple = (0.0, -1.0)

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        n = np.linalg.norm(d)
        if n == 0 or not np.isfinite(n):
            raise DomainError("initial direction must be nonzero")
        object.__setattr__(self, "direction", tuple(d / n))
        object.__setattr__(self, "start", tuple(float(x) for x in self.start))


DEFAULT_INIT = InitialCondition()


@dataclass
class PlanarPath:
    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, float).reshape(-1, 2)

    def __len__(self):
        return len(self.vertices)

    def inverse(self) -> "PlanarPath":
        return PlanarPath(self.vertices[::-1].copy(), self.closed)

    @property
    def diameter(self) -> float:
        v = self.vertices
        if len(v) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(v[:, None] - v[None], axis=-1)))

    @property
    def perimeter(self) -> float:
        return float(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1).sum())

    def to_list(self):
        return self.vertices.tolist()


def _trace(start, heading0, lengths, turns):
    """Positions from edge lengths and cumulative turning (heading kept as an angle)."""
    headings = heading0 + np.concatenate([[0.0], np.cumsum(turns)])
    steps = np.column_stack([np.cos(headings), np.sin(headings)]) * np.asarray(lengths)[:, None]
    return np.vstack([np.asarray(start)[None], np.asarray(start)[None] + np.cumsum(steps, axis=0)])


def develop_mixed(P: Polyhedron, path: SurfacePath, base: int, init=DEFAULT_INIT,
                  tol=DEFAULT_TOL) -> PlanarPath:
    """Development using right angles at interior indices <= base, left angles after."""
    k = len(path) - 1
    if not 0 <= base <= max(k - 1, 0):
        raise DomainError(f"base index {base} out of range for a path with {k} edges")
    if k == 0:
        return PlanarPath(np.array([init.start]), False)
    lengths = path.lengths(P)
    turns = np.empty(k - 1)
    for i in range(1, k):
        a, o, b = path[i - 1], path[i], path[i + 1]
        if i <= base:
            turns[i - 1] = P.left_angle(b, o, a, tol) - math.pi
        else:
            turns[i - 1] = math.pi - P.left_angle(a, o, b, tol)
    h0 = math.atan2(init.direction[1], init.direction[0])
    return PlanarPath(_trace(init.start, h0, lengths, turns), path.is_closed())


def develop(P: Polyhedron, path: SurfacePath, init=DEFAULT_INIT, tol=DEFAULT_TOL) -> PlanarPath:
    """Left development: lengths preserved, left angles reproduced."""
    return develop_mixed(P, path, 0, init, tol)


def develop_boundary(P: Polyhedron, TP: TracingPath, init=DEFAULT_INIT) -> PlanarPath:
    """Closed development of the boundary walk, using its wedge angles."""
    theta = TP.theta(P)
    path = TP.closed_path()
    lengths = path.lengths(P)
    turns = math.pi - theta[1:]
    h0 = math.atan2(init.direction[1], init.direction[0])
    return PlanarPath(_trace(init.start, h0, lengths, turns), True)


def turning_sum(P: Polyhedron, TP: TracingPath) -> float:
    return float(np.sum(math.pi - TP.theta(P)))


# -- congruence ---------------------------------------------------------------

def align_first_edge(ref: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rigidly move x so that its first non-degenerate edge lies along that of ref."""
    ref = np.asarray(ref, float)
    x = np.asarray(x, float)
    if len(x) == 0:
        return x
    shifted = x - x[0] + ref[0]
    for j in range(1, min(len(ref), len(x))):
        dr, dx = ref[j] - ref[0], x[j] - x[0]
        if np.linalg.norm(dr) > 0 and np.linalg.norm(dx) > 0:
            ang = math.atan2(dr[1], dr[0]) - math.atan2(dx[1], dx[0])
            c, s = math.cos(ang), math.sin(ang)
            R = np.array([[c, -s], [s, c]])
            return (x - x[0]) @ R.T + ref[0]
    return shifted


def congruence_deviation(a, b) -> float:
    """Max vertex distance after aligning b to a by first-edge rigid motion (no reflection)."""
    a = np.asarray(getattr(a, "vertices", a), float)
    b = np.asarray(getattr(b, "vertices", b), float)
    if len(a) != len(b):
        return math.inf
    if len(a) < 2:
        return 0.0
    return float(np.max(np.linalg.norm(align_first_edge(a, b) - a, axis=1)))


def planar_compose(G: PlanarPath, W: PlanarPath, m: int) -> PlanarPath:
    """(G)^-1 composed with W, excising the shared prefix of length m."""
    k = len(G) - 1
    head = G.vertices[::-1][:k - m + 1]
    return PlanarPath(np.vstack([head, W.vertices[m + 1:]]))


@dataclass
class CongruenceReport:
    congruent: bool
    max_deviation: float
    m: int
    direct: PlanarPath
    mixed: PlanarPath


def check_mixed_composition(P: Polyhedron, G: SurfacePath, W: SurfacePath, m=None,
                            init=DEFAULT_INIT, tol=DEFAULT_TOL, rel_tol=1e-7) -> CongruenceReport:
    """Compare the planar composition of two developments with the mixed development."""
    if G.start != W.start:
        raise DomainError("paths must share their initial point")
    Gi = G.inverse()
    m_max = compose_index(Gi, W)
    if m is None:
        m = m_max
    if m > m_max or any(G[i] != W[i] for i in range(m + 1)):
        raise DomainError(f"paths do not share a prefix of length {m}")
    k = len(G) - 1
    if m < k:
        if m < 1 or m + 1 >= len(W):
            raise DomainError("shared prefix must contain an edge and leave room on both paths")
        if not P.strictly_left_of(W[m + 1], G[m - 1], G[m], G[m + 1], tol):
            raise DomainError("the branching point of the second path is not strictly left of the first")
    Gbar = develop(P, G, init, tol)
    Wbar = develop(P, W, init, tol)
    direct = planar_compose(Gbar, Wbar, m)
    comp = compose(Gi, W)
    mixed = develop_mixed(P, comp, min(k - m, max(len(comp) - 2, 0)), init, tol)
    dev = congruence_deviation(direct, mixed)
    scale = max(direct.diameter, P.diameter, 1e-300)
    return CongruenceReport(dev <= rel_tol * scale, dev, m, direct, mixed)


# -- face layout --------------------------------------------------------------

@dataclass
class UnfoldingLayout:
    """Planar images of all faces (indexed like P.faces) and of the boundary walk."""

    polygons: list
    boundary: PlanarPath
    uncut_pairs: set
    faces: list

    def to_dict(self):
        return {"faces": [p.tolist() for p in self.polygons],
                "boundary": self.boundary.to_list()}


def _face_frame_coords(P, fi, a, b):
    """2D coordinates of face fi with a at the origin and b on the positive x-axis."""
    V = P.vertices
    n = P.face_normals[fi]
    e1 = V[b] - V[a]
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    q = V[list(P.faces[fi])] - V[a]
    return np.column_stack([q @ e1, q @ e2])


def _place(local, a_idx, A2, B2):
    """Rotate and translate local coords so vertex a_idx lands on A2 facing B2."""
    d = np.asarray(B2) - np.asarray(A2)
    ang = math.atan2(d[1], d[0])
    c, s = math.cos(ang), math.sin(ang)
    R = np.array([[c, -s], [s, c]])
    return (local - local[a_idx]) @ R.T + np.asarray(A2)


def layout_faces(P: Polyhedron, T: CutTree, TP: TracingPath = None, u=None) -> UnfoldingLayout:
    """Breadth-first placement of faces across uncut edges."""
    require_spanning(P, T)
    if TP is None:
        TP = trace_boundary(P, T) if u is None else trace_boundary(P, T, u)
    cut = {frozenset(e) for e in T.edges}
    v0 = TP.vertices[0]
    st0 = P.star(v0)
    iw0 = TP.wedges[0][0]
    root = st0.faces[iw0]
    w0 = st0.rays[iw0]
    loc = _face_frame_coords(P, root, v0, w0)
    f = P.faces[root]
    L0 = np.linalg.norm(P.vertices[w0] - P.vertices[v0])
    placed = {root: _place(loc, f.index(v0), (0.0, 0.0), (0.0, -L0))}
    uncut_pairs = set()
    queue = deque([root])
    while queue:
        fi = queue.popleft()
        f = P.faces[fi]
        for j in range(len(f)):
            a, b = f[j], f[(j + 1) % len(f)]
            if frozenset((a, b)) in cut:
                continue
            g = P.face_left(b, a)
            uncut_pairs.add(frozenset((fi, g)))
            if g in placed:
                continue
            A2, B2 = placed[fi][j], placed[fi][(j + 1) % len(f)]
            gl = P.faces[g]
            local = _face_frame_coords(P, g, a, b)
            poly = _place(local, gl.index(a), A2, B2)
            poly[gl.index(a)] = A2
            poly[gl.index(b)] = B2
            placed[g] = poly
            queue.append(g)
    if len(placed) != P.n_faces:
        raise DomainError("uncut face graph is disconnected")
    polygons = [placed[i] for i in range(P.n_faces)]
    pts = []
    for p, v in enumerate(TP.vertices):
        st = P.star(v)
        fi = st.faces[TP.wedges[p][0]]
        pts.append(placed[fi][P.faces[fi].index(v)])
    pts.append(pts[0])
    return UnfoldingLayout(polygons, PlanarPath(np.array(pts), True), uncut_pairs, list(P.faces))
