"""Convex polyhedra: ingestion, stars, intrinsic angles and affine stretching.

Faces are stored counterclockwise as seen from outside.  The star of a
vertex is the cyclic fan of its face corners, again counterclockwise from
outside; the left angle of a path ``[a, o, b]`` is the length of the arc of
that fan swept counterclockwise from the ray through ``b`` to the ray
through ``a``.

Surface points are either vertex indices (``int``) or :class:`FacePoint`
instances holding a face index and weights over that face's vertex list.
Weights are affine invariants, so a :class:`FacePoint` names the same
combinatorial location on every stretched copy of a polyhedron.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import ConvexityError, DomainError, FormatError
from .geom import DEFAULT_TOL, TolerancePolicy

Z_UP = np.array([0.0, 0.0, 1.0])
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FacePoint:
    """A point of face ``face`` given by weights over the face's vertex list."""

    face: int
    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if any(x < 0.0 for x in w) or not math.isclose(sum(w), 1.0, abs_tol=1e-12):
            raise DomainError(f"invalid face weights {w}")
        object.__setattr__(self, "weights", w)


SurfacePoint = Union[int, FacePoint]


def as_direction(u, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    u = np.asarray(u, float)
    n = np.linalg.norm(u)
    if not np.isfinite(n) or n == 0.0:
        raise DomainError(f"direction must be a nonzero finite vector, got {u}")
    return u / n


def height(p, u=Z_UP) -> float:
    """Height of a 3D point along direction ``u`` (the z coordinate by default)."""
    return float(np.dot(np.asarray(p, float), u))


@dataclass
class Star:
    """Cyclic fan of corners around a surface point, counterclockwise from outside.

    Corner ``i`` lies in ``faces[i]`` and spans from ``starts[i]`` (a unit
    vector) through ``angles[i]`` radians; ``rays[i]`` is the vertex on the
    ray where the corner starts, or ``None`` when that ray is not an edge.
    """

    center: SurfacePoint
    origin: np.ndarray
    faces: list
    rays: list
    starts: np.ndarray
    normals: np.ndarray
    angles: np.ndarray

    @cached_property
    def cum(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.angles)])

    @property
    def total(self) -> float:
        return float(self.cum[-1])

    def ray_index(self, v):
        try:
            return self.rays.index(v)
        except ValueError:
            return None


class Polyhedron:
    """Immutable convex polyhedron with outward-oriented faces."""

    def __init__(self, vertices, faces):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or not np.all(np.isfinite(v)):
            raise FormatError("vertices must be a finite (n, 3) array")
        v.setflags(write=False)
        self.vertices = v
        self.faces = [tuple(int(i) for i in f) for f in faces]
        self.face_sets = [frozenset(f) for f in self.faces]
        self._stars = {}
        self._build_incidence()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_points(cls, points, tol: TolerancePolicy = DEFAULT_TOL):
        """Hull of a point set in convex position; every point must be extreme."""
        pts = np.asarray(points, float)
        return cls(pts, _hull_faces(pts, tol))

    @classmethod
    def from_mesh(cls, vertices, faces, tol: TolerancePolicy = DEFAULT_TOL):
        """Validate a face list against the hull of its vertices.

        The resulting faces are the hull facets (coplanar triangles merged,
        orientation outward); every input face must lie inside one of them.
        """
        pts = np.asarray(vertices, float)
        n = len(pts)
        for f in faces:
            if len(set(f)) < 3 or any(i < 0 or i >= n for i in f):
                raise FormatError(f"degenerate face {list(f)}")
            q = pts[list(f)]
            area2 = np.linalg.norm(sum(np.cross(q[i], q[(i + 1) % len(q)]) for i in range(len(q))))
            if area2 <= tol.eps_len * max(1.0, float(np.ptp(pts, axis=0).max())) ** 2:
                raise FormatError(f"zero-area face {list(f)}")
        hull = _hull_faces(pts, tol)
        sets = [set(h) for h in hull]
        for f in faces:
            if not any(set(f) <= s for s in sets):
                raise ConvexityError(f"face {list(f)} is not part of a hull facet", vertex=f[0])
        return cls(pts, hull)

    def _build_incidence(self):
        dface = {}
        for fi, f in enumerate(self.faces):
            m = len(f)
            for j in range(m):
                key = (f[j], f[(j + 1) % m])
                if key in dface:
                    raise FormatError(f"directed edge {key} used twice; faces are not consistently oriented")
                dface[key] = fi
        edge_faces = {}
        for (a, b), fi in dface.items():
            if (b, a) not in dface:
                raise FormatError(f"edge {(a, b)} has only one incident face")
            edge_faces.setdefault((min(a, b), max(a, b)), []).append(fi)
        self._dface = dface
        self.edge_faces = edge_faces
        self.edges = sorted(edge_faces)
        nbrs = [set() for _ in range(len(self.vertices))]
        for a, b in self.edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        self.neighbors = [sorted(s) for s in nbrs]
        self.vertex_faces = [[] for _ in range(len(self.vertices))]
        for fi, f in enumerate(self.faces):
            for i in f:
                self.vertex_faces[i].append(fi)
        if any(not fs for fs in self.vertex_faces):
            raise FormatError("isolated vertex")

    # -- basic queries ----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    @cached_property
    def face_normals(self) -> np.ndarray:
        out = np.zeros((self.n_faces, 3))
        for fi, f in enumerate(self.faces):
            q = self.vertices[list(f)]
            n = np.cross(q - q.mean(axis=0), np.roll(q, -1, axis=0) - q.mean(axis=0)).sum(axis=0)
            out[fi] = n / np.linalg.norm(n)
        return out

    def face_left(self, a, b) -> int:
        """Face containing the directed edge a -> b (the face on its left)."""
        try:
            return self._dface[(a, b)]
        except KeyError:
            raise DomainError(f"{(a, b)} is not an edge") from None

    def is_edge(self, a, b) -> bool:
        return (a, b) in self._dface

    def heights(self, u=Z_UP) -> np.ndarray:
        return self.vertices @ np.asarray(u, float)

    def position(self, p: SurfacePoint) -> np.ndarray:
        if isinstance(p, FacePoint):
            return np.asarray(p.weights) @ self.vertices[list(self.faces[p.face])]
        return self.vertices[p]

    def support(self, p: SurfacePoint) -> frozenset:
        """Vertices carrying nonzero weight: the smallest cell containing p."""
        if isinstance(p, FacePoint):
            f = self.faces[p.face]
            return frozenset(f[i] for i, w in enumerate(p.weights) if w > 0.0)
        return frozenset((p,))

    def canonical(self, p: SurfacePoint) -> SurfacePoint:
        s = self.support(p)
        return next(iter(s)) if len(s) == 1 else p

    def faces_containing(self, p: SurfacePoint):
        s = self.support(p)
        return [fi for fi, fs in enumerate(self.face_sets) if s <= fs]

    def edge_point(self, a, b, t) -> FacePoint:
        """Point (1-t)*a + t*b on the edge ab."""
        fi = self.face_left(a, b)
        f = self.faces[fi]
        w = [0.0] * len(f)
        w[f.index(a)] = 1.0 - t
        w[f.index(b)] = t
        return FacePoint(fi, tuple(w))

    # -- stars and angles -------------------------------------------------

    def star(self, o: SurfacePoint) -> Star:
        o = self.canonical(o)
        key = o
        if key in self._stars:
            return self._stars[key]
        st = self._vertex_star(o) if isinstance(o, int) else self._point_star(o)
        self._stars[key] = st
        return st

    def _vertex_star(self, o) -> Star:
        V = self.vertices
        f0 = self.vertex_faces[o][0]
        faces, rays = [], []
        fi = f0
        while True:
            f = self.faces[fi]
            j = f.index(o)
            nxt, prv = f[(j + 1) % len(f)], f[j - 1]
            faces.append(fi)
            rays.append(nxt)
            fi = self._dface[(o, prv)]
            if fi == f0:
                break
            if len(faces) > len(self.vertex_faces[o]):
                raise FormatError(f"star of vertex {o} is not a single disk")
        starts = np.empty((len(faces), 3))
        angles = np.empty(len(faces))
        for i, fi in enumerate(faces):
            a = V[rays[i]] - V[o]
            b = V[rays[(i + 1) % len(rays)]] - V[o]
            starts[i] = a / np.linalg.norm(a)
            angles[i] = math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b)))
        return Star(o, V[o], faces, rays, starts, self.face_normals[faces], angles)

    def _point_star(self, p: FacePoint) -> Star:
        origin = self.position(p)
        s = self.support(p)
        f = self.faces[p.face]
        if len(s) == 2:
            a, b = (f[i] for i in range(len(f)) if f[i] in s)
            if not self.is_edge(a, b):
                s = None
        if s is not None and len(s) == 2:
            a, b = tuple(s)
            if self.face_left(b, a) == p.face:
                a, b = b, a
            # corner in face_left(a, b) runs from the ray toward b round to a
            faces = [self.face_left(a, b), self.face_left(b, a)]
            rays = [b, a]
            d = self.vertices[b] - self.vertices[a]
            d /= np.linalg.norm(d)
            starts = np.array([d, -d])
            angles = np.array([math.pi, math.pi])
        else:
            faces = [p.face]
            rays = [None]
            d = self.vertices[f[0]] - origin
            starts = np.array([d / np.linalg.norm(d)])
            angles = np.array([TWO_PI])
        return Star(p, origin, faces, rays, starts, self.face_normals[faces], angles)

    def ray_coordinate(self, st: Star, y: SurfacePoint):
        """Angular coordinate of the ray through y in the star, and its ray index."""
        y = self.canonical(y)
        if isinstance(st.center, int) and y == st.center:
            raise DomainError("point coincides with the star center")
        if isinstance(y, int):
            k = st.ray_index(y)
            if k is not None:
                return float(st.cum[k]), k
        sy = self.support(y)
        if not isinstance(st.center, int) and sy <= self.support(st.center) and len(sy) == 1:
            k = st.ray_index(next(iter(sy)))
            if k is not None:
                return float(st.cum[k]), k
        if isinstance(st.center, int) and len(sy) == 2 and st.center in sy:
            other = next(iter(sy - {st.center}))
            k = st.ray_index(other)
            if k is not None:
                return float(st.cum[k]), k
        for c, fi in enumerate(st.faces):
            if sy <= self.face_sets[fi]:
                break
        else:
            raise DomainError(f"point {y} is not in the star of {st.center}")
        d = self.position(y) - st.origin
        nd = np.linalg.norm(d)
        if nd == 0.0:
            raise DomainError("point coincides with the star center")
        s, n = st.starts[c], st.normals[c]
        ang = math.atan2(float(np.dot(n, np.cross(s, d))), float(np.dot(s, d)))
        span = st.angles[c]
        if span >= TWO_PI - 1e-12:
            ang %= TWO_PI
        elif span >= math.pi - 1e-12:
            if ang < -1e-12:
                ang += TWO_PI
            ang = min(max(ang, 0.0), span)
        else:
            ang = min(max(ang, 0.0), span)
        return float(st.cum[c] + ang), None

    def total_angle(self, o: SurfacePoint) -> float:
        return self.star(o).total

    def left_angle(self, a: SurfacePoint, o: SurfacePoint, b: SurfacePoint,
                   tol: TolerancePolicy = DEFAULT_TOL) -> float:
        """Left angle of the path [a, o, b]: arc from the ray of b ccw to the ray of a."""
        st = self.star(o)
        pa, ka = self.ray_coordinate(st, a)
        pb, kb = self.ray_coordinate(st, b)
        total = st.total
        if ka is not None and kb is not None:
            same = ka == kb
        else:
            gap = (pa - pb) % total
            same = min(gap, total - gap) <= tol.eps_ang
        if same:
            return total
        return float((pa - pb) % total)

    def right_angle(self, a, o, b, tol: TolerancePolicy = DEFAULT_TOL) -> float:
        return self.left_angle(b, o, a, tol)

    def strictly_left_of(self, c, a, o, b, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        """Does c lie strictly to the left of the path [a, o, b]?"""
        return self.left_angle(a, o, c, tol) < self.left_angle(a, o, b, tol) - tol.eps_ang

    def gauss_bonnet_residual(self) -> float:
        defect = sum(TWO_PI - self.total_angle(v) for v in range(self.n_vertices))
        return abs(defect - 2.0 * TWO_PI)


def total_angle(P: Polyhedron, o) -> float:
    return P.total_angle(o)


def left_angle(P: Polyhedron, a, o, b, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    return P.left_angle(a, o, b, tol)


def strictly_left_of(P: Polyhedron, c, path, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    a, o, b = path
    return P.strictly_left_of(c, a, o, b, tol)


# -- hull construction ------------------------------------------------------

def _hull_faces(pts, tol: TolerancePolicy):
    n = len(pts)
    if n < 4:
        raise ConvexityError("need at least four points")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise ConvexityError(f"degenerate point set: {exc}") from None
    on_hull = set(int(i) for i in hull.vertices)
    for i in range(n):
        if i not in on_hull:
            raise ConvexityError(f"vertex {i} is not extreme", vertex=i)
    eq = hull.equations
    parent = list(range(len(hull.simplices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, nb in enumerate(hull.neighbors):
        for t in nb:
            c = float(np.clip(np.dot(eq[s, :3], eq[t, :3]), -1.0, 1.0))
            ang = math.atan2(np.linalg.norm(np.cross(eq[s, :3], eq[t, :3])), c)
            if ang <= tol.eps_ang:
                parent[find(s)] = find(int(t))
    groups = {}
    for s in range(len(hull.simplices)):
        groups.setdefault(find(s), []).append(s)
    faces = []
    for members in groups.values():
        idx = sorted(set(int(i) for s in members for i in hull.simplices[s]))
        normal = eq[members, :3].mean(axis=0)
        normal /= np.linalg.norm(normal)
        q = pts[idx]
        c = q.mean(axis=0)
        e1 = q[0] - c
        e1 -= np.dot(e1, normal) * normal
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(normal, e1)
        ang = np.arctan2((q - c) @ e2, (q - c) @ e1)
        order = [idx[k] for k in np.argsort(ang)]
        faces.append(tuple(order))
    faces.sort(key=lambda f: min(f))
    # rotate each face to start at its smallest index for determinism
    faces = [f[f.index(min(f)):] + f[:f.index(min(f))] for f in faces]
    return faces


# -- file formats -----------------------------------------------------------

def _tokens(text):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def parse_off(text: str):
    lines = list(_tokens(text))
    if not lines or not lines[0].startswith("OFF"):
        raise FormatError("missing OFF header")
    head = lines[0][3:].split()
    rest = lines[1:]
    if not head:
        if not rest:
            raise FormatError("missing OFF counts line")
        head, rest = rest[0].split(), rest[1:]
    try:
        nv, nf = int(head[0]), int(head[1])
        verts = [[float(x) for x in rest[i].split()[:3]] for i in range(nv)]
        faces = []
        for line in rest[nv:nv + nf]:
            parts = line.split()
            k = int(parts[0])
            faces.append([int(x) for x in parts[1:1 + k]])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed OFF: {exc}") from None
    if any(len(v) != 3 for v in verts) or len(faces) != nf:
        raise FormatError("malformed OFF: truncated data")
    return verts, faces


def parse_obj(text: str):
    verts, faces = [], []
    try:
        for line in _tokens(text):
            parts = line.split()
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    i = int(tok.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                faces.append(idx)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed OBJ: {exc}") from None
    return verts, faces


def load_polyhedron(source, fmt: str = "off", tol: TolerancePolicy = DEFAULT_TOL) -> Polyhedron:
    """Read an OFF or OBJ mesh from bytes, text, a path or a binary/text stream."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        data = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        data = source.encode()
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    else:
        raise FormatError(f"cannot read mesh from {type(source).__name__}")
    text = data.decode("utf-8", errors="replace")
    fmt = fmt.lower()
    if fmt == "off":
        verts, faces = parse_off(text)
    elif fmt == "obj":
        verts, faces = parse_obj(text)
    else:
        raise FormatError(f"unknown mesh format {fmt!r}")
    if len(verts) < 4:
        raise FormatError("a polyhedron needs at least four vertices")
    if not faces:
        return Polyhedron.from_points(verts, tol)
    return Polyhedron.from_mesh(verts, faces, tol)


def to_off(P: Polyhedron) -> str:
    lines = ["OFF", f"{P.n_vertices} {P.n_faces} {P.n_edges}"]
    lines += [" ".join(repr(float(x)) for x in v) for v in P.vertices]
    lines += [" ".join(map(str, [len(f), *f])) for f in P.faces]
    return "\n".join(lines) + "\n"


# -- general position and stretching ------------------------------------------

@dataclass(frozen=True)
class GeneralPositionReport:
    is_general: bool
    top_vertex: int
    bottom_vertex: int
    min_height_gap: float
    reason: str = ""

    def to_dict(self):
        return {"is_general": self.is_general, "top_vertex": self.top_vertex,
                "bottom_vertex": self.bottom_vertex, "min_height_gap": self.min_height_gap,
                "reason": self.reason}


def check_general_position(P: Polyhedron, u=Z_UP, tol: TolerancePolicy = DEFAULT_TOL) -> GeneralPositionReport:
    u = as_direction(u)
    h = P.heights(u)
    scale = max(P.diameter, 1e-300)
    thresh = tol.eps_len * scale
    order = np.argsort(-h, kind="stable")
    top, bottom = int(order[0]), int(order[-1])
    gaps = [abs(h[a] - h[b]) for a, b in P.edges]
    gap = float(min(gaps))
    reason = ""
    if h[order[0]] - h[order[1]] <= thresh:
        reason = "top vertex is not unique"
    elif h[order[-2]] - h[order[-1]] <= thresh:
        reason = "bottom vertex is not unique"
    elif gap <= thresh:
        reason = "horizontal edge"
    return GeneralPositionReport(not reason, top, bottom, gap, reason)


def affine_stretch(P: Polyhedron, u, lam) -> Polyhedron:
    """Image of P under p -> (p + (lam-1) <p,u> u) / lam; combinatorics unchanged."""
    lam = float(lam)
    if not lam >= 1.0:
        raise DomainError(f"stretch factor must be >= 1, got {lam}")
    u = as_direction(u)
    V = P.vertices
    h = V @ u
    perp = V - np.outer(h, u)
    W = np.outer(h, u) + perp / lam
    if np.array_equal(u, Z_UP):
        # exact: heights untouched, horizontal coordinates scaled
        W = np.column_stack([V[:, 0] / lam, V[:, 1] / lam, V[:, 2]])
    return Polyhedron(W, P.faces)
