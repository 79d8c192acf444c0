"""Boundary walk of the cut surface, surface path algebra, branches and dual branches.

Cutting P along a spanning edge tree T yields a disk whose boundary walk
visits every tree edge twice.  Each visit to a vertex (a *position* of the
walk) owns a wedge of the vertex star: the contiguous run of face corners
lying to the left of the walk there.

Positions of the walk are the vertices of the cut surface, so the
combinatorial objects here (walk, branches, dual branches) are expressed
with vertex indices, walk positions and :class:`FacePoint` values, all of
which survive affine stretching unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cut_tree import CutTree, require_spanning
from .errors import DomainError, InternalError, TreeError
from .geom import DEFAULT_TOL
from .polyhedron import Z_UP, FacePoint, Polyhedron, as_direction


# -- surface paths ------------------------------------------------------------

@dataclass(frozen=True)
class SurfacePath:
    """Polygonal path on P: vertex indices and face points, consecutive ones distinct."""

    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise DomainError("empty path")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise DomainError(f"repeated consecutive point {a}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    @property
    def n_edges(self):
        return len(self.points) - 1

    def inverse(self) -> "SurfacePath":
        return SurfacePath(self.points[::-1])

    def positions(self, P: Polyhedron) -> np.ndarray:
        return np.array([P.position(p) for p in self.points])

    def lengths(self, P: Polyhedron) -> np.ndarray:
        x = self.positions(P)
        return np.linalg.norm(np.diff(x, axis=0), axis=1)

    def heights(self, P: Polyhedron, u=Z_UP) -> np.ndarray:
        return self.positions(P) @ np.asarray(u, float)

    def left_angles(self, P: Polyhedron, tol=DEFAULT_TOL) -> np.ndarray:
        """Left angle at each interior point (index 1..k-1)."""
        g = self.points
        return np.array([P.left_angle(g[i - 1], g[i], g[i + 1], tol) for i in range(1, len(g) - 1)])

    def right_angles(self, P: Polyhedron, tol=DEFAULT_TOL) -> np.ndarray:
        """Right angle at each interior point: the left angle of the reversed corner."""
        g = self.points
        return np.array([P.left_angle(g[i + 1], g[i], g[i - 1], tol) for i in range(1, len(g) - 1)])

    def angles(self, P: Polyhedron, tol=DEFAULT_TOL):
        return self.left_angles(P, tol), self.right_angles(P, tol)

    def is_closed(self):
        return len(self.points) > 1 and self.points[0] == self.points[-1]


def concat(G: SurfacePath, W: SurfacePath) -> SurfacePath:
    if G.end != W.start:
        raise DomainError(f"cannot concatenate: {G.end} != {W.start}")
    return SurfacePath(G.points + W.points[1:])


def compose_index(G: SurfacePath, W: SurfacePath) -> int:
    """Largest m with G[k-i] == W[i] for 0 <= i <= m."""
    if G.end != W.start:
        raise DomainError(f"cannot compose: {G.end} != {W.start}")
    k = len(G) - 1
    m = 0
    while m + 1 <= min(k, len(W) - 1) and G[k - m - 1] == W[m + 1]:
        m += 1
    return m


def compose(G: SurfacePath, W: SurfacePath) -> SurfacePath:
    """Concatenation with the doubled-back part around the junction excised."""
    m = compose_index(G, W)
    k = len(G) - 1
    return SurfacePath(G.points[:k - m + 1] + W.points[m + 1:])


def double(G: SurfacePath) -> SurfacePath:
    return concat(G, G.inverse())


# -- boundary walk ------------------------------------------------------------

class TracingPath:
    """Cyclic boundary walk of the surface cut along T.

    ``vertices[p]`` is the P-vertex at position p and ``wedges[p] = (iw, iu)``
    the star-ray indices of the outgoing and incoming edges; the wedge is
    the run of corners iw, iw+1, ..., iu-1 (the whole star when iw == iu).
    """

    def __init__(self, tree: CutTree, vertices, wedges, u):
        self.tree = tree
        self.vertices = tuple(vertices)
        self.wedges = tuple(wedges)
        self.u = u
        self._dual = {}
        deg = [len(a) for a in tree.adjacency()]
        n = len(self.vertices)
        self.leaves = tuple(p for p in range(n)
                            if deg[self.vertices[p]] == 1 and self.vertices[p] != tree.root)
        self._heights = None

    @property
    def n(self):
        return len(self.vertices)

    def junctures_for(self, h):
        """Lowest position strictly between consecutive leaves (cyclically)."""
        n, L = self.n, self.leaves
        out = []
        for i, a in enumerate(L):
            b = L[(i + 1) % len(L)]
            span = (b - a) % n or n
            cands = [(a + s) % n for s in range(1, span)]
            if not cands:
                raise InternalError("adjacent leaves with nothing between them")
            out.append(min(cands, key=lambda p: (h[self.vertices[p]], p)))
        return tuple(out)

    def junctures(self, P: Polyhedron):
        return self.junctures_for(P.heights(self.u))

    @property
    def k(self):
        return len(self.leaves)

    def theta(self, P: Polyhedron) -> np.ndarray:
        """Interior angle of the cut surface at each position (sum of its wedge)."""
        out = np.empty(self.n)
        for p, v in enumerate(self.vertices):
            st = P.star(v)
            iw, iu = self.wedges[p]
            if iw == iu:
                out[p] = st.total
            else:
                out[p] = (st.cum[iu] - st.cum[iw]) % st.total
        return out

    def wedge_corners(self, P: Polyhedron, p):
        st = P.star(self.vertices[p])
        m = len(st.rays)
        iw, iu = self.wedges[p]
        span = (iu - iw) % m or m
        return [(iw + j) % m for j in range(span)]

    def closed_path(self) -> SurfacePath:
        return SurfacePath(self.vertices + (self.vertices[0],))

    def occurrence(self, P: Polyhedron, w, v):
        """Position of w whose wedge contains the (non-tree) ray w -> v in its interior."""
        st = P.star(w)
        m = len(st.rays)
        r = st.ray_index(v)
        if r is None:
            raise DomainError(f"{v} is not adjacent to {w}")
        for p, x in enumerate(self.vertices):
            if x != w:
                continue
            iw, iu = self.wedges[p]
            span = (iu - iw) % m or m
            if 0 < (r - iw) % m < span:
                return p
        raise DomainError(f"ray {w}->{v} is a tree edge")

    def prefix(self, p) -> SurfacePath:
        return SurfacePath(self.vertices[:p + 1])

    def to_dict(self, P: Polyhedron):
        return {"vertices": list(self.vertices), "theta": self.theta(P).tolist(),
                "leaves": list(self.leaves), "junctures": list(self.junctures(P))}


def trace_boundary(P: Polyhedron, T: CutTree, u=Z_UP, tol=DEFAULT_TOL) -> TracingPath:
    """Walk the boundary of P cut along T, keeping the cut surface on the left.

    The walk starts at the highest vertex, leaving along its tree edge toward
    the root side; after arriving at a vertex it leaves along the next tree
    edge clockwise from the arrival edge.
    """
    require_spanning(P, T)
    u = as_direction(u)
    n = P.n_vertices
    if n < 2:
        raise TreeError("tree needs at least two vertices")
    h = P.heights(u)
    v0 = int(min(range(n), key=lambda v: (-h[v], v)))
    adj = [set(a) for a in T.adjacency()]
    w0 = T.parent[v0] if T.parent[v0] is not None else min(adj[v0])
    edges = [(v0, w0)]
    arrivals = []
    for _ in range(2 * n):
        a, b = edges[-1]
        st = P.star(b)
        m = len(st.rays)
        ia = st.ray_index(a)
        j = ia
        for step in range(1, m + 1):
            j = (ia - step) % m
            if st.rays[j] in adj[b]:
                break
        arrivals.append((j, ia))
        nxt = (b, st.rays[j])
        if nxt == edges[0]:
            break
        edges.append(nxt)
    else:
        raise InternalError("boundary walk did not close")
    if len(edges) != 2 * (n - 1):
        raise InternalError(f"boundary walk has {len(edges)} edges, expected {2 * (n - 1)}")
    N = len(edges)
    vertices = [e[0] for e in edges]
    wedges = [arrivals[(p - 1) % N] for p in range(N)]
    return TracingPath(T, vertices, wedges, u)


# -- branches ---------------------------------------------------------------

def branch(T: CutTree, TP: TracingPath, i) -> SurfacePath:
    """Tree path from the i-th leaf down to the root."""
    if not 0 <= i < TP.k:
        raise DomainError(f"leaf index {i} out of range")
    return SurfacePath(T.path_to_root(TP.vertices[TP.leaves[i]]))


def gamma_i(T: CutTree, TP: TracingPath, i) -> SurfacePath:
    """Walk prefix from the top leaf to leaf i, then down the branch of leaf i."""
    return concat(TP.prefix(TP.leaves[i]), branch(T, TP, i))


# -- dual branches ----------------------------------------------------------

@dataclass
class DualBranch:
    """Increasing path from leaf i to the top leaf, meeting T only at its ends.

    ``anchors`` are the (vertex, walk position) pairs of the combinatorial
    climb; ``path`` is the realized surface path.
    """

    leaf: int
    anchors: list
    steps: list
    path: SurfacePath
    t: float
    trace: list = field(default_factory=list)


def _steepest_upper(P, v, h):
    best, best_slope = None, 0.0
    for w in P.neighbors[v]:
        if h[w] > h[v]:
            slope = (h[w] - h[v]) / np.linalg.norm(P.vertices[w] - P.vertices[v])
            if best is None or slope > best_slope:
                best, best_slope = w, slope
    return best


def _climb(P, TP: TracingPath, i, h):
    """Combinatorial climb from leaf i to the top leaf through walk positions."""
    n = TP.n
    leafset = set(TP.leaves)
    pos = TP.leaves[i]
    anchors = [(TP.vertices[pos], pos)]
    steps = []
    guard = 0
    while pos != TP.leaves[0]:
        guard += 1
        if guard > 4 * n:
            raise InternalError("climb did not terminate", trace=anchors)
        v = TP.vertices[pos]
        if pos in leafset:
            w = _steepest_upper(P, v, h)
            if w is None:
                raise InternalError(f"leaf {v} has no higher neighbour", trace=anchors)
            q = TP.occurrence(P, w, v)
            steps.append(("free", pos, q))
            anchors.append((w, q))
            pos = q
            continue
        cands = []
        for d in (1, -1):
            q = pos
            run = []
            while True:
                nq = (q + d) % n
                if h[TP.vertices[nq]] <= h[TP.vertices[q]]:
                    break
                run.append(nq)
                q = nq
                if q in leafset:
                    break
            if run and run[-1] in leafset:
                cands.append((len(run), run[-1], d, run))
        if not cands:
            raise InternalError(f"no ascending walk from position {pos}", trace=anchors)
        _, _, d, run = min(cands, key=lambda c: (c[0], c[1]))
        for q in run:
            steps.append(("walk", pos, q))
            anchors.append((TP.vertices[q], q))
            pos = q
    return anchors, steps


def _edge_face_point(P, a, b, t):
    """Point just inside the face left of the directed edge a -> b, near its midpoint."""
    fi = P.face_left(a, b)
    f = P.faces[fi]
    w = np.full(len(f), t / len(f))
    w[f.index(a)] += (1 - t) / 2
    w[f.index(b)] += (1 - t) / 2
    return FacePoint(fi, tuple(w))


def _toward(P, v, X, t):
    """The point v + t (X - v), as a face point."""
    if isinstance(X, FacePoint):
        f = P.faces[X.face]
        w = t * np.asarray(X.weights)
        w[f.index(v)] += 1 - t
        return FacePoint(X.face, tuple(w))
    return P.edge_point(v, X, t)


def _corner_frame(st, c):
    s = st.starts[c]
    e2 = np.cross(st.normals[c], s)
    return s, e2


def _horizontal_point(P, v, st, c, alpha, u, rho=0.25):
    """Point at fraction rho along the ray of angle alpha in corner c, toward the face boundary."""
    fi = st.faces[c]
    f = P.faces[fi]
    L = len(f)
    j = f.index(v)
    s, e2 = _corner_frame(st, c)
    d2 = np.array([math.cos(alpha), math.sin(alpha)])
    o = P.vertices[v]

    def loc(x):
        r = P.vertices[x] - o
        return np.array([r @ s, r @ e2])

    for kk in range(1, L - 1):
        A, B = f[(j + kk) % L], f[(j + kk + 1) % L]
        a2, b2 = loc(A), loc(B)
        ang_a = math.atan2(a2[1], a2[0])
        ang_b = math.atan2(b2[1], b2[0])
        if ang_a - 1e-12 <= alpha <= ang_b + 1e-12:
            M = np.column_stack([d2, a2 - b2])
            Ldist, mu = np.linalg.solve(M, a2)
            mu = min(max(mu, 0.0), 1.0)
            w = np.zeros(L)
            w[j] = 1 - rho
            w[(j + kk) % L] += rho * (1 - mu)
            w[(j + kk + 1) % L] += rho * mu
            return FacePoint(fi, tuple(w))
    raise InternalError(f"horizontal ray at vertex {v} not found in face {fi}")


class _Conflict(Exception):
    pass


def _detour(P, TP, v, pos, X_prev, X_next, t, h, u):
    """Replace the corner at anchor v by a monotone route through the interior."""
    st = P.star(v)
    m = len(st.rays)
    iw, iu = TP.wedges[pos]
    span = (iu - iw) % m or m
    corners = [(iw + j) % m for j in range(span)]
    offs = np.concatenate([[0.0], np.cumsum([st.angles[c] for c in corners])])
    b = _toward(P, v, X_prev, t)
    a = _toward(P, v, X_next, t)
    hv = h[v]
    hb = float(P.position(b) @ u)
    ha = float(P.position(a) @ u)
    if not hb < hv < ha:
        raise _Conflict("detour endpoints not on both sides of the anchor height")

    def psi(y):
        return (P.ray_coordinate(st, y)[0] - st.cum[iw]) % st.total

    pb, pa = psi(b), psi(a)
    if not (0 < pb < offs[-1] and 0 < pa < offs[-1]):
        raise InternalError(f"detour rays at vertex {v} leave the wedge")
    lo, hi = min(pb, pa), max(pb, pa)

    cross = None
    for j, c in enumerate(corners):
        s0, s1 = offs[j], offs[j + 1]
        x0, x1 = max(lo, s0), min(hi, s1)
        if x0 > x1:
            continue
        s, e2 = _corner_frame(st, c)
        A, B = float(s @ u), float(e2 @ u)
        g0 = A * math.cos(x0 - s0) + B * math.sin(x0 - s0)
        g1 = A * math.cos(x1 - s0) + B * math.sin(x1 - s0)
        if g0 == 0.0 or g1 == 0.0 or (g0 < 0) != (g1 < 0):
            for cand in (math.atan2(-A, B), math.atan2(A, -B)):
                cand %= 2 * math.pi
                if x0 - s0 - 1e-12 <= cand <= x1 - s0 + 1e-12:
                    cross = (j, c, cand)
                    break
            if cross:
                break
    if cross is None:
        raise InternalError(f"no horizontal direction between detour rays at vertex {v}")
    j, c, alpha = cross
    pp = offs[j] + alpha
    if not lo < pp < hi:
        raise _Conflict("horizontal ray coincides with a detour ray")
    p = _horizontal_point(P, v, st, c, alpha, u)

    def rays_between(x, y):
        idx = [jj for jj in range(1, span) if min(x, y) < offs[jj] < max(x, y)]
        return idx if x < y else idx[::-1]

    out = [b]
    below = rays_between(pb, pp)
    for q, jj in enumerate(below, 1):
        w = st.rays[corners[jj]]
        target = hb + (hv - hb) * q / (len(below) + 1)
        sfrac = (target - hv) / (h[w] - hv)
        if not 0.0 < sfrac < 1.0:
            raise _Conflict("edge point outside its edge")
        out.append(P.edge_point(v, w, sfrac))
    out.append(p)
    above = rays_between(pp, pa)
    for q, jj in enumerate(above, 1):
        w = st.rays[corners[jj]]
        target = hv + (ha - hv) * q / (len(above) + 1)
        sfrac = (target - hv) / (h[w] - hv)
        if not 0.0 < sfrac < 1.0:
            raise _Conflict("edge point outside its edge")
        out.append(P.edge_point(v, w, sfrac))
    out.append(a)
    return out


def _realize(P, TP, anchors, steps, t, h, u):
    # lift walk steps off the tree by routing them through an adjacent face
    raw = [anchors[0][0]]
    for (kind, p, q), (w, _) in zip(steps, anchors[1:]):
        if kind == "walk":
            a, b = TP.vertices[p], TP.vertices[q]
            fwd = (a, b) if q == (p + 1) % TP.n else (b, a)
            pe = _edge_face_point(P, fwd[0], fwd[1], t)
            he = float(P.position(pe) @ u)
            if not h[a] < he < h[b]:
                raise _Conflict("lifted edge point not between its endpoint heights")
            raw.append(pe)
        raw.append(w)
    anchor_at = {}
    k = 0
    for idx, x in enumerate(raw):
        if isinstance(x, int):
            anchor_at[idx] = anchors[k][1]
            k += 1
    out = [raw[0]]
    for idx in range(1, len(raw) - 1):
        if idx in anchor_at:
            out.extend(_detour(P, TP, raw[idx], anchor_at[idx], raw[idx - 1], raw[idx + 1], t, h, u))
        else:
            out.append(raw[idx])
    if len(raw) > 1:
        out.append(raw[-1])
    return SurfacePath(out)


def validate_dual_branch(P: Polyhedron, T: CutTree, path: SurfacePath, u=Z_UP):
    """List of violations: shared faces, strict ascent, interior disjoint from T."""
    bad = []
    tree_edges = {frozenset(e) for e in T.edges}
    hs = path.heights(P, u)
    if np.any(np.diff(hs) <= 0):
        bad.append("heights not strictly increasing")
    for a, b in zip(path.points, path.points[1:]):
        s = P.support(a) | P.support(b)
        if not any(s <= fs for fs in P.face_sets):
            bad.append(f"no common face for {a} and {b}")
        if len(s) == 2 and s in tree_edges:
            bad.append(f"segment {a}-{b} runs along a tree edge")
    for x in path.points[1:-1]:
        s = P.support(x)
        if len(s) == 1 or s in tree_edges:
            bad.append(f"interior point {x} lies on the tree")
    return bad


def dual_branch(P: Polyhedron, T: CutTree, TP: TracingPath, i) -> DualBranch:
    """Increasing path from leaf i to the top leaf whose interior avoids T.

    Built once from P and cached on the walk; it consists of vertices and
    face points only, so it applies verbatim to every stretched copy of P.
    """
    if i in TP._dual:
        return TP._dual[i]
    if not 0 <= i < TP.k:
        raise DomainError(f"leaf index {i} out of range")
    u = TP.u
    h = P.heights(u)
    if i == 0:
        db = DualBranch(0, [(TP.vertices[TP.leaves[0]], TP.leaves[0])], [],
                        SurfacePath((TP.vertices[TP.leaves[0]],)), 0.25)
        TP._dual[i] = db
        return db
    anchors, steps = _climb(P, TP, i, h)
    t = 0.25
    trace = []
    for _ in range(21):
        try:
            path = _realize(P, TP, anchors, steps, t, h, u)
            bad = validate_dual_branch(P, T, path, u)
            if not bad:
                db = DualBranch(i, anchors, steps, path, t, trace)
                TP._dual[i] = db
                return db
            trace.append((t, bad))
        except _Conflict as exc:
            trace.append((t, str(exc)))
        t /= 2
    raise InternalError(f"dual branch for leaf {i} failed", trace=trace)


def gamma_prime_i(P: Polyhedron, T: CutTree, TP: TracingPath, i) -> SurfacePath:
    """Closed path: walk prefix to leaf i, then back up to the top leaf; the whole walk for i = k."""
    if i == TP.k:
        return TP.closed_path()
    if not 1 <= i < TP.k:
        raise DomainError(f"index {i} out of range 1..{TP.k}")
    return concat(TP.prefix(TP.leaves[i]), dual_branch(P, T, TP, i).path)
