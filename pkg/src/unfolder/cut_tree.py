"""Monotone spanning edge trees: construction, validation and enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeneralPositionError, TreeError
from .geom import DEFAULT_TOL
from .polyhedron import Z_UP, Polyhedron, as_direction, check_general_position


@dataclass(frozen=True)
class CutTree:
    """Rooted spanning tree; ``parent[root]`` is ``None``."""

    root: int
    parent: tuple

    @property
    def edges(self):
        return sorted((min(v, p), max(v, p)) for v, p in enumerate(self.parent) if p is not None)

    @property
    def n_vertices(self):
        return len(self.parent)

    def adjacency(self):
        adj = [[] for _ in self.parent]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degree(self, v):
        return len(self.adjacency()[v])

    def path_to_root(self, v):
        out = [v]
        seen = {v}
        while self.parent[out[-1]] is not None:
            nxt = self.parent[out[-1]]
            if nxt in seen:
                raise TreeError("parent links contain a cycle")
            seen.add(nxt)
            out.append(nxt)
        return out

    def tree_path(self, a, b):
        """The unique simple path from a to b in T."""
        pa, pb = self.path_to_root(a), self.path_to_root(b)
        ia, ib = len(pa) - 1, len(pb) - 1
        while ia > 0 and ib > 0 and pa[ia - 1] == pb[ib - 1]:
            ia -= 1
            ib -= 1
        return pa[:ia + 1] + pb[:ib][::-1]

    @classmethod
    def from_edges(cls, n, edges, root):
        adj = [[] for _ in range(n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        parent = [None] * n
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = v
                    stack.append(w)
        if len(seen) != n or len(edges) != n - 1:
            raise TreeError("edge list is not a spanning tree")
        return cls(root, tuple(parent))

    def to_text(self):
        lines = [f"root {self.root}"] + [f"{a} {b}" for a, b in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, n):
        root, edges = None, []
        try:
            for line in text.splitlines():
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if parts[0] == "root":
                    root = int(parts[1])
                else:
                    edges.append((int(parts[0]), int(parts[1])))
        except (IndexError, ValueError) as exc:
            raise TreeError(f"malformed tree file: {exc}") from None
        if root is None:
            raise TreeError("tree file has no root record")
        if not 0 <= root < n or any(not (0 <= a < n and 0 <= b < n) for a, b in edges):
            raise TreeError("tree file references unknown vertices")
        return cls.from_edges(n, edges, root)


def _require_general(P, u, tol):
    rep = check_general_position(P, u, tol)
    if not rep.is_general:
        raise GeneralPositionError(rep.reason)
    return rep


def _steepest_lower(P, v, h):
    best, best_slope = None, 0.0
    for w in P.neighbors[v]:
        if h[w] < h[v]:
            slope = (h[v] - h[w]) / np.linalg.norm(P.vertices[v] - P.vertices[w])
            if best is None or slope > best_slope:
                best, best_slope = w, slope
    return best


def build_steepest_edge_tree(P: Polyhedron, u=Z_UP, tol=DEFAULT_TOL) -> CutTree:
    """Each non-root vertex links to the lower neighbour of steepest descent."""
    u = as_direction(u)
    rep = _require_general(P, u, tol)
    h = P.heights(u)
    parent = [None] * P.n_vertices
    for v in range(P.n_vertices):
        if v != rep.bottom_vertex:
            parent[v] = _steepest_lower(P, v, h)
    return CutTree(rep.bottom_vertex, tuple(parent))


def build_downhill_tree(P: Polyhedron, u=Z_UP, tol=DEFAULT_TOL) -> CutTree:
    """Union of downhill walks, each started at the highest uncovered vertex.

    A walk repeatedly steps to the steepest lower neighbour and stops on
    reaching a vertex already covered by an earlier walk (the first walk
    runs from the top vertex to the bottom vertex).
    """
    u = as_direction(u)
    rep = _require_general(P, u, tol)
    h = P.heights(u)
    parent = [None] * P.n_vertices
    covered = {rep.bottom_vertex}
    for v in sorted(range(P.n_vertices), key=lambda i: (-h[i], i)):
        while v not in covered:
            covered.add(v)
            w = _steepest_lower(P, v, h)
            parent[v] = w
            v = w
    return CutTree(rep.bottom_vertex, tuple(parent))


def random_monotone_tree(P: Polyhedron, rng, u=Z_UP, tol=DEFAULT_TOL) -> CutTree:
    """Each non-root vertex picks a uniformly random lower neighbour."""
    u = as_direction(u)
    rep = _require_general(P, u, tol)
    h = P.heights(u)
    parent = [None] * P.n_vertices
    for v in range(P.n_vertices):
        if v != rep.bottom_vertex:
            lower = [w for w in P.neighbors[v] if h[w] < h[v]]
            parent[v] = lower[int(rng.integers(len(lower)))]
    return CutTree(rep.bottom_vertex, tuple(parent))


def enumerate_monotone_trees(P: Polyhedron, u=Z_UP, tol=DEFAULT_TOL):
    """Every monotone edge tree: one lower-neighbour choice per non-root vertex."""
    import itertools
    u = as_direction(u)
    rep = _require_general(P, u, tol)
    h = P.heights(u)
    verts = [v for v in range(P.n_vertices) if v != rep.bottom_vertex]
    choices = [[w for w in P.neighbors[v] if h[w] < h[v]] for v in verts]
    for combo in itertools.product(*choices):
        parent = [None] * P.n_vertices
        for v, w in zip(verts, combo):
            parent[v] = w
        yield CutTree(rep.bottom_vertex, tuple(parent))


@dataclass
class TreeValidation:
    valid: bool
    violations: list = field(default_factory=list)


def validate_cut_tree(P: Polyhedron, T: CutTree, u=Z_UP, tol=DEFAULT_TOL) -> TreeValidation:
    u = as_direction(u)
    h = P.heights(u)
    bad = []
    n = P.n_vertices
    if len(T.parent) != n:
        bad.append(f"tree has {len(T.parent)} vertices, polyhedron has {n}")
        return TreeValidation(False, bad)
    if not 0 <= T.root < n or T.parent[T.root] is not None:
        bad.append("root must be a vertex without parent")
    for v, p in enumerate(T.parent):
        if v == T.root:
            continue
        if p is None:
            bad.append(f"vertex {v} has no parent")
        elif not 0 <= p < n or not P.is_edge(v, p):
            bad.append(f"adjacency: {v}-{p} is not an edge")
        elif not h[p] < h[v] - tol.eps_len * P.diameter:
            bad.append(f"monotonicity: parent {p} of {v} is not strictly lower")
    if not bad:
        for v in range(n):
            try:
                if T.path_to_root(v)[-1] != T.root:
                    bad.append(f"vertex {v} does not reach the root")
            except TreeError:
                bad.append(f"cycle through vertex {v}")
                break
    return TreeValidation(not bad, bad)


def require_valid(P, T, u=Z_UP, tol=DEFAULT_TOL):
    rep = validate_cut_tree(P, T, u, tol)
    if not rep.valid:
        raise TreeError("; ".join(rep.violations))


def require_spanning(P: Polyhedron, T: CutTree):
    """Spanning edge tree check without monotonicity."""
    n = P.n_vertices
    if len(T.parent) != n or T.parent[T.root] is not None:
        raise TreeError("tree does not match polyhedron")
    for v, p in enumerate(T.parent):
        if v != T.root and (p is None or not P.is_edge(v, p)):
            raise TreeError(f"{v}-{p} is not an edge")
    for v in range(n):
        if T.path_to_root(v)[-1] != T.root:
            raise TreeError(f"vertex {v} does not reach the root")


@dataclass
class TreeStream:
    """Iterator over spanning trees; ``truncated`` is set when ``limit`` cut it short."""

    P: Polyhedron
    limit: int | None = None
    truncated: bool = False
    count: int = 0

    def __iter__(self):
        P = self.P
        n = P.n_vertices
        root = int(np.argmin(P.vertices[:, 2] + 1e-12 * np.arange(n)))
        edges = list(P.edges)
        for chosen in _spanning_edge_sets(n, edges):
            if self.limit is not None and self.count >= self.limit:
                self.truncated = True
                return
            self.count += 1
            yield CutTree.from_edges(n, chosen, root)


def _spanning_edge_sets(n, edges):
    """Backtracking over edges with union-find; prunes when the rest cannot connect."""
    m = len(edges)
    chosen = []

    def find(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def connected_with_rest(parent, start):
        # can the current forest plus edges[start:] still span?
        comp = {find(parent, v) for v in range(n)}
        uf = {c: c for c in comp}

        def f(x):
            while uf[x] != x:
                x = uf[x]
            return x
        k = len(comp)
        for a, b in edges[start:]:
            ra, rb = f(find(parent, a)), f(find(parent, b))
            if ra != rb:
                uf[ra] = rb
                k -= 1
        return k == 1

    def rec(i, parent):
        if len(chosen) == n - 1:
            yield list(chosen)
            return
        if m - i < n - 1 - len(chosen) or not connected_with_rest(parent, i):
            return
        a, b = edges[i]
        ra, rb = find(parent, a), find(parent, b)
        if ra != rb:
            p2 = list(parent)
            p2[ra] = rb
            chosen.append(edges[i])
            yield from rec(i + 1, p2)
            chosen.pop()
        yield from rec(i + 1, parent)

    yield from rec(0, list(range(n)))


def enumerate_spanning_trees(P: Polyhedron, limit=None) -> TreeStream:
    return TreeStream(P, limit)


def matrix_tree_count(n, edges) -> int:
    """Number of spanning trees via the Laplacian cofactor (rounded determinant)."""
    L = np.zeros((n, n))
    for a, b in edges:
        L[a, a] += 1
        L[b, b] += 1
        L[a, b] -= 1
        L[b, a] -= 1
    return int(round(np.linalg.det(L[1:, 1:])))
