"""Randomized property suites over the angle calculus, tracing, development and simplicity."""

from __future__ import annotations

import math

import numpy as np

from .cut_tree import random_monotone_tree
from .development import check_mixed_composition, congruence_deviation, develop_boundary, layout_faces
from .errors import DomainError
from .geom import DEFAULT_TOL
from .polyhedron import FacePoint, Polyhedron, check_general_position
from .simplicity import is_simple, oracle_layout_overlap
from .solids import corpus, generic_copy
from .tracing import SurfacePath, TracingPath, trace_boundary

TWO_PI = 2 * math.pi


def default_angle(P, a, o, b):
    return P.left_angle(a, o, b)


def random_star_point(P: Polyhedron, o: int, rng):
    """A random point of the star of vertex o other than o itself."""
    kind = rng.random()
    if kind < 0.2:
        return int(rng.choice(P.neighbors[o]))
    if kind < 0.4:
        w = int(rng.choice(P.neighbors[o]))
        return P.edge_point(o, w, float(rng.uniform(0.05, 0.95)))
    fi = int(rng.choice(P.vertex_faces[o]))
    f = P.faces[fi]
    w = rng.dirichlet(np.ones(len(f)))
    w[f.index(o)] *= rng.uniform(0.0, 0.9)
    w /= w.sum()
    return FacePoint(fi, tuple(w))


def random_walk(P: Polyhedron, rng, length, start=None):
    v = int(rng.integers(P.n_vertices)) if start is None else start
    out = [v]
    for _ in range(length):
        choices = [w for w in P.neighbors[out[-1]] if len(out) < 2 or w != out[-2]]
        out.append(int(rng.choice(choices)))
    return out


def random_composition_pair(P: Polyhedron, rng, tol=DEFAULT_TOL):
    """Two edge walks sharing a prefix of length m, the second branching off to the left (or extending)."""
    while True:
        k = int(rng.integers(2, 9))
        g = random_walk(P, rng, k)
        if rng.random() < 0.15:
            w = g + random_walk(P, rng, int(rng.integers(1, 6)), start=g[-1])[1:]
            return SurfacePath(g), SurfacePath(w), k
        m = int(rng.integers(1, k))
        a, o, b = g[m - 1], g[m], g[m + 1]
        left = [c for c in P.neighbors[o] if c not in (a, b) and P.strictly_left_of(c, a, o, b, tol)]
        if not left:
            continue
        c = int(rng.choice(left))
        w = g[:m + 1] + random_walk(P, rng, int(rng.integers(1, 6)), start=c)
        return SurfacePath(g), SurfacePath(w), m


def check_tracing_invariants(P: Polyhedron, TP: TracingPath, u=None, tol=DEFAULT_TOL):
    """Structural violations of a boundary walk for a monotone tree (empty when sound)."""
    u = TP.u if u is None else u
    bad = []
    T = TP.tree
    n = TP.n
    h = P.heights(u)
    count = {}
    for p in range(n):
        e = frozenset((TP.vertices[p], TP.vertices[(p + 1) % n]))
        count[e] = count.get(e, 0) + 1
    for e in T.edges:
        if count.get(frozenset(e), 0) != 2:
            bad.append(f"tree edge {e} traversed {count.get(frozenset(e), 0)} times")
    if set(count) != {frozenset(e) for e in T.edges}:
        bad.append("walk uses a non-tree edge")
    adj = T.adjacency()
    theta = TP.theta(P)
    for v in range(P.n_vertices):
        occ = [p for p in range(n) if TP.vertices[p] == v]
        if len(occ) != len(adj[v]):
            bad.append(f"vertex {v} occurs {len(occ)} times, degree {len(adj[v])}")
        if abs(sum(theta[p] for p in occ) - P.total_angle(v)) > 1e-9:
            bad.append(f"wedges at vertex {v} do not partition its star")
    hv = [h[v] for v in TP.vertices]
    maxima = {p for p in range(n) if hv[p] > hv[p - 1] and hv[p] > hv[(p + 1) % n]}
    if maxima != set(TP.leaves):
        bad.append("leaves differ from strict local maxima of height")
    L = TP.leaves
    for i, a in enumerate(L):
        b = L[(i + 1) % len(L)]
        span = (b - a) % n or n
        mins = [(a + s) % n for s in range(1, span)
                if hv[(a + s) % n] < hv[(a + s - 1) % n] and hv[(a + s) % n] < hv[(a + s + 1) % n]]
        if len(mins) != 1:
            bad.append(f"{len(mins)} local minima between leaves {a} and {b}")
    return bad


def _suite_gauss_bonnet(meshes, rng, n, angle_fn):
    fails = 0
    for _ in range(n):
        P = meshes[int(rng.integers(len(meshes)))]
        if P.gauss_bonnet_residual() >= 1e-9 * P.n_vertices:
            fails += 1
    return fails


def _suite_angle_sum(meshes, rng, n, angle_fn):
    fails = 0
    for _ in range(n):
        P = meshes[int(rng.integers(len(meshes)))]
        o = int(rng.integers(P.n_vertices))
        a, b = random_star_point(P, o, rng), random_star_point(P, o, rng)
        if P.left_angle(a, o, b) == P.total_angle(o):
            continue
        s = angle_fn(P, a, o, b) + angle_fn(P, b, o, a)
        if abs(s - P.total_angle(o)) > 1e-9:
            fails += 1
    return fails


def _suite_additivity(meshes, rng, n, angle_fn):
    fails = 0
    done = 0
    while done < n:
        P = meshes[int(rng.integers(len(meshes)))]
        o = int(rng.integers(P.n_vertices))
        a, b, c = (random_star_point(P, o, rng) for _ in range(3))
        if not P.strictly_left_of(c, a, o, b):
            continue
        done += 1
        if abs(angle_fn(P, a, o, c) + angle_fn(P, c, o, b) - angle_fn(P, a, o, b)) > 1e-9:
            fails += 1
    return fails


def _general_meshes(meshes, rng):
    out = []
    for P in meshes:
        if not check_general_position(P).is_general:
            P = generic_copy(P, int(rng.integers(2**31)))
        out.append(P)
    return out


def _suite_tracing(meshes, rng, n, angle_fn):
    fails = 0
    gm = _general_meshes(meshes, rng)
    for _ in range(n):
        P = gm[int(rng.integers(len(gm)))]
        T = random_monotone_tree(P, rng)
        if check_tracing_invariants(P, trace_boundary(P, T)):
            fails += 1
    return fails


def _suite_closure(meshes, rng, n, angle_fn):
    fails = 0
    gm = _general_meshes(meshes, rng)
    for _ in range(n):
        P = gm[int(rng.integers(len(gm)))]
        TP = trace_boundary(P, random_monotone_tree(P, rng))
        B = develop_boundary(P, TP)
        gap = np.linalg.norm(B.vertices[-1] - B.vertices[0])
        turn = float(np.sum(math.pi - TP.theta(P)))
        if gap >= 1e-7 * B.perimeter or abs(turn - TWO_PI) >= 1e-7:
            fails += 1
    return fails


def _suite_composition(meshes, rng, n, angle_fn):
    fails = 0
    for _ in range(n):
        P = meshes[int(rng.integers(len(meshes)))]
        G, W, m = random_composition_pair(P, rng)
        if not check_mixed_composition(P, G, W, m).congruent:
            fails += 1
    return fails


def _suite_oracle(meshes, rng, n, angle_fn):
    fails = 0
    gm = _general_meshes(meshes, rng)
    for _ in range(n):
        P = gm[int(rng.integers(len(gm)))]
        T = random_monotone_tree(P, rng)
        TP = trace_boundary(P, T)
        lay = layout_faces(P, T, TP)
        simple = is_simple(develop_boundary(P, TP)).simple
        if simple == oracle_layout_overlap(lay):
            fails += 1
        elif congruence_deviation(develop_boundary(P, TP), lay.boundary) >= 1e-7 * P.diameter:
            fails += 1
    return fails


SUITES = {
    "gauss_bonnet": _suite_gauss_bonnet,
    "angle_sum_identity": _suite_angle_sum,
    "angle_additivity": _suite_additivity,
    "tracing_structure": _suite_tracing,
    "boundary_closure": _suite_closure,
    "mixed_composition": _suite_composition,
    "oracle_equivalence": _suite_oracle,
}


def run_suites(meshes=None, seed=0, n_trials=100, angle_fn=default_angle, suites=None):
    """Pass/fail matrix: suite name -> {passed, trials, failures}. Empty for zero trials."""
    if n_trials <= 0:
        return {}
    if meshes is None:
        meshes = [P for _, P in corpus(seed, n_random=10)]
    rng = np.random.default_rng(seed)
    out = {}
    for name in suites or SUITES:
        try:
            fails = SUITES[name](meshes, rng, n_trials, angle_fn)
        except DomainError as exc:
            out[name] = {"passed": False, "trials": n_trials, "failures": n_trials, "error": str(exc)}
            continue
        out[name] = {"passed": fails == 0, "trials": n_trials, "failures": fails}
    return out
