"""Test solids and seeded random convex hulls."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.spatial.transform import Rotation

from .geom import DEFAULT_TOL
from .polyhedron import Polyhedron, check_general_position


def tetrahedron():
    return Polyhedron.from_points([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def cube():
    return Polyhedron.from_points([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)])


def octahedron():
    pts = []
    for k in range(3):
        for s in (1, -1):
            p = [0, 0, 0]
            p[k] = s
            pts.append(p)
    return Polyhedron.from_points(pts)


def truncated_tetrahedron():
    pts = set()
    for p in itertools.permutations([3, 1, 1]):
        for signs in itertools.product((1, -1), repeat=3):
            q = tuple(a * s for a, s in zip(p, signs))
            if q[0] * q[1] * q[2] > 0:
                pts.add(q)
    return Polyhedron.from_points(sorted(pts))


def squat_truncated_tetrahedron(squash=0.3, tilt=0.05, seed=1):
    """Truncated tetrahedron resting on a triangle, flattened vertically and slightly tilted.

    Several of its monotone edge trees unfold with overlap.
    """
    tet = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float)
    down, _ = Rotation.align_vectors([[0.0, 0.0, -1.0]], [-np.ones(3) / math.sqrt(3)])
    tet = down.apply(tet) * np.array([1.0, 1.0, squash])
    pts = [(2 * tet[i] + tet[j]) / 3 for i in range(4) for j in range(4) if i != j]
    tip = Rotation.from_rotvec(tilt * np.random.default_rng(seed).normal(size=3))
    return Polyhedron.from_points(tip.apply(np.array(pts)))


def prism(n=5, height=3.0):
    ang = 2 * math.pi * np.arange(n) / n
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    pts = [[x, y, 0.0] for x, y in ring] + [[x, y, height] for x, y in ring]
    return Polyhedron.from_points(pts)


def frustum(n=6, r_bottom=4.0, r_top=1.0, height=0.3):
    """Flat, wide frustum; its squat cone makes developments turn back at small stretch."""
    ang = 2 * math.pi * np.arange(n) / n
    pts = [[r_bottom * math.cos(a), r_bottom * math.sin(a), 0.0] for a in ang]
    pts += [[r_top * math.cos(a), r_top * math.sin(a), height] for a in ang]
    pts += [[0.0, 0.0, -0.05], [0.0, 0.0, height + 0.05]]
    return Polyhedron.from_points(pts)


def rotated(P: Polyhedron, rotation) -> Polyhedron:
    R = rotation.as_matrix() if isinstance(rotation, Rotation) else np.asarray(rotation)
    return Polyhedron(P.vertices @ R.T, P.faces)


def generic_rotation(seed=0) -> Rotation:
    return Rotation.random(random_state=np.random.default_rng(seed))


def generic_copy(P: Polyhedron, seed=0, u=(0, 0, 1), tol=DEFAULT_TOL, tries=100) -> Polyhedron:
    """Rotate P by seeded random rotations until it is in general position for u."""
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        Q = rotated(P, Rotation.random(random_state=rng))
        rep = check_general_position(Q, u, tol)
        if rep.is_general and rep.min_height_gap > 1e-3 * Q.diameter:
            return Q
    raise RuntimeError("no generic rotation found")


def random_hull(rng, n_min=4, n_max=30) -> Polyhedron:
    """Hull of points drawn uniformly on the unit sphere (all extreme)."""
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        x = rng.normal(size=(n, 3))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        try:
            P = Polyhedron.from_points(x)
        except Exception:
            continue
        return P


def random_direction(rng) -> np.ndarray:
    u = rng.normal(size=3)
    return u / np.linalg.norm(u)


def named_solids():
    return {
        "tetrahedron": tetrahedron(),
        "cube": cube(),
        "octahedron": octahedron(),
        "truncated_tetrahedron": truncated_tetrahedron(),
    }


def corpus(seed=0, n_random=100, n_max=30):
    """Named solids followed by seeded random hulls; list of (name, Polyhedron)."""
    out = list(named_solids().items())
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        out.append((f"random_{i}", random_hull(rng, 4, n_max)))
    return out
