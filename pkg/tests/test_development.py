import math

import numpy as np
import pytest

from unfolder import solids
from unfolder.cut_tree import (build_downhill_tree, enumerate_spanning_trees,
                               random_monotone_tree)
from unfolder.development import (InitialCondition, PlanarPath, align_first_edge,
                                  check_mixed_composition, congruence_deviation, develop,
                                  develop_boundary, develop_mixed, layout_faces, planar_compose,
                                  turning_sum)
from unfolder.errors import DomainError
from unfolder.polyhedron import FacePoint
from unfolder.simplicity import oracle_layout_overlap
from unfolder.tracing import SurfacePath, double, trace_boundary
from unfolder.verify import random_composition_pair, random_walk


def planar_left_angle(a, o, b):
    """Counter-clockwise angle from the outgoing to the incoming direction, in (0, 2*pi]."""
    u, v = np.asarray(b) - o, np.asarray(a) - o
    ang = math.atan2(u[0] * v[1] - u[1] * v[0], u @ v) % (2 * math.pi)
    return ang or 2 * math.pi


def face_frame(P, fi):
    V = P.vertices[list(P.faces[fi])]
    n = P.face_normals[fi]
    e1 = (V[1] - V[0]) / np.linalg.norm(V[1] - V[0])
    e2 = np.cross(n, e1)
    return lambda x: np.array([(x - V[0]) @ e1, (x - V[0]) @ e2])


def test_one_edge_development(generic_cube):
    a, b = generic_cube.edges[0]
    L = np.linalg.norm(generic_cube.vertices[a] - generic_cube.vertices[b])
    d = develop(generic_cube, SurfacePath((a, b)))
    assert np.allclose(d.vertices, [[0, 0], [0, -L]])


def test_path_inside_one_face_is_congruent(cube):
    fi = 0
    f = cube.faces[fi]
    rng = np.random.default_rng(0)
    pts = [FacePoint(fi, tuple(rng.dirichlet(np.ones(len(f))))) for _ in range(6)]
    path = SurfacePath(tuple(pts))
    frame = face_frame(cube, fi)
    flat = np.array([frame(cube.position(p)) for p in pts])
    for base in range(len(pts) - 1):
        d = develop_mixed(cube, path, base)
        assert congruence_deviation(flat, d) < 1e-12


def test_lengths_and_left_angles_are_reproduced(general_hulls):
    rng = np.random.default_rng(1)
    for P in general_hulls[:10]:
        path = SurfacePath(tuple(random_walk(P, rng, 8)))
        d = develop(P, path)
        assert np.allclose(np.linalg.norm(np.diff(d.vertices, axis=0), axis=1), path.lengths(P))
        theta = path.left_angles(P)
        x = d.vertices
        for i in range(1, len(path) - 1):
            assert planar_left_angle(x[i - 1], x[i], x[i + 1]) == pytest.approx(theta[i - 1], abs=1e-9)


def test_base_zero_is_left_development(general_hulls):
    rng = np.random.default_rng(2)
    P = general_hulls[0]
    path = SurfacePath(tuple(random_walk(P, rng, 6)))
    assert np.array_equal(develop_mixed(P, path, 0).vertices, develop(P, path).vertices)
    with pytest.raises(DomainError):
        develop_mixed(P, path, 6)


def test_initial_condition():
    with pytest.raises(DomainError):
        InitialCondition(direction=(0, 0))
    ic = InitialCondition(start=(1, 2), direction=(3, 0))
    assert ic.direction == (1.0, 0.0)


def test_boundary_closes_and_turns_once(general_hulls):
    rng = np.random.default_rng(3)
    for P in general_hulls:
        TP = trace_boundary(P, random_monotone_tree(P, rng))
        B = develop_boundary(P, TP)
        assert np.linalg.norm(B.vertices[-1] - B.vertices[0]) < 1e-7 * B.perimeter
        assert abs(turning_sum(P, TP) - 2 * math.pi) < 1e-7


def test_boundary_development_matches_path_development_where_simple(generic_cube):
    # at a vertex of tree degree 2 the wedge angle is the left angle of the walk
    T = build_downhill_tree(generic_cube)
    TP = trace_boundary(generic_cube, T)
    B = develop_boundary(generic_cube, TP)
    theta = TP.theta(generic_cube)
    closed = TP.closed_path()
    checked = 0
    for p in range(1, TP.n):
        a, o, b = closed[p - 1], closed[p], closed[p + 1]
        if T.degree(o) == 2:
            assert theta[p] == pytest.approx(generic_cube.left_angle(a, o, b), abs=1e-12)
            checked += 1
    assert checked > 0 and len(B) == TP.n + 1


# -- congruence -------------------------------------------------------------

def test_congruence_deviation_rigid_and_reflected():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(7, 2))
    c, s = math.cos(0.7), math.sin(0.7)
    y = x @ np.array([[c, -s], [s, c]]).T + [3, -1]
    assert congruence_deviation(x, y) < 1e-12
    assert np.allclose(align_first_edge(x, y), x)
    assert congruence_deviation(x, x * [1, -1]) > 1e-3
    assert congruence_deviation(x, x[:5]) == math.inf


def test_planar_compose():
    G = PlanarPath([[0, 0], [0, -1], [1, -2]])
    W = PlanarPath([[0, 0], [0, -1], [-1, -2]])
    assert np.array_equal(planar_compose(G, W, 1).vertices, [[1, -2], [0, -1], [-1, -2]])


def test_composition_with_itself_is_trivial(generic_cube):
    G = SurfacePath((0, *generic_cube.neighbors[0][:1]))
    rep = check_mixed_composition(generic_cube, G, G)
    assert rep.congruent and len(rep.direct) == 1 and len(rep.mixed) == 1


def test_prefix_case(generic_cube):
    rng = np.random.default_rng(5)
    w = random_walk(generic_cube, rng, 7)
    G, W = SurfacePath(tuple(w[:4])), SurfacePath(tuple(w))
    rep = check_mixed_composition(generic_cube, G, W, 3)
    assert rep.m == 3 and rep.congruent


def test_composition_random_pairs_on_rotated_cube(generic_cube):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        G, W, m = random_composition_pair(generic_cube, rng)
        rep = check_mixed_composition(generic_cube, G, W, m)
        worst = max(worst, rep.max_deviation / generic_cube.diameter)
    assert worst < 1e-7


def test_composition_precondition(generic_cube):
    P = generic_cube
    # build a pair where the second path leaves to the right
    for o in range(8):
        nb = P.neighbors[o]
        for a in nb:
            for b in nb:
                for c in nb:
                    if len({a, b, c}) == 3 and not P.strictly_left_of(c, a, o, b):
                        with pytest.raises(DomainError):
                            check_mixed_composition(P, SurfacePath((a, o, b)), SurfacePath((a, o, c)), 1)
                        return
    pytest.fail("no right-branching triple found")


def test_doubled_path_angles_mirror(general_hulls):
    # in D = g . g^-1 with k edges in g, the left angle at 2k - i is the right angle at i
    rng = np.random.default_rng(7)
    for P in general_hulls[:10]:
        g = SurfacePath(tuple(random_walk(P, rng, 5)))
        D = double(g)
        assert D.points == g.points + g.points[-2::-1]
        left, right = D.left_angles(P), D.right_angles(P)
        k = g.n_edges
        for i in range(1, k):
            assert left[2 * k - i - 1] == pytest.approx(right[i - 1], abs=1e-12)
        assert left[k - 1] == pytest.approx(P.total_angle(g.end))
        assert np.allclose(np.linalg.norm(np.diff(develop_mixed(P, D, k).vertices, axis=0), axis=1),
                           D.lengths(P))


# -- face layout ------------------------------------------------------------

def _check_layout(P, T):
    TP = trace_boundary(P, T)
    lay = layout_faces(P, T, TP)
    for fi, poly in enumerate(lay.polygons):
        frame = face_frame(P, fi)
        flat = np.array([frame(P.vertices[v]) for v in P.faces[fi]])
        assert congruence_deviation(flat, poly) < 1e-9 * P.diameter
    cut = {frozenset(e) for e in T.edges}
    for fi, f in enumerate(P.faces):
        for j in range(len(f)):
            a, b = f[j], f[(j + 1) % len(f)]
            if frozenset((a, b)) in cut:
                continue
            g = P.face_left(b, a)
            ga, gb = P.faces[g].index(a), P.faces[g].index(b)
            assert np.allclose(lay.polygons[fi][j], lay.polygons[g][ga], atol=1e-9 * P.diameter)
            assert np.allclose(lay.polygons[fi][(j + 1) % len(f)], lay.polygons[g][gb], atol=1e-9 * P.diameter)
    assert congruence_deviation(develop_boundary(P, TP), lay.boundary) < 1e-7 * P.diameter
    return lay


def test_tetrahedron_layouts():
    P = solids.tetrahedron()
    for T in enumerate_spanning_trees(P):
        lay = _check_layout(P, T)
        assert len(lay.polygons) == 4
        assert np.allclose(lay.boundary.vertices[0], lay.boundary.vertices[-1], atol=1e-9)


def test_cube_net_is_hexomino(cube):
    T = next(iter(enumerate_spanning_trees(cube)))
    lay = _check_layout(cube, T)
    assert len(lay.polygons) == 6 and all(len(p) == 4 for p in lay.polygons)
    assert not oracle_layout_overlap(lay)
    assert sum(abs(_area(p)) for p in lay.polygons) == pytest.approx(6.0)


def test_layout_random_instances(general_hulls):
    rng = np.random.default_rng(8)
    for P in general_hulls[:10]:
        _check_layout(P, random_monotone_tree(P, rng))


def test_layout_to_dict(generic_cube):
    lay = layout_faces(generic_cube, build_downhill_tree(generic_cube))
    d = lay.to_dict()
    assert len(d["faces"]) == 6 and len(d["boundary"]) == 15


def _area(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
