import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unfolder import solids
from unfolder.cut_tree import (CutTree, _spanning_edge_sets, build_downhill_tree,
                               build_steepest_edge_tree, enumerate_monotone_trees,
                               enumerate_spanning_trees, matrix_tree_count, random_monotone_tree,
                               validate_cut_tree)
from unfolder.errors import GeneralPositionError, TreeError
from unfolder.polyhedron import Polyhedron, check_general_position

# fixed tetrahedron at distinct heights; slopes from vertex 3 computed by hand:
# to 0: 1.1/1.4248 = 0.772, to 1: 0.8/1.5033 = 0.532, to 2: 0.4/0.4243 = 0.943
TET = Polyhedron.from_points([[0, 0, 0], [1, 0, 0.3], [0, 1, 0.7], [0.1, 0.9, 1.1]])


def test_steepest_tree_hand_computed_tetrahedron():
    T = build_steepest_edge_tree(TET)
    assert T.root == 0
    assert T.parent == (None, 0, 0, 2)


def test_downhill_tree_tetrahedron():
    T = build_downhill_tree(TET)
    assert len(T.edges) == 3 and validate_cut_tree(TET, T).valid
    assert T.path_to_root(3) == [3, 2, 0]


def test_steepest_tie_goes_to_smallest_index():
    # vertices 1 and 3 are symmetric below the apex 0 and not adjacent to each other
    P = Polyhedron.from_points([[0, 0, 2], [1, 0, 0.5], [0, 1.5, 0.3], [-1, 0, 0.5],
                                [0, -1, 0.8], [0.1, 0.05, -2]])
    assert check_general_position(P).is_general
    assert not P.is_edge(1, 3)
    assert build_steepest_edge_tree(P).parent[0] == 1


def test_generic_cube_trees(generic_cube):
    h = generic_cube.heights()
    for T in (build_downhill_tree(generic_cube), build_steepest_edge_tree(generic_cube)):
        assert len(T.edges) == 7 and validate_cut_tree(generic_cube, T).valid
        for v in range(8):
            path = T.path_to_root(v)
            assert all(h[a] > h[b] for a, b in zip(path, path[1:]))


def test_axis_aligned_cube_rejected(cube):
    with pytest.raises(GeneralPositionError):
        build_downhill_tree(cube)
    with pytest.raises(GeneralPositionError):
        build_steepest_edge_tree(cube)


def test_validation_reports_violations(generic_cube):
    T = build_downhill_tree(generic_cube)
    h = generic_cube.heights()
    v = int(np.argmax(h))
    non_nbr = next(w for w in range(8) if w != v and not generic_cube.is_edge(v, w) and h[w] < h[v])
    bad = list(T.parent)
    bad[v] = non_nbr
    rep = validate_cut_tree(generic_cube, CutTree(T.root, tuple(bad)))
    assert not rep.valid and any("adjacency" in s for s in rep.violations)
    lo, hi = next(sorted(e, key=lambda x: h[x]) for e in generic_cube.edges if T.root not in e)
    bad = list(T.parent)
    bad[lo] = hi
    rep = validate_cut_tree(generic_cube, CutTree(T.root, tuple(bad)))
    assert not rep.valid and any("monotonicity" in s for s in rep.violations)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_builders_always_valid_and_leaves_are_maxima(seed):
    rng = np.random.default_rng(seed)
    P = solids.random_hull(rng, 4, 25)
    if not check_general_position(P).is_general:
        return
    h = P.heights()
    for T in (build_downhill_tree(P), build_steepest_edge_tree(P), random_monotone_tree(P, rng)):
        assert validate_cut_tree(P, T).valid
        adj = T.adjacency()
        for v in range(P.n_vertices):
            if len(adj[v]) == 1 and v != T.root:
                assert h[adj[v][0]] < h[v]


def test_text_round_trip_and_errors(generic_cube):
    T = build_downhill_tree(generic_cube)
    assert CutTree.from_text(T.to_text(), 8) == T
    with pytest.raises(TreeError):
        CutTree.from_text("0 1\n", 8)
    with pytest.raises(TreeError):
        CutTree.from_text("root 0\n0 x\n", 8)
    with pytest.raises(TreeError):
        CutTree.from_text("root 0\n0 1\n", 8)
    with pytest.raises(TreeError):
        CutTree.from_text("root 0\n0 99\n", 8)


def test_tree_path(generic_cube):
    T = build_downhill_tree(generic_cube)
    for a, b in itertools.combinations(range(8), 2):
        p = T.tree_path(a, b)
        assert p[0] == a and p[-1] == b and len(set(p)) == len(p)
        assert all(frozenset(e) in {frozenset(x) for x in T.edges} for e in zip(p, p[1:]))


def _cayley_count(n):
    return n ** (n - 2)


@pytest.mark.parametrize("P, expected", [(solids.cube(), 384), (solids.tetrahedron(), 16),
                                         (solids.octahedron(), 384)])
def test_spanning_tree_counts_match_matrix_tree(P, expected):
    stream = enumerate_spanning_trees(P)
    trees = list(stream)
    assert len(trees) == stream.count == expected
    assert matrix_tree_count(P.n_vertices, P.edges) == expected
    assert len({T.edges.__repr__() for T in trees}) == expected


def test_tetrahedron_count_is_cayley():
    assert matrix_tree_count(4, solids.tetrahedron().edges) == _cayley_count(4)


def test_triangle_has_three_spanning_trees():
    assert len(list(_spanning_edge_sets(3, [(0, 1), (1, 2), (0, 2)]))) == 3


def test_enumeration_rooted_at_lowest_vertex(generic_cube):
    root = int(np.argmin(generic_cube.heights()))
    assert all(T.root == root for T in enumerate_spanning_trees(generic_cube, limit=10))


def test_enumeration_truncation_flag(cube):
    stream = enumerate_spanning_trees(cube, limit=50)
    assert len(list(stream)) == 50 and stream.truncated
    stream = enumerate_spanning_trees(cube, limit=1000)
    list(stream)
    assert not stream.truncated


def test_random_hull_counts_match_matrix_tree():
    rng = np.random.default_rng(4)
    for _ in range(3):
        P = solids.random_hull(rng, 5, 7)
        assert sum(1 for _ in enumerate_spanning_trees(P)) == matrix_tree_count(P.n_vertices, P.edges)


def test_monotone_tree_enumeration_product_of_choices(generic_cube):
    h = generic_cube.heights()
    r = int(np.argmin(h))
    expected = math.prod(sum(h[w] < h[v] for w in generic_cube.neighbors[v]) for v in range(8) if v != r)
    trees = list(enumerate_monotone_trees(generic_cube))
    assert len(trees) == expected and all(validate_cut_tree(generic_cube, T).valid for T in trees)
