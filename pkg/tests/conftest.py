import numpy as np
import pytest

from unfolder import solids
from unfolder.polyhedron import check_general_position


@pytest.fixture(scope="session")
def cube():
    return solids.cube()


@pytest.fixture(scope="session")
def tetra():
    return solids.tetrahedron()


@pytest.fixture(scope="session")
def generic_cube():
    return solids.generic_copy(solids.cube(), seed=7)


@pytest.fixture(scope="session")
def squat_tt():
    return solids.squat_truncated_tetrahedron()


@pytest.fixture(scope="session")
def general_hulls():
    """Seeded random hulls in general position for the vertical direction."""
    rng = np.random.default_rng(2024)
    out = []
    while len(out) < 25:
        P = solids.random_hull(rng, 4, 30)
        if check_general_position(P).is_general:
            out.append(P)
    return out
