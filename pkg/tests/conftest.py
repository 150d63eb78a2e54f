import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def acceptance_scene():
    """The reference pipeline: alpha=0.5, depth 3, margin 0.25, l_twist 2."""
    import mtx

    tree = mtx.build_cells(mtx.IfsSpec(0.5), 3)
    rings = mtx.place_rings(tree, 0.25, 2.0)
    return tree, rings
