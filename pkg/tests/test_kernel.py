import subprocess
import sys

import numpy as np
import pytest

import mtx
from mtx import kernel


@pytest.fixture(scope="module")
def arrays():
    tree = mtx.build_cells(mtx.IfsSpec(0.5), 3)
    fam = mtx.place_rings(tree, 0.25, 2.0)
    return fam.arrays()


class TestBackends:
    def test_backend_reported(self):
        assert kernel.backend_name() in ("cython", "python")

    @pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 0.9, 1.0])
    @pytest.mark.parametrize("inverse", [False, True])
    def test_backends_agree(self, arrays, t, inverse, rng):
        if kernel.backend_name() != "cython":
            pytest.skip("compiled kernel not available")
        z = 4 * (rng.random(5000) - 0.5) + 4j * (rng.random(5000) - 0.5)
        fast = kernel.ring_walk(z, t, *arrays, 3, inverse)
        ref = kernel.python_ring_walk(z, t, *arrays, 3, inverse)
        assert np.abs(fast - ref).max() < 1e-12

    def test_depth_cut_respected(self, arrays, rng):
        z = 4 * (rng.random(2000) - 0.5) + 4j * (rng.random(2000) - 0.5)
        full = kernel.ring_walk(z, 0.3, *arrays, 3, False)
        cut = kernel.ring_walk(z, 0.3, *arrays, 1, False)
        assert np.abs(full - cut).max() > 1e-6  # deeper rings do act

    def test_force_python_env(self):
        code = (
            "import os; os.environ['MTX_FORCE_PYTHON']='1'; "
            "from mtx import kernel; print(kernel.backend_name())"
        )
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
        assert out.stdout.strip() == "python"

    def test_inverse_roundtrip_both_backends(self, arrays, rng):
        z = 4 * (rng.random(3000) - 0.5) + 4j * (rng.random(3000) - 0.5)
        for walk in (kernel.ring_walk, kernel.python_ring_walk):
            w = walk(z, 0.7, *arrays, 3, False)
            back = walk(w, 0.7, *arrays, 3, True)
            assert np.abs(back - z).max() < 1e-10
