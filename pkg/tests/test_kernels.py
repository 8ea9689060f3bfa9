import numpy as np
import pytest

from geomeas import _kernels
from geomeas.oracle import sphere_grid
from geomeas.states import pair_reduction, random_state

nb = _kernels.numba_backend
npb = _kernels.numpy_backend
needs_numba = pytest.mark.skipif(nb is None, reason="numba unavailable")


def _rows(rng, n):
    z = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def test_backend_selection():
    assert _kernels.BACKEND_NAME in ("numba", "numpy")
    assert _kernels.grid_values is (nb if _kernels.USE_NUMBA else npb).grid_values


def test_grid_values_matches_einsum(rng):
    T = np.ascontiguousarray(random_state(rng).tensor)
    g = sphere_grid(6)
    got = npb.grid_values(T, g, g)
    v = np.einsum("ai,bj,ijk->abk", g.conj(), g.conj(), T)
    assert np.allclose(got, np.sum(np.abs(v) ** 2, axis=-1), atol=1e-15)


@needs_numba
def test_grid_values_parity(rng):
    T = np.ascontiguousarray(random_state(rng).tensor)
    g = sphere_grid(10)
    assert np.allclose(nb.grid_values(T, g, g), npb.grid_values(T, g, g), atol=1e-14)


@needs_numba
def test_als_parity(rng):
    T = np.ascontiguousarray(random_state(rng).tensor)
    Q1, Q2, Q3 = _rows(rng, 8), _rows(rng, 8), _rows(rng, 8)
    a = nb.als_sweeps(T, Q1.copy(), Q2.copy(), Q3.copy(), 50, 1e-12)
    b = npb.als_sweeps(T, Q1.copy(), Q2.copy(), Q3.copy(), 50, 1e-12)
    assert np.allclose(a[0], b[0], atol=1e-12)
    assert np.all(a[5] >= -1e-13) and np.all(b[5] >= -1e-13)


def test_als_does_not_mutate_inputs(rng):
    T = np.ascontiguousarray(random_state(rng).tensor)
    Q1, Q2, Q3 = _rows(rng, 4), _rows(rng, 4), _rows(rng, 4)
    keep = Q1.copy()
    for backend in filter(None, (nb, npb)):
        backend.als_sweeps(T, Q1, Q2, Q3, 5, 1e-12)
        assert np.array_equal(Q1, keep)


@needs_numba
def test_newton_parity(rng):
    red = pair_reduction(random_state(rng))
    seeds = rng.uniform(-2, 2, (16, 2))
    args = (red.r1.copy(), red.r2.copy(), np.ascontiguousarray(red.g))
    la, fa, ca = nb.newton_multistart(*args, seeds, 100, 1e-6, 1e-15)
    lb, fb, cb = npb.newton_multistart(*args, seeds, 100, 1e-6, 1e-15)
    ok = ca & cb
    assert ok.any()
    assert np.allclose(la[ok], lb[ok], atol=1e-8)


def test_numpy_fallback_end_to_end():
    import subprocess
    import sys

    code = (
        "import numpy as np\n"
        "from geomeas import BACKEND_NAME, measure, w_state\n"
        "from geomeas.states import random_state\n"
        "s = random_state(np.random.default_rng(2))\n"
        "a = measure(s, 'oracle').lambda_sq\n"
        "b = measure(s, 'stationary').lambda_sq\n"
        "print(BACKEND_NAME, abs(a - b), measure(w_state(), 'oracle').lambda_sq)\n"
    )
    env = {**__import__("os").environ, "GEOMEAS_DISABLE_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True).stdout.split()
    assert out[0] == "numpy"
    assert float(out[1]) < 1e-10
    assert abs(float(out[2]) - 4 / 9) < 1e-10
