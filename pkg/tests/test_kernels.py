import os
import subprocess
import sys

import numpy as np
import pytest

from skewjensen import _backend

py = _backend.python_kernels
needs_compiled = pytest.mark.skipif(_backend.BACKEND != "compiled", reason="compiled extension not built")


def problem(gen_id, rng, n=9, d=5):
    if gen_id == 2:
        return rng.normal(size=(n, d))
    return rng.dirichlet(np.ones(d), size=n)


@needs_compiled
@pytest.mark.parametrize("gen_id", [0, 1, 2])
@pytest.mark.parametrize("alpha", [0.0, 0.05, 0.3, 0.5, 1.0])
def test_matrix_agrees(gen_id, alpha, rng):
    X, C = problem(gen_id, rng, 11), problem(gen_id, rng, 4)
    np.testing.assert_allclose(_backend.kernels.sym_jensen_matrix(X, C, alpha, gen_id),
                               py.sym_jensen_matrix(X, C, alpha, gen_id), rtol=1e-12, atol=1e-15)


@needs_compiled
@pytest.mark.parametrize("gen_id", [0, 1, 2])
def test_energy_and_step_agree(gen_id, rng):
    P = problem(gen_id, rng)
    w = rng.dirichlet(np.ones(len(P)))
    c = P.mean(axis=0)
    for a in (0.1, 0.5):
        assert _backend.kernels.cccp_energy(P, w, a, gen_id, c) == pytest.approx(
            py.cccp_energy(P, w, a, gen_id, c), rel=1e-12, abs=1e-15)
        np.testing.assert_allclose(_backend.kernels.cccp_step(P, w, a, gen_id, c),
                                   py.cccp_step(P, w, a, gen_id, c), rtol=1e-13)


@needs_compiled
@pytest.mark.parametrize("gen_id", [0, 1])
def test_solve_agrees(gen_id, rng):
    P = problem(gen_id, rng, 20, 16)
    w = np.full(20, 1 / 20)
    c0 = P.mean(axis=0)
    a = _backend.kernels.cccp_solve(P, w, 0.2, gen_id, c0, 1e-12, 1000)
    b = py.cccp_solve(P, w, 0.2, gen_id, c0, 1e-12, 1000)
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    assert a[1] == b[1] and a[4] == b[4]
    np.testing.assert_allclose(a[2], b[2], rtol=1e-11)


def test_shannon_zero_bins(rng):
    X = np.array([[1.0, 0.0], [0.5, 0.5]])
    D = py.sym_jensen_matrix(X, X, 0.25, 0)
    assert np.all(np.isfinite(D)) and D[0, 0] == 0.0
    if _backend.BACKEND == "compiled":
        np.testing.assert_allclose(_backend.kernels.sym_jensen_matrix(X, X, 0.25, 0), D, atol=1e-15)


def test_unknown_id():
    with pytest.raises(ValueError):
        py.sym_jensen_matrix(np.ones((1, 2)), np.ones((1, 2)), 0.5, 7)


def test_pure_env_forces_fallback():
    env = dict(os.environ, SKEWJENSEN_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import skewjensen; print(skewjensen.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
