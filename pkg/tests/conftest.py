import numpy as np
import pytest

from skewjensen import _backend


def dirichlet_pairs(n, d, seed):
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(d), size=n), rng.dirichlet(np.ones(d), size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(20111201)


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    if request.param == "compiled":
        if _backend.BACKEND != "compiled":
            pytest.skip("compiled extension not built")
        kernels = _backend.kernels
    else:
        kernels = _backend.python_kernels
    monkeypatch.setattr(_backend, "kernels", kernels)
    return request.param
