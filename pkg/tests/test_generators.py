import numpy as np
import pytest

from skewjensen.errors import ConfigurationError, DomainError
from skewjensen.generators import (
    GENERATOR_NAMES,
    SeparableGenerator,
    as_vector_generator,
    bregman,
    jensen_gap,
    make_generator,
)


def _samples(gen, rng, n=1000):
    if gen.domain[0] == 0.0:
        return np.exp(rng.uniform(-6, 4, size=n))
    return rng.uniform(-50, 50, size=n)


def test_named_values():
    sh = make_generator("shannon")
    assert sh.grad(1.0) == 0.0
    assert sh.grad_inv(0.0) == 1.0
    burg = make_generator("burg")
    assert burg.grad(2.0) == -0.5
    assert burg.grad_inv(-0.5) == 2.0
    quad = make_generator("quadratic")
    assert (quad.eval(3.0), quad.grad(3.0), quad.grad_inv(6.0)) == (9.0, 6.0, 3.0)


def test_unknown_name():
    with pytest.raises(ConfigurationError):
        make_generator("renyi")


@pytest.mark.parametrize("name", GENERATOR_NAMES)
def test_round_trip(name, rng):
    gen = make_generator(name)
    x = _samples(gen, rng)
    back = gen.grad_inv(gen.grad(x))
    assert np.max(np.abs(back - x) / np.maximum(1.0, np.abs(x))) <= 1e-10


@pytest.mark.parametrize("name", GENERATOR_NAMES)
def test_gradient_matches_central_difference(name, rng):
    gen = make_generator(name)
    x = _samples(gen, rng, 200)
    x = x[x > 1e-2] if gen.domain[0] == 0.0 else x
    h = 1e-6
    fd = (gen.eval(x + h) - gen.eval(x - h)) / (2 * h)
    g = gen.grad(x)
    scale = np.maximum(1.0, np.abs(g))
    # finite-difference error grows like eps*|F|/h; tolerance follows suit
    tol = 1e-6 * np.maximum(1.0, np.abs(gen.eval(x)))
    assert np.all(np.abs(g - fd) <= tol * scale)


@pytest.mark.parametrize("name", GENERATOR_NAMES)
def test_strict_convexity_margin(name, rng):
    gen = make_generator(name)
    x, y = _samples(gen, rng, 500), _samples(gen, rng, 500)
    lam = rng.uniform(0.05, 0.95, size=500)
    gap = jensen_gap(gen, x, y, lam[0])
    # positive margin: the gap dominates a multiple of lam(1-lam)(x-y)^2 times min curvature
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    curv = np.minimum(gen.hess(lo), gen.hess(hi))
    margin = 0.5 * lam[0] * (1 - lam[0]) * (x - y) ** 2 * curv
    assert np.all(gap >= margin * (1 - 1e-6) - 1e-12)


def test_jensen_gap_examples():
    assert jensen_gap(make_generator("quadratic"), 0.0, 2.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert jensen_gap(make_generator("shannon"), 1.0, 1.0, 0.3) == 0.0
    expected = 0.5 * 0.0 + 0.5 * (-np.log(4.0)) + np.log(2.5)
    assert jensen_gap(make_generator("burg"), 1.0, 4.0, 0.5) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.22314355131420976, abs=1e-15)


@pytest.mark.parametrize("name", GENERATOR_NAMES)
def test_jensen_gap_nonnegative_and_zero_on_diagonal(name, rng):
    gen = make_generator(name)
    x, y = _samples(gen, rng), _samples(gen, rng)
    for lam in (0.1, 0.5, 0.9):
        assert np.all(jensen_gap(gen, x, y, lam) >= -1e-12 * np.maximum(1, np.abs(gen.eval(x))))
        assert np.all(np.abs(jensen_gap(gen, x, x, lam)) <= 1e-12 * np.maximum(1, np.abs(gen.eval(x))))


def test_quadratic_gap_identity(rng):
    gen = make_generator("quadratic")
    x, y = rng.uniform(-3, 3, 1000), rng.uniform(-3, 3, 1000)
    for lam in (0.2, 0.5, 0.7):
        np.testing.assert_allclose(jensen_gap(gen, x, y, lam), lam * (1 - lam) * (x - y) ** 2,
                                   rtol=0, atol=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        jensen_gap(make_generator("burg"), 0.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        jensen_gap(make_generator("shannon"), -1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        jensen_gap(make_generator("shannon"), 1.0, 2.0, 1.0)


def test_zero_log_zero_boundary():
    sh = make_generator("shannon")
    assert sh(0.0) == 0.0
    assert jensen_gap(sh, 0.0, 1.0, 0.5) == pytest.approx(np.log(2) / 2)


def test_shannon_variants_induce_same_divergences(rng):
    a = as_vector_generator("shannon")
    b = as_vector_generator("shannon-xlogx")
    x, y = rng.dirichlet(np.ones(6)), rng.uniform(0.1, 3, 6)
    for lam in (0.1, 0.5):
        np.testing.assert_allclose(jensen_gap(a.base, x, y, lam), jensen_gap(b.base, x, y, lam),
                                   atol=1e-14)
    assert bregman(a, x, y) == pytest.approx(bregman(b, x, y), abs=1e-14)


def test_separable_sum(rng):
    gen = SeparableGenerator(make_generator("burg"), dimension=4)
    x = rng.uniform(0.5, 2, 4)
    assert gen.value(x) == pytest.approx(np.sum(-np.log(x)), abs=1e-14)
    with pytest.raises(DomainError):
        gen.check(np.ones(3))


def test_bregman_quadratic():
    assert bregman("quadratic", [1.0, 2.0], [3.0, 5.0]) == pytest.approx(13.0, abs=1e-12)
