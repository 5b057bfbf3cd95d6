"""Strictly convex generators and their gradients.

A :class:`ConvexGenerator` is a scalar function ``F`` together with its
derivative and the inverse of that derivative.  Everything in the package
that needs a generator on vectors goes through the small
:class:`VectorGenerator` interface; :class:`SeparableGenerator` lifts a
scalar generator to vectors by summing coordinates, and the exponential
family log-normalizers in :mod:`skewjensen.expfam` implement the same
interface without being separable.

All logarithms are natural.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import xlogy

from .errors import ConfigurationError, DomainError

ArrayFunc = Callable[[np.ndarray], np.ndarray]

# Identifiers understood by the compiled/fallback kernels (see _kernels_py).
KERNEL_SHANNON = 0
KERNEL_BURG = 1
KERNEL_QUADRATIC = 2


@dataclass(frozen=True)
class ConvexGenerator:
    """Strictly convex scalar function with hand-coded derivatives.

    ``domain`` is the open interval where ``grad`` is finite.  When
    ``closed_lower`` is set, ``eval`` also accepts the lower end point
    (continuous extension, e.g. ``0 log 0 = 0``).  All callables are
    vectorized over numpy arrays.
    """

    name: str
    domain: tuple
    eval: ArrayFunc
    grad: ArrayFunc
    grad_inv: ArrayFunc
    hess: ArrayFunc
    closed_lower: bool = False
    kernel_id: Optional[int] = field(default=None, compare=False)

    def __call__(self, x):
        return self.eval(self.check(x, closed=self.closed_lower))

    def in_domain(self, x, closed: bool = False) -> bool:
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        lower_ok = (x >= lo) if closed else (x > lo)
        return bool(np.all(lower_ok & (x < hi)))

    def check(self, x, closed: bool = False) -> np.ndarray:
        """Return ``x`` as a float array, raising DomainError if outside."""
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)):
            raise DomainError(f"{self.name}: NaN argument")
        if not self.in_domain(x, closed=closed):
            lo, hi = self.domain
            bad = x[(x <= lo) | (x >= hi)] if x.ndim else x
            raise DomainError(
                f"{self.name}: argument {np.ravel(bad)[:3]} outside domain ({lo}, {hi})"
            )
        return x


def _shannon_eval(x):
    return xlogy(x, x) - x


def _shannon_xlogx_eval(x):
    return xlogy(x, x)


def _log(x):
    return np.log(x)


def _exp(y):
    return np.exp(y)


def _inv(x):
    return 1.0 / x


def _burg_eval(x):
    return -np.log(x)


def _burg_grad(x):
    return -1.0 / x


def _burg_hess(x):
    return 1.0 / (x * x)


def _square(x):
    return x * x


def _double(x):
    return 2.0 * x


def _half(y):
    return 0.5 * y


def _two(x):
    return np.full_like(np.asarray(x, dtype=float), 2.0)


_POS = (0.0, np.inf)
_REAL = (-np.inf, np.inf)

_REGISTRY = {
    # F(x) = x log x - x
    "shannon": lambda: ConvexGenerator(
        "shannon", _POS, _shannon_eval, _log, _exp, _inv,
        closed_lower=True, kernel_id=KERNEL_SHANNON,
    ),
    # F(x) = x log x; differs from "shannon" by a linear term, so every
    # Jensen gap and Bregman divergence it induces is identical.
    "shannon-xlogx": lambda: ConvexGenerator(
        "shannon-xlogx", _POS, _shannon_xlogx_eval,
        lambda x: np.log(x) + 1.0, lambda y: np.exp(y - 1.0), _inv,
        closed_lower=True, kernel_id=KERNEL_SHANNON,
    ),
    "burg": lambda: ConvexGenerator(
        "burg", _POS, _burg_eval, _burg_grad, _burg_grad, _burg_hess,
        kernel_id=KERNEL_BURG,
    ),
    "quadratic": lambda: ConvexGenerator(
        "quadratic", _REAL, _square, _double, _half, _two,
        kernel_id=KERNEL_QUADRATIC,
    ),
}

GENERATOR_NAMES = tuple(_REGISTRY)


def make_generator(name: str) -> ConvexGenerator:
    """Look up a named scalar generator.

    >>> make_generator("burg").grad(2.0)
    -0.5
    """
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown generator {name!r}; expected one of {', '.join(GENERATOR_NAMES)}"
        ) from None


def jensen_gap(F: ConvexGenerator, x, y, lam):
    """``lam*F(x) + (1-lam)*F(y) - F(lam*x + (1-lam)*y)``, elementwise."""
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise DomainError(f"mixing weight must lie in (0, 1), got {lam}")
    x = F.check(x, closed=F.closed_lower)
    y = F.check(y, closed=F.closed_lower)
    return lam * F.eval(x) + (1.0 - lam) * F.eval(y) - F.eval(lam * x + (1.0 - lam) * y)


class VectorGenerator:
    """Convex function on R^d with gradient and inverse gradient.

    Subclasses provide ``value`` (scalar), ``gradient`` and
    ``gradient_inverse`` (vectors) and ``contains``.  Batched inputs of
    shape ``(..., d)`` are supported by every method; ``value`` then
    reduces over the last axis only.
    """

    name = "vector"
    #: scalar base generator when the function is a coordinate sum
    base: Optional[ConvexGenerator] = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def gradient_inverse(self, y):
        raise NotImplementedError

    def contains(self, x, closed: bool = False) -> bool:
        raise NotImplementedError

    def check(self, x, closed: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)) or not self.contains(x, closed=closed):
            raise DomainError(f"{self.name}: point outside the generator domain")
        return x

    @property
    def separable(self) -> bool:
        return self.base is not None


class SeparableGenerator(VectorGenerator):
    """Coordinate-sum lift ``F(x) = sum_i f(x_i)`` of a scalar generator."""

    def __init__(self, base: ConvexGenerator, dimension: Optional[int] = None):
        if dimension is not None and dimension < 1:
            raise ConfigurationError("dimension must be a positive integer")
        self.base = base
        self.dimension = dimension
        self.name = base.name

    def __repr__(self):
        return f"SeparableGenerator({self.base.name!r}, dimension={self.dimension})"

    def _shape_ok(self, x):
        if self.dimension is not None and np.shape(x)[-1:] != (self.dimension,):
            raise DomainError(
                f"{self.name}: expected dimension {self.dimension}, got shape {np.shape(x)}"
            )

    def contains(self, x, closed: bool = False) -> bool:
        return self.base.in_domain(x, closed=closed)

    def check(self, x, closed: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim:
            self._shape_ok(x)
        return self.base.check(x, closed=closed)

    def value(self, x):
        return np.sum(self.base.eval(np.asarray(x, dtype=float)), axis=-1)

    def gradient(self, x):
        return self.base.grad(np.asarray(x, dtype=float))

    def gradient_inverse(self, y):
        return self.base.grad_inv(np.asarray(y, dtype=float))

    def hessian_diagonal(self, x):
        return self.base.hess(np.asarray(x, dtype=float))

    @property
    def closed_lower(self) -> bool:
        return self.base.closed_lower

    @property
    def kernel_id(self):
        return self.base.kernel_id


GeneratorLike = Union[str, ConvexGenerator, VectorGenerator]


def as_vector_generator(gen: GeneratorLike) -> VectorGenerator:
    """Accept a name, a scalar generator, or a vector generator."""
    if isinstance(gen, VectorGenerator):
        return gen
    if isinstance(gen, str):
        gen = make_generator(gen)
    if isinstance(gen, ConvexGenerator):
        return SeparableGenerator(gen)
    raise ConfigurationError(f"cannot use {gen!r} as a generator")


def bregman(F: GeneratorLike, x, y):
    """Bregman divergence ``F(x) - F(y) - <x - y, grad F(y)>``.

    Reduces over the last axis, so batches of points broadcast.
    """
    F = as_vector_generator(F)
    x = np.atleast_1d(F.check(x, closed=getattr(F, "closed_lower", False)))
    y = np.atleast_1d(F.check(y))
    return F.value(x) - F.value(y) - np.sum((x - y) * F.gradient(y), axis=-1)
