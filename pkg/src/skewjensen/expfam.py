"""Exponential families in natural coordinates.

A family is written ``p(x; theta) = exp(<t(x), theta> - F(theta) + k(x))``.
Each :class:`ExponentialFamily` is also the :class:`VectorGenerator` of its
log-normalizer ``F``, so it plugs directly into the divergence and centroid
code.  Three families are provided: ``multinomial(d)`` (reference bin is
the last one), ``gaussian1d`` and ``poisson``.

KL between members is a Bregman divergence on swapped natural parameters,
and the skew Bhattacharyya coefficient is an (unscaled) Jensen gap of
``F``::

    -log int p^a q^(1-a) = a F(theta_p) + (1-a) F(theta_q) - F(a theta_p + (1-a) theta_q)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid
from scipy.special import gammaln

from .divergences import check_alpha, skew_jensen, sym_skew_jensen
from .errors import ConfigurationError, DomainError
from .generators import VectorGenerator, bregman as _bregman


class ExponentialFamily(VectorGenerator):
    """Log-normalizer of a family plus its source/natural parameter maps."""

    id = "family"
    natural_dim = 0
    sufficient_statistic = ""
    carrier = ""

    @property
    def name(self):
        return self.id

    def __eq__(self, other):
        return isinstance(other, ExponentialFamily) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"

    def _shape(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.natural_dim,):
            raise DomainError(
                f"{self.id}: expected {self.natural_dim} natural coordinates, got shape {x.shape}"
            )
        return x

    def to_natural(self, source) -> np.ndarray:
        raise NotImplementedError

    def to_source(self, theta) -> np.ndarray:
        raise NotImplementedError

    def log_density(self, x, theta):
        raise NotImplementedError(f"{self.id} has no pointwise density")


class Multinomial(ExponentialFamily):
    """Categorical distribution on ``d`` outcomes, order ``d - 1``.

    ``theta_i = log(p_i / p_d)`` and ``F(theta) = log(1 + sum exp(theta))``.
    """

    sufficient_statistic = "indicator vector of the first d-1 outcomes"
    carrier = "0"

    def __init__(self, d: int):
        if int(d) < 2:
            raise ConfigurationError("multinomial needs at least 2 outcomes")
        self.d = int(d)
        self.natural_dim = self.d - 1
        self.id = f"multinomial({self.d})"

    def contains(self, x, closed=False):
        x = np.asarray(x, dtype=float)
        return x.shape[-1:] == (self.natural_dim,) and bool(np.all(np.isfinite(x)))

    def value(self, theta):
        theta = self._shape(theta)
        zeros = np.zeros(theta.shape[:-1] + (1,))
        return np.logaddexp.reduce(np.concatenate([theta, zeros], axis=-1), axis=-1)

    def gradient(self, theta):
        theta = self._shape(theta)
        return np.exp(theta - self.value(theta)[..., None])

    def gradient_inverse(self, eta):
        eta = self._shape(eta)
        rest = 1.0 - np.sum(eta, axis=-1, keepdims=True)
        if np.any(eta <= 0) or np.any(rest <= 0):
            raise DomainError(f"{self.id}: expectation parameters outside the open simplex")
        return np.log(eta) - np.log(rest)

    def to_natural(self, source):
        p = np.asarray(source, dtype=float)
        if p.shape != (self.d,) or np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-9:
            raise DomainError(f"{self.id}: source must be a strictly positive histogram of {self.d} bins")
        return np.log(p[:-1]) - np.log(p[-1])

    def to_source(self, theta):
        theta = self.check(theta)
        # p_d = exp(-F) keeps relative precision when the reference bin is small
        return np.append(self.gradient(theta), np.exp(-self.value(theta)))


class Gaussian1D(ExponentialFamily):
    """Univariate normal; ``theta = (mu / s2, -1 / (2 s2))``."""

    id = "gaussian1d"
    natural_dim = 2
    sufficient_statistic = "(x, x^2)"
    carrier = "0"

    def contains(self, x, closed=False):
        x = np.asarray(x, dtype=float)
        return (x.shape[-1:] == (2,) and bool(np.all(np.isfinite(x)))
                and bool(np.all(x[..., 1] < 0)))

    def value(self, theta):
        theta = self._shape(theta)
        t1, t2 = theta[..., 0], theta[..., 1]
        return -t1 * t1 / (4.0 * t2) + 0.5 * np.log(-np.pi / t2)

    def gradient(self, theta):
        theta = self._shape(theta)
        t1, t2 = theta[..., 0], theta[..., 1]
        return np.stack([-t1 / (2.0 * t2), t1 * t1 / (4.0 * t2 * t2) - 1.0 / (2.0 * t2)], axis=-1)

    def gradient_inverse(self, eta):
        eta = self._shape(eta)
        mean = eta[..., 0]
        var = eta[..., 1] - mean * mean
        if np.any(var <= 0):
            raise DomainError("gaussian1d: second moment must exceed the squared mean")
        return np.stack([mean / var, -0.5 / var], axis=-1)

    def to_natural(self, source):
        mu, var = np.asarray(source, dtype=float)
        if not np.isfinite(mu) or not var > 0:
            raise DomainError("gaussian1d: source is (mu, sigma^2) with sigma^2 > 0")
        return np.array([mu / var, -0.5 / var])

    def to_source(self, theta):
        t1, t2 = self.check(theta)
        var = -0.5 / t2
        return np.array([t1 * var, var])

    def log_density(self, x, theta):
        t1, t2 = self.check(theta)
        x = np.asarray(x, dtype=float)
        return t1 * x + t2 * x * x - self.value(np.array([t1, t2]))


class Poisson(ExponentialFamily):
    """Poisson counts; ``theta = log(lambda)``, ``F = exp(theta)``."""

    id = "poisson"
    natural_dim = 1
    sufficient_statistic = "x"
    carrier = "-log(x!)"

    def contains(self, x, closed=False):
        x = np.asarray(x, dtype=float)
        return x.shape[-1:] == (1,) and bool(np.all(np.isfinite(x)))

    def value(self, theta):
        return np.exp(self._shape(theta)[..., 0])

    def gradient(self, theta):
        return np.exp(self._shape(theta))

    def gradient_inverse(self, eta):
        eta = self._shape(eta)
        if np.any(eta <= 0):
            raise DomainError("poisson: mean must be positive")
        return np.log(eta)

    def to_natural(self, source):
        lam = np.ravel(np.asarray(source, dtype=float))
        if lam.shape != (1,) or not lam[0] > 0:
            raise DomainError("poisson: source is a single rate lambda > 0")
        return np.log(lam)

    def to_source(self, theta):
        return np.exp(self.check(theta))

    def log_density(self, k, theta):
        (t,) = self.check(theta)
        k = np.asarray(k, dtype=float)
        return t * k - np.exp(t) - gammaln(k + 1.0)


FAMILY_NAMES = ("multinomial", "gaussian", "poisson")


def make_family(name: str, d: Optional[int] = None) -> ExponentialFamily:
    """``multinomial`` needs the outcome count ``d``; ``gaussian`` is 1-d."""
    if name == "multinomial":
        if d is None:
            raise ConfigurationError("multinomial family needs the number of bins")
        return Multinomial(d)
    if name in ("gaussian", "gaussian1d"):
        return Gaussian1D()
    if name == "poisson":
        return Poisson()
    raise ConfigurationError(f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}")


@dataclass(frozen=True)
class NaturalParam:
    theta: np.ndarray
    family: ExponentialFamily

    def __post_init__(self):
        theta = self.family.check(np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "theta", theta)


def _theta(family: ExponentialFamily, param) -> np.ndarray:
    if isinstance(param, NaturalParam):
        if param.family != family:
            raise ConfigurationError(f"family mismatch: {param.family.id} vs {family.id}")
        return param.theta
    return family.check(np.atleast_1d(np.asarray(param, dtype=float)))


def to_natural(family: ExponentialFamily, source) -> NaturalParam:
    return NaturalParam(family.to_natural(source), family)


def to_source(family: ExponentialFamily, theta) -> np.ndarray:
    return family.to_source(_theta(family, theta))


def bregman(F: VectorGenerator, theta_q, theta_p) -> float:
    """``B_F(theta_q : theta_p) = F(q) - F(p) - <q - p, grad F(p)>``."""
    if isinstance(F, ExponentialFamily):
        theta_q, theta_p = _theta(F, theta_q), _theta(F, theta_p)
    return float(_bregman(F, theta_q, theta_p))


def kl_expfam(family: ExponentialFamily, theta_p, theta_q) -> float:
    """``KL(p : q)`` for members given by natural parameters."""
    return bregman(family, theta_q, theta_p)


def jeffreys_expfam(family: ExponentialFamily, theta_p, theta_q) -> float:
    tp, tq = _theta(family, theta_p), _theta(family, theta_q)
    return float(np.dot(tp - tq, family.gradient(tp) - family.gradient(tq)))


def bhattacharyya_alpha(family: ExponentialFamily, theta_p, theta_q, alpha) -> float:
    """Skew Bhattacharyya divergence ``-log int p^a q^(1-a)``, in closed form.

    This is the unscaled Jensen gap of ``F`` with weight ``a`` on
    ``theta_p``, i.e. ``a (1 - a) * skew_jensen(F, theta_q, theta_p, a)``.
    """
    alpha = check_alpha(alpha, interior=True)
    tp, tq = _theta(family, theta_p), _theta(family, theta_q)
    return float(alpha * (1.0 - alpha) * skew_jensen(family, tq, tp, alpha))


def sym_bhattacharyya(family: ExponentialFamily, theta_p, theta_q, alpha) -> float:
    """Average of both orientations of :func:`bhattacharyya_alpha`."""
    return 0.5 * (bhattacharyya_alpha(family, theta_p, theta_q, alpha)
                  + bhattacharyya_alpha(family, theta_q, theta_p, alpha))


def sym_bhattacharyya_via_jensen(family: ExponentialFamily, theta_p, theta_q, alpha) -> float:
    """Same quantity as :func:`sym_bhattacharyya`, as ``a (1-a) sJ_F(theta_p, theta_q)``."""
    alpha = check_alpha(alpha, interior=True)
    tp, tq = _theta(family, theta_p), _theta(family, theta_q)
    return float(alpha * (1.0 - alpha) * sym_skew_jensen(family, tp, tq, alpha))


TAIL_MASS = 1e-12


def quadrature_bhattacharyya(family: ExponentialFamily, theta_p, theta_q, alpha,
                             grid: Optional[Sequence[float]] = None) -> float:
    """Evaluate ``-log int p^a q^(1-a)`` numerically.

    ``gaussian1d``: trapezoid rule; ``grid = (lo, hi, step)`` defaults to
    12 standard deviations beyond both means with step 1e-3.
    ``poisson``: direct summation over ``0..kmax``; ``grid = (kmax,)``
    defaults to the first count where both tails drop below 1e-12.
    Raises DomainError when the grid leaves more than 1e-12 of either
    density's mass uncovered.
    """
    alpha = check_alpha(alpha, interior=True)
    tp, tq = _theta(family, theta_p), _theta(family, theta_q)
    if isinstance(family, Gaussian1D):
        (mp, vp), (mq, vq) = family.to_source(tp), family.to_source(tq)
        sd = np.sqrt(max(vp, vq))
        if grid is None:
            lo, hi, step = min(mp, mq) - 12.0 * sd, max(mp, mq) + 12.0 * sd, 1e-3
        else:
            lo, hi, step = map(float, grid)
        for m, v in ((mp, vp), (mq, vq)):
            s = np.sqrt(v)
            tail = stats.norm.cdf(lo, m, s) + stats.norm.sf(hi, m, s)
            if tail > TAIL_MASS:
                raise DomainError(f"quadrature window [{lo}, {hi}] misses mass {tail:.3g}")
        n = int(np.ceil((hi - lo) / step))
        x = np.linspace(lo, hi, n + 1)
        logf = alpha * family.log_density(x, tp) + (1.0 - alpha) * family.log_density(x, tq)
        return float(-np.log(trapezoid(np.exp(logf), x)))
    if isinstance(family, Poisson):
        lp, lq = float(family.to_source(tp)[0]), float(family.to_source(tq)[0])
        if grid is None:
            kmax = int(max(stats.poisson.isf(TAIL_MASS / 10, lp), stats.poisson.isf(TAIL_MASS / 10, lq)))
        else:
            kmax = int(grid[0])
        tail = max(stats.poisson.sf(kmax, lp), stats.poisson.sf(kmax, lq))
        if tail > TAIL_MASS:
            raise DomainError(f"summation range 0..{kmax} misses mass {tail:.3g}")
        k = np.arange(kmax + 1, dtype=float)
        logf = alpha * family.log_density(k, tp) + (1.0 - alpha) * family.log_density(k, tq)
        return float(-np.log(np.sum(np.exp(logf))))
    raise ConfigurationError(f"no pointwise density available for {family.id}")
