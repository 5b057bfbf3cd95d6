"""Statistical distances on discrete histograms and positive measures.

Histograms are 1-d arrays of non-negative reals summing to one (at least
two bins).  Positive measures drop the normalization.  The generator-based
family (``skew_jensen``, ``sym_skew_jensen``, ``s_param``) works on any
vectors in the generator domain and reduces over the last axis, so stacks
of points of shape ``(..., d)`` can be evaluated in one call.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, List, Tuple

import numpy as np
from scipy.special import entr, rel_entr, xlogy

from .errors import DomainError
from .generators import (
    ConvexGenerator,
    GeneratorLike,
    as_vector_generator,
    bregman,
    make_generator,
)

HIST_SUM_TOL = 1e-9


# --------------------------------------------------------------------------
# argument checking

def as_histogram(p, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise DomainError(f"{name}: a histogram is a 1-d vector with at least 2 bins")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DomainError(f"{name}: histogram bins must be finite and non-negative")
    if abs(p.sum() - 1.0) > HIST_SUM_TOL:
        raise DomainError(f"{name}: histogram sums to {float(p.sum())!r}, not 1")
    return p


def as_measure(p, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DomainError(f"{name}: a positive measure is a non-empty 1-d vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DomainError(f"{name}: entries must be finite and non-negative")
    if not np.any(p > 0):
        raise DomainError(f"{name}: at least one entry must be positive")
    return p


def _hist_pair(p, q):
    p, q = as_histogram(p, "p"), as_histogram(q, "q")
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.size} vs {q.size}")
    return p, q


def check_alpha(alpha, interior: bool = False) -> float:
    """Validate a skew parameter; ``interior`` excludes the end points."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if interior and alpha in (0.0, 1.0):
        raise DomainError(f"alpha must lie in the open interval (0, 1), got {alpha}")
    return alpha


# --------------------------------------------------------------------------
# Shannon quantities

def entropy(p) -> float:
    """Shannon entropy ``-sum p log p`` in nats."""
    return float(np.sum(entr(as_histogram(p))))


def cross_entropy(p, q) -> float:
    """``-sum p log q``; infinite if ``q`` vanishes where ``p`` does not."""
    p, q = _hist_pair(p, q)
    return float(-np.sum(xlogy(p, q)))


def kl(p, q) -> float:
    """Kullback-Leibler divergence ``sum p log(p/q)``."""
    p, q = _hist_pair(p, q)
    return float(np.sum(rel_entr(p, q)))


def ekl(p, q) -> float:
    """Extended KL for unnormalized measures, ``sum p log(p/q) + q - p``.

    Returns ``inf`` when some ``q_i = 0 < p_i``.
    """
    p, q = as_measure(p, "p"), as_measure(q, "q")
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.size} vs {q.size}")
    return float(np.sum(rel_entr(p, q) + q - p))


def jeffreys(p, q) -> float:
    """Symmetric ``sum (p - q) log(p/q)``, i.e. KL(p:q) + KL(q:p)."""
    p, q = _hist_pair(p, q)
    return float(np.sum(rel_entr(p, q) + rel_entr(q, p)))


def js(p, q) -> float:
    """Jensen-Shannon divergence ``H((p+q)/2) - (H(p)+H(q))/2``."""
    p, q = _hist_pair(p, q)
    m = 0.5 * (p + q)
    return float(0.5 * np.sum(rel_entr(p, m) + rel_entr(q, m)))


def k_div(p, q) -> float:
    """``KL(p : (p+q)/2)``."""
    p, q = _hist_pair(p, q)
    return float(np.sum(rel_entr(p, 0.5 * (p + q))))


def k_alpha(p, q, alpha) -> float:
    """Skewed K divergence ``KL(p : (1-alpha) p + alpha q)``."""
    alpha = check_alpha(alpha)
    p, q = _hist_pair(p, q)
    return float(np.sum(rel_entr(p, (1.0 - alpha) * p + alpha * q)))


def js_alpha(p, q, alpha) -> float:
    """``(K_alpha(p:q) + K_alpha(q:p)) / 2``; JS at 1/2, half Jeffreys at 1."""
    return 0.5 * (k_alpha(p, q, alpha) + k_alpha(q, p, alpha))


# --------------------------------------------------------------------------
# phi-divergences

@dataclass(frozen=True)
class PhiGenerator:
    """Convex ``phi`` with ``phi(1) = 0`` defining ``I_phi(p:q) = sum q phi(p/q)``."""

    phi: Callable[[np.ndarray], np.ndarray]
    label: str

    def __call__(self, u):
        return self.phi(np.asarray(u, dtype=float))


def phi_divergence(phi: PhiGenerator, p, q) -> float:
    p, q = _hist_pair(p, q)
    if np.any(q <= 0):
        raise DomainError("phi-divergence needs q > 0 in every bin")
    with np.errstate(divide="raise", invalid="raise"):
        try:
            vals = phi(p / q)
        except FloatingPointError as exc:
            raise DomainError(f"{phi.label}: ratio outside the domain of phi") from exc
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"{phi.label}: ratio outside the domain of phi")
    return float(np.sum(q * vals))


def couple_phi(phi: PhiGenerator) -> PhiGenerator:
    """Coupled generator ``u * phi(1/u)``, which swaps the argument order."""
    f = phi.phi

    def coupled(u):
        u = np.asarray(u, dtype=float)
        return u * f(1.0 / u)

    label = phi.label[:-1] if phi.label.endswith("*") else phi.label + "*"
    return PhiGenerator(coupled, label)


def symmetrize_phi(phi: PhiGenerator) -> PhiGenerator:
    """``phi + phi*``; its divergence is symmetric in (p, q)."""
    f, g = phi.phi, couple_phi(phi).phi
    return PhiGenerator(lambda u: f(u) + g(u), f"{phi.label}+{phi.label}*")


PHI_NEG_LOG = PhiGenerator(lambda u: -np.log(u), "-log u")
PHI_U_LOG_U = PhiGenerator(lambda u: xlogy(u, u), "u log u")
PHI_JEFFREYS = PhiGenerator(lambda u: (u - 1.0) * np.log(u), "(u-1) log u")
# I_phi = K(p:q)/2
PHI_HALF_K = PhiGenerator(lambda u: 0.5 * u * np.log(2.0 * u / (1.0 + u)), "u/2 log(2u/(1+u))")


def phi_k_alpha(alpha) -> PhiGenerator:
    """Generator whose divergence is ``K_alpha(p:q)``: ``-u log((1-a) + a/u)``."""
    a = check_alpha(alpha)
    return PhiGenerator(lambda u: -u * np.log((1.0 - a) + a / u), f"phi_{a}")


def phi_js_alpha(alpha) -> PhiGenerator:
    """Generator whose divergence is ``2 JS_alpha``."""
    return symmetrize_phi(phi_k_alpha(alpha))


# --------------------------------------------------------------------------
# alpha-skew Jensen family

def _vector_pair(F, p, q):
    F = as_vector_generator(F)
    closed = getattr(F, "closed_lower", False)
    p = np.atleast_1d(F.check(p, closed=closed))
    q = np.atleast_1d(F.check(q, closed=closed))
    if p.shape[-1] != q.shape[-1]:
        raise DomainError(f"dimension mismatch: {p.shape[-1]} vs {q.shape[-1]}")
    return F, p, q


def skew_jensen(F: GeneratorLike, p, q, alpha):
    """Skew Jensen divergence with mixing weight ``alpha`` on ``q``::

        ((1-a) F(p) + a F(q) - F((1-a) p + a q)) / (a (1-a))

    At the end points the Bregman limits are returned: ``B_F(q:p)`` for
    ``alpha = 0`` and ``B_F(p:q)`` for ``alpha = 1``.
    """
    alpha = check_alpha(alpha)
    F, p, q = _vector_pair(F, p, q)
    if alpha == 0.0:
        return bregman(F, q, p)
    if alpha == 1.0:
        return bregman(F, p, q)
    b = 1.0 - alpha
    gap = b * F.value(p) + alpha * F.value(q) - F.value(b * p + alpha * q)
    return gap / (alpha * b)


def sym_skew_jensen(F: GeneratorLike, p, q, alpha):
    """Symmetrized skew Jensen divergence, the average of both orientations.

    Interior values use the closed form with prefactor ``1/(2a(1-a))``;
    ``alpha`` in {0, 1} gives the limit ``(B_F(p:q) + B_F(q:p)) / 2``.
    """
    alpha = check_alpha(alpha)
    F, p, q = _vector_pair(F, p, q)
    if alpha in (0.0, 1.0):
        return 0.5 * np.sum((p - q) * (F.gradient(p) - F.gradient(q)), axis=-1)
    b = 1.0 - alpha
    num = F.value(p) + F.value(q) - F.value(alpha * p + b * q) - F.value(b * p + alpha * q)
    return num / (2.0 * alpha * b)


def skl_alpha(p, q, alpha) -> float:
    """Symmetric KL family written with entropies.

    Equals ``4 * js`` at ``alpha = 1/2`` and tends to ``jeffreys / 2`` at
    the end points, which are returned exactly.
    """
    alpha = check_alpha(alpha)
    p, q = _hist_pair(p, q)
    if alpha in (0.0, 1.0):
        return 0.5 * float(np.sum(rel_entr(p, q) + rel_entr(q, p)))
    b = 1.0 - alpha
    num = (np.sum(entr(alpha * p + b * q)) + np.sum(entr(b * p + alpha * q))
           - np.sum(entr(p)) - np.sum(entr(q)))
    return float(num / (2.0 * alpha * b))


def l_alpha(p, q, alpha) -> float:
    """``(H((1-a) p + a q) - H(p)) / (a (1-a))``.

    Not sign-definite on its own; only the symmetric sum
    ``(l_alpha(p, q) + l_alpha(q, p)) / 2 = skl_alpha(p, q)`` is.
    """
    alpha = check_alpha(alpha, interior=True)
    p, q = _hist_pair(p, q)
    b = 1.0 - alpha
    return float((np.sum(entr(b * p + alpha * q)) - np.sum(entr(p))) / (alpha * b))


def s_param(F: GeneratorLike, p, q, alpha_prime):
    """Centered parametrization on ``[-1, 1]``; ``s_param(a') = sym_skew_jensen((1-a')/2)``."""
    ap = float(alpha_prime)
    if not -1.0 <= ap <= 1.0:
        raise DomainError(f"alpha' must lie in [-1, 1], got {ap}")
    if abs(ap) == 1.0:
        return sym_skew_jensen(F, p, q, 0.5 * (1.0 - ap))
    F, p, q = _vector_pair(F, p, q)
    lo, hi = 0.5 * (1.0 - ap), 0.5 * (1.0 + ap)
    num = F.value(p) + F.value(q) - F.value(lo * p + hi * q) - F.value(hi * p + lo * q)
    return 2.0 / (1.0 - ap * ap) * num


def scalar_sj(F: ConvexGenerator, x, y, alpha):
    """Scalar base distance of :func:`sym_skew_jensen`, elementwise in x, y."""
    if isinstance(F, str):
        F = make_generator(F)
    alpha = check_alpha(alpha, interior=True)
    x = F.check(x, closed=F.closed_lower)
    y = F.check(y, closed=F.closed_lower)
    b = 1.0 - alpha
    return (F.eval(x) + F.eval(y) - F.eval(alpha * x + b * y)
            - F.eval(b * x + alpha * y)) / (2.0 * alpha * b)


def scalar_profile(F: ConvexGenerator, x: float, y: float,
                   alpha_grid: Iterable[float],
                   t_grid: Iterable[float]) -> List[Tuple[float, float, float]]:
    """Tabulate the scalar distance along the segment from ``x`` to ``y``.

    Row ``(alpha, t, sj)`` holds ``scalar_sj(F, (1-t) x + t y, y, alpha)``,
    so ``t = 1`` is always zero.  Meant for plotting the family against
    its first argument.
    """
    if isinstance(F, str):
        F = make_generator(F)
    alphas = [float(a) for a in alpha_grid]
    ts = np.asarray([float(t) for t in t_grid])
    if not alphas or ts.size == 0:
        raise DomainError("profile grids must be non-empty")
    for a in alphas:
        if not 0.0 < a <= 0.5:
            raise DomainError(f"profile alpha values must lie in (0, 1/2], got {a}")
    xt = (1.0 - ts) * x + ts * y
    rows = []
    for a in alphas:
        vals = scalar_sj(F, xt, np.full_like(xt, y), a)
        rows.extend((a, float(t), float(v)) for t, v in zip(ts, vals))
    return rows
