"""Barycenters for the symmetrized skew Jensen divergence.

The weighted objective splits into a convex part ``F(c)`` and a concave
part, so the concave-convex procedure gives a monotone fixed-point
iteration::

    grad F(c') = sum_i w_i ((1-a) grad F(a p_i + (1-a) c) + a grad F(a c + (1-a) p_i))

For Shannon at ``a = 1/2`` this is a geometric-mean update, for Burg a
harmonic-mean update.  Separable named generators run through the
compiled kernel (see ``_backend``); any other generator, including the
exponential-family log-normalizers, goes through the numpy loop here.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from . import _backend
from .divergences import check_alpha
from .errors import ConfigurationError, DomainError, NumericalError
from .generators import GeneratorLike, VectorGenerator, as_vector_generator

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000
WEIGHT_TOL = 1e-12
ENERGY_SLACK = 1e-12


@dataclass
class CentroidProblem:
    """Weighted points, skew parameter and generator.

    ``points`` has shape ``(n, d)``; a flat sequence is read as ``n``
    scalar points.  ``weights`` defaults to uniform.
    """

    points: Any
    weights: Any = None
    alpha: float = 0.5
    generator: GeneratorLike = "shannon"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ConfigurationError("points must be a non-empty (n, d) array")
        n = pts.shape[0]
        w = np.full(n, 1.0 / n) if self.weights is None else np.asarray(self.weights, dtype=float)
        if w.shape != (n,):
            raise ConfigurationError(f"expected {n} weights, got shape {w.shape}")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ConfigurationError("weights must be positive and sum to 1")
        gen = as_vector_generator(self.generator)
        gen.check(pts)
        self.points = pts
        self.weights = w
        self.alpha = check_alpha(self.alpha)
        self.generator = gen

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass
class CentroidResult:
    center: Any
    iterations: int
    energy_trace: List[float] = field(repr=False)
    converged: bool
    residual: float
    init: str = "arithmetic"

    def to_dict(self):
        center = getattr(self.center, "theta", self.center)
        return {
            "center": [float(v) for v in np.ravel(center)],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "residual": float(self.residual),
            "energy_trace": [float(e) for e in self.energy_trace],
        }


def _kernel_id(problem: CentroidProblem) -> Optional[int]:
    return getattr(problem.generator, "kernel_id", None)


def energy(problem: CentroidProblem, c) -> float:
    """``sum_i w_i (F(p_i) + F(c) - F(a p_i + (1-a) c) - F(a c + (1-a) p_i))``.

    ``2 a (1-a)`` times the weighted divergence to ``c``; same minimizer.
    """
    F, P, a = problem.generator, problem.points, problem.alpha
    c = F.check(np.broadcast_to(np.asarray(c, dtype=float), (problem.dim,)))
    b = 1.0 - a
    per_point = F.value(P) + F.value(c) - F.value(a * P + b * c) - F.value(a * c + b * P)
    return float(np.dot(problem.weights, per_point))


def init_arithmetic(problem: CentroidProblem) -> np.ndarray:
    return problem.weights @ problem.points


def init_quasi_arithmetic(problem: CentroidProblem) -> np.ndarray:
    """``(grad F)^-1 (sum_i w_i grad F(p_i))``: geometric mean for Shannon, harmonic for Burg."""
    F = problem.generator
    return F.gradient_inverse(problem.weights @ F.gradient(problem.points))


def cccp_step(problem: CentroidProblem, c) -> np.ndarray:
    F, P, a = problem.generator, problem.points, problem.alpha
    c = F.check(np.asarray(c, dtype=float))
    if a in (0.0, 1.0):
        raise DomainError("the CCCP update degenerates at alpha in {0, 1}")
    b = 1.0 - a
    s = b * F.gradient(a * P + b * c) + a * F.gradient(a * c + b * P)
    return F.gradient_inverse(problem.weights @ s)


def _generic_solve(problem, c0, tol, max_iter):
    c = np.array(c0, dtype=float)
    trace = [energy(problem, c)]
    residual, it = np.inf, 0
    while it < max_iter:
        nxt = cccp_step(problem, c)
        residual = float(np.max(np.abs(nxt - c)))
        c = nxt
        it += 1
        trace.append(energy(problem, c))
        if residual <= tol:
            break
    return c, it, np.asarray(trace), residual, residual <= tol


def check_monotone(trace, slack: float = ENERGY_SLACK) -> None:
    """Raise NumericalError if an energy trace increases beyond ``slack``."""
    trace = np.asarray(trace, dtype=float)
    if trace.size < 2:
        return
    allowed = slack * np.maximum(1.0, np.abs(trace[:-1]))
    bad = np.nonzero(np.diff(trace) > allowed)[0]
    if bad.size:
        t = int(bad[0])
        raise NumericalError(
            f"CCCP energy increased at step {t + 1}: {float(trace[t])!r} -> {float(trace[t + 1])!r}"
        )


def _endpoint_energy(problem, c):
    F, P = problem.generator, problem.points
    c = np.asarray(c, dtype=float)
    per_point = 0.5 * np.sum((P - c) * (F.gradient(P) - F.gradient(c)), axis=-1)
    return float(np.dot(problem.weights, per_point))


def _endpoint_solve(problem, c0, tol, max_iter):
    """Minimize the Jeffreys-type limit objective ``sum w (B(p:c) + B(c:p)) / 2``.

    Separable generators: bisection on each coordinate's derivative, which
    changes sign between the smallest and largest coordinate of the data.
    """
    F, P, w = problem.generator, problem.points, problem.weights
    start = _endpoint_energy(problem, c0)
    if F.separable and hasattr(F, "hessian_diagonal"):
        gbar = w @ F.gradient(P)
        pbar = w @ P

        def slope(c):
            return -0.5 * ((gbar - F.gradient(c)) + F.hessian_diagonal(c) * (pbar - c))

        lo, hi = P.min(axis=0), P.max(axis=0)
        it = 0
        while it < max_iter and np.max(hi - lo) > tol * np.maximum(1.0, np.max(np.abs(hi))):
            mid = 0.5 * (lo + hi)
            s = slope(mid)
            lo = np.where(s < 0, mid, lo)
            hi = np.where(s < 0, hi, mid)
            it += 1
            if np.all(mid == 0.5 * (lo + hi)):
                break
        c = 0.5 * (lo + hi)
        residual = float(np.max(hi - lo))
        return c, it, np.array([start, _endpoint_energy(problem, c)]), residual, True
    res = minimize(lambda c: _endpoint_energy(problem, c), np.asarray(c0, dtype=float),
                   method="L-BFGS-B", options={"maxiter": max_iter, "gtol": tol, "ftol": 1e-15})
    c = res.x
    return c, int(res.nit), np.array([start, _endpoint_energy(problem, c)]), float(
        np.max(np.abs(res.jac))), bool(res.success)


def solve_centroid(problem: CentroidProblem, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER,
                   init: Union[str, Sequence[float]] = "arithmetic",
                   use_kernels: bool = True) -> CentroidResult:
    """Run CCCP until the sup-norm step is at most ``tol``.

    ``init`` is ``"arithmetic"``, ``"quasi-arithmetic"`` or an explicit
    starting point (used by k-means to warm start).  Hitting ``max_iter``
    is reported through ``converged=False``, not raised.  An energy
    increase beyond round-off raises :class:`NumericalError`.

    At ``alpha`` in {0, 1} the update degenerates; the limit objective
    ``sum_i w_i (B_F(p_i:c) + B_F(c:p_i)) / 2`` is minimized directly.
    """
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    if max_iter < 1:
        raise ConfigurationError("max_iter must be at least 1")
    if isinstance(init, str):
        label = {"arith": "arithmetic", "quasi": "quasi-arithmetic"}.get(init, init)
        if label == "arithmetic":
            c0 = init_arithmetic(problem)
        elif label == "quasi-arithmetic":
            c0 = init_quasi_arithmetic(problem)
        else:
            raise ConfigurationError(f"unknown initialization {init!r}")
    else:
        label = "explicit"
        c0 = problem.generator.check(np.asarray(init, dtype=float).reshape(problem.dim))

    if problem.n == 1:
        c = problem.points[0].copy()
        e = energy(problem, c) if problem.alpha not in (0.0, 1.0) else 0.0
        return CentroidResult(c, 0, [e], True, 0.0, label)

    if problem.alpha in (0.0, 1.0):
        c, it, trace, residual, ok = _endpoint_solve(problem, c0, tol, max_iter)
    else:
        kid = _kernel_id(problem)
        if use_kernels and kid is not None:
            c, it, trace, residual, ok = _backend.kernels.cccp_solve(
                problem.points, problem.weights, problem.alpha, kid, c0, tol, max_iter)
        else:
            c, it, trace, residual, ok = _generic_solve(problem, c0, tol, max_iter)
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)) or not problem.generator.contains(c):
        raise NumericalError(f"CCCP left the generator domain: {c}")
    check_monotone(trace)
    return CentroidResult(c, int(it), [float(e) for e in trace], bool(ok), float(residual), label)


def centroid_expfam(family, params, weights=None, alpha=0.5, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER, init="arithmetic") -> CentroidResult:
    """Symmetrized Bhattacharyya centroid of family members.

    Solved on natural parameters with the log-normalizer as generator; the
    returned ``center`` is a :class:`~skewjensen.expfam.NaturalParam`.
    """
    from .expfam import NaturalParam, _theta

    thetas = np.stack([_theta(family, p) for p in params])
    problem = CentroidProblem(thetas, weights, alpha, family)
    result = solve_centroid(problem, tol=tol, max_iter=max_iter, init=init)
    return dataclasses.replace(result, center=NaturalParam(result.center, family))
