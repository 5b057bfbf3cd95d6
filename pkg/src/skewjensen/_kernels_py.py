"""Pure-numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``SKEWJENSEN_PURE=1`` is set.  Generator ids:
0 = shannon (x log x - x), 1 = burg (-log x), 2 = quadratic (x^2).
"""
import numpy as np
from scipy.special import xlogy


def _funcs(gen_id):
    if gen_id == 0:
        return (lambda x: xlogy(x, x) - x), np.log, np.exp
    if gen_id == 1:
        return (lambda x: -np.log(x)), (lambda x: -1.0 / x), (lambda y: -1.0 / y)
    if gen_id == 2:
        return (lambda x: x * x), (lambda x: 2.0 * x), (lambda y: 0.5 * y)
    raise ValueError(f"unknown kernel generator id {gen_id}")


def sym_jensen_matrix(X, C, alpha, gen_id):
    """Pairwise symmetrized skew Jensen divergences, shape ``(n, k)``."""
    F, g, _ = _funcs(gen_id)
    X = np.ascontiguousarray(X, dtype=float)
    C = np.ascontiguousarray(C, dtype=float)
    x = X[:, None, :]
    c = C[None, :, :]
    if alpha == 0.0 or alpha == 1.0:
        return 0.5 * np.sum((x - c) * (g(x) - g(c)), axis=-1)
    b = 1.0 - alpha
    terms = F(x) + F(c) - F(alpha * x + b * c) - F(b * x + alpha * c)
    return np.sum(terms, axis=-1) / (2.0 * alpha * b)


def cccp_energy(P, w, alpha, gen_id, c):
    F, _, _ = _funcs(gen_id)
    b = 1.0 - alpha
    terms = F(P) + F(c)[None, :] - F(alpha * P + b * c) - F(alpha * c + b * P)
    return float(np.dot(w, np.sum(terms, axis=1)))


def cccp_step(P, w, alpha, gen_id, c):
    _, g, ginv = _funcs(gen_id)
    b = 1.0 - alpha
    s = b * g(alpha * P + b * c) + alpha * g(alpha * c + b * P)
    return ginv(w @ s)


def cccp_solve(P, w, alpha, gen_id, c0, tol, max_iter):
    """Iterate the CCCP update from ``c0``.

    Returns ``(center, iterations, energies, residual, converged)`` where
    ``energies[t]`` is the energy of the t-th iterate.
    """
    P = np.ascontiguousarray(P, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    c = np.array(c0, dtype=float)
    energies = [cccp_energy(P, w, alpha, gen_id, c)]
    residual = np.inf
    it = 0
    while it < max_iter:
        nxt = cccp_step(P, w, alpha, gen_id, c)
        residual = float(np.max(np.abs(nxt - c)))
        c = nxt
        it += 1
        energies.append(cccp_energy(P, w, alpha, gen_id, c))
        if residual <= tol:
            break
    return c, it, np.asarray(energies), residual, residual <= tol
