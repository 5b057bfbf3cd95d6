# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise divergence matrix and the CCCP loop.

Same signatures and semantics as ``_kernels_py``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, fabs, INFINITY

cnp.import_array()


cdef inline double _F(double x, int gen) noexcept nogil:
    if gen == 0:
        if x == 0.0:
            return 0.0
        return x * log(x) - x
    elif gen == 1:
        return -log(x)
    return x * x


cdef inline double _g(double x, int gen) noexcept nogil:
    if gen == 0:
        return log(x)
    elif gen == 1:
        return -1.0 / x
    return 2.0 * x


cdef inline double _ginv(double y, int gen) noexcept nogil:
    if gen == 0:
        return exp(y)
    elif gen == 1:
        return -1.0 / y
    return 0.5 * y


cdef int _check_gen(int gen_id) except -1:
    if gen_id < 0 or gen_id > 2:
        raise ValueError(f"unknown kernel generator id {gen_id}")
    return 0


cdef inline void _Fg(double x, int gen, double* f, double* g) noexcept nogil:
    # F(x) and grad F(x) sharing one transcendental call
    cdef double lx
    if gen == 0:
        lx = log(x)
        g[0] = lx
        f[0] = 0.0 if x == 0.0 else x * lx - x
    elif gen == 1:
        g[0] = -1.0 / x
        f[0] = -log(x)
    else:
        g[0] = 2.0 * x
        f[0] = x * x


def sym_jensen_matrix(X, C, double alpha, int gen_id):
    """Pairwise symmetrized skew Jensen divergences, shape ``(n, k)``."""
    _check_gen(gen_id)
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] c = np.ascontiguousarray(C, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], k = c.shape[0], d = x.shape[1]
    if c.shape[1] != d:
        raise ValueError("dimension mismatch")
    out_arr = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    # per-row constants: sum F(x) off the endpoint, grad F(x) at it
    xs_arr = np.empty(n, dtype=np.float64)
    cs_arr = np.empty(k, dtype=np.float64)
    gx_arr = np.empty((n, d), dtype=np.float64)
    gc_arr = np.empty((k, d), dtype=np.float64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] cs = cs_arr
    cdef double[:, ::1] gx = gx_arr
    cdef double[:, ::1] gc = gc_arr
    cdef double b = 1.0 - alpha
    cdef double scale, acc, xi, ci
    cdef Py_ssize_t i, j, t
    cdef bint endpoint = alpha == 0.0 or alpha == 1.0
    scale = 0.5 if endpoint else 1.0 / (2.0 * alpha * b)
    with nogil:
        if endpoint:
            for i in range(n):
                for t in range(d):
                    gx[i, t] = _g(x[i, t], gen_id)
            for j in range(k):
                for t in range(d):
                    gc[j, t] = _g(c[j, t], gen_id)
            for i in range(n):
                for j in range(k):
                    acc = 0.0
                    for t in range(d):
                        acc += (x[i, t] - c[j, t]) * (gx[i, t] - gc[j, t])
                    out[i, j] = acc * scale
        else:
            for i in range(n):
                acc = 0.0
                for t in range(d):
                    acc += _F(x[i, t], gen_id)
                xs[i] = acc
            for j in range(k):
                acc = 0.0
                for t in range(d):
                    acc += _F(c[j, t], gen_id)
                cs[j] = acc
            for i in range(n):
                for j in range(k):
                    acc = 0.0
                    for t in range(d):
                        xi = x[i, t]
                        ci = c[j, t]
                        acc += _F(alpha * xi + b * ci, gen_id) + _F(b * xi + alpha * ci, gen_id)
                    out[i, j] = (xs[i] + cs[j] - acc) * scale
    return out_arr


cdef double _const_energy(double[:, ::1] P, double[::1] w, int gen) noexcept nogil:
    # sum_i w_i sum_t F(p_it): fixed for the whole solve
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], i, t
    cdef double total = 0.0, row
    for i in range(n):
        row = 0.0
        for t in range(d):
            row += _F(P[i, t], gen)
        total += w[i] * row
    return total


cdef double _fused(double[:, ::1] P, double[::1] w, double alpha, int gen,
                   double[::1] c, double fp, double[::1] acc, double[::1] out) noexcept nogil:
    """Energy at ``c``; writes the CCCP update of ``c`` into ``out``.

    Both need F and grad F at the same two mixtures, so every
    transcendental call is shared.
    """
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], i, t
    cdef double b = 1.0 - alpha, p, ct, wi, f1, g1, f2, g2, mixed = 0.0, row, fc = 0.0
    for t in range(d):
        acc[t] = 0.0
        fc += _F(c[t], gen)
    for i in range(n):
        wi = w[i]
        row = 0.0
        for t in range(d):
            p = P[i, t]
            ct = c[t]
            _Fg(alpha * p + b * ct, gen, &f1, &g1)
            _Fg(alpha * ct + b * p, gen, &f2, &g2)
            row += f1 + f2
            acc[t] += wi * (b * g1 + alpha * g2)
        mixed += wi * row
    for t in range(d):
        out[t] = _ginv(acc[t], gen)
    return fp + fc - mixed


def cccp_energy(P, w, double alpha, int gen_id, c):
    _check_gen(gen_id)
    cdef double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] acc = np.empty(Pv.shape[1], dtype=np.float64)
    cdef double[::1] out = np.empty(Pv.shape[1], dtype=np.float64)
    return _fused(Pv, wv, alpha, gen_id, cv, _const_energy(Pv, wv, gen_id), acc, out)


def cccp_step(P, w, double alpha, int gen_id, c):
    _check_gen(gen_id)
    cdef double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] acc = np.empty(Pv.shape[1], dtype=np.float64)
    out_arr = np.empty(Pv.shape[1], dtype=np.float64)
    _fused(Pv, wv, alpha, gen_id, cv, 0.0, acc, out_arr)
    return out_arr


def cccp_solve(P, w, double alpha, int gen_id, c0, double tol, Py_ssize_t max_iter):
    """Iterate the CCCP update from ``c0``.

    Returns ``(center, iterations, energies, residual, converged)``.
    """
    _check_gen(gen_id)
    cdef double[:, ::1] Pv = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t d = Pv.shape[1], t, it = 0
    c_arr = np.array(c0, dtype=np.float64)
    nxt_arr = np.empty(d, dtype=np.float64)
    energies_arr = np.empty(max_iter + 1, dtype=np.float64)
    cdef double[::1] c = c_arr
    cdef double[::1] nxt = nxt_arr
    cdef double[::1] acc = np.empty(d, dtype=np.float64)
    cdef double[::1] energies = energies_arr
    cdef double residual = INFINITY, diff, fp
    with nogil:
        fp = _const_energy(Pv, wv, gen_id)
        energies[0] = _fused(Pv, wv, alpha, gen_id, c, fp, acc, nxt)
        while it < max_iter:
            residual = 0.0
            for t in range(d):
                diff = fabs(nxt[t] - c[t])
                if diff > residual or diff != diff:
                    residual = diff
                c[t] = nxt[t]
            it += 1
            # energy of the new iterate and its update in one pass
            energies[it] = _fused(Pv, wv, alpha, gen_id, c, fp, acc, nxt)
            if residual <= tol:
                break
    return c_arr, it, energies_arr[:it + 1].copy(), residual, residual <= tol
