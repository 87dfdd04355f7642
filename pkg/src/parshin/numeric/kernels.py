"""Hot loops: batched evaluation of packed polynomial systems and batched
small dense complex solves.

Two implementations share one interface. The numba versions are used unless
the environment variable ``PARSHIN_DISABLE_NUMBA`` is set to a true value
(or numba cannot be imported); the numpy versions are always importable
under ``numpy_*`` names so the two can be compared.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "eval_system",
    "solve_batch",
    "numpy_eval_system",
    "numpy_solve_batch",
]


def numpy_eval_system(exps, coeffs, owner, npoly, X):
    """Values (B, npoly) and gradients (B, npoly, d) at the rows of X."""
    B, d = X.shape
    vals = np.zeros((B, npoly), dtype=np.complex128)
    grads = np.zeros((B, npoly, d), dtype=np.complex128)
    if exps.shape[0] == 0:
        return vals, grads
    # powers[b, k, j] = X[b, j] ** exps[k, j]
    pw = X[:, None, :] ** exps[None, :, :]
    mono = coeffs[None, :] * np.prod(pw, axis=2)
    np.add.at(vals, (slice(None), owner), mono)
    for j in range(d):
        e = exps[:, j]
        lower = np.where(e > 0, e - 1, 0)
        pj = np.where(e[None, :] > 0, e[None, :] * X[:, j : j + 1] ** lower[None, :], 0)
        others = np.prod(np.delete(pw, j, axis=2), axis=2) if d > 1 else np.ones_like(pj)
        dm = coeffs[None, :] * pj * others
        np.add.at(grads[:, :, j], (slice(None), owner), dm)
    return vals, grads


def numpy_solve_batch(A, b):
    """Solve A[k] x[k] = b[k] for a stack of small systems."""
    return np.linalg.solve(A, b[..., None])[..., 0]


def _make_numba():
    from numba import njit

    @njit(cache=True)
    def _ipow(x, e):
        r = 1.0 + 0.0j
        base = x
        while e > 0:
            if e & 1:
                r *= base
            base *= base
            e >>= 1
        return r

    @njit(cache=True)
    def eval_system_nb(exps, coeffs, owner, npoly, X):
        B, d = X.shape
        K = exps.shape[0]
        vals = np.zeros((B, npoly), dtype=np.complex128)
        grads = np.zeros((B, npoly, d), dtype=np.complex128)
        pw = np.empty(d, dtype=np.complex128)
        for b in range(B):
            for k in range(K):
                for j in range(d):
                    pw[j] = _ipow(X[b, j], exps[k, j])
                m = coeffs[k]
                for j in range(d):
                    m *= pw[j]
                o = owner[k]
                vals[b, o] += m
                for j in range(d):
                    e = exps[k, j]
                    if e == 0:
                        continue
                    g = coeffs[k] * e * _ipow(X[b, j], e - 1)
                    for l in range(d):
                        if l != j:
                            g *= pw[l]
                    grads[b, o, j] += g
        return vals, grads

    @njit(cache=True)
    def solve_batch_nb(A, rhs):
        B, m, _ = A.shape
        out = np.empty((B, m), dtype=np.complex128)
        M = np.empty((m, m), dtype=np.complex128)
        y = np.empty(m, dtype=np.complex128)
        for b in range(B):
            for i in range(m):
                y[i] = rhs[b, i]
                for j in range(m):
                    M[i, j] = A[b, i, j]
            for c in range(m):
                p = c
                best = abs(M[c, c])
                for r in range(c + 1, m):
                    if abs(M[r, c]) > best:
                        best = abs(M[r, c])
                        p = r
                if p != c:
                    for j in range(m):
                        tmp = M[c, j]
                        M[c, j] = M[p, j]
                        M[p, j] = tmp
                    tmp = y[c]
                    y[c] = y[p]
                    y[p] = tmp
                piv = M[c, c]
                if piv == 0:
                    # singular: propagate nan so the caller's checks trip
                    piv = np.nan + 0j
                for r in range(c + 1, m):
                    f = M[r, c] / piv
                    if f != 0:
                        for j in range(c, m):
                            M[r, j] -= f * M[c, j]
                        y[r] -= f * y[c]
            for i in range(m - 1, -1, -1):
                s = y[i]
                for j in range(i + 1, m):
                    s -= M[i, j] * out[b, j]
                out[b, i] = s / M[i, i]
        return out

    return eval_system_nb, solve_batch_nb


def _numba_requested() -> bool:
    flag = os.environ.get("PARSHIN_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


USING_NUMBA = False
eval_system = numpy_eval_system
solve_batch = numpy_solve_batch

if _numba_requested():
    try:
        _nb_eval, _nb_solve = _make_numba()
    except ImportError:  # pragma: no cover - numba missing
        pass
    else:
        USING_NUMBA = True

        def eval_system(exps, coeffs, owner, npoly, X):
            return _nb_eval(exps, coeffs, owner, npoly, np.ascontiguousarray(X, dtype=np.complex128))

        def solve_batch(A, b):
            return _nb_solve(np.ascontiguousarray(A, dtype=np.complex128), np.ascontiguousarray(b, dtype=np.complex128))
