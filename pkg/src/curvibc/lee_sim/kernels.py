"""Hot loops of the solver: right-hand side with boundary closure, and the filter.

Two interchangeable backends share one calling convention.  The numba
backend is used unless ``CURVIBC_NO_NUMBA=1``; ``CURVIBC_THREADS`` caps its
worker count.  Every output element is computed by one thread with a fixed
operation order, so results do not depend on the worker count.

Array layout: fields ``q`` (5, ni, nj, nk); metric ``mat`` (3, 3, ni, nj, nk)
with rows grad(xi), grad(eta), grad(zeta); contravariant mean velocities
``contra`` (3, ni, nj, nk); boundary ``closure`` (2, nj, nk, 3, 5, 5) holding
(P, K_eta, K_zeta) for the faces i = 0 and i = ni - 1.
"""
from __future__ import annotations

import os
from functools import lru_cache
from math import comb

import numpy as np

CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
ONE_SIDED = np.array([
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
]) / 12.0


def _filter_table() -> np.ndarray:
    # row n: (-1)^m C(2n, n+m) / 4^n for m = -4..4, i.e. (-1)^n delta^2n / 4^n
    t = np.zeros((5, 9))
    for n in range(1, 5):
        for m in range(-n, n + 1):
            t[n, m + 4] = (-1) ** m * comb(2 * n, n + m) / 4.0**n
    return t


FILTER = _filter_table()


def use_numba() -> bool:
    return os.environ.get("CURVIBC_NO_NUMBA", "0") not in ("1", "true", "yes")


def thread_cap() -> int | None:
    raw = os.environ.get("CURVIBC_THREADS")
    if not raw:
        return None
    n = int(raw)
    if n < 1:
        raise ValueError("CURVIBC_THREADS must be a positive integer")
    return n


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _d_periodic(f, axis):
    out = np.zeros_like(f)
    for s, c in zip((-2, -1, 1, 2), (CENTRAL[0], CENTRAL[1], CENTRAL[3], CENTRAL[4])):
        out += c * np.roll(f, -s, axis=axis)
    return out


def _d_bounded(f, axis):
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    out = np.zeros_like(f)
    for s, c in enumerate(CENTRAL):
        if c:
            out[2:n - 2] += c * f[s:n - 4 + s]
    for row in range(2):
        out[row] = np.tensordot(ONE_SIDED[row], f[0:5], axes=1)
        out[n - 1 - row] = -np.tensordot(ONE_SIDED[row], f[::-1][:5], axes=1)
    return np.moveaxis(out, 0, axis)


def derivatives_numpy(q, periodic_xi):
    dxi = _d_periodic(q, 1) if periodic_xi else _d_bounded(q, 1)
    return dxi, _d_periodic(q, 2), _d_periodic(q, 3)


def rhs_numpy(q, mat, contra, periodic_xi, closure, out):
    d = derivatives_numpy(q, periodic_xi)
    out[...] = 0.0
    for a in range(3):
        da = d[a]
        out -= contra[a] * da
        div = mat[a, 0] * da[1] + mat[a, 1] * da[2] + mat[a, 2] * da[3]
        out[0] -= div
        out[4] -= div
        for c in range(3):
            out[1 + c] -= mat[a, c] * da[4]
    if not periodic_xi:
        for face, i in ((0, 0), (1, q.shape[1] - 1)):
            r = out[:, i].copy()
            cl = closure[face]
            out[:, i] = (np.einsum("jkab,bjk->ajk", cl[:, :, 0], r)
                         + np.einsum("jkab,bjk->ajk", cl[:, :, 1], d[1][:, i])
                         + np.einsum("jkab,bjk->ajk", cl[:, :, 2], d[2][:, i]))
    return out


def filter_numpy(q, sigma, periodic_xi, out):
    cur = q.copy()
    n_i = q.shape[1]
    for axis in (1, 2, 3):
        res = np.zeros_like(cur)
        if axis == 1 and not periodic_xi:
            for i in range(n_i):
                order = min(4, i, n_i - 1 - i)
                if order < 2:
                    continue
                for m in range(-order, order + 1):
                    res[:, i] += FILTER[order, m + 4] * cur[:, i + m]
        else:
            for m in range(-4, 5):
                res += FILTER[4, m + 4] * np.roll(cur, -m, axis=axis)
        cur = cur - sigma * res
    out[...] = cur
    return out


# ---------------------------------------------------------------------------
# stencil tables for the compiled kernels
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def derivative_table(n: int, periodic: bool):
    """(index, coefficient) arrays of shape (n, 5) for d/ds at every node of a line."""
    idx = np.zeros((n, 5), dtype=np.int64)
    coef = np.zeros((n, 5))
    if n == 1:
        return idx, coef
    for i in range(n):
        if periodic or 2 <= i <= n - 3:
            idx[i] = [(i + m - 2) % n for m in range(5)]
            coef[i] = CENTRAL
        elif i < 2:
            idx[i] = range(5)
            coef[i] = ONE_SIDED[i]
        else:
            idx[i] = [n - 1 - m for m in range(5)]
            coef[i] = -ONE_SIDED[n - 1 - i]
    return idx, coef


@lru_cache(maxsize=None)
def filter_table(n: int, periodic: bool):
    """(index, coefficient) arrays of shape (n, 9) for the filter increment along a line.

    Non-periodic lines drop to order 2 min(4, i, n - 1 - i) near the ends and
    leave the two end nodes unfiltered.
    """
    idx = np.zeros((n, 9), dtype=np.int64)
    coef = np.zeros((n, 9))
    for i in range(n):
        order = 4 if periodic else min(4, i, n - 1 - i)
        idx[i] = [(i + m) % n for m in range(-4, 5)]
        if order >= 2:
            coef[i] = FILTER[order]
    return idx, coef


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
else:
    # older TBB builds are rejected with a warning; OpenMP first avoids it
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

if numba is not None:

    @njit(parallel=True, cache=True)
    def _rhs_kernel(q, mat, contra, boundary, closure, ix, cx, jx, cj, kx, ck, out):
        ni, nj, nk = q.shape[1], q.shape[2], q.shape[3]
        for i in prange(ni):
            d = np.empty((3, 5))
            r = np.empty(5)
            for j in range(nj):
                for k in range(nk):
                    for v in range(5):
                        s0 = 0.0
                        s1 = 0.0
                        s2 = 0.0
                        for m in range(5):
                            s0 += cx[i, m] * q[v, ix[i, m], j, k]
                            s1 += cj[j, m] * q[v, i, jx[j, m], k]
                            s2 += ck[k, m] * q[v, i, j, kx[k, m]]
                        d[0, v] = s0
                        d[1, v] = s1
                        d[2, v] = s2
                    for v in range(5):
                        r[v] = 0.0
                    for a in range(3):
                        ua = contra[a, i, j, k]
                        for v in range(5):
                            r[v] -= ua * d[a, v]
                        div = mat[a, 0, i, j, k] * d[a, 1] + mat[a, 1, i, j, k] * d[a, 2] + mat[a, 2, i, j, k] * d[a, 3]
                        r[0] -= div
                        r[4] -= div
                        for c in range(3):
                            r[1 + c] -= mat[a, c, i, j, k] * d[a, 4]
                    if boundary and (i == 0 or i == ni - 1):
                        face = 0 if i == 0 else 1
                        for a in range(5):
                            s = 0.0
                            for b in range(5):
                                s += closure[face, j, k, 0, a, b] * r[b]
                            for b in range(5):
                                s += closure[face, j, k, 1, a, b] * d[1, b]
                            for b in range(5):
                                s += closure[face, j, k, 2, a, b] * d[2, b]
                            out[a, i, j, k] = s
                    else:
                        for v in range(5):
                            out[v, i, j, k] = r[v]
        return out

    @njit(parallel=True, cache=True)
    def _filter_kernel(q, sigma, axis, idx, coef, out):
        ni, nj, nk = q.shape[1], q.shape[2], q.shape[3]
        for i in prange(ni):
            for v in range(5):
                for j in range(nj):
                    for k in range(nk):
                        s = 0.0
                        if axis == 1:
                            for m in range(9):
                                s += coef[i, m] * q[v, idx[i, m], j, k]
                        elif axis == 2:
                            for m in range(9):
                                s += coef[j, m] * q[v, i, idx[j, m], k]
                        else:
                            for m in range(9):
                                s += coef[k, m] * q[v, i, j, idx[k, m]]
                        out[v, i, j, k] = q[v, i, j, k] - sigma * s
        return out

    def rhs_numba(q, mat, contra, periodic_xi, closure, out):
        ni, nj, nk = q.shape[1:]
        ix, cx = derivative_table(ni, bool(periodic_xi))
        jx, cj = derivative_table(nj, True)
        kx, ck = derivative_table(nk, True)
        return _rhs_kernel(q, mat, contra, not periodic_xi, closure, ix, cx, jx, cj, kx, ck, out)

    def filter_numba(q, sigma, periodic_xi, out):
        ni, nj, nk = q.shape[1:]
        tmp = np.empty_like(q)
        _filter_kernel(q, sigma, 1, *filter_table(ni, bool(periodic_xi)), tmp)
        _filter_kernel(tmp, sigma, 2, *filter_table(nj, True), out)
        _filter_kernel(out, sigma, 3, *filter_table(nk, True), tmp)
        out[...] = tmp
        return out


_threads_applied = False


def backend():
    """(rhs, filter, name) for the active backend."""
    global _threads_applied
    if not use_numba() or numba is None:
        return rhs_numpy, filter_numpy, "numpy"
    if not _threads_applied:
        cap = thread_cap()
        if cap is not None:
            set_threads(cap)
        _threads_applied = True
    return rhs_numba, filter_numba, "numba"


def set_threads(n: int) -> None:
    """Set the numba worker count (no effect on the numpy backend)."""
    if numba is not None:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
