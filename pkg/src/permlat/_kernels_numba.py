"""Numba-compiled kernels for linear algebra over Z/p^k.

Same contract as ``_kernels_numpy``; the hot row-reduction loops carry
@njit. Compiled lazily on first call, cached on disk.
"""

import numpy as np
from numba import njit

MAX_MODULUS = 1 << 20


@njit(cache=True)
def _inv_unit_jit(u, m):
    # extended euclid; u must be a unit mod m
    a, b = u % m, m
    x0, x1 = np.int64(1), np.int64(0)
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
    return x0 % m


@njit(cache=True)
def _val_jit(x, p, k):
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True)
def _diagonalize_core(A, p, k):
    m = np.int64(p) ** k
    r, c = A.shape
    U = np.eye(r, dtype=np.int64)
    V = np.eye(c, dtype=np.int64)
    n = min(r, c)
    exps = np.full(n, k, dtype=np.int64)
    for s in range(n):
        best_i, best_j, best_v = -1, -1, k + 1
        for i in range(s, r):
            for j in range(s, c):
                if A[i, j] != 0:
                    v = _val_jit(A[i, j], p, k)
                    if v < best_v:
                        best_i, best_j, best_v = i, j, v
        if best_i < 0:
            break
        exps[s] = best_v
        if best_i != s:
            for j in range(c):
                A[s, j], A[best_i, j] = A[best_i, j], A[s, j]
            for j in range(r):
                U[s, j], U[best_i, j] = U[best_i, j], U[s, j]
        if best_j != s:
            for i in range(r):
                A[i, s], A[i, best_j] = A[i, best_j], A[i, s]
            for i in range(c):
                V[i, s], V[i, best_j] = V[i, best_j], V[i, s]
        piv = np.int64(p) ** best_v
        uinv = _inv_unit_jit(A[s, s] // piv, m)
        for j in range(c):
            A[s, j] = (A[s, j] * uinv) % m
        for j in range(r):
            U[s, j] = (U[s, j] * uinv) % m
        for i in range(r):
            if i == s or A[i, s] == 0:
                continue
            q = A[i, s] // piv
            for j in range(c):
                A[i, j] = (A[i, j] - q * A[s, j]) % m
            for j in range(r):
                U[i, j] = (U[i, j] - q * U[s, j]) % m
        for j in range(c):
            if j == s or A[s, j] == 0:
                continue
            q = A[s, j] // piv
            for i in range(r):
                A[i, j] = (A[i, j] - q * A[i, s]) % m
            for i in range(c):
                V[i, j] = (V[i, j] - q * V[i, s]) % m
    return exps, U, V


def diagonalize_mod(A, p, k):
    m = p**k
    A = np.array(A, dtype=np.int64, copy=True) % m
    return _diagonalize_core(A, np.int64(p), np.int64(k))


@njit(cache=True)
def _howell_core(A, p, k):
    m = np.int64(p) ** k
    r, c = A.shape
    cap = r + c + 1
    W = np.zeros((cap, c), dtype=np.int64)
    W[:r] = A % m
    alive = np.zeros(cap, dtype=np.bool_)
    alive[:r] = True
    n_rows = r
    piv_row = np.empty(c, dtype=np.int64)
    piv_col = np.empty(c, dtype=np.int64)
    piv_val = np.empty(c, dtype=np.int64)
    n_piv = 0
    for col in range(c):
        best, best_v = -1, k + 1
        for i in range(n_rows):
            if alive[i] and W[i, col] != 0:
                v = _val_jit(W[i, col], p, k)
                if v < best_v:
                    best, best_v = i, v
        if best < 0:
            continue
        piv = np.int64(p) ** best_v
        uinv = _inv_unit_jit(W[best, col] // piv, m)
        for j in range(c):
            W[best, j] = (W[best, j] * uinv) % m
        alive[best] = False
        for i in range(n_rows):
            if not alive[i]:
                continue
            if W[i, col] != 0:
                q = W[i, col] // piv
                nz = False
                for j in range(c):
                    W[i, j] = (W[i, j] - q * W[best, j]) % m
                    if W[i, j] != 0:
                        nz = True
                if not nz:
                    alive[i] = False
        ann_fac = np.int64(p) ** (k - best_v)
        nz = False
        for j in range(c):
            W[n_rows, j] = (ann_fac * W[best, j]) % m
            if W[n_rows, j] != 0:
                nz = True
        if nz:
            alive[n_rows] = True
            n_rows += 1
        piv_row[n_piv] = best
        piv_col[n_piv] = col
        piv_val[n_piv] = best_v
        n_piv += 1
    for t in range(n_piv):
        piv = np.int64(p) ** piv_val[t]
        rt, ct = piv_row[t], piv_col[t]
        for s in range(t):
            rs = piv_row[s]
            q = W[rs, ct] // piv
            if q != 0:
                for j in range(c):
                    W[rs, j] = (W[rs, j] - q * W[rt, j]) % m
    out = np.zeros((n_piv, c), dtype=np.int64)
    for t in range(n_piv):
        out[t] = W[piv_row[t]]
    return out


def howell_mod(A, p, k):
    m = p**k
    A = np.asarray(A, dtype=np.int64) % m
    r, c = A.shape
    if r == 0 or c == 0:
        return np.zeros((0, c), dtype=np.int64)
    return _howell_core(A, np.int64(p), np.int64(k))
