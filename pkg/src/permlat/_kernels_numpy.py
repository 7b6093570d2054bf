"""Pure-numpy reference kernels for linear algebra over Z/p^k.

All matrices are int64 with entries reduced into [0, p^k). Moduli are
capped at 2**20 so that every intermediate product fits comfortably in
int64. The numba backend implements the same two entry points with
identical output; see ``_kernels``.
"""

import numpy as np

MAX_MODULUS = 1 << 20


def _inv_unit(u, m):
    return pow(int(u), -1, int(m))


def _valuations(B, p, k):
    """Entry-wise p-adic valuation of B mod p^k (zero entries get k)."""
    V = np.full(B.shape, k, dtype=np.int64)
    cur = B != 0
    v = 0
    q = 1
    while cur.any():
        V[cur] = v
        v += 1
        q *= p
        cur = cur & (B % q == 0)
    return V


def diagonalize_mod(A, p, k):
    """Diagonalize A over Z/p^k: returns (exps, U, V) with U A V = diag(p^exps).

    U and V are invertible mod p^k; exps has length min(r, c) and an
    entry of k stands for a zero diagonal position.
    """
    m = p**k
    A = np.array(A, dtype=np.int64, copy=True) % m
    r, c = A.shape
    U = np.eye(r, dtype=np.int64)
    V = np.eye(c, dtype=np.int64)
    n = min(r, c)
    exps = np.full(n, k, dtype=np.int64)
    for s in range(n):
        block = A[s:, s:]
        if not block.any():
            break
        vals = _valuations(block, p, k)
        flat = int(np.argmin(vals))
        bi, bj = s + flat // (c - s), s + flat % (c - s)
        v = int(vals[bi - s, bj - s])
        exps[s] = v
        if bi != s:
            A[[s, bi]] = A[[bi, s]]
            U[[s, bi]] = U[[bi, s]]
        if bj != s:
            A[:, [s, bj]] = A[:, [bj, s]]
            V[:, [s, bj]] = V[:, [bj, s]]
        piv = p**v
        uinv = _inv_unit(A[s, s] // piv, m)
        A[s, :] = (A[s, :] * uinv) % m
        U[s, :] = (U[s, :] * uinv) % m
        # all trailing entries have valuation >= v, so quotients are exact
        qs = A[:, s] // piv
        qs[s] = 0
        if qs.any():
            A -= np.outer(qs, A[s, :])
            A %= m
            U -= np.outer(qs, U[s, :])
            U %= m
        qs = A[s, :] // piv
        qs[s] = 0
        if qs.any():
            A -= np.outer(A[:, s], qs)
            A %= m
            V -= np.outer(V[:, s], qs)
            V %= m
    return exps, U, V


def howell_mod(A, p, k):
    """Canonical Howell form of the row span of A over Z/p^k.

    Rows with strictly increasing pivot columns, pivots normalized to
    p^v, entries above a pivot reduced mod p^v, zero rows dropped. Two
    matrices have the same row span mod p^k iff their forms are equal.
    """
    m = p**k
    A = np.asarray(A, dtype=np.int64) % m
    r, c = A.shape
    if r == 0 or c == 0:
        return np.zeros((0, c), dtype=np.int64)
    cap = r + c + 1
    W = np.zeros((cap, c), dtype=np.int64)
    W[:r] = A
    active = list(range(r))
    n_rows = r
    pivots = []  # (row index into W, col, val)
    for col in range(c):
        cand = [i for i in active if W[i, col] != 0]
        if not cand:
            continue
        best, best_v = -1, k
        for i in cand:
            x = int(W[i, col])
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            if v < best_v:
                best, best_v = i, v
        piv = p**best_v
        uinv = _inv_unit(W[best, col] // piv, m)
        W[best] = (W[best] * uinv) % m
        active.remove(best)
        for i in list(active):
            if W[i, col] != 0:
                q = W[i, col] // piv
                W[i] = (W[i] - q * W[best]) % m
            if not W[i].any():
                active.remove(i)
        ann = (p ** (k - best_v) * W[best]) % m
        if ann.any():
            W[n_rows] = ann
            active.append(n_rows)
            n_rows += 1
        pivots.append((best, col, best_v))
    # reduce entries above each pivot into [0, p^v)
    for t in range(len(pivots)):
        rt, ct, vt = pivots[t]
        piv = p**vt
        for s in range(t):
            rs = pivots[s][0]
            q = W[rs, ct] // piv
            if q:
                W[rs] = (W[rs] - q * W[rt]) % m
    out = np.zeros((len(pivots), c), dtype=np.int64)
    for t, (rt, _, _) in enumerate(pivots):
        out[t] = W[rt]
    return out
