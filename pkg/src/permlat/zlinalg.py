"""Exact linear algebra over Z and over Z/p^k.

Integer matrices are numpy arrays: dtype=object carrying Python ints for
unbounded exactness, with an int64 fast path that falls back to object
arithmetic whenever entries approach the overflow guard. No floating
point is used anywhere.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

from . import _kernels
from .errors import BadModulus

_GUARD = 1 << 30  # products of two guarded entries stay below 2**60


def asmat(a, dtype=object):
    """Coerce to a 2-D numpy matrix of exact integers."""
    A = np.array(a, dtype=dtype)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    if A.ndim != 2:
        raise ValueError(f"expected 2-D matrix, got ndim={A.ndim}")
    return A


def zeros(r, c, dtype=object):
    return np.zeros((r, c), dtype=dtype)


def eye(n, dtype=object):
    return np.eye(n, dtype=dtype)


def to_object(A):
    return np.array(A, dtype=object)


def to_int64(A):
    A = np.asarray(A)
    if A.dtype == np.int64:
        return A
    out = A.astype(np.int64)
    if A.dtype == object and not np.array_equal(out.astype(object), A):
        raise OverflowError("matrix entries exceed int64")
    return out


class _Overflow(Exception):
    pass


def _absmax(*mats):
    m = 0
    for A in mats:
        if A.size:
            m = max(m, int(np.abs(A).max()))
    return m


def _min_entry_pos(A, s):
    """Position of the min-|value| nonzero entry of A[s:, s:], row-major ties."""
    block = A[s:, s:]
    if block.size == 0:
        return None
    B = np.abs(block)
    nz = B != 0
    if not nz.any():
        return None
    big = B.max() + 1
    B = np.where(nz, B, big)
    flat = int(np.argmin(B))
    r = block.shape[1]
    return s + flat // r, s + flat % r


def _snf_core(A, U, V, guard):
    r, c = A.shape
    n = min(r, c)
    s = 0
    while s < n:
        pos = _min_entry_pos(A, s)
        if pos is None:
            break
        i, j = pos
        if i != s:
            A[[s, i]] = A[[i, s]]
            U[[s, i]] = U[[i, s]]
        if j != s:
            A[:, [s, j]] = A[:, [j, s]]
            V[:, [s, j]] = V[:, [j, s]]
        if A[s, s] < 0:
            A[s, :] = -A[s, :]
            U[s, :] = -U[s, :]
        while True:
            piv = A[s, s]
            col = A[s + 1 :, s]
            if col.size and np.any(col != 0):
                qs = col // piv
                if np.any(qs != 0):
                    A[s + 1 :, :] -= qs[:, None] * A[s, :]
                    U[s + 1 :, :] -= qs[:, None] * U[s, :]
                if guard and _absmax(A, U) > _GUARD:
                    raise _Overflow
                if np.any(A[s + 1 :, s] != 0):
                    # remainder smaller than pivot: swap it up and re-run
                    nz = np.nonzero(A[s + 1 :, s])[0]
                    i = s + 1 + int(nz[np.argmin(np.abs(A[s + 1 + nz, s]))])
                    A[[s, i]] = A[[i, s]]
                    U[[s, i]] = U[[i, s]]
                    continue
            row = A[s, s + 1 :]
            if row.size and np.any(row != 0):
                piv = A[s, s]
                qs = row // piv
                if np.any(qs != 0):
                    A[:, s + 1 :] -= A[:, s : s + 1] * qs[None, :]
                    V[:, s + 1 :] -= V[:, s : s + 1] * qs[None, :]
                if guard and _absmax(A, V) > _GUARD:
                    raise _Overflow
                if np.any(A[s, s + 1 :] != 0):
                    nz = np.nonzero(A[s, s + 1 :])[0]
                    j = s + 1 + int(nz[np.argmin(np.abs(A[s, s + 1 + nz]))])
                    A[:, [s, j]] = A[:, [j, s]]
                    V[:, [s, j]] = V[:, [j, s]]
                    continue
            break
        # pivot must divide the trailing block
        piv = A[s, s]
        rem = A[s + 1 :, s + 1 :] % piv if piv else None
        if rem is not None and rem.size and np.any(rem != 0):
            i = s + 1 + int(np.nonzero(rem.any(axis=1))[0][0])
            A[s, :] += A[i, :]
            U[s, :] += U[i, :]
            continue
        s += 1
    return A, U, V


def smith_normal_form(A):
    """Smith normal form: returns (S, U, V) with U A V = S, U and V unimodular.

    Diagonal entries are nonnegative and each divides the next.
    """
    A0 = asmat(A)
    r, c = A0.shape
    if r == 0 or c == 0:
        return A0.copy(), eye(r), eye(c)
    try:
        W = to_int64(A0)
        if _absmax(W) > _GUARD:
            raise _Overflow
        S, U, V = _snf_core(W.copy(), eye(r, np.int64), eye(c, np.int64), True)
        return to_object(S), to_object(U), to_object(V)
    except (_Overflow, OverflowError):
        pass
    return _snf_core(A0.copy(), eye(r), eye(c), False)


def snf_diagonal(A):
    """Diagonal of the Smith normal form as a list of Python ints."""
    S, _, _ = smith_normal_form(A)
    return [int(S[i, i]) for i in range(min(S.shape))]


def _hnf_core(A, guard):
    """Row Hermite form: positive pivots, entries above reduced, zero rows dropped."""
    r, c = A.shape
    row = 0
    pivots = []
    for col in range(c):
        sub = A[row:, col]
        if sub.size == 0:
            break
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        i = row + int(nz[np.argmin(np.abs(sub[nz]))])
        A[[row, i]] = A[[i, row]]
        while True:
            piv = A[row, col]
            if piv < 0:
                A[row] = -A[row]
                piv = -piv
            rest = A[row + 1 :, col]
            if rest.size == 0 or not np.any(rest != 0):
                break
            qs = rest // piv
            A[row + 1 :] -= qs[:, None] * A[row]
            if guard and _absmax(A) > _GUARD:
                raise _Overflow
            rest = A[row + 1 :, col]
            if np.any(rest != 0):
                nz = np.nonzero(rest)[0]
                i = row + 1 + int(nz[np.argmin(np.abs(rest[nz]))])
                A[[row, i]] = A[[i, row]]
            else:
                break
        piv = A[row, col]
        for t, pc in pivots:
            q = A[t, col] // piv
            if q:
                A[t] -= q * A[row]
        if guard and _absmax(A) > _GUARD:
            raise _Overflow
        pivots.append((row, col))
        row += 1
        if row == r:
            break
    return A[:row].copy()


def hnf_rows(A):
    """Canonical basis (row Hermite normal form) of the integer row span."""
    A0 = asmat(A)
    if A0.shape[0] == 0 or A0.shape[1] == 0:
        return zeros(0, A0.shape[1])
    try:
        W = to_int64(A0)
        if _absmax(W) > _GUARD:
            raise _Overflow
        return to_object(_hnf_core(W.copy(), True))
    except (_Overflow, OverflowError):
        pass
    return _hnf_core(A0.copy(), False)


def kernel_saturated(A):
    """Basis rows of {x : xA = 0}, a saturated sublattice of Z^rows."""
    A0 = asmat(A)
    r = A0.shape[0]
    if r == 0:
        return zeros(0, 0)
    if A0.shape[1] == 0:
        return hnf_rows(eye(r))
    S, U, _ = smith_normal_form(A0)
    t = sum(1 for i in range(min(S.shape)) if S[i, i] != 0)
    return hnf_rows(U[t:, :])


def det_bareiss(A):
    """Exact determinant by fraction-free elimination (test utility)."""
    M = [[int(x) for x in row] for row in asmat(A)]
    n = len(M)
    if n == 0:
        return 1
    if n != len(M[0]):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# torsion profiles


def _factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class TorsionProfile:
    """Isomorphism type of a finitely generated abelian group.

    divisors is a sorted tuple of (prime, exponent, multiplicity).
    """

    free_rank: int
    divisors: tuple

    @property
    def is_free(self):
        return not self.divisors

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.divisors

    @property
    def is_finite(self):
        return self.free_rank == 0

    def torsion_order(self):
        return prod(p ** (e * m) for p, e, m in self.divisors)

    def p_exponents(self, p):
        """Multiset of exponents e with a Z/p^e summand, ascending."""
        out = []
        for q, e, m in self.divisors:
            if q == p:
                out.extend([e] * m)
        return out

    def exponent(self, p):
        exps = self.p_exponents(p)
        return max(exps) if exps else 0


def profile_from_divisors(divs, free_rank, p=None):
    counts = {}
    for d in divs:
        if d in (0, 1):
            continue
        for q, e in _factorize(d).items():
            if p is not None and q != p:
                continue
            counts[(q, e)] = counts.get((q, e), 0) + 1
    divisors = tuple(sorted((q, e, m) for (q, e), m in counts.items()))
    return TorsionProfile(free_rank=free_rank, divisors=divisors)


def cokernel_structure(A, ambient_rank, p=None):
    """TorsionProfile of Z^ambient_rank / rowspan(A).

    With p set, elementary divisors are replaced by their p-parts
    (p-local answer; divisors coprime to p are discarded).
    """
    A0 = asmat(A)
    if A0.shape[0] == 0:
        return TorsionProfile(free_rank=ambient_rank, divisors=())
    if A0.shape[1] != ambient_rank:
        raise ValueError("ambient_rank must equal the column count")
    diag = snf_diagonal(A0)
    nonzero = [d for d in diag if d != 0]
    free = ambient_rank - len(nonzero)
    return profile_from_divisors(nonzero, free, p=p)


# ---------------------------------------------------------------------------
# exact solving over Z (and p-locally)


def _vp(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class RowSolver:
    """Solve c B = x for rows x, reusing one Smith normal form of B."""

    def __init__(self, B):
        self.B = asmat(B)
        self.S, self.U, self.V = smith_normal_form(self.B)
        n = min(self.S.shape)
        self.diag = [int(self.S[i, i]) for i in range(n)]
        self.t = sum(1 for d in self.diag if d != 0)

    def solve(self, X):
        """Coefficients C with C B = X over Z, or None if unsolvable."""
        X = asmat(X)
        if X.shape[0] == 0:
            return zeros(0, self.B.shape[0])
        XV = X @ self.V
        b = self.B.shape[0]
        C = zeros(X.shape[0], b)
        for r in range(X.shape[0]):
            y = zeros(1, b)[0]
            for j in range(XV.shape[1]):
                val = int(XV[r, j])
                if j < self.t:
                    d = self.diag[j]
                    if val % d:
                        return None
                    y[j] = val // d
                elif val != 0:
                    return None
            C[r] = y @ self.U
        return C

    def member_p_local(self, X, p):
        """True when every row of X lies in the Z_p-span of the rows of B."""
        X = asmat(X)
        if X.shape[0] == 0:
            return True
        XV = X @ self.V
        for r in range(X.shape[0]):
            for j in range(XV.shape[1]):
                val = int(XV[r, j])
                if j < self.t:
                    vd = _vp(self.diag[j], p)
                    if val != 0 and (_vp(val, p) or 0) < vd:
                        return False
                elif val != 0:
                    return False
        return True


def solve_left_inverse_scaled(A, B, p):
    """Find integer X and d coprime to p with X A = d B, minimizing v_p(d).

    Returns (X, d) or None when no solution with p-unit d exists. This is
    the exact carrier for Z_p-linear sections: X/d is a p-integral
    solution of the equation over the localization.
    """
    A = asmat(A)
    B = asmat(B)
    q = B.shape[0]
    # kernel of [X | -d] stacked system, one d shared across all rows:
    # unknowns are the q*rows(A) entries of X plus d.
    rA, cA = A.shape
    rows = []
    for r in range(q):
        for c in range(cA):
            row = [0] * (q * rA + 1)
            for i in range(rA):
                row[r * rA + i] = int(A[i, c])
            row[q * rA] = -int(B[r, c])
            rows.append(row)
    M = asmat(rows)
    K = kernel_saturated(M.T)
    if K.shape[0] == 0:
        return None
    # gcd of achievable d values, with a witness combination
    best = None  # (d, vector)
    for i in range(K.shape[0]):
        vec = K[i]
        d = int(vec[q * rA])
        if d == 0:
            continue
        if best is None:
            best = (d, vec.copy())
        else:
            g, u, v = _xgcd(best[0], d)
            if abs(g) < abs(best[0]):
                best = (g, u * best[1] + v * vec)
    if best is None:
        return None
    d, vec = best
    if d < 0:
        d, vec = -d, -vec
    if d % p == 0:
        return None
    X = zeros(q, rA)
    for r in range(q):
        for i in range(rA):
            X[r, i] = vec[r * rA + i]
    return X, d


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qq, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    return a, x0, y0


# ---------------------------------------------------------------------------
# linear algebra over Z/p^k (kernel-backed)


def factor_prime_power(m):
    """Return (p, k) with m = p^k, or raise BadModulus."""
    if m < 2:
        raise BadModulus(f"modulus {m} is not a prime power")
    f = _factorize(m)
    if len(f) != 1:
        raise BadModulus(f"modulus {m} is not a prime power")
    ((p, k),) = f.items()
    return p, k


def howell_form(A, modulus):
    """Canonical Howell form of the row span of A over Z/modulus.

    Two matrices have equal row span over Z/p^k iff their Howell forms
    are identical arrays.
    """
    p, k = factor_prime_power(modulus)
    if modulus > _kernels.MAX_MODULUS:
        raise BadModulus(f"modulus {modulus} exceeds kernel cap")
    A = np.asarray(A)
    if A.dtype == object:
        A = np.array([[int(x) % modulus for x in row] for row in A] if A.shape[0] else A,
                     dtype=np.int64).reshape(A.shape)
    return _kernels.howell_mod(A.astype(np.int64), p, k)


def matmul_mod(A, B, m):
    A = np.asarray(A, dtype=np.int64) % m
    B = np.asarray(B, dtype=np.int64) % m
    inner = A.shape[1]
    assert inner * (m - 1) * (m - 1) < (1 << 62), "matmul_mod overflow risk"
    return (A @ B) % m


def diagonalize_mod(A, p, k):
    return _kernels.diagonalize_mod(A, p, k)


def nullspace_mod(A, p, k):
    """Howell generators of {x : x A = 0 over Z/p^k}."""
    m = p**k
    A = np.asarray(A, dtype=np.int64) % m
    r, c = A.shape
    if r == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if c == 0:
        return howell_form(np.eye(r, dtype=np.int64), m)
    exps, U, _ = _kernels.diagonalize_mod(A, p, k)
    gens = []
    for j in range(min(r, c)):
        e = int(exps[j])
        if e == 0:
            continue
        gens.append((p ** (k - e) * U[j]) % m)
    for i in range(min(r, c), r):
        gens.append(U[i])
    if not gens:
        return np.zeros((0, r), dtype=np.int64)
    return _kernels.howell_mod(np.array(gens, dtype=np.int64), p, k)


class ModSolver:
    """Solve x A = b over Z/p^k for many right-hand sides, one diagonalization."""

    def __init__(self, A, p, k):
        self.p, self.k, self.m = p, k, p**k
        A = np.asarray(A, dtype=np.int64) % self.m
        self.r, self.c = A.shape
        self.exps, self.U, self.V = _kernels.diagonalize_mod(A, p, k)

    def solve(self, B):
        """Return (X, ok) with X[i] A = B[i] mod p^k where ok[i]."""
        m, p = self.m, self.p
        B = np.asarray(B, dtype=np.int64) % m
        q = B.shape[0]
        X = np.zeros((q, self.r), dtype=np.int64)
        ok = np.ones(q, dtype=bool)
        BV = matmul_mod(B, self.V, m)
        n = min(self.r, self.c)
        for i in range(q):
            y = np.zeros(self.r, dtype=np.int64)
            good = True
            for j in range(self.c):
                t = int(BV[i, j])
                if j < n:
                    e = int(self.exps[j])
                    piv = p**e
                    if e >= self.k:
                        if t != 0:
                            good = False
                            break
                    elif t % piv:
                        good = False
                        break
                    else:
                        y[j] = t // piv
                elif t != 0:
                    good = False
                    break
            if good:
                X[i] = matmul_mod(y.reshape(1, -1), self.U, m)[0]
            ok[i] = good
        return X, ok


def solve_mod(A, B, p, k):
    return ModSolver(A, p, k).solve(B)


def inv_mod(A, p, k):
    """Inverse of a square matrix over Z/p^k, or None if not a unit."""
    m = p**k
    A = np.asarray(A, dtype=np.int64) % m
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inv_mod needs a square matrix")
    exps, U, V = _kernels.diagonalize_mod(A, p, k)
    if any(int(e) for e in exps) or len(exps) < n:
        return None
    return matmul_mod(V, U, m)


def howell_member(H, X, p, k):
    """True when every row of X lies in the span of Howell rows H mod p^k."""
    m = p**k
    H = np.asarray(H, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64) % m
    piv = []
    for i in range(H.shape[0]):
        nz = np.nonzero(H[i])[0]
        c = int(nz[0])
        piv.append((i, c, p ** _vp(int(H[i, c]), p)))
    for r in range(X.shape[0]):
        x = X[r].copy()
        for i, c, pv in piv:
            if x[c] % pv:
                return False
            q = x[c] // pv
            if q:
                x = (x - q * H[i]) % m
        if x.any():
            return False
    return True


def howell_size(H, p, k):
    """Cardinality of the span of Howell rows H inside (Z/p^k)^n."""
    size = 1
    for i in range(np.asarray(H).shape[0]):
        row = np.asarray(H)[i]
        nz = np.nonzero(row)[0]
        v = _vp(int(row[nz[0]]), p)
        size *= p ** (k - v)
    return size
