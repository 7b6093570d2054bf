"""Krull-Schmidt engine: endomorphism rings, Fitting splittings,
idempotent lifting, certified indecomposable decomposition, isomorphism
testing and permutation-module recognition.

Lattices are decomposed at Maranda precision K = v_p(|G|) + 1: an
isomorphism of the reductions mod p^K implies an isomorphism of the
lattices, so recognition verdicts at that precision are exact statements
about the lattices themselves. Finite modules are handled directly.

Indecomposability is never assumed: a terminal summand is certified
either by a one-dimensional top (cyclic over the local group algebra)
or by the local-endomorphism-ring test: reduce End mod p, compute the
radical of the resulting F_p-algebra (characteristic-p trace-coefficient
chain, verified at runtime as a nilpotent ideal with reduced quotient),
and count the simple factors of the quotient through the fixed space of
the Frobenius map. The same analysis yields explicit splitting
idempotents when the module does decompose.
"""

from dataclasses import dataclass, field

import numpy as np

from . import zlinalg as zl
from .errors import CertificationFailed, NoConvergence, NotIdempotent
from .gmodule import (
    GModule,
    finite_ring,
    make_module,
    permutation_lattice,
    reduce_mod,
    restriction,
    stacked_relations,
    submodule_as_module,
    to_int64_mod,
)
from .pgroup import full_subgroup, orbit_reps_gamma, subgroup_as_group


def maranda_precision(G):
    """K with p^K-level isomorphism deciding lattice isomorphism."""
    v = 0
    n = G.order
    while n % G.p == 0:
        n //= G.p
        v += 1
    return v + 1


# ---------------------------------------------------------------------------
# hom and endo solving


def hom_generators(U, V):
    """Howell generators of Hom(U, V) for finite modules over one ring.

    Each generator is returned as a (V.rank x U.rank) int64 matrix; the
    full hom module is their Z/p^k-span.
    """
    if U.ring != V.ring or U.ring.is_lattice:
        raise ValueError("hom_generators needs finite modules over one ring")
    if U.group is not V.group:
        raise ValueError("hom_generators needs a common group")
    p, k = U.ring.p, U.ring.k
    m = U.ring.modulus
    nU, nV = U.rank, V.rank
    if nU == 0 or nV == 0:
        return []
    G = U.group
    RV = V.relations
    rV = RV.shape[0]
    RU = U.relations
    rU = RU.shape[0]
    eqs = []
    augs = []
    n_aux = 0
    for g in G.generators:
        A = U.act(g)
        B = V.act(g)
        E = (np.kron(np.eye(nV, dtype=np.int64), A.T) - np.kron(B, np.eye(nU, dtype=np.int64))) % m
        eqs.append(E)
        if rV:
            aug = np.zeros((nV * nU, nU * rV), dtype=np.int64)
            for i in range(nV):
                for j in range(nU):
                    for l in range(rV):
                        aug[i * nU + j, j * rV + l] = RV[l, i]
            augs.append((n_aux, aug))
            n_aux += nU * rV
        else:
            augs.append((n_aux, None))
    for t in range(rU):
        lam = RU[t]
        E = np.zeros((nV, nV * nU), dtype=np.int64)
        for i in range(nV):
            for tt in range(nU):
                E[i, i * nU + tt] = lam[tt]
        eqs.append(E % m)
        if rV:
            aug = np.zeros((nV, rV), dtype=np.int64)
            for i in range(nV):
                for l in range(rV):
                    aug[i, l] = RV[l, i]
            augs.append((n_aux, aug))
            n_aux += rV
        else:
            augs.append((n_aux, None))
    rows = sum(E.shape[0] for E in eqs)
    Mbig = np.zeros((rows, nV * nU + n_aux), dtype=np.int64)
    r0 = 0
    for E, (base, aug) in zip(eqs, augs):
        Mbig[r0 : r0 + E.shape[0], : nV * nU] = E
        if aug is not None:
            Mbig[r0 : r0 + E.shape[0], nV * nU + base : nV * nU + base + aug.shape[1]] = aug
        r0 += E.shape[0]
    sols = zl.nullspace_mod(Mbig.T, p, k)
    if sols.shape[0] == 0:
        return []
    X = sols[:, : nV * nU]
    X = zl.howell_form(X, m)
    return [X[t].reshape(nV, nU) for t in range(X.shape[0])]


@dataclass(frozen=True)
class EndoRing:
    module: GModule
    basis: tuple  # spanning matrices
    precision: int

    @property
    def dim(self):
        return len(self.basis)


def intertwiner_basis(U, V):
    """Exact integer basis of the equivariant maps U -> V between lattices."""
    if not (U.ring.is_lattice and V.ring.is_lattice):
        raise ValueError("intertwiner_basis is for lattices")
    if U.group is not V.group:
        raise ValueError("intertwiner_basis needs a common group")
    nU, nV = U.rank, V.rank
    if nU == 0 or nV == 0:
        return []
    Es = []
    for g in U.group.generators:
        A = zl.to_object(U.act(g))
        B = zl.to_object(V.act(g))
        Es.append(np.kron(zl.eye(nV), A.T) - np.kron(B, zl.eye(nU)))
    if Es:
        K0 = zl.kernel_saturated(np.vstack(Es).T)
    else:
        K0 = zl.hnf_rows(zl.eye(nU * nV))
    return [K0[t].reshape(nV, nU) for t in range(K0.shape[0])]


def endomorphism_ring(U, precision=None):
    """Basis of all matrices commuting with the action.

    Lattices: an exact integer basis (saturated kernel of the commutator
    system) with the Maranda working precision attached. Finite modules:
    Howell generators over Z/p^k.
    """
    if U.ring.is_lattice:
        K = precision or maranda_precision(U.group)
        basis = intertwiner_basis(U, U)
        return EndoRing(U, tuple(basis), K)
    gens = hom_generators(U, U)
    return EndoRing(U, tuple(gens), precision or U.ring.k)


# ---------------------------------------------------------------------------
# F_p linear helpers


def rref_p(M, p):
    """Reduced row echelon mod p; returns (rows, pivot column list)."""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        sel = None
        for i in range(r, rows):
            if M[i, c] % p:
                sel = i
                break
        if sel is None:
            continue
        M[[r, sel]] = M[[sel, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


class FpSpan:
    """F_p row space with coordinate solving in terms of inserted vectors.

    Echelon rows stay reduced against earlier pivots only; solving walks
    rows in insertion order, which suffices because each new row is fully
    reduced against all previous ones when inserted.
    """

    def __init__(self, dim, p, capacity):
        self.dim = dim
        self.p = p
        self.capacity = capacity
        self.rows = []
        self.pivots = []
        self.combos = []  # row as combo of inserted vectors
        self.count = 0

    def _reduce(self, v):
        v = np.array(v, dtype=np.int64) % self.p
        combo = np.zeros(self.capacity, dtype=np.int64)
        for row, c, cb in zip(self.rows, self.pivots, self.combos):
            f = int(v[c])
            if f:
                v = (v - f * row) % self.p
                combo = (combo - f * cb) % self.p
        return v, combo

    def insert(self, v):
        """Add a vector to the generating list; True if the span grew."""
        if self.count >= self.capacity:
            raise ValueError("FpSpan capacity exceeded")
        idx = self.count
        self.count += 1
        r, combo = self._reduce(v)
        combo[idx] = (combo[idx] + 1) % self.p
        if not r.any():
            return False
        c = int(np.nonzero(r)[0][0])
        inv = pow(int(r[c]), -1, self.p)
        self.rows.append((r * inv) % self.p)
        self.pivots.append(c)
        self.combos.append((combo * inv) % self.p)
        return True

    def contains(self, v):
        r, _ = self._reduce(v)
        return not r.any()

    def solve(self, v):
        """Coefficients over the inserted vectors expressing v, or None."""
        r, combo = self._reduce(v)
        if r.any():
            return None
        return (-combo) % self.p

    @property
    def rank(self):
        return len(self.rows)


# ---------------------------------------------------------------------------
# the mod-p endomorphism algebra acting on M/pM


def _modp_quotient(M):
    """Echelon data of the relation span mod p; quotient coords = non-pivots."""
    p = M.ring.p
    if M.relations.shape[0]:
        ech, pivots = rref_p(M.relations, p)
    else:
        ech, pivots = np.zeros((0, M.rank), dtype=np.int64), []
    keep = [j for j in range(M.rank) if j not in pivots]
    return ech, pivots, keep


def _reduce_vec_modp(v, ech, pivots, p):
    v = np.array(v, dtype=np.int64) % p
    for row, c in zip(ech, pivots):
        if v[c]:
            v = (v - v[c] * row) % p
    return v


def _induced_modp(X, ech, pivots, keep, p):
    """Matrix of the endomorphism X on the quotient space M/pM."""
    d = len(keep)
    out = np.zeros((d, d), dtype=np.int64)
    for col, j in enumerate(keep):
        w = _reduce_vec_modp(X[:, j], ech, pivots, p)
        out[:, col] = w[keep]
    return out


class EndoModP:
    """Image of the endomorphism ring in End(M/pM), with coordinates."""

    def __init__(self, M, endo_gens):
        self.module = M
        self.p = M.ring.p
        self.module_endo_gens = list(endo_gens)
        ech, pivots, keep = _modp_quotient(M)
        self.dim_space = len(keep)
        self.reduced = [_induced_modp(X, ech, pivots, keep, self.p) for X in endo_gens]
        self.span = FpSpan(self.dim_space**2, self.p, max(1, len(endo_gens)))
        self.basis = []
        for R in self.reduced:
            if self.span.insert(R.reshape(-1)):
                self.basis.append(R)

    def solve_endo_coords(self, mat):
        """Express a quotient-space matrix as a combo of the endo generators."""
        return self.span.solve(np.asarray(mat).reshape(-1))


def berkowitz_charpoly_modp(A, p):
    """Coefficients [1, c1, ..., cn] of det(xI - A) mod p, division-free."""
    A = np.asarray(A, dtype=np.int64) % p
    n = A.shape[0]
    c = np.array([1], dtype=np.int64)
    for k in range(1, n + 1):
        a = int(A[k - 1, k - 1])
        v = np.zeros(k + 1, dtype=np.int64)
        v[0] = 1
        v[1] = (-a) % p
        if k >= 2:
            r = A[k - 1, : k - 1]
            col = A[: k - 1, k - 1]
            Mk = A[: k - 1, : k - 1]
            w = col.copy()
            for j in range(2, k + 1):
                v[j] = (-(r @ w)) % p
                w = (Mk @ w) % p
        newc = np.zeros(k + 1, dtype=np.int64)
        for i in range(k + 1):
            s = 0
            for j in range(len(c)):
                if 0 <= i - j <= k:
                    s += v[i - j] * c[j]
            newc[i] = s % p
        c = newc
    return c


def _commutes(mats, p):
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if (((mats[i] @ mats[j]) - (mats[j] @ mats[i])) % p).any():
                return False
    return True


def _subspace_product(basisA, basisB, p, dim):
    span = FpSpan(dim * dim, p, len(basisA) * len(basisB) + 1)
    out = []
    for a in basisA:
        for b in basisB:
            prod = (a @ b) % p
            if span.insert(prod.reshape(-1)):
                out.append(prod)
    return out


def _frobenius_matrix(basis, reducer, p):
    """Matrix of x -> x^p on a commutative algebra span (coords via reducer)."""
    d = len(basis)
    F = np.zeros((d, d), dtype=np.int64)
    for j, b in enumerate(basis):
        power = b.copy()
        for _ in range(p - 1):
            power = (power @ b) % p
        coords = reducer(power)
        if coords is None:
            raise CertificationFailed("Frobenius leaves the algebra span")
        F[:, j] = coords
    return F


class _QuotientAlgebra:
    """A'/rad presented by complement basis matrices with reduction mod rad."""

    def __init__(self, alg_basis, rad_basis, p, dim_space):
        self.p = p
        self.dim_space = dim_space
        probe = FpSpan(dim_space**2, p, len(rad_basis) + len(alg_basis) + 1)
        for r in rad_basis:
            probe.insert(r.reshape(-1))
        self.basis = []
        self.positions = []
        for a in alg_basis:
            pos = probe.count
            if probe.insert(a.reshape(-1)):
                self.basis.append(a)
                self.positions.append(pos)
        self.coord_span = probe

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, mat):
        """Coordinates in the complement basis (radical part discarded)."""
        sol = self.coord_span.solve(np.asarray(mat).reshape(-1))
        if sol is None:
            return None
        return sol[self.positions] % self.p

    def from_coords(self, c):
        out = np.zeros((self.dim_space, self.dim_space), dtype=np.int64)
        for i, f in enumerate(c):
            if f:
                out = (out + int(f) * self.basis[i]) % self.p
        return out

    def mul(self, c1, c2):
        return self.coords(self.from_coords(c1) @ self.from_coords(c2) % self.p)

    def one(self):
        return self.coords(np.eye(self.dim_space, dtype=np.int64))

    def is_commutative(self):
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                a, b = self.basis[i], self.basis[j]
                if self.coords((a @ b - b @ a) % self.p) is None:
                    raise CertificationFailed("quotient multiplication left the span")
                d = self.coords((a @ b) % self.p) - self.coords((b @ a) % self.p)
                if (d % self.p).any():
                    return False
        return True

    def frobenius(self):
        d = self.dim
        F = np.zeros((d, d), dtype=np.int64)
        for j in range(d):
            b = self.basis[j]
            power = b.copy()
            for _ in range(self.p - 1):
                power = (power @ b) % self.p
            coords = self.coords(power)
            if coords is None:
                raise CertificationFailed("Frobenius left the quotient span")
            F[:, j] = coords
        return F


def _radical_ciw(alg_basis, p, dim_space):
    """Characteristic-p radical chain (trace coefficients c_{p^i})."""
    J = list(alg_basis)
    if not J:
        return []
    pi = 1
    while pi <= dim_space:
        if not J:
            break
        rowsM = np.zeros((len(J), len(J)), dtype=np.int64)
        for yi, y in enumerate(J):
            for xi, x in enumerate(J):
                cp = berkowitz_charpoly_modp((x @ y) % p, p)
                rowsM[yi, xi] = cp[pi] if pi < len(cp) else 0
        # kernel of rowsM (as x-coordinates)
        E, pivots = rref_p(rowsM, p)
        free = [c for c in range(len(J)) if c not in pivots]
        newJ = []
        for fc in free:
            gamma = np.zeros(len(J), dtype=np.int64)
            gamma[fc] = 1
            for rr, pc in enumerate(pivots):
                gamma[pc] = (-E[rr, fc]) % p
            x = np.zeros((dim_space, dim_space), dtype=np.int64)
            for t, f in enumerate(gamma):
                if f:
                    x = (x + int(f) * J[t]) % p
            newJ.append(x)
        J = newJ
        pi *= p
    return J


def _verify_nilpotent_ideal(alg_basis, rad_basis, p, dim_space):
    if not rad_basis:
        return True
    span = FpSpan(dim_space**2, p, len(rad_basis) + 1)
    for r in rad_basis:
        span.insert(r.reshape(-1))
    for a in alg_basis:
        for r in rad_basis:
            if not span.contains(((a @ r) % p).reshape(-1)):
                return False
            if not span.contains(((r @ a) % p).reshape(-1)):
                return False
    power = list(rad_basis)
    for _ in range(dim_space + 1):
        power = _subspace_product(power, rad_basis, p, dim_space)
        if not power:
            return True
    return False


def _commutative_radical(alg_basis, p, dim_space):
    """Nilradical of a commutative matrix algebra via iterated Frobenius kernel."""
    probe = FpSpan(dim_space**2, p, len(alg_basis) + 1)
    basis = []
    for a in alg_basis:
        if probe.insert(a.reshape(-1)):
            basis.append(a)
    d = len(basis)
    if d == 0:
        return []
    span = FpSpan(dim_space**2, p, d)
    for b in basis:
        span.insert(b.reshape(-1))

    def reducer(mat):
        return span.solve(np.asarray(mat).reshape(-1))

    F = _frobenius_matrix(basis, reducer, p)
    t = 1
    while p**t < max(2, dim_space):
        t += 1
    Ft = np.eye(d, dtype=np.int64)
    for _ in range(t):
        Ft = (F @ Ft) % p
    E, pivots = rref_p(Ft, p)  # right kernel of F^t
    free = [c for c in range(d) if c not in pivots]
    out = []
    for fc in free:
        gamma = np.zeros(d, dtype=np.int64)
        gamma[fc] = 1
        for rr, pc in enumerate(pivots):
            gamma[pc] = (-E[rr, fc]) % p
        x = np.zeros((dim_space, dim_space), dtype=np.int64)
        for i, f in enumerate(gamma):
            if f:
                x = (x + int(f) * basis[i]) % p
        out.append(x)
    return out


def _minpoly_roots_in_quotient(S, c_elem):
    """Minimal polynomial of a quotient element with x^p = x: distinct roots."""
    p = S.p
    # powers of the element until linear dependence
    d = S.dim
    span = FpSpan(d, p, p + 2)
    powers = [S.one()]
    span.insert(powers[0])
    cur = c_elem
    coeffs = None
    for _ in range(p + 1):
        sol = span.solve(cur)
        if sol is not None:
            coeffs = sol  # cur = sum coeffs_i * b^i
            break
        span.insert(cur)
        powers.append(cur)
        cur = S.mul(cur, c_elem)
    if coeffs is None:
        raise CertificationFailed("minimal polynomial did not terminate")
    deg = len(powers)
    # min poly m(x) = x^deg - sum coeffs_i x^i
    poly = [(-int(coeffs[i])) % p for i in range(deg)] + [1]
    roots = [a for a in range(p) if _eval_poly_modp(poly, a, p) == 0]
    return poly, roots


def _eval_poly_modp(poly, a, p):
    acc = 0
    for c in reversed(poly):
        acc = (acc * a + c) % p
    return acc


def _spectral_idempotent(S, b_coords):
    """Nontrivial idempotent in S from a Frobenius-fixed element, or None."""
    p = S.p
    poly, roots = _minpoly_roots_in_quotient(S, b_coords)
    if len(poly) - 1 < 2 or len(roots) < 2:
        return None
    # e = prod_{t>0} (b - a_t) / (a_0 - a_t), projector onto the a_0 eigenspace
    a0 = roots[0]
    e = S.one()
    for at in roots[1:]:
        shifted = (b_coords - at * S.one()) % p
        factor = pow((a0 - at) % p, -1, p)
        e = S.mul(e, (shifted * factor) % p)
    one = S.one()
    if not (e % p).any() or not ((e - one) % p).any():
        return None
    return e


def _newton_idempotent_matrix_modp(E0, p, max_iter):
    """Lift an idempotent-mod-radical matrix to an exact idempotent mod p."""
    E = E0 % p
    for _ in range(max_iter):
        sq = (E @ E) % p
        if np.array_equal(sq, E):
            return E
        E = (3 * sq - 2 * ((sq @ E) % p)) % p
    raise CertificationFailed("idempotent lift mod p did not converge")


def _is_zero_map(M, X):
    m = M.ring.modulus
    X = X % m
    if not X.any():
        return True
    if M.relations.shape[0] == 0:
        return False
    return zl.howell_member(M.relations, X.T, M.ring.p, M.ring.k)


def _is_idempotent_map(M, X):
    m = M.ring.modulus
    return _is_zero_map(M, (zl.matmul_mod(X, X, m) - X) % m)


def _newton_idempotent_modk(M, X):
    """Newton-lift to an exact idempotent endomorphism of the finite module M."""
    m = M.ring.modulus
    for _ in range(2 * M.ring.k + 6):
        if _is_idempotent_map(M, X):
            return X
        sq = zl.matmul_mod(X, X, m)
        X = (3 * sq - 2 * zl.matmul_mod(sq, X, m)) % m
    raise NoConvergence("idempotent lifting mod p^k did not stabilize")


# ---------------------------------------------------------------------------
# Fitting splittings


@dataclass(frozen=True)
class FittingSplit:
    split: bool
    reason: str | None  # 'nilpotent' | 'invertible' when not split
    kernel: tuple | None  # (GModule, inclusion rows)
    image: tuple | None
    power: np.ndarray | None = None


def _submodule_size(M, rows_howell):
    base = 1
    if M.relations.shape[0]:
        base = zl.howell_size(M.relations, M.ring.p, M.ring.k)
    if rows_howell.shape[0] == 0:
        return 1
    return zl.howell_size(rows_howell, M.ring.p, M.ring.k) // base


def fitting_split(M, e):
    """Fitting decomposition M = ker(e^m) + im(e^m) for stabilized m.

    Returns NoSplit (reason nilpotent/invertible) or the two summands as
    standalone modules with inclusion witnesses.
    """
    if M.ring.is_lattice:
        raise ValueError("fitting_split acts on finite modules")
    p, k = M.ring.p, M.ring.k
    m = M.ring.modulus
    n = M.rank
    if n == 0 or M.size() == 1:
        return FittingSplit(False, "nilpotent", None, None)
    E = np.asarray(e, dtype=np.int64) % m
    length = max(2, k * n)
    doublings = 1
    while (1 << doublings) < length:
        doublings += 1
    for _ in range(doublings):
        E = zl.matmul_mod(E, E, m)
    rel = M.relations
    im_stack = [E.T] + ([rel] if rel.shape[0] else [])
    im_h = zl.howell_form(np.vstack(im_stack), m)
    im_size = _submodule_size(M, im_h)
    total = M.size()
    if im_size == total:
        return FittingSplit(False, "invertible", None, None, power=E)
    if im_size == 1:
        return FittingSplit(False, "nilpotent", None, None, power=E)
    r = rel.shape[0]
    if r:
        sys = np.hstack([E, (-rel.T) % m])
    else:
        sys = E
    sols = zl.nullspace_mod(sys.T, p, k)
    ker_rows = sols[:, :n] if sols.shape[0] else np.zeros((0, n), np.int64)
    ker_stack = [ker_rows] + ([rel] if r else [])
    ker_h = zl.howell_form(np.vstack(ker_stack), m)
    ker_size = _submodule_size(M, ker_h)
    if ker_size * im_size != total:
        raise CertificationFailed("Fitting parts do not complement (internal error)")
    both = zl.howell_form(np.vstack([ker_h, im_h]), m)
    if not np.array_equal(both, zl.howell_form(np.eye(n, dtype=np.int64), m)):
        raise CertificationFailed("Fitting parts do not span (internal error)")
    ker_mod, ker_incl = submodule_as_module(M, ker_h)
    im_mod, im_incl = submodule_as_module(M, im_h)
    return FittingSplit(True, None, (ker_mod, ker_incl), (im_mod, im_incl), power=E)


# ---------------------------------------------------------------------------
# idempotent lifting (public operation)


def lift_idempotent(E, e_bar):
    """Lift an idempotent mod p into an exact idempotent at working precision.

    E is an EndoRing; e_bar must be idempotent mod p and lie in the span
    of E's basis mod p. Newton iteration e <- 3e^2 - 2e^3.
    """
    U = E.module
    p = U.ring.p
    e_bar = np.asarray(e_bar, dtype=np.int64) % p
    n = U.rank
    if e_bar.shape != (n, n):
        raise NotIdempotent("shape mismatch")
    if U.ring.is_lattice:
        K = E.precision
        work = reduce_mod(U, K)
    else:
        K = U.ring.k
        work = U
    m = p**K
    # idempotency mod p, as a map
    dbar = (e_bar @ e_bar - e_bar) % p
    if dbar.any():
        rel = work.relations % p if work.relations.shape[0] else None
        if rel is None or not zl.howell_member(zl.howell_form(rel, p), dbar.T, p, 1):
            raise NotIdempotent("input is not idempotent mod p")
    span = FpSpan(n * n, p, max(1, len(E.basis)))
    reduced = [to_int64_mod(B, p) for B in E.basis]
    for B in reduced:
        span.insert(B.reshape(-1))
    coeffs = span.solve(e_bar.reshape(-1))
    if coeffs is None:
        raise NotIdempotent("input is not in the span of the endomorphism ring mod p")
    X = np.zeros((n, n), dtype=np.int64)
    for c, B in zip(coeffs, E.basis):
        if c:
            X = (X + int(c) * to_int64_mod(B, m)) % m
    try:
        return _newton_idempotent_modk(work, X)
    except NoConvergence:
        raise NoConvergence("idempotent not liftable within the span") from None


# ---------------------------------------------------------------------------
# certified decomposition into indecomposables


@dataclass(frozen=True)
class Summand:
    module: GModule
    inclusion_rows: np.ndarray  # rows inside the working module
    certificate: str
    label: object = None  # SubgroupHandle of the coset type, when recognized
    label_words: tuple = ()


@dataclass(frozen=True)
class Decomposition:
    source: GModule
    working: GModule  # source reduced to the working precision (or itself)
    summands: tuple
    change_of_basis: np.ndarray | None
    precision: int
    seed: int
    transcript: tuple


def _top_dimension(M):
    """dim of M / (p, augmentation) M over F_p; 1 certifies indecomposable."""
    p = M.ring.p
    rows = [M.relations % p] if M.relations.shape[0] else []
    for g in M.group.generators:
        rows.append((M.act(g) - np.eye(M.rank, dtype=np.int64)).T % p)
    if not rows:
        return M.rank
    stack = np.vstack(rows)
    _, pivots = rref_p(stack, p)
    return M.rank - len(pivots)


def _combine_and_lift(piece, coeffs, emp, X):
    m = piece.ring.modulus
    for c, E in zip(coeffs, emp.module_endo_gens):
        if c:
            X = (X + int(c) * E) % m
    return _newton_idempotent_modk(piece, X)


def _decompose_finite(M, seed, random_budget=48):
    """List of (module, inclusion rows, certificate) summands of a finite module."""
    rng = np.random.default_rng(seed)
    transcript = []
    out = []
    top_incl = zl.howell_form(np.eye(M.rank, dtype=np.int64), M.ring.modulus) if M.rank else np.zeros((0, 0), np.int64)
    stack = [(M, np.eye(M.rank, dtype=np.int64))]
    while stack:
        piece, incl = stack.pop()
        if piece.rank == 0 or piece.size() == 1:
            continue
        if _top_dimension(piece) == 1:
            out.append((piece, incl, "cyclic-top"))
            continue
        endo = hom_generators(piece, piece)
        split = None
        for X in endo:
            fs = fitting_split(piece, X)
            if fs.split:
                split = fs
                transcript.append("split by endo generator")
                break
        if split is None:
            p = piece.ring.p
            m = piece.ring.modulus
            for _ in range(random_budget):
                coeffs = rng.integers(0, p, len(endo))
                if not coeffs.any():
                    continue
                X = np.zeros((piece.rank, piece.rank), dtype=np.int64)
                for c, E in zip(coeffs, endo):
                    if c:
                        X = (X + int(c) * E) % m
                fs = fitting_split(piece, X)
                if fs.split:
                    split = fs
                    transcript.append("split by random combination")
                    break
        if split is None:
            emp_holder = EndoModP(piece, endo)
            verdict, payload = _certify_or_find_idempotent(piece, endo, emp_holder, rng, transcript)
            if verdict == "indecomposable":
                out.append((piece, incl, payload))
                continue
            fs = fitting_split(piece, payload)
            if not fs.split:
                raise CertificationFailed("certified idempotent failed to split")
            split = fs
            transcript.append("split by certified idempotent")
        (km, krows), (im, irows) = split.kernel, split.image
        stack.append((km, (krows @ incl) % M.ring.modulus))
        stack.append((im, (irows @ incl) % M.ring.modulus))
    out.sort(key=_summand_sort_key)
    return out, transcript


def _certify_or_find_idempotent(piece, endo_gens, emp, rng, transcript):
    p = piece.ring.p
    d = emp.dim_space
    basis = emp.basis
    if len(basis) <= 1:
        return "indecomposable", "local-endo(dim<=1)"
    if _commutes(basis, p):
        rad = _commutative_radical(basis, p, d)
        cert = "local-endo(commutative)"
    else:
        rad = _radical_ciw(basis, p, d)
        if not _verify_nilpotent_ideal(basis, rad, p, d):
            raise CertificationFailed("radical verification failed")
        cert = "local-endo(radical-chain)"
    S = _QuotientAlgebra(basis, rad, p, d)
    if S.dim == 0:
        raise CertificationFailed("semisimple quotient collapsed")
    if S.is_commutative():
        F = S.frobenius()
        _, piv = rref_p(F, p)
        if len(piv) != S.dim:
            raise CertificationFailed("semisimple quotient has nilpotents")
        FI = (F - np.eye(S.dim, dtype=np.int64)) % p
        E, pivots = rref_p(FI, p)
        free = [c for c in range(S.dim) if c not in pivots]
        if len(free) == 1:
            return "indecomposable", cert
        one = S.one()
        for fc in free:
            gamma = np.zeros(S.dim, dtype=np.int64)
            gamma[fc] = 1
            for rr, pc in enumerate(pivots):
                gamma[pc] = (-E[rr, fc]) % p
            probe = FpSpan(S.dim, p, 2)
            probe.insert(one)
            if probe.contains(gamma):
                continue
            e_S = _spectral_idempotent(S, gamma)
            if e_S is not None:
                ebar = _newton_idempotent_matrix_modp(S.from_coords(e_S), p, d + 4)
                coeffs = emp.solve_endo_coords(ebar)
                if coeffs is None:
                    raise CertificationFailed("idempotent escaped the endomorphism span")
                X = np.zeros((piece.rank, piece.rank), dtype=np.int64)
                return "idempotent", _combine_and_lift(piece, coeffs, emp, X)
        raise CertificationFailed("no splitting idempotent among Frobenius-fixed elements")
    budget = 1000
    tried = 0
    while tried < budget:
        if tried < len(S.basis):
            c = S.coords(S.basis[tried])
        else:
            c = rng.integers(0, p, S.dim).astype(np.int64)
        tried += 1
        if c is None or not (c % p).any():
            continue
        e_S = _spectral_idempotent(S, c % p)
        if e_S is not None:
            transcript.append(f"noncommutative splitter after {tried} candidates")
            ebar = _newton_idempotent_matrix_modp(S.from_coords(e_S), p, d + 4)
            coeffs = emp.solve_endo_coords(ebar)
            if coeffs is None:
                raise CertificationFailed("idempotent escaped the endomorphism span")
            X = np.zeros((piece.rank, piece.rank), dtype=np.int64)
            return "idempotent", _combine_and_lift(piece, coeffs, emp, X)
    raise CertificationFailed("noncommutative quotient but no splitter found")


def _summand_sort_key(item):
    mod, incl, cert = item
    prof = mod.torsion_profile()
    return (prof.divisors, mod.rank, incl.shape, tuple(np.asarray(incl).reshape(-1).tolist()))


def decompose_indecomposables(U, seed=0, precision=None):
    """Complete decomposition into certified indecomposables.

    Lattices are decomposed at Maranda precision (default v_p(|G|) + 1);
    the summands are reported at that working precision.
    """
    if U.ring.is_lattice:
        K = precision or maranda_precision(U.group)
        M = reduce_mod(U, K)
    else:
        K = U.ring.k
        M = U
    parts, transcript = _decompose_finite(M, seed)
    summands = tuple(Summand(module=mod, inclusion_rows=incl, certificate=cert)
                     for mod, incl, cert in parts)
    cob = None
    if M.relations.shape[0] == 0 and summands:
        T = np.vstack([s.inclusion_rows for s in summands]) % M.ring.modulus
        if T.shape[0] == T.shape[1]:
            inv = zl.inv_mod(T, M.ring.p, M.ring.k)
            if inv is None:
                raise CertificationFailed("summand bases do not form a basis")
            _verify_block_diagonal(M, T, summands)
            cob = T
    return Decomposition(source=U, working=M, summands=summands, change_of_basis=cob,
                         precision=K, seed=seed, transcript=tuple(transcript))


def _verify_block_diagonal(M, T, summands):
    m = M.ring.modulus
    p, k = M.ring.p, M.ring.k
    PT = T.T % m
    inv = zl.inv_mod(PT, p, k)
    sizes = [s.module.rank for s in summands]
    for g in M.group.generators:
        B = zl.matmul_mod(zl.matmul_mod(inv, M.act(g), m), PT, m)
        off = 0
        for r in sizes:
            block = B[off : off + r, :].copy()
            block[:, off : off + r] = 0
            if block.any():
                raise CertificationFailed("change of basis is not block-diagonal")
            off += r


# ---------------------------------------------------------------------------
# isomorphism testing


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    witness: np.ndarray | None
    transcript: dict


def _unit_hom(X, M, N):
    """Is the hom X: M -> N an isomorphism? (Nakayama: unit iff unit mod p)."""
    if M.size() != N.size():
        return False
    p = M.ring.p
    echM, pivM, keepM = _modp_quotient(M)
    echN, pivN, keepN = _modp_quotient(N)
    if len(keepM) != len(keepN):
        return False
    d = len(keepM)
    ind = np.zeros((d, d), dtype=np.int64)
    for col, j in enumerate(keepM):
        w = _reduce_vec_modp(X[:, j], echN, pivN, p)
        ind[:, col] = w[keepN]
    _, piv = rref_p(ind, p)
    return len(piv) == d


def is_isomorphic(U, V, seed=0, budget=256, precision=None):
    """Isomorphism test with an explicit invertible intertwiner as witness.

    Deterministic sweep over the Hom generators first (complete whenever
    both modules are indecomposable), then seeded random combinations,
    then comparison of endomorphism-ring invariants; the staged transcript
    makes negative answers auditable.
    """
    transcript = {"stages": []}
    if U.group is not V.group:
        raise ValueError("is_isomorphic needs a common group")
    if U.ring.is_lattice != V.ring.is_lattice:
        raise ValueError("is_isomorphic needs a common ring")
    if U.ring.is_lattice:
        if U.rank != V.rank:
            transcript["stages"].append("rank mismatch")
            return IsoResult(False, None, transcript)
        K = precision or maranda_precision(U.group)
        transcript["precision"] = K
        return _finite_iso(reduce_mod(U, K), reduce_mod(V, K), seed, budget, transcript)
    if U.ring != V.ring:
        raise ValueError("is_isomorphic needs a common ring")
    return _finite_iso(U, V, seed, budget, transcript)


def _finite_iso(M, N, seed, budget, transcript):
    if M.torsion_profile() != N.torsion_profile():
        transcript["stages"].append("profile mismatch")
        return IsoResult(False, None, transcript)
    if M.size() == 1:
        transcript["stages"].append("zero modules")
        return IsoResult(True, np.zeros((N.rank, M.rank), np.int64), transcript)
    gens = hom_generators(M, N)
    for X in gens:
        if _unit_hom(X, M, N):
            transcript["stages"].append("basis sweep hit")
            return IsoResult(True, X, transcript)
    transcript["stages"].append(f"basis sweep exhausted ({len(gens)} generators)")
    p = M.ring.p
    m = M.ring.modulus
    rng = np.random.default_rng(seed)
    for t in range(budget):
        coeffs = rng.integers(0, p, len(gens))
        if not coeffs.any():
            continue
        X = np.zeros((N.rank, M.rank), dtype=np.int64)
        for c, H in zip(coeffs, gens):
            if c:
                X = (X + int(c) * H) % m
        if _unit_hom(X, M, N):
            transcript["stages"].append(f"random combination hit at draw {t}")
            return IsoResult(True, X, transcript)
    transcript["stages"].append(f"random budget exhausted ({budget})")
    invM = _endo_invariants(M)
    invN = _endo_invariants(N)
    transcript["endo_invariants"] = [invM, invN]
    if invM != invN:
        transcript["stages"].append("endomorphism invariants differ")
    else:
        transcript["stages"].append("endomorphism invariants agree; returning false")
    return IsoResult(False, None, transcript)


def _endo_invariants(M):
    gens = hom_generators(M, M)
    emp = EndoModP(M, gens)
    dims = [len(emp.basis)]
    p = M.ring.p
    if _commutes(emp.basis, p):
        rad = _commutative_radical(emp.basis, p, emp.dim_space)
    else:
        rad = _radical_ciw(emp.basis, p, emp.dim_space)
    span = FpSpan(emp.dim_space**2, p, len(rad) + 1)
    for r in rad:
        span.insert(r.reshape(-1))
    dims.append(span.rank)
    return tuple(dims)


def _iso_indecomposable(M, N):
    """Complete isomorphism test for certified-indecomposable modules.

    Non-isomorphisms between indecomposables are closed under addition,
    so if no Howell generator of Hom is a unit, no combination is.
    """
    if M.torsion_profile() != N.torsion_profile():
        return False, None
    for X in hom_generators(M, N):
        if _unit_hom(X, M, N):
            return True, X
    return False, None


# ---------------------------------------------------------------------------
# recognition of permutation modules


@dataclass(frozen=True)
class RecognitionResult:
    is_permutation: bool
    multiset: tuple  # ((SubgroupHandle, multiplicity), ...) canonical order
    decomposition: Decomposition
    offending: object  # Summand that matched nothing, or None
    transcript: tuple

    def multiset_by_words(self, G):
        out = []
        for H, mult in self.multiset:
            words = tuple(G.word_str(x) for x in H.elements)
            out.append((words, mult))
        return tuple(out)


def subgroup_classes(G):
    """Conjugacy classes of subgroups of G, canonical representatives."""
    key = "conj_classes"
    if key not in G._cache:
        G._cache[key] = orbit_reps_gamma(full_subgroup(G), G)
    return G._cache[key]


def _candidate_modules(G, ring, k):
    key = ("perm_candidates", ring.kind, ring.p, k)
    if key not in G._cache:
        cands = []
        for cls in subgroup_classes(G):
            H = cls.rep
            C = permutation_lattice(G, H, finite_ring(G.p, k))
            if _top_dimension(C) != 1:
                raise CertificationFailed("coset module with non-cyclic top")
            cands.append((H, C))
        G._cache[key] = cands
    return G._cache[key]


def recognize_permutation(U, seed=0, precision=None):
    """Match each indecomposable summand against coset modules R[G/H].

    Success returns the multiset of stabilizer classes; failure reports
    the first summand isomorphic to no coset module. For lattices the
    match happens at Maranda precision, which decides the lattice-level
    question exactly.
    """
    cache_key = ("recognition", seed, precision)
    cached = U._cache.get(cache_key)
    if cached is not None:
        return cached
    G = U.group
    D = decompose_indecomposables(U, seed=seed, precision=precision)
    k = D.precision if U.ring.is_lattice else U.ring.k
    cands = _candidate_modules(G, U.ring, k)
    counts = {}
    labeled = []
    transcript = []
    offending = None
    ok = True
    for s in D.summands:
        prof = s.module.torsion_profile()
        match = None
        if prof.divisors and len(prof.divisors) == 1 and prof.divisors[0][:2] == (G.p, k):
            r = prof.divisors[0][2]
            for H, C in cands:
                if C.rank != r:
                    continue
                iso, wit = _iso_indecomposable(s.module, C)
                if iso:
                    match = (H, wit)
                    break
        if match is None:
            ok = False
            offending = s
            transcript.append(f"summand of rank {s.module.rank} matched no coset module")
            break
        H, _ = match
        counts[H.elements] = counts.get(H.elements, 0) + 1
        labeled.append(Summand(module=s.module, inclusion_rows=s.inclusion_rows,
                               certificate=s.certificate, label=H,
                               label_words=tuple(G.word_str(x) for x in H.elements)))
    if ok:
        D = Decomposition(source=D.source, working=D.working, summands=tuple(labeled),
                          change_of_basis=D.change_of_basis, precision=D.precision,
                          seed=D.seed, transcript=D.transcript)
    by_handle = {cls.rep.elements: cls.rep for cls in subgroup_classes(G)}
    multiset = tuple(sorted(((by_handle[e], m) for e, m in counts.items()),
                            key=lambda t: (t[0].order, t[0].elements)))
    result = RecognitionResult(is_permutation=ok, multiset=multiset if ok else (),
                               decomposition=D, offending=offending,
                               transcript=tuple(transcript))
    U._cache[cache_key] = result
    return result


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple  # ((exponent i, GModule free over Z/p^i, multiset), ...)
    complete: bool


@dataclass(frozen=True)
class BlockResult:
    is_permutation_block: bool
    structure: BlockStructure | None
    failure: str | None  # 'NotBlock' | 'BlockNotPermutation'
    offending: object
    transcript: tuple


def represent_free_over(S, i):
    """Re-present a finite module of pure exponent p^i as free over Z/p^i."""
    p = S.ring.p
    rel = stacked_relations(S)
    Srel, _, V = zl.smith_normal_form(rel)
    n = S.rank
    diag = [int(Srel[j, j]) for j in range(min(Srel.shape))]
    keep = []
    target = p**i
    for j in range(n):
        d = diag[j] if j < len(diag) else 0
        if d == 1:
            continue
        if d != target:
            raise ValueError("module is not of pure exponent")
        keep.append(j)
    Vinv = zl.RowSolver(V).solve(zl.eye(n))
    P = V[:, keep]
    sigma = Vinv[keep, :]
    acts = []
    for gi in range(len(S.group.generators)):
        A = zl.to_object(S.act(S.group.generators[gi]))
        C = sigma @ A.T @ P
        acts.append(to_int64_mod(C.T, target))
    return make_module(S.group, finite_ring(p, i), len(keep), acts, check=False)


def recognize_permutation_block(M, seed=0):
    """Decompose, group indecomposables by pure torsion exponent, and run
    permutation recognition blockwise over (Z/p^i)[G]."""
    if M.ring.is_lattice:
        raise ValueError("recognize_permutation_block acts on finite modules")
    G = M.group
    p = M.ring.p
    D = decompose_indecomposables(M, seed=seed)
    groups = {}
    for s in D.summands:
        prof = s.module.torsion_profile()
        if len(prof.divisors) != 1:
            return BlockResult(False, None, "NotBlock", s,
                               (f"summand mixes exponents: {prof.divisors}",))
        q, i, r = prof.divisors[0]
        groups.setdefault(i, []).append(s)
    blocks = []
    from .gmodule import direct_sum

    for i in sorted(groups):
        frees = [represent_free_over(s.module, i) for s in groups[i]]
        block_mod = frees[0] if len(frees) == 1 else direct_sum(frees)
        rec = recognize_permutation(block_mod, seed=seed)
        if not rec.is_permutation:
            return BlockResult(False, None, "BlockNotPermutation", rec.offending,
                               (f"block at exponent {i} is not a permutation module",))
        blocks.append((i, block_mod, rec.multiset))
    return BlockResult(True, BlockStructure(blocks=tuple(blocks), complete=True), None,
                       None, ())


@dataclass(frozen=True)
class ClassifyResult:
    is_permutation: bool
    classes: tuple  # ((GammaClass.rep, multiplicity, summand rows tuple), ...)
    gamma: tuple
    recognition: RecognitionResult
    trivial_class_multiplicity: int  # multiplicity of F(N)
    elem_map: tuple  # restricted-group element -> ambient element

    def class_multiplicity(self, rep_elements):
        for rep, mult, _ in self.classes:
            if rep.elements == rep_elements:
                return mult
        return 0


def classify_restriction(U, N, seed=0, precision=None):
    """Decompose the restriction to N into isotypic permutation parts F(H).

    Classes are reported against the N-conjugation orbit representatives
    of subgroups of N (ambient element indexing); multiplicity of the full
    class [N] is the rank of the maximal trivial summand F(N).
    """
    G = U.group
    UN = restriction(U, N)
    Ngrp, emap = subgroup_as_group(G, N)
    rec = recognize_permutation(UN, seed=seed, precision=precision)
    gamma = orbit_reps_gamma(N, G)
    if not rec.is_permutation:
        return ClassifyResult(False, (), tuple(gamma), rec, 0, tuple(emap))
    # map recognized stabilizers (in Ngrp indexing) to ambient gamma classes
    member_index = {}
    for ci, cls in enumerate(gamma):
        for mem in cls.members:
            member_index[mem.elements] = ci
    counts = {ci: 0 for ci in range(len(gamma))}
    rows_by_class = {ci: [] for ci in range(len(gamma))}
    for s in rec.decomposition.summands:
        amb = tuple(sorted(emap[x] for x in s.label.elements))
        ci = member_index[amb]
        counts[ci] += 1
        rows_by_class[ci].append(s.inclusion_rows)
    classes = []
    triv_mult = 0
    for ci, cls in enumerate(gamma):
        if counts[ci] or cls.rep.order == N.order:
            classes.append((cls.rep, counts[ci], tuple(rows_by_class[ci])))
        if cls.rep.order == N.order:
            triv_mult = counts[ci]
    return ClassifyResult(True, tuple(classes), tuple(gamma), rec, triv_mult, tuple(emap))
