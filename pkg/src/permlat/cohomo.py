"""First group cohomology, Ext^1 between lattices, coflasqueness.

H^1 is computed over Z with exact Smith forms (no precision truncation),
so verdicts are unconditional. A 1-cocycle is determined by its values
on the generators; the values on all other elements are tracked through
the BFS word tree, and the cocycle identity is imposed for every pair
(generator, group element), which is equivalent to imposing it for all
pairs.
"""

from dataclasses import dataclass

import numpy as np

from . import zlinalg as zl
from .gmodule import GModule, make_module, restriction, stacked_relations
from .pgroup import enumerate_subgroups


@dataclass(frozen=True)
class CohomologyGroup:
    profile: zl.TorsionProfile
    representative_cocycles: tuple | None = None

    @property
    def is_trivial(self):
        return self.profile.is_trivial


@dataclass(frozen=True)
class CoflasqueResult:
    ok: bool
    witness: object  # minimal failing SubgroupHandle or None
    witness_profile: zl.TorsionProfile | None = None


def _generator_value_system(U):
    """Condition matrix over Z for cocycle generator values.

    Returns (Cond, mgens) where the unknown vector stacks one module
    element per group generator and Cond * unknowns = 0 (mod relations,
    handled by the caller) expresses the full cocycle identity.
    """
    L = U.group
    n = U.rank
    gens = L.generators
    m = len(gens)
    Z = zl.zeros(n, n)
    I = zl.eye(n)
    # coefficient matrices: value at element e is sum_j coeff[e][j] @ f_j
    coeff = [None] * L.order
    coeff[0] = [Z] * m
    for e in range(1, L.order):
        w = L.element_words[e]
        prev_word = w[:-1]
        gi = w[-1]
        # locate prev element by multiplying the word out
        prev = 0
        for t in prev_word:
            prev = L.mul(prev, gens[t])
        act_prev = zl.to_object(U.act(prev))
        row = [c.copy() for c in coeff[prev]]
        row[gi] = row[gi] + act_prev
        coeff[e] = row
    blocks = []
    for gi, g in enumerate(gens):
        act_g = zl.to_object(U.act(g))
        for x in range(1, L.order):
            gx = L.mul(g, x)
            D = []
            for j in range(m):
                M = coeff[gx][j] - act_g @ coeff[x][j]
                if j == gi:
                    M = M - I
                D.append(M)
            blocks.append(np.hstack(D))
    if not blocks:
        return zl.zeros(0, n * m), m
    return np.vstack(blocks), m


def _coboundary_rows(U):
    """Rows spanning B^1 in generator-value coordinates."""
    L = U.group
    n = U.rank
    I = zl.eye(n)
    cols = []
    for g in L.generators:
        cols.append(zl.to_object(U.act(g)) - I)
    if not cols:
        return zl.zeros(n, 0)
    return np.vstack(cols).T  # row t = coboundary of basis vector e_t


def h1(U, L=None):
    """H^1(L, U) for L the acting group of U (restrict first if needed)."""
    if L is not None and L is not U.group:
        raise ValueError("pass the module already restricted to L")
    L = U.group
    n = U.rank
    m = len(L.generators)
    if L.order == 1 or m == 0 or n == 0:
        return CohomologyGroup(profile=zl.TorsionProfile(0, ()))
    Cond, _ = _generator_value_system(U)
    rel = stacked_relations(U)
    if rel.shape[0]:
        # augment: Cond * F must land in the per-block relation span
        r = rel.shape[0]
        nblocks = Cond.shape[0] // n
        aug = zl.zeros(Cond.shape[0], nblocks * r)
        relT = rel.T
        for b in range(nblocks):
            aug[b * n : (b + 1) * n, b * r : (b + 1) * r] = relT
        Mbig = np.hstack([Cond, aug])
        K = zl.kernel_saturated(Mbig.T)
        sols = K[:, : n * m] if K.shape[0] else zl.zeros(0, n * m)
        # cocycle lattice contains the per-slot relation lattice
        slot_rel = zl.zeros(m * rel.shape[0], n * m)
        for j in range(m):
            slot_rel[j * rel.shape[0] : (j + 1) * rel.shape[0], j * n : (j + 1) * n] = rel
        Zb = zl.hnf_rows(np.vstack([sols, slot_rel]))
    else:
        Zb = zl.kernel_saturated(Cond.T)
    if Zb.shape[0] == 0:
        return CohomologyGroup(profile=zl.TorsionProfile(0, ()))
    B = _coboundary_rows(U)
    if rel.shape[0]:
        slot_rel = zl.zeros(m * rel.shape[0], n * m)
        for j in range(m):
            slot_rel[j * rel.shape[0] : (j + 1) * rel.shape[0], j * n : (j + 1) * n] = rel
        B = np.vstack([B, slot_rel])
    solver = zl.RowSolver(Zb)
    C = solver.solve(B)
    if C is None:
        raise AssertionError("coboundaries are not cocycles (internal error)")
    profile = zl.cokernel_structure(C, Zb.shape[0])
    assert profile.free_rank == 0, "H^1 of a finite group on a lattice is finite"
    order = L.order
    for q, e, _ in profile.divisors:
        assert order % (q**e) == 0, "H^1 exponent must divide |L|"
    return CohomologyGroup(profile=profile)


def is_coflasque(U, G=None):
    """H^1(L, U) = 0 for every subgroup L; minimal failing witness otherwise."""
    G = G or U.group
    for L in enumerate_subgroups(G):
        if L.order == 1:
            continue
        res = h1(restriction(U, L))
        if not res.is_trivial:
            return CoflasqueResult(ok=False, witness=L, witness_profile=res.profile)
    return CoflasqueResult(ok=True, witness=None)


def conjugation_hom_module(U, V):
    """Hom_R(U, V) with the conjugation action g.f = g o f o g^-1.

    Coordinates are the nV*nU matrix entries in row-major order, so the
    action matrix of g is kron(act_V(g), act_U(g^-1)^T).
    """
    if U.group is not V.group:
        raise ValueError("conjugation_hom_module needs a common group")
    if not (U.ring.is_lattice and V.ring.is_lattice):
        raise ValueError("conjugation_hom_module is for lattices")
    G = U.group
    nU, nV = U.rank, V.rank
    acts = []
    for g in G.generators:
        B = zl.to_object(V.act(g))
        Ainv = zl.to_object(U.act(G.inv(g)))
        acts.append(np.kron(B, Ainv.T) if nU * nV else zl.zeros(0, 0))
    return make_module(G, U.ring, nU * nV, acts, check=False)


def ext1(U, V):
    """Ext^1 between lattices as H^1 of the conjugation action on Hom_R(U, V)."""
    return h1(conjugation_hom_module(U, V))
