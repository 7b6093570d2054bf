"""G-lattices over Z_p and finite G-modules over Z/p^k.

Conventions, used consistently everywhere:

* module elements are column vectors; g acts by x -> act(g) @ x, so
  act(gh) = act(g) @ act(h);
* generating sets of submodules are stored as matrices whose ROWS are
  the generators (element coordinates transposed); applying g to a row
  matrix B is B @ act(g).T;
* a finite module is (Z/p^k)^rank modulo the row span of ``relations``
  (Howell form mod p^k; the p^k·identity relations are implicit in the
  ring and appended wherever integer structure computations need them).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import zlinalg as zl
from .errors import MixedRing, NotNested, NotNormal, PrecisionLoss, ValidationError
from .pgroup import PGroup, QuotientData, SubgroupHandle, make_handle, quotient_group, subgroup_as_group


@dataclass(frozen=True)
class Ring:
    kind: str  # "lattice" | "finite"
    p: int
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("lattice", "finite"):
            raise ValueError(f"bad ring kind {self.kind!r}")
        if self.kind == "finite" and (self.k is None or self.k < 1):
            raise ValueError("finite ring needs k >= 1")

    @property
    def is_lattice(self):
        return self.kind == "lattice"

    @property
    def modulus(self):
        if self.is_lattice:
            raise ValueError("lattice ring has no modulus")
        return self.p**self.k

    def describe(self):
        return f"Z_{self.p}" if self.is_lattice else f"Z/{self.p}^{self.k}"


def lattice_ring(p):
    return Ring("lattice", p)


def finite_ring(p, k):
    return Ring("finite", p, k)


@dataclass(frozen=True, eq=False)
class GModule:
    group: PGroup
    ring: Ring
    rank: int
    relations: np.ndarray  # (r, rank); int64 Howell rows for finite, empty for lattice
    gen_action: tuple  # matrices aligned with group.generators
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def act(self, idx):
        """Action matrix of element idx (cached, derived from generator words)."""
        if idx == 0:
            return self._eye()
        cached = self._cache.get(idx)
        if cached is not None:
            return cached
        word = self.group.element_words[idx]
        A = self.gen_action[word[0]]
        for gi in word[1:]:
            A = A @ self.gen_action[gi]
            if not self.ring.is_lattice:
                A = A % self.ring.modulus
        self._cache[idx] = A
        return A

    def _eye(self):
        if self.ring.is_lattice:
            return zl.eye(self.rank)
        return np.eye(self.rank, dtype=np.int64)

    def apply_rows(self, rows, idx):
        """Apply the action of element idx to row-stored vectors."""
        out = rows @ self.act(idx).T
        if not self.ring.is_lattice:
            out = out % self.ring.modulus
        return out

    def size(self):
        """Cardinality for finite modules."""
        if self.ring.is_lattice:
            raise ValueError("lattice modules are infinite")
        m_pow = self.ring.p ** (self.ring.k * self.rank)
        if self.relations.shape[0] == 0:
            return m_pow
        return m_pow // zl.howell_size(self.relations, self.ring.p, self.ring.k)

    def torsion_profile(self):
        """Underlying abelian group type (finite modules)."""
        if self.ring.is_lattice:
            return zl.TorsionProfile(free_rank=self.rank, divisors=())
        rel = stacked_relations(self)
        return zl.cokernel_structure(rel, self.rank, p=self.ring.p)

    def has_trivial_action(self):
        for A in self.gen_action:
            if self.ring.is_lattice:
                if not np.array_equal(zl.asmat(A), zl.eye(self.rank)):
                    return False
            else:
                D = (A - np.eye(self.rank, dtype=np.int64)) % self.ring.modulus
                if D.any() and not (
                    self.relations.shape[0]
                    and zl.howell_member(self.relations, D.T, self.ring.p, self.ring.k)
                ):
                    return False
        return True

    def check_action_law(self):
        """Exhaustive action-law check act(g)act(h) = act(gh) (mod relations)."""
        n = self.group.order
        for a in range(n):
            Aa = self.act(a)
            for b in range(n):
                lhs = Aa @ self.act(b)
                rhs = self.act(self.group.mul(a, b))
                if self.ring.is_lattice:
                    if not np.array_equal(lhs, rhs):
                        raise ValidationError(f"action law fails at ({a},{b})")
                else:
                    D = (lhs - rhs) % self.ring.modulus
                    if D.any():
                        if self.relations.shape[0] == 0 or not zl.howell_member(
                            self.relations, D.T, self.ring.p, self.ring.k
                        ):
                            raise ValidationError(f"action law fails at ({a},{b})")
        return True


def stacked_relations(U):
    """Relations plus the implicit p^k identity rows, as object matrix."""
    if U.ring.is_lattice:
        return zl.zeros(0, U.rank)
    m = U.ring.modulus
    rows = [zl.to_object(U.relations)] if U.relations.shape[0] else []
    rows.append(m * zl.eye(U.rank))
    return np.vstack(rows) if rows else zl.zeros(0, U.rank)


def make_module(group, ring, rank, gen_action, relations=None, check=True):
    """Validated GModule constructor."""
    acts = []
    if len(gen_action) != len(group.generators):
        raise ValidationError("one action matrix per group generator required")
    for A in gen_action:
        if ring.is_lattice:
            A = zl.asmat(A)
        else:
            A = np.asarray(A, dtype=np.int64) % ring.modulus
        if A.shape != (rank, rank):
            raise ValidationError(f"action matrix shape {A.shape} != rank {rank}")
        acts.append(A)
    if relations is None or (hasattr(relations, "shape") and relations.shape[0] == 0):
        relations = np.zeros((0, rank), dtype=np.int64)
    else:
        if ring.is_lattice:
            raise ValidationError("lattice modules cannot carry relations")
        relations = zl.howell_form(np.asarray(relations, dtype=np.int64), ring.modulus)
    U = GModule(group=group, ring=ring, rank=rank, relations=relations, gen_action=tuple(acts))
    if check:
        _check_invertible(U)
        _check_relations_stable(U)
    return U


def _check_invertible(U):
    for gi, A in enumerate(U.gen_action):
        if U.rank == 0:
            continue
        if U.ring.is_lattice:
            d = zl.det_bareiss(A)
            if d not in (1, -1):
                raise ValidationError(
                    f"action of generator {U.group.generator_names[gi]} has det {d}, not a unit"
                )
        else:
            if zl.inv_mod(A, U.ring.p, U.ring.k) is None:
                raise ValidationError(
                    f"action of generator {U.group.generator_names[gi]} is singular mod p"
                )


def _check_relations_stable(U):
    if U.ring.is_lattice or U.relations.shape[0] == 0:
        return
    p, k = U.ring.p, U.ring.k
    for A in U.gen_action:
        img = (U.relations @ A.T) % U.ring.modulus
        if not zl.howell_member(U.relations, img, p, k):
            raise ValidationError("relations are not stable under the action")


@dataclass(frozen=True)
class ModuleMap:
    """A map of modules; matrix is (target.rank x source.rank), columns act."""

    source: GModule
    target: GModule
    matrix: np.ndarray

    def apply_rows(self, rows):
        if self.target.ring.is_lattice:
            return zl.asmat(rows) @ zl.to_object(self.matrix).T
        return (np.asarray(rows, dtype=np.int64) @ self.matrix.T) % self.target.ring.modulus


# ---------------------------------------------------------------------------
# constructors


def trivial_module(G, rank, ring):
    if ring.is_lattice:
        acts = [zl.eye(rank) for _ in G.generators]
    else:
        acts = [np.eye(rank, dtype=np.int64) for _ in G.generators]
    return make_module(G, ring, rank, acts, check=False)


def permutation_lattice(G, H, ring=None):
    """Coset module on G/H; a permutation matrix per generator."""
    if ring is None:
        ring = lattice_ring(G.p)
    T = G.mul_table
    coset_of = {}
    reps = []
    for g in range(G.order):
        if g in coset_of:
            continue
        coset = sorted(int(T[g, h]) for h in H.elements)
        for x in coset:
            coset_of[x] = len(reps)
        reps.append(coset[0])
    r = len(reps)
    acts = []
    for g in G.generators:
        A = np.zeros((r, r), dtype=np.int64)
        for i, rep in enumerate(reps):
            A[coset_of[int(T[g, rep])], i] = 1
        acts.append(A if not ring.is_lattice else zl.to_object(A))
    return make_module(G, ring, r, acts, check=False)


def direct_sum(parts):
    """Block-diagonal direct sum; parts share group and ring."""
    if not parts:
        raise ValueError("direct_sum of nothing is ambiguous; pass the zero module explicitly")
    G = parts[0].group
    ring = parts[0].ring
    for U in parts[1:]:
        if U.group is not G:
            raise MixedRing("direct_sum requires a common group")
        if U.ring != ring:
            raise MixedRing("direct_sum requires a common ring")
    rank = sum(U.rank for U in parts)
    acts = []
    for gi in range(len(G.generators)):
        if ring.is_lattice:
            A = zl.zeros(rank, rank)
        else:
            A = np.zeros((rank, rank), dtype=np.int64)
        off = 0
        for U in parts:
            A[off : off + U.rank, off : off + U.rank] = U.gen_action[gi]
            off += U.rank
        acts.append(A)
    rel_rows = []
    off = 0
    for U in parts:
        if U.relations.shape[0]:
            R = np.zeros((U.relations.shape[0], rank), dtype=np.int64)
            R[:, off : off + U.rank] = U.relations
            rel_rows.append(R)
        off += U.rank
    rel = np.vstack(rel_rows) if rel_rows else None
    return make_module(G, ring, rank, acts, relations=rel, check=False)


def restriction(U, H):
    """Restrict to a subgroup, re-presented as a standalone PGroup."""
    Hgrp, emap = subgroup_as_group(U.group, H)
    acts = [U.act(emap[g]) for g in Hgrp.generators]
    return make_module(Hgrp, U.ring, U.rank, acts, relations=U.relations.copy(), check=False)


def inflation(U, qdata, G):
    """View a module for G/N as a module for G through the projection."""
    acts = [U.act(qdata.projection[g]) for g in G.generators]
    return make_module(G, U.ring, U.rank, acts, relations=U.relations.copy(), check=False)


def project_subgroup(qdata, H):
    """Image of a subgroup under the quotient projection, as a handle."""
    elems = sorted({qdata.projection[x] for x in H.elements})
    return make_handle(qdata.quotient, elems)


def reduce_mod(U, k):
    """Reduce to Z/p^k; flags PrecisionLoss below the torsion exponent."""
    p = U.ring.p
    if not U.ring.is_lattice:
        if k > U.ring.k:
            raise ValueError("cannot increase precision of a finite module")
        exp = U.torsion_profile().exponent(p)
        if k < exp:
            warnings.warn(f"reducing below torsion exponent p^{exp}", PrecisionLoss)
    ring = finite_ring(p, k)
    m = ring.modulus
    acts = [np.asarray(to_int_matrix(A) % m, dtype=np.int64) for A in U.gen_action]
    rel = U.relations % m if U.relations.shape[0] else None
    return make_module(U.group, ring, U.rank, acts, relations=rel, check=False)


def to_int_matrix(A):
    A = np.asarray(A)
    if A.dtype == object:
        return np.array([[int(x) for x in row] for row in A], dtype=object)
    return A


# ---------------------------------------------------------------------------
# submodule / quotient presentation machinery


def submodule_as_module(U, rows, group=None, elem_of_gen=None):
    """Present a G-stable row span of U as a standalone module.

    group/elem_of_gen override the acting group (generator -> ambient
    element index); defaults to U's own group and generators. Returns
    (module, inclusion_rows) with inclusion_rows holding the new basis
    inside U's coordinates.
    """
    if group is None:
        group = U.group
        elem_of_gen = list(group.generators)
    if U.ring.is_lattice:
        B = zl.asmat(rows)
        solver = zl.RowSolver(B)
        acts = []
        for amb in elem_of_gen:
            img = B @ U.act(amb).T
            C = solver.solve(img)
            if C is None:
                raise ValidationError("row span is not stable under the action")
            acts.append(C.T)
        mod = make_module(group, U.ring, B.shape[0], acts, check=False)
        return mod, B
    p, k = U.ring.p, U.ring.k
    m = U.ring.modulus
    allrows = [np.asarray(rows, dtype=np.int64) % m]
    if U.relations.shape[0]:
        allrows.append(U.relations)
    S = zl.howell_form(np.vstack(allrows) if allrows else np.zeros((0, U.rank), np.int64), m)
    g = S.shape[0]
    if g == 0:
        mod = make_module(group, U.ring, 0, [np.zeros((0, 0), np.int64) for _ in group.generators],
                          check=False)
        return mod, np.zeros((0, U.rank), dtype=np.int64)
    solver = zl.ModSolver(S, p, k)
    # relations of the new presentation: coefficient rows whose combination
    # of the generators lands in the old relation span
    if U.relations.shape[0]:
        sols = zl.nullspace_mod(np.vstack([S, U.relations]), p, k)
        new_rel = zl.howell_form(sols[:, :g], m) if sols.shape[0] else sols[:, :g]
    else:
        new_rel = zl.nullspace_mod(S, p, k)
    acts = []
    for amb in elem_of_gen:
        img = (S @ U.act(amb).T) % m
        C, ok = solver.solve(img)
        if not ok.all():
            raise ValidationError("row span is not stable under the action")
        acts.append(C.T)
    mod = make_module(group, U.ring, g, acts, relations=new_rel, check=False)
    return mod, S


def quotient_as_module(U, rows, group=None, elem_of_gen=None):
    """Quotient of U by a G-stable row span.

    Lattice case requires the quotient to be torsion-free and returns
    (module, projection_rows P, section_rows); coordinates of the image
    of a row vector x are x @ P. Finite case keeps the ambient basis and
    enlarges relations (P is the identity).
    """
    if group is None:
        group = U.group
        elem_of_gen = list(group.generators)
    if not U.ring.is_lattice:
        m = U.ring.modulus
        stack = [np.asarray(rows, dtype=np.int64) % m]
        if U.relations.shape[0]:
            stack.append(U.relations)
        rel = zl.howell_form(np.vstack(stack), m)
        acts = [U.act(a) for a in elem_of_gen]
        mod = make_module(group, U.ring, U.rank, acts, relations=rel, check=False)
        P = np.eye(U.rank, dtype=np.int64)
        return mod, P, P
    B = zl.asmat(rows)
    n = U.rank
    if B.shape[0] == 0:
        acts = [U.act(a) for a in elem_of_gen]
        mod = make_module(group, U.ring, n, acts, check=False)
        return mod, zl.eye(n), zl.eye(n)
    S, _, V = zl.smith_normal_form(B)
    diag = [int(S[i, i]) for i in range(min(S.shape))]
    if any(d not in (0, 1) for d in diag):
        raise ValidationError("quotient has torsion; not a lattice")
    killed = sum(1 for d in diag if d == 1)
    free_cols = list(range(killed, n))
    P = V[:, free_cols]
    Vinv = zl.RowSolver(V).solve(zl.eye(n))
    sigma = Vinv[free_cols, :]
    acts = []
    for amb in elem_of_gen:
        C = sigma @ U.act(amb).T @ P
        acts.append(C.T)
    mod = make_module(group, U.ring, len(free_cols), acts, check=False)
    return mod, P, sigma


# ---------------------------------------------------------------------------
# invariants, coinvariants, norms


def _subgroup_generators(G, H):
    Hgrp, emap = subgroup_as_group(G, H)
    return [emap[g] for g in Hgrp.generators]


def augmentation_image(U, H):
    """Rows spanning I_H U (Howell/Hermite-reduced; generators of H suffice)."""
    gens = _subgroup_generators(U.group, H)
    if not gens:
        if U.ring.is_lattice:
            return zl.zeros(0, U.rank)
        return np.zeros((0, U.rank), dtype=np.int64)
    rows = []
    for g in gens:
        A = U.act(g)
        rows.append((A - (zl.eye(U.rank) if U.ring.is_lattice else np.eye(U.rank, np.int64))).T)
    stacked = np.vstack(rows)
    if U.ring.is_lattice:
        return zl.hnf_rows(stacked)
    stack2 = [np.asarray(stacked, dtype=np.int64) % U.ring.modulus]
    if U.relations.shape[0]:
        stack2.append(U.relations)
    return zl.howell_form(np.vstack(stack2), U.ring.modulus)


@dataclass(frozen=True)
class FixedPointsResult:
    module: GModule  # over G/H (strict mode)
    embedding_rows: np.ndarray  # basis rows inside U
    quotient: QuotientData
    embedding: ModuleMap


def fixed_points(U, H, strict=True):
    """Fixed submodule U^H with the induced G/H action.

    Lattice case returns the saturated fixed sublattice; finite case the
    exact fixed submodule (its presentation includes the relation span).
    """
    G = U.group
    if not H.is_normal:
        if strict:
            raise NotNormal("fixed_points requires a normal subgroup in strict mode")
    qdata = quotient_group(G, H) if H.is_normal else None
    gens = _subgroup_generators(G, H)
    n = U.rank
    if U.ring.is_lattice:
        if not gens:
            B = zl.eye(n)
        else:
            M = np.vstack([U.act(g) - zl.eye(n) for g in gens])
            B = zl.kernel_saturated(M.T)
    else:
        p, k = U.ring.p, U.ring.k
        m = U.ring.modulus
        if not gens:
            B = zl.howell_form(np.eye(n, dtype=np.int64), m)
        else:
            rel = U.relations
            nrel = rel.shape[0]
            blocks = []
            for t, g in enumerate(gens):
                cond = (U.act(g) - np.eye(n, dtype=np.int64)) % m
                row = [cond]
                for s in range(len(gens)):
                    if nrel:
                        row.append(rel.T if s == t else np.zeros((n, nrel), np.int64))
                blocks.append(np.hstack(row))
            Mbig = np.vstack(blocks)
            sols = zl.nullspace_mod(Mbig.T, p, k)
            B = sols[:, :n] if sols.shape[0] else np.zeros((0, n), np.int64)
            stack = [B] + ([rel] if nrel else [])
            B = zl.howell_form(np.vstack(stack) if stack else B, m)
    if H.is_normal:
        elem_of_gen = [qdata.section[g] for g in qdata.quotient.generators]
        mod, incl = submodule_as_module(U, B, group=qdata.quotient, elem_of_gen=elem_of_gen)
    else:
        from .pgroup import build_group

        triv = build_group(G.p)
        mod, incl = submodule_as_module(U, B, group=triv, elem_of_gen=[])
    emb = ModuleMap(source=mod, target=U, matrix=incl.T)
    return FixedPointsResult(module=mod, embedding_rows=incl, quotient=qdata, embedding=emb)


@dataclass(frozen=True)
class CoinvariantsResult:
    module: GModule | None  # None when the quotient mixes torsion and free rank
    projection: ModuleMap | None
    profile: zl.TorsionProfile
    aug_rows: np.ndarray  # rows spanning I_H U
    proj_rows: np.ndarray | None  # coords of image of row x are x @ proj_rows
    section_rows: np.ndarray | None


def coinvariants(U, H):
    """Coinvariants U_H = U / I_H U with the induced G/H action."""
    G = U.group
    if not H.is_normal:
        raise NotNormal("coinvariants requires a normal subgroup")
    qdata = quotient_group(G, H)
    elem_of_gen = [qdata.section[g] for g in qdata.quotient.generators]
    aug = augmentation_image(U, H)
    if U.ring.is_lattice:
        if aug.shape[0]:
            full = zl.cokernel_structure(aug, U.rank)
            if any(q != U.ring.p for q, _, _ in full.divisors):
                raise ValidationError("coinvariants produced prime-to-p torsion (bad input)")
            profile = full
        else:
            profile = zl.TorsionProfile(U.rank, ())
        if profile.is_free:
            mod, P, sigma = quotient_as_module(U, aug, group=qdata.quotient,
                                               elem_of_gen=elem_of_gen)
            proj = ModuleMap(source=U, target=mod, matrix=P.T)
            return CoinvariantsResult(mod, proj, profile, aug, P, sigma)
        if profile.is_finite:
            k = max(1, profile.exponent(U.ring.p))
            m = U.ring.p**k
            rel = zl.howell_form(to_int64_mod(aug, m), m)
            acts = [np.asarray(to_int64_mod(U.act(a), m)) for a in elem_of_gen]
            mod = make_module(qdata.quotient, finite_ring(U.ring.p, k), U.rank, acts,
                              relations=rel, check=False)
            proj = ModuleMap(source=U, target=mod, matrix=np.eye(U.rank, dtype=np.int64))
            return CoinvariantsResult(mod, proj, profile, aug, np.eye(U.rank, dtype=np.int64),
                                      np.eye(U.rank, dtype=np.int64))
        return CoinvariantsResult(None, None, profile, aug, None, None)
    # finite module: quotient keeps the ambient presentation
    mod, P, sigma = quotient_as_module(U, aug, group=qdata.quotient, elem_of_gen=elem_of_gen)
    profile = mod.torsion_profile()
    proj = ModuleMap(source=U, target=mod, matrix=np.eye(U.rank, dtype=np.int64))
    return CoinvariantsResult(mod, proj, profile, aug, P, sigma)


def to_int64_mod(A, m):
    A = np.asarray(A)
    if A.dtype == object:
        return np.array([[int(x) % m for x in row] for row in A], dtype=np.int64) if A.shape[0] else np.zeros(A.shape, np.int64)
    return np.asarray(A, dtype=np.int64) % m


@dataclass(frozen=True)
class QuotientByFixedResult:
    module: GModule  # (U/U^N)_N as a finite G/N-module
    profile: zl.TorsionProfile
    rho: ModuleMap | None  # U_N -> (U/U^N)_N when U_N is a lattice
    fixed: FixedPointsResult
    w_proj_rows: np.ndarray  # U coords -> U/U^N coords


def quotient_by_fixed_coinv(U, N):
    """Compute (U/U^N)_N as a finite G/N-module, with the map from U_N."""
    if not N.is_normal:
        raise NotNormal("quotient_by_fixed_coinv requires a normal subgroup")
    fp = fixed_points(U, N)
    G = U.group
    qdata = fp.quotient
    elem_of_gen = [qdata.section[g] for g in qdata.quotient.generators]
    W, PW, sigW = quotient_as_module(U, fp.embedding_rows, group=G,
                                     elem_of_gen=list(G.generators))
    aug_w = augmentation_image(W, N)
    profile = zl.cokernel_structure(aug_w, W.rank, p=U.ring.p) if aug_w.shape[0] else zl.TorsionProfile(W.rank, ())
    if U.rank and not profile.is_finite:
        raise ValidationError("(U/U^N)_N must be finite for a lattice U (internal error)")
    k = max(1, profile.exponent(U.ring.p))
    m = U.ring.p**k
    rel = zl.howell_form(to_int64_mod(aug_w, m), m) if aug_w.shape[0] else None
    acts = [to_int64_mod(W.act(a), m) for a in elem_of_gen]
    mod = make_module(qdata.quotient, finite_ring(U.ring.p, k), W.rank, acts,
                      relations=rel, check=False)
    un = coinvariants(U, N)
    rho = None
    if un.module is not None and un.module.ring.is_lattice:
        lift = un.section_rows  # U_N coords -> U coords
        mat = to_int64_mod(lift @ PW, m)
        rho = ModuleMap(source=un.module, target=mod, matrix=mat.T)
    return QuotientByFixedResult(module=mod, profile=profile, rho=rho, fixed=fp,
                                 w_proj_rows=PW)


def coset_transversal(G, N, M):
    """Minimal representatives of the cosets of M inside N."""
    reps = []
    seen = set()
    for x in N.elements:
        if x in seen:
            continue
        coset = {int(G.mul_table[x, mm]) for mm in M.elements}
        seen |= coset
        reps.append(min(coset))
    return reps


def coset_sum_matrix(U, N, M):
    """Matrix of multiplication by the coset sum of M in N."""
    S = None
    for r in coset_transversal(U.group, N, M):
        A = U.act(r)
        S = A if S is None else S + A
    if not U.ring.is_lattice:
        S = S % U.ring.modulus
    return S


def norm_operator(U, N, M):
    """Norm map U_N -> U_M given by the coset sum of N/M."""
    G = U.group
    if not set(M.elements) <= set(N.elements):
        raise NotNested("norm_operator needs M <= N")
    if not (N.is_normal and M.is_normal):
        raise NotNormal("norm_operator needs both subgroups normal")
    S = coset_sum_matrix(U, N, M)
    cN = coinvariants(U, N)
    cM = coinvariants(U, M)
    if cN.module is None or cM.module is None:
        raise ValidationError("norm_operator needs presentable coinvariants")
    if cN.module.ring.is_lattice and cM.module.ring.is_lattice:
        mat = (cN.section_rows @ S.T) @ cM.proj_rows
        return ModuleMap(source=cN.module, target=cM.module, matrix=mat.T)
    raise ValidationError("norm_operator implemented for lattice coinvariants")
