"""The verification layer: evaluates restriction / coflasqueness /
coinvariants / block conditions for a lattice with a chosen normal
subgroup, produces certified verdicts, and cross-checks every verdict
against direct Krull-Schmidt recognition.

A mismatch between the condition-based conclusion and direct recognition
can only be an implementation bug (the equivalence is a theorem), so it
raises CrossCheckMismatch instead of picking a side.
"""

from dataclasses import dataclass, field

import numpy as np

from . import zlinalg as zl
from .cohomo import is_coflasque
from .errors import (
    CrossCheckMismatch,
    NotNormal,
    RestrictionNotPermutation,
    TargetNotPermutation,
)
from .gmodule import (
    ModuleMap,
    coinvariants,
    direct_sum,
    fixed_points,
    make_module,
    permutation_lattice,
    quotient_by_fixed_coinv,
    to_int64_mod,
    trivial_module,
)
from .krs import (
    classify_restriction,
    hom_generators,
    maranda_precision,
    recognize_permutation,
    recognize_permutation_block,
)
from .pgroup import enumerate_subgroups, trivial_subgroup


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    detail: dict


@dataclass(frozen=True)
class VerdictReport:
    module_id: str
    subgroup: tuple  # element indices of N
    subgroup_words: tuple
    condition1: ConditionReport | None
    condition2a: ConditionReport | None
    condition2b: ConditionReport | None
    condition3: ConditionReport | None
    conclusion: str  # 'Permutation' | 'NotPermutation' | 'Inconclusive'
    cross_check: str | None
    certificates: dict
    trace: tuple = ()

    def to_json_dict(self):
        def cond(c):
            if c is None:
                return None
            return {"pass": bool(c.passed), **_jsonable(c.detail)}

        return {
            "module_id": self.module_id,
            "subgroup": list(self.subgroup),
            "subgroup_words": list(self.subgroup_words),
            "condition1": cond(self.condition1),
            "condition2a": cond(self.condition2a),
            "condition2b": cond(self.condition2b),
            "condition3": cond(self.condition3),
            "conclusion": self.conclusion,
            "cross_check": self.cross_check,
            "certificates": _jsonable(self.certificates),
            "trace": _jsonable(list(self.trace)),
        }


def _jsonable(obj):
    import numpy as _np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, _np.ndarray):
        return [[str(int(x)) for x in row] for row in obj] if obj.ndim == 2 else [
            str(int(x)) for x in obj
        ]
    if isinstance(obj, (_np.integer,)):
        return int(obj)
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    if hasattr(obj, "elements"):
        return {"elements": list(obj.elements), "order": obj.order}
    if hasattr(obj, "divisors"):
        return {"free_rank": obj.free_rank,
                "divisors": [list(d) for d in obj.divisors]}
    return str(obj)


def _multiset_json(G, multiset):
    return [
        {"stabilizer_class": [G.word_str(x) for x in H.elements], "multiplicity": m}
        for H, m in multiset
    ]


# ---------------------------------------------------------------------------
# condition evaluators


def _eval_condition1(U, N, seed, precision):
    cr = classify_restriction(U, N, seed=seed, precision=precision)
    detail = {
        "classes": [
            {"class": [U.group.word_str(x) for x in rep.elements], "multiplicity": m}
            for rep, m, _ in cr.classes
        ]
        if cr.is_permutation
        else [],
        "maximal_trivial_multiplicity": cr.trivial_class_multiplicity,
    }
    if not cr.is_permutation and cr.recognition.offending is not None:
        detail["offending_rank"] = cr.recognition.offending.module.rank
    return ConditionReport(cr.is_permutation, detail), cr


def _eval_condition2a(U, N, seed):
    fp = fixed_points(U, N)
    res = is_coflasque(fp.module)
    detail = {"fixed_rank": fp.module.rank}
    if not res.ok:
        detail["witness_subgroup"] = res.witness
        detail["witness_h1"] = res.witness_profile
    return ConditionReport(res.ok, detail), fp


def _eval_condition2b(U, N, seed, precision):
    cv = coinvariants(U, N)
    detail = {"torsion_profile": cv.profile}
    if not cv.profile.is_free:
        detail["reason"] = "coinvariants have torsion, hence are not a permutation module"
        return ConditionReport(False, detail), cv, None
    rec = recognize_permutation(cv.module, seed=seed)
    detail["recognition"] = _multiset_json(cv.module.group, rec.multiset) if rec.is_permutation else "NotPermutation"
    return ConditionReport(rec.is_permutation, detail), cv, rec


def _eval_condition3(U, N, seed):
    qf = quotient_by_fixed_coinv(U, N)
    res = recognize_permutation_block(qf.module, seed=seed)
    detail = {"profile": qf.profile, "trivial_action": qf.module.has_trivial_action()}
    if res.is_permutation_block:
        detail["blocks"] = [
            {"exponent": i, "rank": B.rank,
             "recognition": _multiset_json(B.group, mult)}
            for i, B, mult in res.structure.blocks
        ]
    else:
        detail["failure"] = res.failure
    return ConditionReport(res.is_permutation_block, detail), qf, res


# ---------------------------------------------------------------------------
# main entry points


def check_main_theorem(U, N, module_id="module", seed=0, precision=None,
                       evaluate_all=True, cross_check=True):
    """Evaluate all characterization conditions and conclude by equivalence.

    With evaluate_all=False, condition 2b short-circuits the remaining
    conditions as soon as the verdict is determined (2b is evaluated
    before 2a; a torsion coinvariant module settles the answer without
    any cohomology). Full reports always evaluate everything.
    """
    if not N.is_normal:
        raise NotNormal("check_main_theorem requires a normal subgroup")
    G = U.group
    certificates = {}
    c1 = c2a = c2b = c3 = None
    cr = None
    if evaluate_all:
        c1, cr = _eval_condition1(U, N, seed, precision)
        c2b, cv, rec2b = _eval_condition2b(U, N, seed, precision)
        c2a, fp = _eval_condition2a(U, N, seed)
        c3, qf, res3 = _eval_condition3(U, N, seed)
        passed = c1.passed and c2a.passed and c2b.passed and c3.passed
    else:
        c2b, cv, rec2b = _eval_condition2b(U, N, seed, precision)
        if not c2b.passed:
            passed = False
        else:
            c1, cr = _eval_condition1(U, N, seed, precision)
            if not c1.passed:
                passed = False
            else:
                c2a, fp = _eval_condition2a(U, N, seed)
                if not c2a.passed:
                    passed = False
                else:
                    c3, qf, res3 = _eval_condition3(U, N, seed)
                    passed = c3.passed
    conclusion = "Permutation" if passed else "NotPermutation"
    cross = None
    if cross_check:
        direct = recognize_permutation(U, seed=seed, precision=precision)
        cross = "Permutation" if direct.is_permutation else "NotPermutation"
        certificates["direct_recognition"] = (
            _multiset_json(G, direct.multiset) if direct.is_permutation else "NotPermutation"
        )
        if cross != conclusion:
            raise CrossCheckMismatch(
                f"conditions give {conclusion} but direct recognition gives {cross}"
            )
    if cr is not None and cr.is_permutation:
        certificates["restriction_classes"] = [
            {"class": [G.word_str(x) for x in rep.elements], "multiplicity": m}
            for rep, m, _ in cr.classes
        ]
    return VerdictReport(
        module_id=module_id,
        subgroup=tuple(N.elements),
        subgroup_words=tuple(G.word_str(x) for x in N.elements),
        condition1=c1,
        condition2a=c2a,
        condition2b=c2b,
        condition3=c3,
        conclusion=conclusion,
        cross_check=cross,
        certificates=certificates,
    )


def check_weiss_msz(U, N, module_id="module", seed=0, precision=None):
    """Sufficiency check: restriction free plus fixed points permutation.

    One-directional; failure of a hypothesis yields Inconclusive, never
    NotPermutation.
    """
    if not N.is_normal:
        raise NotNormal("check_weiss_msz requires a normal subgroup")
    G = U.group
    c1, cr = _eval_condition1(U, N, seed, precision)
    free = False
    if cr.is_permutation:
        free = all(
            (m == 0 or rep.order == 1) for rep, m, _ in cr.classes
        )
    hyp1 = ConditionReport(free, {"restriction_is_free": free})
    fp = fixed_points(U, N)
    rec = recognize_permutation(fp.module, seed=seed)
    hyp2 = ConditionReport(rec.is_permutation, {
        "fixed_recognition": _multiset_json(fp.module.group, rec.multiset)
        if rec.is_permutation
        else "NotPermutation"
    })
    if hyp1.passed and hyp2.passed:
        conclusion = "Permutation"
        direct = recognize_permutation(U, seed=seed, precision=precision)
        if not direct.is_permutation:
            raise CrossCheckMismatch("sufficiency hypotheses hold but recognition fails")
    else:
        conclusion = "Inconclusive"
    return VerdictReport(
        module_id=module_id,
        subgroup=tuple(N.elements),
        subgroup_words=tuple(G.word_str(x) for x in N.elements),
        condition1=hyp1,
        condition2a=None,
        condition2b=hyp2,
        condition3=None,
        conclusion=conclusion,
        cross_check=None,
        certificates={},
    )


def recursive_is_permutation(U, seed=0):
    """Decide permutation-ness along a chain of central order-p subgroups.

    At each level the restriction condition reduces to torsion-freeness
    of the coinvariants (valid for |N| = p since the ring has prime p),
    the quotient-level recognition of the coinvariants is replaced by a
    recursive call, and coflasqueness plus the block condition are
    checked directly. Returns (bool, trace).
    """
    G = U.group
    if G.order == 1:
        return True, {"group_order": 1, "result": True, "reason": "trivial group"}
    if U.rank == 0:
        return True, {"group_order": G.order, "result": True, "reason": "zero module"}
    N = enumerate_subgroups(G, "order_p_central")[0]
    node = {
        "group_order": G.order,
        "central_subgroup": tuple(N.elements),
        "central_subgroup_words": tuple(G.word_str(x) for x in N.elements),
    }
    cv = coinvariants(U, N)
    cond1 = cv.profile.is_free
    node["condition1_coinvariants_torsion_free"] = cond1
    node["coinvariants_profile"] = cv.profile
    fp = fixed_points(U, N)
    cf = is_coflasque(fp.module)
    node["condition2a_fixed_coflasque"] = cf.ok
    if not cf.ok:
        node["coflasque_witness"] = tuple(cf.witness.elements)
    qf = quotient_by_fixed_coinv(U, N)
    blk = recognize_permutation_block(qf.module, seed=seed)
    node["condition3_block"] = blk.is_permutation_block
    if cond1 and cv.module is not None:
        sub_ok, sub_trace = recursive_is_permutation(cv.module, seed=seed)
        node["condition2b_recursive"] = sub_ok
        node["recursion"] = sub_trace
    else:
        sub_ok = False
        node["condition2b_recursive"] = False
    result = cond1 and cf.ok and blk.is_permutation_block and sub_ok
    node["result"] = result
    return result, node


# ---------------------------------------------------------------------------
# filtration subspaces (the mod-p block filtration of the coinvariants)


@dataclass(frozen=True)
class FiltrationResult:
    k: int
    basis: np.ndarray  # Howell rows mod p inside the reduced coinvariants
    g_stable: bool


def filtration_subspace(U, N, k, seed=0, classify=None):
    """Image mod p of the partial sum of F(H)_N over |H| >= p^k.

    Requires the restriction to be a permutation module; reports the
    subspace in Howell form and whether every group generator fixes it.
    """
    cr = classify if classify is not None else classify_restriction(U, N, seed=seed)
    if not cr.is_permutation:
        raise RestrictionNotPermutation("filtration needs a permutation restriction")
    cv = coinvariants(U, N)
    if cv.module is None or not cv.module.ring.is_lattice:
        raise RestrictionNotPermutation("coinvariants must be a lattice here")
    p = U.ring.p
    Q = cv.module
    P = cv.proj_rows  # U coords -> U_N coords (row convention)
    rows = []
    for rep, mult, bases in cr.classes:
        if rep.order < p**k or mult == 0:
            continue
        for B in bases:
            img = to_int64_mod(zl.to_object(B) @ P, p)
            rows.append(img)
    if not rows:
        basis = np.zeros((0, Q.rank), dtype=np.int64)
        return FiltrationResult(k=k, basis=basis, g_stable=True)
    stacked = np.vstack(rows) % p
    basis = zl.howell_form(stacked, p)
    stable = True
    for g in Q.group.generators:
        img = (basis @ to_int64_mod(Q.act(g), p).T) % p
        if basis.shape[0] == 0:
            continue
        if not zl.howell_member(basis, img, p, 1):
            stable = False
            break
    return FiltrationResult(k=k, basis=basis, g_stable=stable)


# ---------------------------------------------------------------------------
# supersurjective splitting


@dataclass(frozen=True)
class SplitOutcome:
    splits: bool
    witness_subgroup: object  # minimal failing subgroup when not supersurjective
    section: np.ndarray | None  # integer matrix S with f S = d * id
    denominator: int | None  # unit at p


def _fixed_map_surjective_p_locally(f, H):
    U, V = f.source, f.target
    BU = fixed_points(U, H, strict=False).embedding_rows
    BV = fixed_points(V, H, strict=False).embedding_rows
    if BV.shape[0] == 0:
        return True
    img = BU @ zl.to_object(f.matrix).T
    solver = zl.RowSolver(BV)
    C = solver.solve(img)
    if C is None:
        raise ValueError("map does not send fixed points into fixed points")
    prof = zl.cokernel_structure(C, BV.shape[0])
    if prof.free_rank:
        return False
    return not prof.p_exponents(U.ring.p)


def is_supersurjective(f):
    """Check surjectivity of the induced fixed-point maps, all subgroups.

    Returns (ok, minimal failing SubgroupHandle or None).
    """
    G = f.source.group
    for H in enumerate_subgroups(G):
        if not _fixed_map_surjective_p_locally(f, H):
            return False, H
    return True, None


def supersurjective_split(f, seed=0):
    """Split a supersurjective map onto a recognized permutation module.

    On success returns an exact section certificate (S, d): an integer
    matrix and a denominator coprime to p with f S = d * identity and S
    equivariant, i.e. S/d is a section over the p-local ring.
    """
    U, V = f.source, f.target
    rec = recognize_permutation(V, seed=seed)
    if not rec.is_permutation:
        raise TargetNotPermutation("supersurjective_split needs a permutation target")
    ok, witness = is_supersurjective(f)
    if not ok:
        return SplitOutcome(False, witness, None, None)
    G = U.group
    p = U.ring.p
    nU, nV = U.rank, V.rank
    F = zl.to_object(f.matrix)
    # unknowns vec(S) (nU x nV, row-major) plus the shared denominator d
    n_unk = nU * nV + 1
    rows = []
    # f S = d I_V
    for i in range(nV):
        for j in range(nV):
            row = [0] * n_unk
            for t in range(nU):
                row[t * nV + j] = int(F[i, t])
            if i == j:
                row[n_unk - 1] = -1
            rows.append(row)
    # S act_V(g) = act_U(g) S
    for g in G.generators:
        A = zl.to_object(U.act(g))
        B = zl.to_object(V.act(g))
        for i in range(nU):
            for j in range(nV):
                row = [0] * n_unk
                for t in range(nV):
                    row[i * nV + t] = row[i * nV + t] + int(B[t, j])
                for s in range(nU):
                    row[s * nV + j] = row[s * nV + j] - int(A[i, s])
                rows.append(row)
    Mbig = zl.asmat(rows)
    K = zl.kernel_saturated(Mbig.T)
    best = None
    for t in range(K.shape[0]):
        vec = K[t]
        d = int(vec[n_unk - 1])
        if d == 0:
            continue
        if best is None:
            best = (d, vec.copy())
        else:
            g0, u, v = zl._xgcd(best[0], d)
            if abs(g0) < abs(best[0]):
                best = (g0, u * best[1] + v * vec)
    if best is None or best[0] % p == 0:
        raise CrossCheckMismatch("supersurjective map admits no p-unit section (bug)")
    d, vec = best
    if d < 0:
        d, vec = -d, -vec
    S = zl.zeros(nU, nV)
    for i in range(nU):
        for j in range(nV):
            S[i, j] = vec[i * nV + j]
    assert np.array_equal(F @ S, d * zl.eye(nV))
    return SplitOutcome(True, None, S, d)


# ---------------------------------------------------------------------------
# coflasque covers (corpus support)


def coflasque_cover(M, seed=0):
    """Supersurjective map from a permutation lattice onto M.

    For every subgroup class L and every basis vector v of M^L, one
    summand R[G/L] maps by gL -> g.v; the element eL of that summand is
    L-fixed and hits v, so every induced fixed-point map is surjective by
    construction. The seed shuffles a disguise of M first.
    """
    from .corpus import _elementary_disguise
    from .gmodule import make_module
    from .krs import subgroup_classes

    G = M.group
    if seed:
        T, Tinv = _elementary_disguise(M.rank, seed, ops=12)
        acts = [T @ zl.to_object(M.act(g)) @ Tinv for g in G.generators]
        M = make_module(G, M.ring, M.rank, acts, check=False)
    parts = []
    cols = []
    for cls in subgroup_classes(G):
        L = cls.rep
        B = fixed_points(M, L, strict=False).embedding_rows
        for t in range(B.shape[0]):
            v = B[t]
            part = permutation_lattice(G, L)
            # coset representatives in the order used by permutation_lattice
            reps = _coset_reps(G, L)
            block = zl.zeros(M.rank, part.rank)
            for i, rep in enumerate(reps):
                block[:, i] = zl.to_object(M.act(rep)) @ v
            parts.append(part)
            cols.append(block)
    Q = direct_sum(parts)
    F = np.hstack(cols)
    fmap = ModuleMap(source=Q, target=M, matrix=F)
    ok, bad = is_supersurjective(fmap)
    if not ok:
        raise AssertionError(f"cover construction not supersurjective at {bad}")
    return fmap


def _coset_reps(G, H):
    coset_of = {}
    reps = []
    T = G.mul_table
    for g in range(G.order):
        if g in coset_of:
            continue
        coset = sorted(int(T[g, h]) for h in H.elements)
        for x in coset:
            coset_of[x] = len(reps)
        reps.append(coset[0])
    return reps


def coflasque_cover_kernel(G, seed=0):
    """Kernel of a supersurjective cover of the augmentation ideal.

    Coflasque by the long exact sequence: the cokernel of each induced
    fixed-point map vanishes and the cover is a permutation lattice.
    """
    from .corpus import augmentation_ideal
    from .gmodule import submodule_as_module

    M = augmentation_ideal(G)
    fmap = coflasque_cover(M, seed=seed)
    ker = zl.kernel_saturated(zl.to_object(fmap.matrix).T)
    if ker.shape[0] == 0:
        raise AssertionError("cover kernel is zero (unexpected)")
    mod, _ = submodule_as_module(fmap.source, ker)
    return mod
