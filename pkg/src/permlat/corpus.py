"""Fixtures and generators: the embedded rank-9 counterexample lattice,
disguised permutation lattices, and non-permutation constructions.

Also hosts the small-group catalog (every 2-group of order <= 16 and
every 3-group of order <= 27) used by the property and acceptance
suites; catalog entries are built from explicit multiplication-table
formulas and cross-checked by invariant signatures.
"""

from dataclasses import dataclass

import numpy as np

from . import zlinalg as zl
from .errors import TrivialGroup
from .gmodule import (
    GModule,
    direct_sum,
    lattice_ring,
    make_module,
    permutation_lattice,
    submodule_as_module,
    trivial_module,
)
from .pgroup import PGroup, build_group, enumerate_subgroups, make_handle, subgroup_closure, trivial_subgroup


# ---------------------------------------------------------------------------
# small-group catalog


def _cyclic_perm(n):
    return [(i + 1) % n for i in range(n)]


def cyclic_group(p, n):
    if n == 1:
        return build_group(p)
    return build_group(p, generators=[_cyclic_perm(n)], generator_names=["g"])


def abelian_group(p, orders):
    """Direct product of cyclic groups of the given p-power orders."""
    total = 0
    perms = []
    offsets = []
    for n in orders:
        offsets.append(total)
        total += n
    for off, n in zip(offsets, orders):
        perm = list(range(total))
        for i in range(n):
            perm[off + i] = off + (i + 1) % n
        perms.append(perm)
    names = [f"g{i}" for i in range(len(orders))]
    return build_group(p, generators=perms, generator_names=names)


def _table_from_formula(n, mul):
    return [[mul(a, b) for b in range(n)] for a in range(n)]


def dihedral_group(n_rot):
    """Dihedral group of order 2*n_rot acting on n_rot points."""
    rot = _cyclic_perm(n_rot)
    ref = [(-i) % n_rot for i in range(n_rot)]
    return build_group(2, generators=[rot, ref], generator_names=["r", "s"])


def quaternion_group():
    """Q8 with elements 1,-1,i,-i,j,-j,k,-k encoded as 2*axis + sign."""

    table = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(a, b):
        sa, xa = (1 if a % 2 == 0 else -1), a // 2
        sb, xb = (1 if b % 2 == 0 else -1), b // 2
        s, x = table[(xa, xb)]
        s *= sa * sb
        return 2 * x + (0 if s == 1 else 1)

    return build_group(2, mul_table=_table_from_formula(8, mul))


def _two_param_metacyclic(n_a, twist, b_square_power):
    """Group <a, b | a^n_a, b a b^-1 = a^twist, b^2 = a^b_square_power>."""

    def mul(x, y):
        i1, j1 = x // 2, x % 2
        i2, j2 = y // 2, y % 2
        if j1 == 0:
            i, j = (i1 + i2) % n_a, j2
        else:
            i, j = (i1 + twist * i2) % n_a, (1 + j2) % 2
            if 1 + j2 == 2:
                i = (i + b_square_power) % n_a
        return 2 * i + j

    return _table_from_formula(2 * n_a, mul)


def generalized_quaternion_16():
    return build_group(2, mul_table=_two_param_metacyclic(8, -1 % 8, 4))


def semidihedral_16():
    return build_group(2, mul_table=_two_param_metacyclic(8, 3, 0))


def modular_16():
    return build_group(2, mul_table=_two_param_metacyclic(8, 5, 0))


def direct_product(G1, G2):
    n1, n2 = G1.order, G2.order

    def mul(x, y):
        a1, a2 = x // n2, x % n2
        b1, b2 = y // n2, y % n2
        return G1.mul(a1, b1) * n2 + G2.mul(a2, b2)

    return build_group(G1.p, mul_table=_table_from_formula(n1 * n2, mul))


def c4_semidirect_c4():
    """<s, t | s^4, t^4, t s t^-1 = s^-1>."""

    def mul(x, y):
        i1, j1 = x // 4, x % 4
        i2, j2 = y // 4, y % 4
        sgn = -1 if j1 % 2 else 1
        return ((i1 + sgn * i2) % 4) * 4 + (j1 + j2) % 4

    return build_group(2, mul_table=_table_from_formula(16, mul))


def c22_semidirect_c4():
    """(C2 x C2) x| C4 with the order-4 generator swapping the factors."""

    def mul(x, y):
        v1, j1 = x // 4, x % 4
        v2, j2 = y // 4, y % 4
        if j1 % 2:
            v2 = ((v2 & 1) << 1) | (v2 >> 1)
        return (v1 ^ v2) * 4 + (j1 + j2) % 4

    return build_group(2, mul_table=_table_from_formula(16, mul))


def pauli_group_16():
    """Central product C4 o D4: elements i^a X^b Z^c with ZX = -XZ."""

    def mul(x, y):
        a1, r1 = x // 4, x % 4
        b1, c1 = r1 // 2, r1 % 2
        a2, r2 = y // 4, y % 4
        b2, c2 = r2 // 2, r2 % 2
        a = (a1 + a2 + 2 * c1 * b2) % 4
        return a * 4 + ((b1 + b2) % 2) * 2 + (c1 + c2) % 2

    return build_group(2, mul_table=_table_from_formula(16, mul))


def heisenberg_3():
    """Extraspecial group of order 27 and exponent 3 (upper unitriangular)."""

    def mul(x, y):
        a1, b1, c1 = x // 9, (x // 3) % 3, x % 3
        a2, b2, c2 = y // 9, (y // 3) % 3, y % 3
        return ((a1 + a2) % 3) * 9 + ((b1 + b2) % 3) * 3 + (c1 + c2 + a1 * b2) % 3

    return build_group(3, mul_table=_table_from_formula(27, mul))


def c9_semidirect_c3():
    """Extraspecial group of order 27 and exponent 9: b a b^-1 = a^4."""

    def mul(x, y):
        i1, j1 = x // 3, x % 3
        i2, j2 = y // 3, y % 3
        return ((i1 + i2 * pow(4, j1, 9)) % 9) * 3 + (j1 + j2) % 3

    return build_group(3, mul_table=_table_from_formula(27, mul))


def group_catalog(p, max_order):
    """All p-groups of order <= max_order (p in {2, 3}, desk scale)."""
    out = [("c1", build_group(p))]
    if p == 2:
        named = [
            (2, "c2", lambda: cyclic_group(2, 2)),
            (4, "c4", lambda: cyclic_group(2, 4)),
            (4, "c2xc2", lambda: abelian_group(2, [2, 2])),
            (8, "c8", lambda: cyclic_group(2, 8)),
            (8, "c4xc2", lambda: abelian_group(2, [4, 2])),
            (8, "c2xc2xc2", lambda: abelian_group(2, [2, 2, 2])),
            (8, "d4", lambda: dihedral_group(4)),
            (8, "q8", quaternion_group),
            (16, "c16", lambda: cyclic_group(2, 16)),
            (16, "c4xc4", lambda: abelian_group(2, [4, 4])),
            (16, "c8xc2", lambda: abelian_group(2, [8, 2])),
            (16, "c4xc2xc2", lambda: abelian_group(2, [4, 2, 2])),
            (16, "c2^4", lambda: abelian_group(2, [2, 2, 2, 2])),
            (16, "d8", lambda: dihedral_group(8)),
            (16, "q16", generalized_quaternion_16),
            (16, "sd16", semidihedral_16),
            (16, "m4(2)", modular_16),
            (16, "d4xc2", lambda: direct_product(dihedral_group(4), cyclic_group(2, 2))),
            (16, "q8xc2", lambda: direct_product(quaternion_group(), cyclic_group(2, 2))),
            (16, "pauli", pauli_group_16),
            (16, "c22:c4", c22_semidirect_c4),
            (16, "c4:c4", c4_semidirect_c4),
        ]
    elif p == 3:
        named = [
            (3, "c3", lambda: cyclic_group(3, 3)),
            (9, "c9", lambda: cyclic_group(3, 9)),
            (9, "c3xc3", lambda: abelian_group(3, [3, 3])),
            (27, "c27", lambda: cyclic_group(3, 27)),
            (27, "c9xc3", lambda: abelian_group(3, [9, 3])),
            (27, "c3xc3xc3", lambda: abelian_group(3, [3, 3, 3])),
            (27, "he3", heisenberg_3),
            (27, "c9:c3", c9_semidirect_c3),
        ]
    else:
        raise ValueError("catalog covers p in {2, 3}")
    for order, name, builder in named:
        if order <= max_order:
            out.append((name, builder()))
    return out


def named_group(spec):
    """Resolve a group spec string like 'c4', 'q8', 'c2xc2xc2', 'd8', 'he3'."""
    spec = spec.strip().lower()
    for p in (2, 3):
        for name, G in group_catalog(p, 64 if p == 2 else 27):
            if name == spec:
                return G
    raise ValueError(f"unknown group spec {spec!r}")


def group_signature(G):
    """Cheap isomorphism invariants (order, exponent, element-order census,
    center size, abelian flag) distinguishing the catalog entries."""
    orders = []
    for x in range(G.order):
        o = 1
        y = x
        while y != 0:
            y = G.mul(y, x)
            o += 1
        orders.append(o)
    census = tuple(sorted(orders))
    center = len(G.central_elements())
    abelian = center == G.order
    return (G.order, max(orders), census, center, abelian)


# ---------------------------------------------------------------------------
# the embedded counterexample lattice (rank 9, elementary abelian group of order 8)

_ACTION_N = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [-1, -1, -1, 0, 0, -1, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, -1, 0, 0, 0, 0, 0, -1, 0],
    [0, 1, 0, -1, -1, 0, 0, 0, -1],
]

_ACTION_C = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [-1, -1, 0, -1, 0, 0, 0, 0, 0],
    [-1, 0, -1, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, -1, 0, 0, 0, 0, 0, -1, 0],
    [0, 1, 0, 0, 0, -1, -1, 0, -1],
]

_ACTION_M = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [-1, 0, -1, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, -1, 0, -1, 0, -1, -1],
]


@dataclass(frozen=True)
class Fixture:
    name: str
    module: GModule
    subgroups: dict
    expected_verdicts: dict


def elementary_abelian_nc_m():
    """The elementary abelian 2-group of order 8 with generators n, c, m."""
    perms = [[i ^ (1 << bit) for i in range(8)] for bit in range(3)]
    return build_group(2, generators=perms, generator_names=["n", "c", "m"])


def paper_example_4_2():
    """The rank-9 lattice whose restriction to N = <n, c> is not a
    permutation module although every quotient-level condition holds."""
    G = elementary_abelian_nc_m()
    U = make_module(G, lattice_ring(2), 9, [_ACTION_N, _ACTION_C, _ACTION_M])
    gn, gc, gmm = G.generators
    subgroups = {
        "N": make_handle(G, subgroup_closure(G, [gn, gc])),
        "n": make_handle(G, subgroup_closure(G, [gn])),
        "c": make_handle(G, subgroup_closure(G, [gc])),
        "m": make_handle(G, subgroup_closure(G, [gmm])),
    }
    expected = {
        "generators_are_involutions": True,
        "generators_commute": True,
        "fixed_points_permutation": True,
        "coinvariants_permutation": True,
        "quotient_by_fixed_trivial_action": True,
        "aug_m_inside_aug_N_plus_fixed": True,
        "fixed_n_coinvariants_has_torsion": True,
        "restriction_to_N_permutation": False,
        "module_is_permutation": False,
    }
    return Fixture(name="counterexample-rank9", module=U, subgroups=subgroups,
                   expected_verdicts=expected)


# ---------------------------------------------------------------------------
# fuzz-corpus generators


def _elementary_disguise(rank, seed, ops=40, bound=3):
    """Seeded product of elementary unimodular matrices with its inverse."""
    rng = np.random.default_rng(seed)
    T = zl.eye(rank)
    Tinv = zl.eye(rank)
    if rank < 2:
        return T, Tinv
    for _ in range(ops):
        i = int(rng.integers(0, rank))
        j = int(rng.integers(0, rank - 1))
        if j >= i:
            j += 1
        c = int(rng.integers(1, bound + 1)) * (1 if rng.integers(0, 2) else -1)
        # row op on T, matching column op on Tinv
        T[i, :] = T[i, :] + c * T[j, :]
        Tinv[:, j] = Tinv[:, j] - c * Tinv[:, i]
    return T, Tinv


def disguised_permutation(G, classes, seed, ops=40):
    """Direct sum of coset lattices conjugated by a seeded unimodular matrix.

    classes is a list of SubgroupHandle; returns (module, ground_truth)
    where ground_truth is the multiset of class element-sets.
    """
    ring = lattice_ring(G.p)
    if not classes:
        return trivial_module(G, 0, ring), ()
    parts = [permutation_lattice(G, H, ring) for H in classes]
    base = parts[0] if len(parts) == 1 else direct_sum(parts)
    T, Tinv = _elementary_disguise(base.rank, seed, ops=ops)
    acts = [T @ zl.to_object(base.act(g)) @ Tinv for g in G.generators]
    mod = make_module(G, ring, base.rank, acts, check=False)
    truth = tuple(sorted(H.elements for H in classes))
    return mod, truth


def augmentation_ideal(G):
    """Kernel of the sum map on the regular lattice; not coflasque for G != 1."""
    if G.order == 1:
        raise TrivialGroup("augmentation ideal of the trivial group is zero")
    reg = permutation_lattice(G, trivial_subgroup(G))
    ones = zl.asmat([[1]] * G.order)
    basis = zl.kernel_saturated(ones)
    mod, _ = submodule_as_module(reg, basis)
    return mod


def syzygy_nonpermutation(G, flavor, seed=0):
    """Negative instances: augmentation ideals and coflasque covers."""
    if G.order == 1:
        raise TrivialGroup("need a nontrivial group")
    if flavor == "augmentation_ideal":
        return augmentation_ideal(G)
    if flavor == "coflasque_cover":
        from .theorem import coflasque_cover_kernel

        return coflasque_cover_kernel(G, seed)
    raise ValueError(f"unknown flavor {flavor!r}")
