import numpy as np
import pytest

from permlat import gmodule as gm
from permlat import pgroup as pg
from permlat import zlinalg as zl
from permlat.errors import MixedRing, NotNormal, PrecisionLoss, ValidationError
from permlat.krs import is_isomorphic


def mackey_oracle(G, N, H, M):
    """Double-coset multiset for R[N/H] restricted to M (orders of M cap gHg^-1)."""
    T = G.mul_table
    seen = set()
    out = []
    for g in N.elements:
        if g in seen:
            continue
        coset = {T[m, T[g, h]] for m in M.elements for h in H.elements}
        coset = {int(x) for x in coset}
        seen |= coset
        conj = {G.conj(h, g) for h in H.elements}
        out.append(len(set(M.elements) & conj))
    return sorted(out)


class TestConstruction:
    def test_permutation_lattice_full(self, c4):
        V = gm.permutation_lattice(c4, pg.full_subgroup(c4))
        assert V.rank == 1 and V.has_trivial_action()

    def test_regular(self, c4):
        V = gm.permutation_lattice(c4, pg.trivial_subgroup(c4))
        assert V.rank == 4
        for g in range(4):
            A = zl.to_object(V.act(g))
            assert sorted(int(x) for x in A.reshape(-1)) == [0] * 12 + [1] * 4
        V.check_action_law()

    def test_coset_swap(self, c4):
        H = pg.make_handle(c4, (0, 2))
        V = gm.permutation_lattice(c4, H)
        assert V.rank == 2
        assert zl.to_object(V.act(1)).tolist() == [[0, 1], [1, 0]]

    def test_action_law_everywhere(self, q8, d4):
        for G in (q8, d4):
            for H in pg.enumerate_subgroups(G):
                gm.permutation_lattice(G, H).check_action_law()

    def test_invalid_action_rejected(self, c2):
        with pytest.raises(ValidationError):
            gm.make_module(c2, gm.lattice_ring(2), 1, [[[2]]])

    def test_direct_sum_mixed_ring(self, c2):
        a = gm.trivial_module(c2, 1, gm.lattice_ring(2))
        b = gm.trivial_module(c2, 1, gm.finite_ring(2, 1))
        with pytest.raises(MixedRing):
            gm.direct_sum([a, b])

    def test_direct_sum_ranks(self, c4):
        V = gm.direct_sum([gm.permutation_lattice(c4, pg.trivial_subgroup(c4)),
                           gm.permutation_lattice(c4, pg.full_subgroup(c4))])
        assert V.rank == 5


class TestRestrictionMackey:
    def test_trivial_restriction(self, c4):
        V = gm.permutation_lattice(c4, pg.full_subgroup(c4))
        R = gm.restriction(V, pg.trivial_subgroup(c4))
        assert R.group.order == 1 and R.rank == 1

    def test_klein_cross_restriction_regular(self, klein):
        subs = [s for s in pg.enumerate_subgroups(klein) if s.order == 2]
        H, M = subs[0], subs[1]
        V = gm.permutation_lattice(klein, H)
        R = gm.restriction(V, M)
        regM = gm.permutation_lattice(R.group, pg.trivial_subgroup(R.group))
        assert is_isomorphic(R, regM).isomorphic

    def test_mackey_multisets(self, d4, q8):
        # restriction of R[N/H] to M decomposes over double cosets
        for G in (d4, q8):
            N = pg.full_subgroup(G)
            subs = pg.enumerate_subgroups(G)
            for H in subs:
                for M in subs:
                    V = gm.permutation_lattice(G, H)
                    R = gm.restriction(V, M)
                    orbit_sizes = mackey_oracle(G, N, H, M)
                    expected = sorted(M.order // s for s in orbit_sizes)
                    from permlat.krs import recognize_permutation

                    rec = recognize_permutation(R)
                    assert rec.is_permutation
                    got = []
                    for rep, mult in rec.multiset:
                        got.extend([M.order // rep.order] * mult)
                    assert sorted(got) == expected, (H.elements, M.elements)


class TestFixedPoints:
    def test_trivial_action(self, c4):
        U = gm.trivial_module(c4, 3, gm.lattice_ring(2))
        fp = gm.fixed_points(U, pg.full_subgroup(c4))
        assert fp.module.rank == 3

    def test_orbit_sum(self, c4):
        H = pg.make_handle(c4, (0, 2))
        V = gm.permutation_lattice(c4, H)
        fp = gm.fixed_points(V, pg.full_subgroup(c4))
        assert fp.module.rank == 1
        assert fp.embedding_rows.tolist() == [[1, 1]]

    def test_strict_normal(self, d4):
        bad = next(s for s in pg.enumerate_subgroups(d4) if not s.is_normal)
        U = gm.permutation_lattice(d4, pg.trivial_subgroup(d4))
        with pytest.raises(NotNormal):
            gm.fixed_points(U, bad)
        # non-strict mode works and returns the plain fixed sublattice
        fp = gm.fixed_points(U, bad, strict=False)
        assert fp.module.group.order == 1

    def test_exactness_rank_identity(self, d4, q8):
        # rank(U^N) + rank(I_N U) = rank(U) for every lattice and normal N
        for G in (d4, q8):
            U = gm.permutation_lattice(G, pg.trivial_subgroup(G))
            for N in pg.enumerate_subgroups(G, filter="normal"):
                fp = gm.fixed_points(U, N)
                aug = gm.augmentation_image(U, N)
                aug_rank = sum(1 for d in zl.snf_diagonal(aug) if d) if aug.shape[0] else 0
                assert fp.module.rank + aug_rank == U.rank

    def test_finite_fixed_points(self, c2):
        regF = gm.reduce_mod(gm.permutation_lattice(c2, pg.trivial_subgroup(c2)), 1)
        fp = gm.fixed_points(regF, pg.full_subgroup(c2))
        assert fp.embedding_rows.tolist() == [[1, 1]]


class TestAugmentation:
    def test_trivial_action_zero(self, c4):
        U = gm.trivial_module(c4, 2, gm.lattice_ring(2))
        assert gm.augmentation_image(U, pg.full_subgroup(c4)).shape[0] == 0

    def test_regular_rank(self, c4):
        U = gm.permutation_lattice(c4, pg.trivial_subgroup(c4))
        aug = gm.augmentation_image(U, pg.full_subgroup(c4))
        assert aug.shape[0] == 3
        assert all(d == 1 for d in zl.snf_diagonal(aug))


class TestCoinvariants:
    def test_coset_module(self, c4):
        H = pg.make_handle(c4, (0, 2))
        V = gm.permutation_lattice(c4, H)
        cv = gm.coinvariants(V, pg.full_subgroup(c4))
        assert cv.profile.is_free and cv.module.rank == 1

    def test_trivial(self, c4):
        U = gm.trivial_module(c4, 2, gm.lattice_ring(2))
        cv = gm.coinvariants(U, pg.full_subgroup(c4))
        assert cv.module.rank == 2 and cv.profile.is_free

    def test_projection_equivariant(self, d4):
        U = gm.permutation_lattice(d4, pg.trivial_subgroup(d4))
        N = pg.enumerate_subgroups(d4, filter="order_p_central")[0]
        cv = gm.coinvariants(U, N)
        qd = pg.quotient_group(d4, N)
        P = zl.to_object(cv.projection.matrix)
        for qg in cv.module.group.generators:
            rep = qd.section[qg]
            lhs = P @ zl.to_object(U.act(rep))
            rhs = zl.to_object(cv.module.act(qg)) @ P
            assert np.array_equal(lhs, rhs)

    def test_phi_of_fixed_is_pk_times(self, c4, c3):
        # the image of V^N inside V_N is p^k V_N for V = R[N/H], p^k = [N:H]
        for G, H_elems in ((c4, (0, 2)), (c3, (0,))):
            H = pg.make_handle(G, H_elems)
            V = gm.permutation_lattice(G, H)
            N = pg.full_subgroup(G)
            fp = gm.fixed_points(V, N)
            cv = gm.coinvariants(V, N)
            pk = N.order // H.order
            img = fp.embedding_rows @ cv.proj_rows
            assert cv.module.rank == 1
            assert abs(int(img[0, 0])) == pk


class TestQuotientByFixed:
    def test_closed_form_single(self, c4):
        H = pg.make_handle(c4, (0, 2))
        V = gm.permutation_lattice(c4, H)
        qf = gm.quotient_by_fixed_coinv(V, pg.full_subgroup(c4))
        assert qf.profile.divisors == ((2, 1, 1),)

    def test_trivial_action_zero(self, c4):
        U = gm.trivial_module(c4, 2, gm.lattice_ring(2))
        qf = gm.quotient_by_fixed_coinv(U, pg.full_subgroup(c4))
        assert qf.profile.is_trivial

    def test_rho_exists_for_lattice_coinvariants(self, c4):
        V = gm.permutation_lattice(c4, pg.trivial_subgroup(c4))
        qf = gm.quotient_by_fixed_coinv(V, pg.full_subgroup(c4))
        assert qf.rho is not None
        assert qf.profile.divisors == ((2, 2, 1),)


class TestNorm:
    def test_identity_when_equal(self, c4):
        U = gm.permutation_lattice(c4, pg.trivial_subgroup(c4))
        N = pg.full_subgroup(c4)
        nm = gm.norm_operator(U, N, N)
        assert np.array_equal(zl.to_object(nm.matrix), zl.eye(1))

    def test_scalar_p_for_trivial(self, c4):
        U = gm.trivial_module(c4, 3, gm.lattice_ring(2))
        N = pg.full_subgroup(c4)
        M = pg.make_handle(c4, (0, 2))
        nm = gm.norm_operator(U, N, M)
        assert np.array_equal(zl.to_object(nm.matrix), 2 * zl.eye(3))

    def test_vm_iso_fixed_via_norm(self, klein):
        # multiplication by the M/(M cap H) coset sum maps V_M onto V^M bijectively
        subs = [s for s in pg.enumerate_subgroups(klein) if s.order == 2]
        for H in subs:
            for M in subs:
                V = gm.permutation_lattice(klein, H)
                cap = pg.make_handle(klein, tuple(sorted(set(M.elements) & set(H.elements))))
                S = gm.coset_sum_matrix(V, M, cap)
                cvM = gm.coinvariants(V, M)
                fpM = gm.fixed_points(V, M)
                lift = cvM.section_rows
                img = lift @ zl.to_object(S).T
                C = zl.RowSolver(fpM.embedding_rows).solve(img)
                assert C is not None
                assert abs(zl.det_bareiss(C)) == 1  # bijective onto V^M


class TestReduce:
    def test_reduce_trivial(self, c2):
        U = gm.trivial_module(c2, 1, gm.lattice_ring(2))
        F = gm.reduce_mod(U, 1)
        assert F.ring.modulus == 2

    def test_precision_loss_flag(self, c2):
        U = gm.trivial_module(c2, 1, gm.lattice_ring(2))
        F = gm.reduce_mod(U, 3)
        with pytest.warns(PrecisionLoss):
            gm.reduce_mod(F, 1)

    def test_regular_mod2_local_endo(self, c2):
        regF = gm.reduce_mod(gm.permutation_lattice(c2, pg.trivial_subgroup(c2)), 1)
        from permlat.krs import hom_generators

        gens = hom_generators(regF, regF)
        assert len(gens) == 2  # the group ring F_2[C2]


class TestInflationProjection:
    def test_project_subgroup(self, e8):
        N = pg.make_handle(e8, pg.subgroup_closure(e8, [e8.generators[0], e8.generators[1]]))
        qd = pg.quotient_group(e8, N)
        Nbar = gm.project_subgroup(qd, N)
        assert Nbar.order == 1
        full = gm.project_subgroup(qd, pg.full_subgroup(e8))
        assert full.order == 2
