import itertools

import numpy as np
import pytest

from permlat import pgroup as pg
from permlat.errors import CapExceeded, InvalidTable, NotAPGroup, NotNormal


def exhaustive_subgroups(G):
    """Oracle: all closed subsets containing the identity, by brute force."""
    n = G.order
    T = G.mul_table
    found = set()
    elems = list(range(n))
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    for size in divisors:
        for sub in itertools.combinations(elems, size):
            if 0 not in sub:
                continue
            s = set(sub)
            if all(int(T[a, b]) in s for a in sub for b in sub):
                found.add(tuple(sorted(sub)))
    return found


class TestBuild:
    def test_trivial(self):
        G = pg.build_group(2)
        assert G.order == 1 and G.word_str(0) == "e"

    def test_four_cycle(self, c4):
        assert c4.order == 4
        assert [c4.element_words[i] for i in range(4)] == [(), (0,), (0, 0), (0, 0, 0)]

    def test_ea8(self, e8):
        assert e8.order == 8
        assert e8.generator_names == ("n", "c", "m")

    def test_not_a_p_group(self):
        with pytest.raises(NotAPGroup):
            pg.build_group(2, generators=[[1, 2, 0]])

    def test_cap(self):
        with pytest.raises(CapExceeded):
            pg.build_group(2, generators=[[1, 2, 3, 0]], cap=2)

    def test_invalid_table(self):
        with pytest.raises(InvalidTable):
            pg.build_group(2, mul_table=[[0, 0], [0, 0]])

    def test_associativity_holds_everywhere(self, q8, d4, e8):
        for G in (q8, d4, e8):
            T = G.mul_table
            assert np.array_equal(T[T], T[:, T])
            assert all(G.mul(0, x) == x and G.mul(x, 0) == x for x in range(G.order))
            assert all(G.mul(x, G.inv(x)) == 0 for x in range(G.order))

    def test_element_words_valid(self, q8):
        for idx in range(q8.order):
            acc = 0
            for gi in q8.element_words[idx]:
                acc = q8.mul(acc, q8.generators[gi])
            assert acc == idx


class TestSubgroups:
    def test_trivial_group(self):
        G = pg.build_group(2)
        assert len(pg.enumerate_subgroups(G)) == 1

    def test_klein_four(self, klein):
        subs = pg.enumerate_subgroups(klein)
        assert len(subs) == 5
        assert exhaustive_subgroups(klein) == {s.elements for s in subs}

    def test_ea8_sixteen(self, e8):
        subs = pg.enumerate_subgroups(e8)
        assert len(subs) == 16
        assert exhaustive_subgroups(e8) == {s.elements for s in subs}

    def test_oracle_nonabelian(self, q8, d4):
        for G in (q8, d4):
            subs = pg.enumerate_subgroups(G)
            assert exhaustive_subgroups(G) == {s.elements for s in subs}

    def test_canonical_order(self, d4):
        subs = pg.enumerate_subgroups(d4)
        keys = [(s.order, s.elements) for s in subs]
        assert keys == sorted(keys)

    def test_closed_under_conjugation(self, d4):
        subs = {s.elements for s in pg.enumerate_subgroups(d4)}
        for s in list(subs):
            for g in range(d4.order):
                conj = tuple(sorted(d4.conj(a, g) for a in s))
                assert conj in subs

    def test_normal_filter(self, d4):
        subs = pg.enumerate_subgroups(d4, filter="normal")
        for s in subs:
            assert all(d4.conj(a, g) in s.elements for a in s.elements
                       for g in range(d4.order))

    def test_order_p_central(self, q8, d4, e8):
        assert len(pg.enumerate_subgroups(q8, filter="order_p_central")) == 1
        assert len(pg.enumerate_subgroups(d4, filter="order_p_central")) == 1
        assert len(pg.enumerate_subgroups(e8, filter="order_p_central")) == 7


class TestQuotient:
    def test_full_quotient_trivial(self, c4):
        qd = pg.quotient_group(c4, pg.full_subgroup(c4))
        assert qd.quotient.order == 1

    def test_ea8_by_klein(self, e8):
        N = pg.make_handle(e8, pg.subgroup_closure(e8, [e8.generators[0], e8.generators[1]]))
        qd = pg.quotient_group(e8, N)
        assert qd.quotient.order == 2

    def test_c4_by_order2(self, c4):
        N = pg.make_handle(c4, (0, 2))
        qd = pg.quotient_group(c4, N)
        assert qd.quotient.order == 2

    def test_projection_homomorphism(self, q8):
        N = pg.enumerate_subgroups(q8, filter="order_p_central")[0]
        qd = pg.quotient_group(q8, N)
        for a in range(8):
            for b in range(8):
                assert qd.projection[q8.mul(a, b)] == qd.quotient.mul(
                    qd.projection[a], qd.projection[b]
                )

    def test_section_minimal_and_inverse(self, q8):
        N = pg.enumerate_subgroups(q8, filter="order_p_central")[0]
        qd = pg.quotient_group(q8, N)
        for i in range(qd.quotient.order):
            members = [g for g in range(8) if qd.projection[g] == i]
            assert qd.section[i] == min(members)
            assert qd.projection[qd.section[i]] == i

    def test_not_normal_raises(self, d4):
        bad = next(s for s in pg.enumerate_subgroups(d4) if not s.is_normal)
        with pytest.raises(NotNormal):
            pg.quotient_group(d4, bad)


class TestGamma:
    def test_abelian_all_singletons(self, e8):
        classes = pg.orbit_reps_gamma(pg.full_subgroup(e8), e8)
        assert len(classes) == 16
        assert all(len(c.members) == 1 for c in classes)

    def test_trivial_subgroup(self, c4):
        classes = pg.orbit_reps_gamma(pg.trivial_subgroup(c4), c4)
        assert len(classes) == 1

    def test_q8_six_classes(self, q8):
        classes = pg.orbit_reps_gamma(pg.full_subgroup(q8), q8)
        assert len(classes) == 6

    def test_partition(self, d4):
        classes = pg.orbit_reps_gamma(pg.full_subgroup(d4), d4)
        total = sum(len(c.members) for c in classes)
        assert total == len(pg.enumerate_subgroups(d4))

    def test_d4_conjugation_under_ambient(self, d4):
        # gamma of an order-4 subgroup viewed inside D4: conjugation by the
        # subgroup itself is trivial when it is abelian
        N = next(s for s in pg.enumerate_subgroups(d4) if s.order == 4)
        classes = pg.orbit_reps_gamma(N, d4)
        assert sum(len(c.members) for c in classes) == len(
            [s for s in pg.enumerate_subgroups(d4) if set(s.elements) <= set(N.elements)]
        )

    def test_canonical_reps(self, q8):
        for cls in pg.orbit_reps_gamma(pg.full_subgroup(q8), q8):
            assert cls.rep.elements == min(m.elements for m in cls.members)


class TestSubgroupAsGroup:
    def test_homomorphism(self, e8):
        N = pg.make_handle(e8, pg.subgroup_closure(e8, [e8.generators[0], e8.generators[1]]))
        Hg, emap = pg.subgroup_as_group(e8, N)
        assert Hg.order == 4
        for a in range(4):
            for b in range(4):
                assert emap[Hg.mul(a, b)] == e8.mul(emap[a], emap[b])

    def test_cached(self, e8):
        N = pg.make_handle(e8, pg.subgroup_closure(e8, [e8.generators[0]]))
        assert pg.subgroup_as_group(e8, N) is pg.subgroup_as_group(e8, N)
