"""Finite p-groups as explicit multiplication tables.

Elements are indices into a BFS-canonical order: index 0 is the identity
and every element carries a shortest, lexicographically smallest word in
the generators. All downstream determinism keys off this order.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, InvalidTable, NotAPGroup, NotNormal

DEFAULT_GROUP_CAP = 64
DEFAULT_SUBGROUP_CAP = 20000


@dataclass(frozen=True, eq=False)
class PGroup:
    p: int
    order: int
    mul_table: np.ndarray  # (order, order) int64
    generator_names: tuple
    generators: tuple  # element indices, aligned with generator_names
    element_words: tuple  # per element, tuple of generator indices
    inverses: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def inv(self, a):
        return self.inverses[a]

    def conj(self, a, g):
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    def word_str(self, idx):
        w = self.element_words[idx]
        if not w:
            return "e"
        return "*".join(self.generator_names[i] for i in w)

    @property
    def is_trivial(self):
        return self.order == 1

    def central_elements(self):
        T = self.mul_table
        return [a for a in range(self.order) if all(T[a, g] == T[g, a] for g in self.generators)]


@dataclass(frozen=True)
class SubgroupHandle:
    elements: tuple  # sorted element indices
    is_normal: bool
    order: int

    def __contains__(self, idx):
        return idx in self.elements


@dataclass(frozen=True)
class QuotientData:
    quotient: PGroup
    projection: tuple  # G index -> quotient index
    section: tuple  # quotient index -> minimal coset representative in G


@dataclass(frozen=True)
class GammaClass:
    """One conjugacy class of subgroups, canonical representative first."""

    rep: SubgroupHandle
    members: tuple


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def _compose(a, b):
    """Permutation product a*b acting as: apply b, then a."""
    return tuple(a[i] for i in b)


def _bfs_order(n, mul, gens, start=0):
    """BFS order from the identity by right multiplication with generators.

    Returns (order list of old indices, words aligned with it).
    """
    order = [start]
    words = [()]
    pos = {start: 0}
    head = 0
    while head < len(order):
        x = order[head]
        w = words[head]
        head += 1
        for gi, g in enumerate(gens):
            y = mul(x, g)
            if y not in pos:
                pos[y] = len(order)
                order.append(y)
                words.append(w + (gi,))
    return order, words


def _validate_table(T):
    n = T.shape[0]
    if T.shape != (n, n):
        raise InvalidTable("multiplication table must be square")
    if T.size and (T.min() < 0 or T.max() >= n):
        raise InvalidTable("table entries out of range")
    ident = None
    rng = np.arange(n)
    for e in range(n):
        if np.array_equal(T[e], rng) and np.array_equal(T[:, e], rng):
            ident = e
            break
    if ident is None:
        raise InvalidTable("no identity element")
    for i in range(n):
        if sorted(T[i]) != list(range(n)) or sorted(T[:, i]) != list(range(n)):
            raise InvalidTable("table rows/columns are not permutations")
    if not np.array_equal(T[T], T[:, T]):
        raise InvalidTable("associativity fails")
    if not np.all((T == ident).any(axis=1)):
        raise InvalidTable("missing inverses")
    return ident


def _canonical_generators(T, ident):
    """Greedy minimal generating set in element order."""
    n = T.shape[0]
    gens = []
    span = {ident}
    for x in range(n):
        if x in span:
            continue
        gens.append(x)
        span = _closure_table(T, span | {x})
        if len(span) == n:
            break
    return gens


def _closure_table(T, seed):
    cur = set(seed)
    frontier = list(cur)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(cur):
                for y in (int(T[a, b]), int(T[b, a])):
                    if y not in cur:
                        cur.add(y)
                        nxt.append(y)
        frontier = nxt
    return cur


def _finish_group(p, T, ident, gens, names, cap):
    n = T.shape[0]
    if n > cap:
        raise CapExceeded(f"group order {n} exceeds cap {cap}")
    if not _is_p_power(n, p):
        raise NotAPGroup(f"group order {n} is not a power of {p}")
    # reorder so the identity is 0 and elements follow BFS word order
    order, words = _bfs_order(n, lambda a, b: int(T[a, b]), gens, start=ident)
    if len(order) != n:
        raise InvalidTable("generators do not generate the group")
    new_of_old = {old: new for new, old in enumerate(order)}
    T2 = np.zeros_like(T)
    for a_old in range(n):
        for b_old in range(n):
            T2[new_of_old[a_old], new_of_old[b_old]] = new_of_old[int(T[a_old, b_old])]
    inverses = tuple(int(np.nonzero(T2[i] == 0)[0][0]) for i in range(n))
    G = PGroup(
        p=p,
        order=n,
        mul_table=T2,
        generator_names=tuple(names),
        generators=tuple(new_of_old[g] for g in gens),
        element_words=tuple(words),
        inverses=inverses,
    )
    old_to_new = tuple(new_of_old[i] for i in range(n))
    return G, old_to_new


def build_group(p, generators=None, mul_table=None, generator_names=None, cap=DEFAULT_GROUP_CAP):
    """Build a validated PGroup from permutation generators or a mul table.

    Element ordering is BFS over generator words with lexicographic
    tie-break; the identity gets index 0.
    """
    if (generators is None) == (mul_table is None):
        if generators is None:
            # trivial group
            T = np.zeros((1, 1), dtype=np.int64)
            G, _ = _finish_group(p, T, 0, [], [], cap)
            return G
        raise ValueError("pass either generators or mul_table, not both")
    if mul_table is not None:
        T = np.array(mul_table, dtype=np.int64)
        ident = _validate_table(T)
        gens = _canonical_generators(T, ident)
        if generator_names is None:
            generator_names = [f"g{i}" for i in range(len(gens))]
        if len(generator_names) != len(gens):
            raise ValueError("generator_names length mismatch")
        G, _ = _finish_group(p, T, ident, gens, generator_names, cap)
        return G
    perms = [tuple(int(x) for x in g) for g in generators]
    if not perms:
        T = np.zeros((1, 1), dtype=np.int64)
        G, _ = _finish_group(p, T, 0, [], [], cap)
        return G
    deg = len(perms[0])
    for g in perms:
        if len(g) != deg or sorted(g) != list(range(deg)):
            raise InvalidTable("generators must be permutations of equal degree")
    ident = tuple(range(deg))
    elems = [ident]
    pos = {ident: 0}
    head = 0
    while head < len(elems):
        x = elems[head]
        head += 1
        for g in perms:
            y = _compose(x, g)
            if y not in pos:
                if len(elems) >= cap and y not in pos:
                    raise CapExceeded(f"generated group exceeds cap {cap}")
                pos[y] = len(elems)
                elems.append(y)
        # also close under left products to be safe with non-generating sets
    # full closure check: products of any two elements
    n = len(elems)
    if not _is_p_power(n, p):
        raise NotAPGroup(f"generated order {n} is not a power of {p}")
    T = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            c = _compose(a, b)
            if c not in pos:
                raise InvalidTable("generator set not closed (internal error)")
            T[i, j] = pos[c]
    gens = [pos[g] for g in perms]
    # deduplicate generator indices while keeping names aligned
    if generator_names is None:
        generator_names = [f"g{i}" for i in range(len(gens))]
    if len(generator_names) != len(gens):
        raise ValueError("generator_names length mismatch")
    seen = {}
    gens2, names2 = [], []
    for g, nm in zip(gens, generator_names):
        if g not in seen and g != 0:
            seen[g] = nm
            gens2.append(g)
            names2.append(nm)
    if not gens2 and n > 1:
        raise InvalidTable("no nontrivial generators for nontrivial group")
    G, _ = _finish_group(p, T, 0, gens2, names2, cap)
    return G


# ---------------------------------------------------------------------------
# subgroups


def subgroup_closure(G, elems):
    """Sorted tuple of the subgroup generated by the given element indices."""
    cur = _closure_table(G.mul_table, set(elems) | {0})
    return tuple(sorted(cur))


def make_handle(G, elements):
    elements = tuple(sorted(set(elements)))
    T = G.mul_table
    closed = _closure_table(T, set(elements) | {0})
    if tuple(sorted(closed)) != elements:
        raise InvalidTable("element set is not a subgroup")
    normal = _is_normal(G, elements)
    return SubgroupHandle(elements=elements, is_normal=normal, order=len(elements))


def _is_normal(G, elements):
    eset = set(elements)
    for g in G.generators:
        for a in elements:
            if G.conj(a, g) not in eset:
                return False
    return True


def trivial_subgroup(G):
    return SubgroupHandle(elements=(0,), is_normal=True, order=1)


def full_subgroup(G):
    return SubgroupHandle(elements=tuple(range(G.order)), is_normal=True, order=G.order)


def _enumerate_all_subgroups(G, cap):
    key = ("subgroups", cap)
    if key in G._cache:
        return G._cache[key]
    T = G.mul_table
    trivial = (0,)
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for S in frontier:
            sset = set(S)
            for g in range(1, G.order):
                if g in sset:
                    continue
                S2 = tuple(sorted(_closure_table(T, sset | {g})))
                if S2 not in seen:
                    seen.add(S2)
                    if len(seen) > cap:
                        raise CapExceeded(f"subgroup count exceeds cap {cap}")
                    nxt.append(S2)
        frontier = nxt
    out = []
    for S in sorted(seen, key=lambda s: (len(s), s)):
        out.append(SubgroupHandle(elements=S, is_normal=_is_normal(G, S), order=len(S)))
    G._cache[key] = out
    return out


def enumerate_subgroups(G, filter="all", cap=DEFAULT_SUBGROUP_CAP):
    """All subgroups in canonical order (by order, then element set).

    filter: "all" | "normal" | "order_p_central".
    """
    subs = _enumerate_all_subgroups(G, cap)
    if filter == "all":
        return list(subs)
    if filter == "normal":
        return [s for s in subs if s.is_normal]
    if filter == "order_p_central":
        central = set(G.central_elements())
        return [
            s
            for s in subs
            if s.order == G.p and all(x in central for x in s.elements)
        ]
    raise ValueError(f"unknown filter {filter!r}")


def quotient_group(G, N):
    """Quotient by a normal subgroup, with projection and minimal section."""
    if not N.is_normal:
        raise NotNormal("quotient requires a normal subgroup")
    T = G.mul_table
    coset_of = {}
    reps = []
    for g in range(G.order):
        if g in coset_of:
            continue
        coset = sorted(int(T[g, n]) for n in N.elements)
        for x in coset:
            coset_of[x] = len(reps)
        reps.append(coset[0])
    q = len(reps)
    Q = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            Q[a, b] = coset_of[int(T[reps[a], reps[b]])]
    ident = coset_of[0]
    gens = _canonical_generators(Q, ident)
    names = []
    for g in gens:
        names.append("q" + G.word_str(reps[g]).replace("*", ""))
    quotient, old_to_new = _finish_group(G.p, Q, ident, gens, names, cap=G.order)
    projection = tuple(old_to_new[coset_of[g]] for g in range(G.order))
    section = [None] * q
    for new_idx in range(q):
        members = [g for g in range(G.order) if projection[g] == new_idx]
        section[new_idx] = min(members)
    return QuotientData(quotient=quotient, projection=projection, section=tuple(section))


def subgroup_as_group(G, H):
    """Re-present a subgroup as a standalone PGroup.

    Returns (PGroup, elem_map) where elem_map[i] is the ambient index of
    the new group's element i. Cached on G.
    """
    key = ("as_group", H.elements)
    if key in G._cache:
        return G._cache[key]
    idx_of = {g: i for i, g in enumerate(H.elements)}
    n = len(H.elements)
    T = np.zeros((n, n), dtype=np.int64)
    for a in H.elements:
        for b in H.elements:
            T[idx_of[a], idx_of[b]] = idx_of[int(G.mul_table[a, b])]
    ident = idx_of[0]
    gens = _canonical_generators(T, ident)
    names = [G.word_str(H.elements[g]) for g in gens]
    Hgrp, old_to_new = _finish_group(G.p, T, ident, gens, names, cap=G.order)
    elem_map = [None] * n
    for old, amb in enumerate(H.elements):
        elem_map[old_to_new[old]] = amb
    result = (Hgrp, tuple(elem_map))
    G._cache[key] = result
    return result


def orbit_reps_gamma(N, ambient):
    """Conjugacy classes, under N-conjugation, of the subgroups of N.

    N is a SubgroupHandle of ambient; class representatives are the
    lexicographically minimal element sets, classes sorted canonically.
    """
    T = ambient.mul_table
    eset = set(N.elements)
    subs = _enumerate_subgroups_within(ambient, N)
    remaining = {s.elements: s for s in subs}
    classes = []
    for s in subs:
        if s.elements not in remaining:
            continue
        orbit = {s.elements}
        frontier = [s.elements]
        while frontier:
            nxt = []
            for elems in frontier:
                for g in N.elements:
                    conj = tuple(sorted(ambient.conj(a, g) for a in elems))
                    if conj not in orbit:
                        orbit.add(conj)
                        nxt.append(conj)
            frontier = nxt
        members = tuple(remaining.pop(e) for e in sorted(orbit))
        classes.append(GammaClass(rep=members[0], members=members))
    classes.sort(key=lambda c: (c.rep.order, c.rep.elements))
    return classes


def _enumerate_subgroups_within(G, N):
    """Subgroups of G contained in N, as handles (normality rel. G)."""
    T = G.mul_table
    trivial = (0,)
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for S in frontier:
            sset = set(S)
            for g in N.elements:
                if g in sset:
                    continue
                S2 = tuple(sorted(_closure_table(T, sset | {g})))
                if S2 not in seen:
                    seen.add(S2)
                    nxt.append(S2)
        frontier = nxt
    return [
        SubgroupHandle(elements=S, is_normal=_is_normal(G, S), order=len(S))
        for S in sorted(seen, key=lambda s: (len(s), s))
    ]
