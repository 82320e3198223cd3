import random

import pytest

from unrealizer import ilp
from unrealizer.semilinear import (
    ZERO, LinearSet, SemiLinearSet, combine_all, linset, one, prune, singleton, sls,
)


def brute_force_gamma(a, budget):
    """Independent of the class method: expand every component by nested loops."""
    pts = set()
    for c in a.components:
        def rec(i, acc):
            if i == len(c.gens):
                pts.add(tuple(acc))
                return
            for l in range(budget + 1):
                rec(i + 1, [x + l * g for x, g in zip(acc, c.gens[i])])
        rec(0, list(c.base))
    return frozenset(pts)


def test_linset_canonical_form():
    a = linset((1, 2), [(3, 4), (0, 0), (3, 4), (1, 0)])
    assert a.gens == ((1, 0), (3, 4))
    b = sls([linset((1, 2), [(3, 4), (1, 0)]), linset((1, 2), [(1, 0), (3, 4)])])
    assert len(b.components) == 1


def test_zero_generator_dropped():
    assert linset((0, 0), [(0, 0)]) == linset((0, 0))


def test_combine_is_union():
    a = singleton((1,))
    b = singleton((2,))
    assert a.combine(b) == sls([linset((1,)), linset((2,))])
    assert a.combine(ZERO) == a
    assert ZERO.combine(a) == a


def test_extend_pairwise():
    a = sls([linset((1, 2), [(3, 4)])])
    b = sls([linset((5, 6), [(7, 8)])])
    assert a.extend(b) == sls([linset((6, 8), [(3, 4), (7, 8)])])
    assert a.extend(ZERO) == ZERO
    assert ZERO.extend(a) == ZERO


def test_extend_identity():
    a = sls([linset((1, 2), [(3, 4)]), linset((0, 1))])
    assert a.extend(one(2)) == a
    assert one(2).extend(a) == a


def test_star_collects_bases_and_generators():
    a = sls([linset((1,), [(2,)]), linset((3,))])
    assert a.star() == sls([linset((0,), [(1,), (2,), (3,)])])
    assert ZERO.star(dim=2) == one(2)
    with pytest.raises(ValueError):
        ZERO.star()


def test_star_closure_property():
    # gamma(a*) contains every finite (x)-product of gamma(a) elements, bounded check
    a = sls([linset((2,), [(3,)])])
    st = a.star()
    pts = a.gamma_bounded(2)
    prods = {(0,)} | pts | {tuple(x + y for x, y in zip(p, q)) for p in pts for q in pts}
    assert prods <= st.gamma_bounded(6)


def test_project():
    a = sls([linset((1, 2), [(3, 4)])])
    assert a.project((True, False)) == sls([linset((1, 0), [(3, 0)])])
    assert a.project((False, False)) == one(2)
    assert ZERO.project((True,)) == ZERO


def test_size():
    a = sls([linset((1, 2), [(3, 4)]), linset((0, 0))])
    assert a.size() == 3
    assert ZERO.size() == 0


def test_gamma_bounded_matches_brute_force():
    rng = random.Random(7)
    for _ in range(50):
        a = random_sls(rng, dim=2)
        assert a.gamma_bounded(3) == brute_force_gamma(a, 3)


def test_json_round_trip():
    a = sls([linset((1, -2), [(3, 4), (-1, 0)]), linset((0, 0))])
    assert SemiLinearSet.from_json(a.to_json()) == a


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        singleton((1,)).combine(singleton((1, 2)))
    with pytest.raises(ValueError):
        singleton((1,)).extend(singleton((1, 2)))
    with pytest.raises(ValueError):
        linset((1,), [(1, 2)])


def test_singletons_closed_under_extend():
    # products of singleton constants never grow components or generators
    a = singleton((3, -1))
    for p in [(2, 2), (0, 5), (-4, 1)]:
        a = a.extend(singleton(p))
    assert len(a.components) == 1 and a.components[0].gens == ()


def test_prune_removes_subsumed_component():
    solver = ilp.Solver()
    a = sls([linset((6,)), linset((0,), [(3,)])])
    assert prune(a, solver.member) == sls([linset((0,), [(3,)])])


def test_prune_keeps_incomparable_components():
    solver = ilp.Solver()
    a = sls([linset((0,), [(2,)]), linset((1,), [(3,)])])
    assert prune(a, solver.member) == a


def test_prune_preserves_gamma():
    solver = ilp.Solver()
    rng = random.Random(21)
    for _ in range(40):
        a = random_sls(rng, dim=2)
        b = prune(a, solver.member)
        assert b.gamma_bounded(3) <= a.gamma_bounded(5)
        assert a.gamma_bounded(3) <= b.gamma_bounded(8) or _gamma_subset_ilp(a, b, solver)


def _gamma_subset_ilp(a, b, solver):
    # every budget-3 point of a is a member of some component of b
    for p in a.gamma_bounded(3):
        if not any(solver.member(p, c) for c in b.components):
            return False
    return True


def random_sls(rng, dim, max_comps=3, max_gens=2):
    ncomp = rng.randint(0, max_comps)
    comps = []
    for _ in range(ncomp):
        base = tuple(rng.randint(-4, 4) for _ in range(dim))
        gens = [tuple(rng.randint(-3, 3) for _ in range(dim))
                for _ in range(rng.randint(0, max_gens))]
        comps.append(linset(base, gens))
    return sls(comps)


# semiring laws, checked two ways: structurally where equality is syntactic,
# and through bounded concretization where only the denotation must agree
def gammas_equal(a, b, budget=3):
    return a.gamma_bounded(budget) == b.gamma_bounded(budget)


def test_semiring_laws_random_triples():
    rng = random.Random(11)
    for trial in range(500):
        dim = rng.randint(1, 3)
        a, b, c = (random_sls(rng, dim) for _ in range(3))
        assert a.combine(b) == b.combine(a)
        assert a.combine(b).combine(c) == a.combine(b.combine(c))
        assert a.combine(a) == a
        assert a.combine(ZERO) == a
        assert gammas_equal(a.extend(b), b.extend(a))
        assert gammas_equal(a.extend(b).extend(c), a.extend(b.extend(c)))
        assert gammas_equal(a.extend(one(dim)), a)
        assert a.extend(ZERO) == ZERO
        # distributivity
        left = a.extend(b.combine(c))
        right = a.extend(b).combine(a.extend(c))
        assert gammas_equal(left, right)
