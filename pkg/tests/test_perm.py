import random
from itertools import count

import pytest
from hypothesis import given, settings, strategies as st

from tdlab.perm import (
    FinitaryPerm,
    LazyPerm,
    check_alt_sentence,
    commutator,
    complete_partial_injection,
    compose,
    construct_separating_permutation,
    cycle_form,
    evaluate_word_chain,
    format_cycles,
    is_even,
    pairwise_swapper,
    parse_cycles,
    shifted_swapper,
    triple_rotator,
)

P = FinitaryPerm.parse


@st.composite
def perms(draw, n=12):
    images = draw(st.permutations(list(range(1, n + 1))))
    return FinitaryPerm.from_images(images)


def random_perm(rng, n):
    pts = list(range(1, n + 1))
    rng.shuffle(pts)
    return FinitaryPerm.from_images(pts)


def test_constructor_rejects_bad_maps():
    with pytest.raises(ValueError):
        FinitaryPerm({1: 2, 2: 2})
    with pytest.raises(ValueError):
        FinitaryPerm({0: 1, 1: 0})
    with pytest.raises(ValueError):
        FinitaryPerm({1: 2})


def test_fixed_points_not_stored():
    p = FinitaryPerm({1: 2, 2: 1, 3: 3})
    assert p.mapping == {1: 2, 2: 1}
    assert p(3) == 3 and p(1000) == 1000


def test_compose_examples():
    assert compose(P("(1 2)"), P("(1 2)")).is_identity()
    # p∘q applies q first: 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1
    assert compose(P("(1 2)"), P("(2 3)")) == P("(1 2 3)")
    # the map 2↦1, 3↦2, 1↦3 is the other order of composition
    assert compose(P("(2 3)"), P("(1 2)")) == FinitaryPerm({2: 1, 3: 2, 1: 3})


@given(perms())
def test_identity_law(p):
    e = FinitaryPerm.identity()
    assert compose(e, p) == p == compose(p, e)


@given(perms(), perms())
def test_compose_pointwise(p, q):
    r = compose(p, q)
    assert all(r(n) == p(q(n)) for n in range(1, 20))
    assert r.support <= p.support | q.support


def test_cycle_form_examples():
    assert cycle_form(FinitaryPerm.identity()) == []
    assert cycle_form(FinitaryPerm({1: 2, 2: 1, 4: 5, 5: 4})) == [(1, 2), (4, 5)]
    assert cycle_form(FinitaryPerm({1: 3, 3: 2, 2: 1})) == [(1, 3, 2)]


@given(perms())
def test_cycle_form_round_trip(p):
    cyc = cycle_form(p)
    assert FinitaryPerm.from_cycles(cyc) == p
    assert all(len(c) >= 2 and c[0] == min(c) for c in cyc)
    assert [c[0] for c in cyc] == sorted(c[0] for c in cyc)


def test_parity_examples():
    assert is_even(FinitaryPerm.identity())
    assert not is_even(P("(1 2)"))
    assert is_even(P("(1 2 3)"))


@given(perms(), perms())
def test_parity_is_homomorphism(p, q):
    assert is_even(p * q) == (is_even(p) == is_even(q))


@pytest.mark.parametrize("text", ["()", "(1 2 3)(5 6)", "(1 7)(2 4 3)"])
def test_text_round_trip(text):
    assert format_cycles(parse_cycles(text)) == text


def test_parser_variants_and_errors():
    assert parse_cycles("(1,2,3)") == P("(1 2 3)")
    assert parse_cycles("(1 2)(2 3)") == P("(1 2 3)")
    for bad in ["", "(1)", "1 2", "(1 2", "(a b)"]:
        with pytest.raises(ValueError):
            parse_cycles(bad)


def test_power_conjugate_inverse():
    p = P("(1 2 3 4)")
    assert p ** 4 == FinitaryPerm.identity()
    assert p ** -1 == p.inverse() == ~p
    g = P("(1 5)")
    assert p.conjugate(g) == g.inverse() * p * g == P("(2 3 4 5)")


def test_lazy_oracles_are_inverse_pairs():
    for a in (pairwise_swapper(), triple_rotator(), shifted_swapper(5)):
        for n in range(1, 200):
            assert a.eval(a.eval_inverse(n)) == n
        assert all(a(n) != n for n in a.support_prefix(30))
    assert shifted_swapper(5).support_prefix(2) == [6, 7]


def test_complete_partial_injection():
    s0 = complete_partial_injection({1: 5, 2: 1})
    assert s0(1) == 5 and s0(2) == 1 and s0(5) == 2


def test_separator_worked_example():
    t, plan = construct_separating_permutation(FinitaryPerm.identity(), {1, 2},
                                               [(pairwise_swapper(), 1)])
    assert t == P("(3 5)")
    assert (plan.n0, plan.m, plan.n) == (3, (5,), (6,))
    assert pairwise_swapper()(t(3)) == 6


def test_separator_rejects_bad_input():
    with pytest.raises(ValueError):
        construct_separating_permutation(FinitaryPerm.identity(), {1}, [(pairwise_swapper(), 0)])
    with pytest.raises(ValueError):
        construct_separating_permutation(FinitaryPerm.identity(), {1}, [(P("(1 2)"), 1)])
    with pytest.raises(ValueError):
        construct_separating_permutation(FinitaryPerm.identity(), {1},
                                         [(LazyPerm.from_finitary(P("(1 2)")), 1)])
    with pytest.raises(ValueError):
        construct_separating_permutation(FinitaryPerm.identity(), {1}, [])


def random_oracle(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return pairwise_swapper()
    if kind == 1:
        return triple_rotator()
    return shifted_swapper(rng.randrange(0, 15))


def random_separator_input(rng):
    s = random_perm(rng, rng.randint(1, 15))
    X = set(rng.sample(range(1, 20), rng.randint(0, 8)))
    pairs = [(random_oracle(rng), rng.choice([-3, -2, -1, 1, 2, 3]))
             for _ in range(rng.randint(1, 4))]
    return s, X, pairs


def check_separator(s, X, pairs):
    t, plan = construct_separating_permutation(s, X, pairs)
    assert all(t(x) == s(x) for x in X)
    traj = evaluate_word_chain(t, pairs, plan.n0)
    # every second point of the trajectory follows the chain n0, m1, n1, ...
    assert traj == plan.chain()
    assert traj[-1] == plan.n[-1] != plan.n0
    pts = plan.points()
    assert len(pts) == len(set(pts))
    base = X | {s(x) for x in X}
    assert not base & set(pts)
    for (a, alpha), mi, ni, row, c in zip(pairs, plan.m, plan.n, plan.l, plan.cycles):
        assert a(mi) == ni
        assert len(row) == abs(alpha) - 1
        assert len(c.support) == abs(alpha) + 1
    return t, plan


def test_separator_randomized_100():
    rng = random.Random(11)
    for _ in range(100):
        check_separator(*random_separator_input(rng))


def test_alt_sentence_examples():
    assert check_alt_sentence(FinitaryPerm.identity())
    g = P("(1 4)(2 5)(3 6)")
    a = P("(1 2 3)")
    assert a.conjugate(g) == P("(4 5 6)")
    assert commutator(a.conjugate(g), a).is_identity()
    assert check_alt_sentence(g)


def test_alt_sentence_random_even():
    rng = random.Random(5)
    for _ in range(500):
        g = random_perm(rng, 30)
        if not g.is_even():
            g = g * P("(29 30)")
        assert check_alt_sentence(g)


def test_alt_sentence_holds_for_odd_too():
    # four disjoint 3-sets cannot all meet {1,2,3}, so parity plays no role
    rng = random.Random(6)
    for _ in range(200):
        g = random_perm(rng, 30)
        assert check_alt_sentence(g)
