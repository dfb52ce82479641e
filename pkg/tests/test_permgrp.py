import json
import random
from math import factorial, lcm

import pytest
from hypothesis import given, settings, strategies as st

from tdlab.corpus import load_group
from tdlab.perm import FinitaryPerm
from tdlab.permgrp import (
    BlockSystem,
    BoundExceeded,
    PermGroup,
    all_k_tuples_orbit_check,
    burnside_td_upper_bound,
    conjugacy_classes,
    format_corpus,
    is_k_transitive,
    is_primitive,
    is_product_like,
    minimal_block_system,
    normal_closure,
    normal_subgroups,
    order_and_membership,
    parse_corpus,
    report_json,
    transitivity_degree_finite,
    transitivity_of_action,
    verify_cameron,
)

P = FinitaryPerm.parse


def group(n, *gens):
    return PermGroup(n, [P(g) for g in gens])


def closure_oracle(G):
    """Plain breadth-first closure under right multiplication by generators."""
    ident = tuple(range(G.degree))
    seen = {ident}
    frontier = [ident]
    gens = G.gen_tuples
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(x[g[i]] for i in range(G.degree))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def test_order_examples():
    S4 = group(4, "(1 2)", "(1 2 3 4)")
    order, member = order_and_membership(S4)
    assert order == 24
    assert member(P("(1 3)"))
    assert PermGroup(5).order() == 1
    A4 = group(4, "(1 2 3)", "(2 3 4)")
    assert A4.order() == 12
    assert P("(1 2)") not in A4
    assert P("(1 2)(3 4)") in A4


@pytest.mark.parametrize("name", ["s5", "a6", "d4", "q8", "agl1_9", "agl3_2", "c2xc2", "s7"])
def test_chain_matches_closure(name):
    G = load_group(name)
    elems = closure_oracle(G)
    assert G.order() == len(elems)
    assert set(G.elements()) == elems


def test_membership_random_against_closure():
    rng = random.Random(3)
    G = load_group("agl1_8")
    elems = closure_oracle(G)
    for _ in range(300):
        pts = list(range(8))
        rng.shuffle(pts)
        assert G.contains(tuple(pts)) == (tuple(pts) in elems)


def test_degree_bound():
    with pytest.raises(BoundExceeded):
        PermGroup(65)
    assert PermGroup(65, max_degree=70).order() == 1


def test_generators_must_fit():
    with pytest.raises(ValueError):
        PermGroup(3, [(0, 1, 1)])


@pytest.mark.parametrize("n", range(3, 8))
def test_symmetric_and_alternating(n):
    S = load_group(f"s{n}")
    assert is_k_transitive(S, n)
    assert transitivity_of_action(S) == n
    A = load_group(f"a{n}")
    assert is_k_transitive(A, max(n - 2, 1))
    if n >= 4:
        assert not is_k_transitive(A, n - 1)


def test_k_range_errors():
    S3 = load_group("s3")
    with pytest.raises(ValueError):
        is_k_transitive(S3, 4)
    with pytest.raises(ValueError):
        is_k_transitive(S3, 0)


def test_agl15_two_not_three():
    G = load_group("agl1_5")
    assert is_k_transitive(G, 2) and not is_k_transitive(G, 3)


@pytest.mark.parametrize("name", ["s4", "a5", "d4", "agl1_7", "agl2_2", "c6", "q8"])
def test_orbit_test_matches_brute_force(name):
    G = load_group(name)
    for k in range(1, G.degree + 1):
        assert is_k_transitive(G, k) == all_k_tuples_orbit_check(G, k)


@pytest.mark.parametrize("name", ["s6", "a6", "agl1_9", "agl3_2", "c8"])
def test_monotonicity(name):
    G = load_group(name)
    flags = [is_k_transitive(G, k) for k in range(1, G.degree + 1)]
    assert flags == sorted(flags, reverse=True)


def test_blocks():
    assert str(minimal_block_system(group(4, "(1 2 3 4)"))) == "{1,3} {2,4}"
    assert minimal_block_system(load_group("s4")) == "primitive"
    d4 = minimal_block_system(group(4, "(1 2 3 4)", "(1 3)"))
    assert isinstance(d4, BlockSystem) and d4.blocks == ((1, 3), (2, 4))
    with pytest.raises(ValueError):
        minimal_block_system(group(4, "(1 2)"))


def test_block_system_is_invariant():
    G = load_group("c8")
    bs = minimal_block_system(G)
    blocks = [set(b) for b in bs.blocks]
    for g in G.generators:
        for b in blocks:
            assert {g(x) for x in b} in blocks


def test_primes_are_primitive():
    assert is_primitive(load_group("c5")) and is_primitive(load_group("c7"))
    assert not is_primitive(load_group("c6"))


def test_normal_subgroups_examples():
    assert [N.order() for N in normal_subgroups(load_group("s3"))] == [1, 3, 6]
    assert [N.order() for N in normal_subgroups(load_group("c2xc2"))] == [1, 2, 2, 2, 4]
    assert [N.order() for N in normal_subgroups(load_group("a5"))] == [1, 60]
    assert [N.order() for N in normal_subgroups(load_group("s4"))] == [1, 4, 12, 24]
    assert [N.order() for N in normal_subgroups(load_group("q8"))] == [1, 2, 4, 4, 4, 8]


def test_normal_subgroups_are_normal():
    G = load_group("d4")
    for N in normal_subgroups(G):
        for g in G.gen_tuples:
            ginv = tuple(sorted(range(4), key=lambda i: g[i]))
            for x in N.gen_tuples:
                conj = tuple(ginv[x[g[i]]] for i in range(4))
                assert N.contains(conj)


def test_class_bound():
    with pytest.raises(BoundExceeded):
        conjugacy_classes(load_group("s7"), bound=100)
    assert sum(len(c) for c in conjugacy_classes(load_group("s5"))) == 120
    assert len(conjugacy_classes(load_group("s5"))) == 7


def test_normal_closure():
    S4 = load_group("s4")
    assert normal_closure(S4, [P("(1 2)(3 4)").to_tuple(4)]).order() == 4
    assert normal_closure(S4, [P("(1 2 3)").to_tuple(4)]).order() == 12


def test_product_like():
    pair = is_product_like(load_group("c2xc2"))
    assert pair is not None
    A, B = pair
    assert A.order() == B.order() == 2
    assert is_product_like(load_group("s3")) is None
    assert is_product_like(load_group("q8")) is None


def test_cameron_examples():
    r = verify_cameron(load_group("agl3_2"), 3)
    assert r["passed"]
    assert {e["order"]: e["branch"] for e in r["normal_subgroups"]} == {
        8: "elementary abelian 2-group", 1344: "(k-1)-transitive"}
    r = verify_cameron(load_group("s5"), 3)
    assert r["passed"]
    assert {e["order"]: e["branch"] for e in r["normal_subgroups"]} == {
        60: "(k-1)-transitive", 120: "(k-1)-transitive"}
    json.loads(report_json(r))


def test_cameron_boundary_recorded():
    # S4 with k = 4: A4 is only 2-transitive; the dichotomy is stated for infinite groups
    r = verify_cameron(load_group("s4"), 4)
    branches = {e["order"]: e["branch"] for e in r["normal_subgroups"]}
    assert branches[12] == "violation" and not r["passed"]


def test_cameron_precondition():
    with pytest.raises(ValueError):
        verify_cameron(load_group("c4"), 2)


def test_td_finite():
    assert transitivity_degree_finite(load_group("s3"))["td"] == 3
    assert transitivity_degree_finite(load_group("a4"))["td"] == 2
    assert transitivity_degree_finite(load_group("c6"))["td"] == 1
    assert transitivity_degree_finite(load_group("d4"))["td"] == 1
    assert transitivity_degree_finite(load_group("s4"))["td"] == 4
    with pytest.raises(BoundExceeded):
        transitivity_degree_finite(load_group("s5"))


def burnside_oracle(n):
    k = 1
    while n % lcm(*range(1, k + 2)) == 0:
        k += 1
    return k


@given(st.integers(min_value=1, max_value=10**6))
def test_burnside_matches_oracle(n):
    assert burnside_td_upper_bound(n) == burnside_oracle(n)


def test_burnside_examples():
    assert all(burnside_td_upper_bound(n) == 1 for n in range(1, 200, 2))
    assert burnside_td_upper_bound(12) == 4
    assert burnside_td_upper_bound(2) == 2
    for k in range(1, 9):
        assert burnside_td_upper_bound(lcm(*range(1, k + 1))) >= k


def test_corpus_format_round_trip():
    G = load_group("agl1_5")
    text = format_corpus(G, [P("(1 2 3 4 5)")], comment="test")
    entry = parse_corpus(text)
    assert entry.group.same_as(G)
    assert entry.marking == [P("(1 2 3 4 5)")]
    assert entry.comments == ["test"]
    for bad in ["(1 2)\n", "domain 2\n(1 3)\n", "domain x\n"]:
        with pytest.raises(ValueError):
            parse_corpus(bad)


def test_stabilizer_and_orbits():
    G = load_group("agl3_2")
    stab = G.stabilizer(0)
    assert stab.order() == 168
    assert all(g[0] == 0 for g in stab.gen_tuples)
    H = group(6, "(1 2 3)", "(4 5)")
    assert H.orbits() == [[0, 1, 2], [3, 4], [5]]
    assert factorial(6) // load_group("s6").stabilizer(2).order() == 6
