from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from tdlab.corpus import list_marked
from tdlab.marked import (
    MarkedGroup,
    brute_force_distance,
    extends_to_isomorphism,
    kernel_contains,
    load_marked,
    marked_distance,
)
from tdlab.words import FiniteGroupTable

C2, C3 = MarkedGroup.cyclic(2), MarkedGroup.cyclic(3)
TRIVIAL = MarkedGroup.cyclic(1)


def corpus_marked():
    return {name: load_marked(name) for name in list_marked()}


def test_kernel_examples():
    assert kernel_contains(C2, ())
    assert kernel_contains(C2, (1, 1)) and not kernel_contains(C2, (1,))
    assert not kernel_contains(C3, (1, 1))
    assert kernel_contains(C3, (1, 1, 1))
    with pytest.raises(ValueError):
        C2.evaluate((2,))


def test_distance_examples():
    assert marked_distance(C2, C2).value == 0
    d = marked_distance(C2, C3)
    assert d.exact and d.value == Fraction(1, 2) and d.witness == (1, 1)
    assert marked_distance(C2, TRIVIAL).value == 1
    assert str(marked_distance(C2, C3)) == "1/2"


def test_k_mismatch():
    s3 = load_marked("marked/marked_s3")
    with pytest.raises(ValueError):
        marked_distance(C2, s3)


def test_marking_must_generate():
    with pytest.raises(ValueError):
        MarkedGroup(FiniteGroupTable.cyclic(4), (2,))


def test_bound_when_radius_too_small():
    d = marked_distance(MarkedGroup.cyclic(5), MarkedGroup.cyclic(7), radius=3)
    assert not d.exact and d.value == Fraction(1, 4) and str(d) == "<= 1/4"
    assert marked_distance(MarkedGroup.cyclic(5), MarkedGroup.cyclic(7), radius=5).value == Fraction(1, 5)


def test_swapped_marking_is_a_different_point():
    s3 = load_marked("marked/marked_s3")
    swapped = load_marked("marked/marked_s3_swapped")
    assert not extends_to_isomorphism(s3, swapped)
    d = marked_distance(s3, swapped)
    assert d.exact and d.value > 0
    # x1^2 is trivial in the first marking only
    assert d.value == Fraction(1, 2)


def test_isomorphic_markings_are_zero():
    # C6 marked by a generator and by its inverse: x -> x^-1 is an automorphism
    a = MarkedGroup(FiniteGroupTable.cyclic(6), (1,))
    b = MarkedGroup(FiniteGroupTable.cyclic(6), (5,))
    assert extends_to_isomorphism(a, b)
    assert marked_distance(a, b).value == 0
    # both markings of C6 as (order 3, order 2) define the same kernel as Z/3 x Z/2
    pair = load_marked("marked/marked_c6_pair")
    prod = MarkedGroup(FiniteGroupTable.direct_product(FiniteGroupTable.cyclic(3),
                                                       FiniteGroupTable.cyclic(2)), (2, 1))
    assert marked_distance(pair, prod).value == 0


def test_corpus_pairs_match_brute_force():
    groups = corpus_marked()
    for (n1, M1), (n2, M2) in product(groups.items(), repeat=2):
        if M1.k != M2.k:
            continue
        d = marked_distance(M1, M2, radius=8)
        bf = brute_force_distance(M1, M2, 8)
        if bf is None:
            assert d.value == 0 and d.exact, (n1, n2)
        else:
            assert d.exact and d.value == bf, (n1, n2)
        assert d == marked_distance(M2, M1, radius=8)


def test_ultrametric_on_corpus():
    groups = [M for M in corpus_marked().values()] + [C2, C3, TRIVIAL, MarkedGroup.cyclic(4)]
    for M, N, P in product(groups, repeat=3):
        if not M.k == N.k == P.k:
            continue
        dMN, dNP, dMP = (marked_distance(x, y) for x, y in ((M, N), (N, P), (M, P)))
        assert dMN.exact and dNP.exact and dMP.exact
        assert dMP.value <= max(dMN.value, dNP.value)


@settings(max_examples=60)
@given(st.integers(1, 12), st.integers(1, 12))
def test_cyclic_distance_oracle(m, n):
    # in Z/m vs Z/n the shortest word in exactly one kernel is x^min(m, n) unless m = n
    d = marked_distance(MarkedGroup.cyclic(m), MarkedGroup.cyclic(n), radius=12)
    assert d.value == (0 if m == n else Fraction(1, min(m, n)))
    assert d.value == marked_distance(MarkedGroup.cyclic(n), MarkedGroup.cyclic(m)).value
