from __future__ import annotations

import itertools

import pytest

from groupflow.groups import (
    GroupError,
    alphabet_k_flow,
    alphabet_nonzero,
    cyclic,
    group_make,
    parse_group,
    roots_of_unity,
    same_order,
)


def test_arithmetic_examples():
    z4 = cyclic(4)
    assert z4.element(3) + z4.element(3) == z4.element(2)
    k = group_make([2, 2])
    assert k.element(1, 0) + k.element(0, 1) == k.element(1, 1)
    assert -cyclic(3).element(1) == cyclic(3).element(2)
    assert z4.sum([]) == z4.zero


def test_mixed_groups_refuse_to_add():
    with pytest.raises(GroupError):
        cyclic(4).element(1) + cyclic(2).element(1)


def test_same_order():
    assert same_order(cyclic(4), group_make([2, 2]))
    assert not same_order(cyclic(3), cyclic(4))
    assert same_order(cyclic(6), group_make([2, 3]))


def test_abstract_isomorphism():
    assert cyclic(6).is_isomorphic(group_make([2, 3]))
    assert not cyclic(4).is_isomorphic(group_make([2, 2]))
    assert roots_of_unity(3).is_isomorphic(cyclic(3))


def test_alphabets():
    assert [x.coords for x in alphabet_nonzero(cyclic(2))] == [(1,)]
    assert {x.coords for x in alphabet_nonzero(group_make([2, 2]))} == {(0, 1), (1, 0), (1, 1)}
    assert set(alphabet_k_flow(3)) == {-2, -1, 1, 2}
    with pytest.raises(GroupError):
        alphabet_k_flow(1)


def test_parse_group():
    assert parse_group("Z2xZ2").moduli == (2, 2)
    assert parse_group("R3").order == 3
    assert parse_group("Z2xZ3").is_isomorphic(cyclic(6))
    with pytest.raises(GroupError):
        parse_group("Q8")


GROUPS = [group_make(m) for m in ([2], [3], [4], [2, 2], [5], [6], [2, 3], [8], [2, 4], [2, 2, 2], [3, 3], [4, 4], [2, 2, 4])]


@pytest.mark.parametrize("h", GROUPS, ids=lambda h: h.label)
def test_group_axioms_exhaustive(h):
    els = h.elements
    zero = h.zero
    for a in els:
        assert a + zero == a and a + (-a) == zero
        for b in els:
            assert a + b == b + a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)


@pytest.mark.parametrize("h", GROUPS, ids=lambda h: h.label)
def test_nonzero_alphabet_is_closed_under_negation(h):
    a = alphabet_nonzero(h)
    assert a.closed_under_negation and a.non_elusive
