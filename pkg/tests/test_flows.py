from __future__ import annotations

import itertools

import pytest
from hypothesis import given

from conftest import connected_graphs, graph
from groupflow.corpus import complete, complete_bipartite, cycle, path, petersen, theta, wheel
from groupflow.flows import (
    EdgeAssignment,
    FlowError,
    NoS1FlowError,
    count_flows,
    double_cover_to_z4,
    find_flow,
    find_k_flow,
    indicator_flow,
    is_r3_flow,
    k_flow_iff_zk,
    order_equivalence,
    s1_value_propagation,
    verify_flow,
    z2_flow_iff_cycle_space,
    z4_to_double_cover,
)
from groupflow.graph import enumerate_cuts, is_cycle_space_member
from groupflow.groups import alphabet_all, alphabet_k_flow, alphabet_nonzero, cyclic, group_make

Z2, Z3, Z4, Z5 = cyclic(2), cyclic(3), cyclic(4), cyclic(5)
K22 = group_make([2, 2])


def brute_flows(g, values, zero):
    """Every total assignment from ``values`` whose vertex sums vanish."""
    ends = [g.canonical(e) for e, _, _ in g.edges]
    for combo in itertools.product(values, repeat=len(ends)):
        sums = {v: zero for v in g.vertices}
        for d, x in zip(ends, combo):
            if not d.is_loop:
                sums[d.tail] = sums[d.tail] + x
                sums[d.head] = sums[d.head] - x
        if all(s == zero for s in sums.values()):
            yield dict(zip((e for e, _, _ in g.edges), combo))


def const(g, group, x):
    return EdgeAssignment(group, {e: group.element(x) for e, _, _ in g.edges})


def test_verify_examples():
    tri = graph("abc", ["ab", "bc", "ca"])
    assert verify_flow(tri, const(tri, Z2, 1), alphabet_nonzero(Z2))
    edge = graph("uv", ["uv"])
    check = verify_flow(edge, const(edge, Z3, 1), alphabet_nonzero(Z3))
    assert not check and check.violated_cut.side_a == frozenset("u")


def test_k4_has_no_nonzero_z3_assignment_that_verifies():
    g = complete(4)
    for combo in itertools.product(alphabet_nonzero(Z3), repeat=6):
        f = EdgeAssignment(Z3, dict(zip((e for e, _, _ in g.edges), combo)))
        assert not verify_flow(g, f)


def test_partial_assignment_is_an_error():
    with pytest.raises(FlowError):
        verify_flow(cycle(3), EdgeAssignment(Z2, {"e0": Z2.element(1)}))


def test_find_examples():
    assert verify_flow(complete_bipartite(3, 3), find_flow(complete_bipartite(3, 3), alphabet_nonzero(Z3)))
    assert find_flow(petersen(), alphabet_nonzero(Z4)) is None
    f = find_flow(petersen(), alphabet_nonzero(Z5))
    assert verify_flow(petersen(), f, alphabet_nonzero(Z5))


def test_loops_take_the_first_value():
    g = graph("ab", ["ab", "ab", "aa"])
    f = find_flow(g, alphabet_nonzero(Z3))
    assert f.values["e2"] == Z3.element(1)


def test_threads_reproduce_the_sequential_result():
    for g in (petersen(), wheel(5), complete(5)):
        a = alphabet_nonzero(Z5)
        assert find_flow(g, a, threads=4) == find_flow(g, a)


def test_count_examples():
    for n in (3, 4, 5):
        assert count_flows(cycle(n), alphabet_nonzero(Z2)) == 1
    assert count_flows(cycle(3), alphabet_nonzero(Z3)) == 2
    assert count_flows(graph("a", ["aa"]), alphabet_nonzero(Z2)) == 1
    with pytest.raises(FlowError):
        count_flows(petersen(), alphabet_nonzero(Z2))


def test_k_flow_examples():
    f = find_k_flow(cycle(3), 2)
    assert verify_flow(cycle(3), f, alphabet_k_flow(2))
    assert find_k_flow(complete(4), 4) is not None
    assert find_k_flow(complete(4), 3) is None
    for k in (2, 3, 4, 5):
        assert find_k_flow(path(3), k) is None


def test_order_equivalence_examples():
    assert order_equivalence(complete(4), Z4, K22) == (True, True)
    assert order_equivalence(petersen(), Z4, K22) == (False, False)
    assert order_equivalence(cycle(3), Z4, K22) == (True, True)
    with pytest.raises(FlowError):
        order_equivalence(cycle(3), Z3, Z4)


def test_indicator_examples():
    assert z2_flow_iff_cycle_space(cycle(3), ["e0", "e1", "e2"]) == (True, True)
    assert z2_flow_iff_cycle_space(path(3), ["e1"]) == (False, False)
    assert z2_flow_iff_cycle_space(complete(4), ["e0", "e3", "e5", "e2"]) == (True, True)


def test_double_cover_examples():
    g = cycle(4)
    f = EdgeAssignment(K22, {e: K22.element(1, 1) for e, _, _ in g.edges})
    e1, e2 = z4_to_double_cover(g, f)
    assert e1 == e2 == frozenset(e for e, _, _ in g.edges)
    assert double_cover_to_z4(g, e1, e2) == f
    k4 = complete(4)
    e1, e2 = z4_to_double_cover(k4, find_flow(k4, alphabet_nonzero(K22)))
    assert is_cycle_space_member(k4, e1) and is_cycle_space_member(k4, e2)
    assert e1 | e2 == {e for e, _, _ in k4.edges}
    with pytest.raises(FlowError):
        double_cover_to_z4(path(3), ["e0"], ["e1"])


def test_s1_propagation_examples():
    with pytest.raises(NoS1FlowError, match="no S\\^1-flow on this class"):
        s1_value_propagation(complete(4))
    g = complete_bipartite(3, 3)
    pattern = s1_value_propagation(g)
    assert all(pattern.partition())
    assert is_r3_flow(g, pattern.r3_orientation(g))
    assert verify_flow(g, pattern.to_z3_flow(), alphabet_nonzero(Z3))
    with pytest.raises(FlowError):
        s1_value_propagation(cycle(6))


def test_s1_propagation_on_theta():
    pattern = s1_value_propagation(theta(3))
    assert sorted(pattern.classes.values()) == [0, 1, 2]


@given(connected_graphs(max_vertices=4, max_extra=4))
def test_search_agrees_with_brute_force(g):
    for group in (Z2, Z3, Z4, K22):
        a = alphabet_nonzero(group)
        brute = list(brute_flows(g, list(a), group.zero))
        f = find_flow(g, a)
        assert (f is not None) == bool(brute)
        if f is not None:
            assert verify_flow(g, f, a)
            assert f.values == brute[0]  # lexicographically first
        assert count_flows(g, a) == len(brute)


@given(connected_graphs(max_vertices=4, max_extra=3))
def test_vertex_laws_suffice(g):
    cuts = list(enumerate_cuts(g))
    for group in (Z2, Z3):
        for combo in itertools.product(group.elements, repeat=len(g.edges)):
            f = EdgeAssignment(group, dict(zip((e for e, _, _ in g.edges), combo)))
            assert bool(verify_flow(g, f)) == bool(verify_flow(g, f, cuts=cuts))


@given(connected_graphs(max_vertices=4, max_extra=4))
def test_k_flows_match_cyclic_flows(g):
    for k in (2, 3, 4):
        a, b = k_flow_iff_zk(g, k)
        assert a == b
        f = find_k_flow(g, k)
        if f is not None:
            assert verify_flow(g, f, alphabet_k_flow(k))


@given(connected_graphs(max_vertices=5, max_extra=4))
def test_double_cover_round_trip(g):
    f = find_flow(g, alphabet_nonzero(K22))
    if f is None:
        return
    e1, e2 = z4_to_double_cover(g, f)
    assert double_cover_to_z4(g, e1, e2) == f


@given(connected_graphs(max_extra=6))
def test_indicator_flows_match_cycle_space(g):
    m = len(g.edges)
    for bits in range(1 << m):
        chosen = [g.edges[i][0] for i in range(m) if bits >> i & 1]
        ok, member = z2_flow_iff_cycle_space(g, chosen)
        assert ok == member
        assert verify_flow(g, indicator_flow(g, chosen), alphabet_all(Z2)).ok == member
