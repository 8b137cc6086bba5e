from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_graphs, graph
from groupflow.contraction import (
    ContractionError,
    contract,
    exhaustion_quotient,
    push_flow,
    verify_cut_sandwich,
)
from groupflow.corpus import complete, cycle, graph_certificate
from groupflow.flows import count_flows, find_flow, verify_flow
from groupflow.graph import DirectedEdge, OrientedCut, oriented_cut
from groupflow.groups import alphabet_nonzero, cyclic
from groupflow.infinite import load_fixture

Z2, Z3, Z4 = cyclic(2), cyclic(3), cyclic(4)


def test_path_single_cut():
    g = graph("abc", ["ab", "bc"])
    q, cmap = contract(g, [oriented_cut(g, ["a"])])
    assert q.quotient.vertices == ("0", "1")
    assert q.quotient.endpoints == {"e0": ("0", "1"), "e1": ("1", "1")}
    assert q.loops == {"e1"}
    assert cmap.blocks() == {"0": ["a"], "1": ["b", "c"]}


def test_empty_family_gives_a_bouquet():
    g = complete(4)
    q, _ = contract(g, [])
    assert q.quotient.vertices == ("",)
    assert q.loops == {e for e, _, _ in g.edges}


def test_triangle_two_cuts_is_the_triangle():
    g = graph("abc", ["ab", "bc", "ca"])
    q, cmap = contract(g, [["a"], ["a", "b"]])
    assert len(q.quotient.vertices) == 3
    assert graph_certificate(q.quotient) == graph_certificate(g)
    assert [cmap(v) for v in "abc"] == ["00", "10", "11"]


def test_fake_cut_is_rejected():
    g = graph("abc", ["ab", "bc"])
    fake = OrientedCut(frozenset("a"), frozenset("bc"), (DirectedEdge("e1", "b", "c"),))
    with pytest.raises(ContractionError, match="not a cut"):
        contract(g, [fake])


def test_sandwich_examples():
    g = graph("abc", ["ab", "bc"])
    m = [oriented_cut(g, ["a"])]
    assert verify_cut_sandwich(g, m, *contract(g, m))
    tri = graph("abc", ["ab", "bc", "ca"])
    m = [["b"]]
    assert verify_cut_sandwich(tri, m, *contract(tri, m))


def test_sandwich_catches_a_tampered_quotient():
    g = cycle(4)
    m = [[0, 1]]
    q, cmap = contract(g, m)
    bad_map = type(cmap)({**cmap.vertex_map, 1: cmap(2)})
    assert not verify_cut_sandwich(g, m, q, bad_map)


def test_double_ray_depth_zero_is_a_star():
    q, cmap = exhaustion_quotient(load_fixture("double_ray"), 0)
    g = q.quotient
    assert len(g.vertices) == 3 and len(g.edges) == 2
    assert sorted(v for v in g.vertices if v.startswith("dummy")) == ["dummy:L0", "dummy:R0"]


def test_finite_host_deep_exhaustion_is_the_host():
    g = complete(4)
    q, _ = exhaustion_quotient(g, 4)
    assert q.quotient == g


def test_ladder_quotient_has_at_most_two_dummies():
    for n in range(3):
        q, cmap = exhaustion_quotient(load_fixture("ladder_fig1_1"), n)
        assert 1 <= len(cmap.tails) <= 2
        assert not any(u == v for _, u, v in q.quotient.edges)


families = st.lists(st.sets(st.integers(0, 5), min_size=1), min_size=1, max_size=2)


def _family(g, raw):
    sides = []
    for s in raw:
        side = [g.vertices[i % len(g.vertices)] for i in s]
        if set(side) != set(g.vertices):
            sides.append(side)
    return sides


@given(connected_graphs(), families)
def test_edge_bijection_and_vertex_partition(g, raw):
    m = _family(g, raw)
    q, cmap = contract(g, m)
    assert [e for e, _, _ in q.quotient.edges] == [e for e, _, _ in g.edges]
    blocks = cmap.blocks()
    assert set(blocks) == set(q.quotient.vertices)
    assert sorted(v for b in blocks.values() for v in b) == sorted(g.vertices)
    assert verify_cut_sandwich(g, m, q, cmap)


@given(connected_graphs(max_extra=4), families)
def test_flows_restrict_to_contractions(g, raw):
    m = _family(g, raw)
    q, cmap = contract(g, m)
    for group in (Z2, Z3, Z4):
        a = alphabet_nonzero(group)
        f = find_flow(g, a)
        if f is not None:
            assert verify_flow(q.quotient, push_flow(f, g, cmap, q.quotient), a)
            assert count_flows(q.quotient, a) >= 1


@given(connected_graphs(max_extra=4), families)
def test_loop_conventions_agree_on_existence(g, raw):
    q, _ = contract(g, _family(g, raw))
    for group in (Z2, Z3):
        a = alphabet_nonzero(group)
        assert (find_flow(q.quotient, a) is None) == (find_flow(q.quotient.without_loops(), a) is None)
