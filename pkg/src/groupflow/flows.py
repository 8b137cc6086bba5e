"""A-flows, k-flows and the finite equivalences between them."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .graph import (
    DirectedEdge,
    GraphError,
    Multigraph,
    OrientedCut,
    check_edge_dominating_degree3,
    edge_dominating_degree3_set,
    is_cycle_space_member,
    odd_vertices,
    oriented_cut,
)
from .groups import (
    FiniteAbelianGroup,
    FlowAlphabet,
    GroupElement,
    IntegerAlphabet,
    alphabet_all,
    alphabet_k_flow,
    alphabet_nonzero,
    group_make,
    parse_group,
    same_order,
)

EXHAUSTIVE_COUNT_LIMIT = 12

Z2 = group_make([2])
Z2xZ2 = group_make([2, 2], "Z2xZ2")


class FlowError(ValueError):
    pass


class EquivalenceError(AssertionError):
    """Two procedures that must agree on existence disagreed."""


class NoS1FlowError(FlowError):
    def __init__(self, edge: str):
        self.edge = edge
        super().__init__(f"no S^1-flow on this class (propagation conflict at edge {edge!r})")


@dataclass(frozen=True)
class EdgeAssignment:
    """Edge values read along each edge's canonical orientation in its host graph.

    ``group`` is None for integer-valued assignments (k-flows).
    """

    group: FiniteAbelianGroup | None
    values: Mapping[str, object] = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, edge: str):
        return self.values[edge]

    @property
    def zero(self):
        return 0 if self.group is None else self.group.zero

    def along(self, g: Multigraph, d: DirectedEdge):
        """Value on the directed edge ``d``; reversing a non-loop negates it."""
        x = self.values[d.edge]
        return x if g.canonical(d.edge).tail == d.tail else -x

    def cut_sum(self, g: Multigraph, cut: OrientedCut):
        total = self.zero
        for d in cut.crossing:
            total = total + self.along(g, d)
        return total

    def restrict(self, edge_ids: Iterable[str]) -> EdgeAssignment:
        keep = set(edge_ids)
        return EdgeAssignment(self.group, {e: x for e, x in self.values.items() if e in keep})

    @classmethod
    def from_directed(cls, g: Multigraph, group, directed: Mapping[DirectedEdge, object]) -> EdgeAssignment:
        values = {}
        for d, x in directed.items():
            values[d.edge] = x if g.canonical(d.edge).tail == d.tail else -x
        return cls(group, values)

    def to_json(self) -> dict:
        if self.group is None:
            return {"group": "Z", "values": {e: int(x) for e, x in self.values.items()}}
        return {
            "group": self.group.label,
            "values": {e: list(x.coords) for e, x in self.values.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> EdgeAssignment:
        try:
            spec = data.get("group", "Z")
            raw = data["values"]
            if spec == "Z" or "k" in data:
                return cls(None, {str(e): int(x) for e, x in raw.items()})
            group = parse_group(spec)
            return cls(group, {str(e): group.element(tuple(x)) for e, x in raw.items()})
        except (KeyError, TypeError, AttributeError) as exc:
            raise FlowError(f"malformed flow JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> EdgeAssignment:
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class FlowCheck:
    ok: bool
    violated_cut: OrientedCut | None = None
    bad_edge: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _require_total(g: Multigraph, f: EdgeAssignment) -> None:
    missing = [e for e, _, _ in g.edges if e not in f.values]
    if missing:
        raise FlowError(f"assignment is partial: no value on edge {missing[0]!r}")


def verify_flow(g: Multigraph, f: EdgeAssignment, a=None, cuts: Iterable[OrientedCut] | None = None) -> FlowCheck:
    """Check alphabet membership and zero sums on ``cuts`` (default: all vertex cuts).

    For a finite graph the vertex cuts suffice: every cut sum is the sum of
    the vertex sums on its A side. Loops never enter a cut sum.
    """
    _require_total(g, f)
    if a is not None:
        for e, _, _ in g.edges:
            if f.values[e] not in a:
                return FlowCheck(False, bad_edge=e)
    if cuts is None:
        zero = f.zero
        sums = [zero] * len(g.vertices)
        for i, (t, h) in enumerate(g.canonical_edges):
            if t == h:
                continue
            x = f.values[g.edges[i][0]]
            sums[t] = sums[t] + x
            sums[h] = sums[h] - x
        for v, s in zip(g.vertices, sums):
            if s != zero:
                return FlowCheck(False, violated_cut=oriented_cut(g, [v]))
        return FlowCheck(True)
    for cut in cuts:
        if f.cut_sum(g, cut) != f.zero:
            return FlowCheck(False, violated_cut=cut)
    return FlowCheck(True)


# -- search -------------------------------------------------------------------


class _Arith:
    """Group codes with table lookups, or plain integers."""

    def __init__(self, alphabet):
        if isinstance(alphabet, IntegerAlphabet):
            self.group = None
            self.values = list(alphabet.elements)
            self.zero = 0
            self.add = int.__add__
            self.neg = int.__neg__
            self.member = set(self.values)
            self.decode = lambda x: x
        else:
            group = alphabet.group
            self.group = group
            self.values = list(alphabet.codes)
            self.zero = 0
            table = group.add_table
            negs = group.neg_table
            self.add = lambda x, y: table[x][y]
            self.neg = negs.__getitem__
            self.member = set(self.values)
            els = group.elements
            self.decode = els.__getitem__
        self._reach: dict[tuple[int, int], frozenset] = {}

    def reachable(self, n_out: int, n_in: int) -> frozenset:
        """Sums of n_out alphabet values minus n_in alphabet values."""
        key = (n_out, n_in)
        hit = self._reach.get(key)
        if hit is not None:
            return hit
        if n_out == 0 and n_in == 0:
            res = frozenset([self.zero])
        elif n_out > 0:
            prev = self.reachable(n_out - 1, n_in)
            res = frozenset(self.add(s, x) for s in prev for x in self.values)
        else:
            prev = self.reachable(0, n_in - 1)
            res = frozenset(self.add(s, self.neg(x)) for s in prev for x in self.values)
        self._reach[key] = res
        return res


class _FlowSearch:
    """Backtracking over edges in input order with vertex-law propagation."""

    def __init__(self, g: Multigraph, alphabet):
        self.g = g
        self.ar = _Arith(alphabet)
        self.n_edges = len(g.edges)
        self.ends = g.canonical_edges
        self.inc = g.incidence
        n = len(g.vertices)
        self.val: list = [None] * self.n_edges
        self.part = [self.ar.zero] * n
        self.rem_out = [0] * n
        self.rem_in = [0] * n
        for t, h in self.ends:
            if t != h:
                self.rem_out[t] += 1
                self.rem_in[h] += 1
        self.trail: list[int] = []
        self.order = [i for i, (t, h) in enumerate(self.ends) if t != h]
        first = self.ar.values[0]
        for i in g.loop_indices:
            self.val[i] = first

    def copy(self) -> _FlowSearch:
        other = object.__new__(_FlowSearch)
        other.__dict__.update(self.__dict__)
        other.val = list(self.val)
        other.part = list(self.part)
        other.rem_out = list(self.rem_out)
        other.rem_in = list(self.rem_in)
        other.trail = list(self.trail)
        return other

    def _set(self, i: int, x) -> None:
        t, h = self.ends[i]
        ar = self.ar
        self.val[i] = x
        self.part[t] = ar.add(self.part[t], x)
        self.part[h] = ar.add(self.part[h], ar.neg(x))
        self.rem_out[t] -= 1
        self.rem_in[h] -= 1
        self.trail.append(i)

    def undo(self, mark: int) -> None:
        ar = self.ar
        while len(self.trail) > mark:
            i = self.trail.pop()
            x = self.val[i]
            t, h = self.ends[i]
            self.part[t] = ar.add(self.part[t], ar.neg(x))
            self.part[h] = ar.add(self.part[h], x)
            self.rem_out[t] += 1
            self.rem_in[h] += 1
            self.val[i] = None

    def assign(self, i: int, x) -> bool:
        """Set edge i and propagate; False on contradiction (caller undoes)."""
        self._set(i, x)
        return self._propagate(list(self.ends[i]))

    def _propagate(self, queue: list[int]) -> bool:
        ar = self.ar
        while queue:
            v = queue.pop()
            r_out, r_in = self.rem_out[v], self.rem_in[v]
            r = r_out + r_in
            need = ar.neg(self.part[v])
            if r == 0:
                if need != ar.zero:
                    return False
            elif r == 1:
                for j, sign in self.inc[v]:
                    if self.val[j] is None:
                        break
                x = need if sign == 1 else self.part[v]
                if x not in ar.member:
                    return False
                self._set(j, x)
                queue.extend(self.ends[j])
            elif need not in ar.reachable(r_out, r_in):
                return False
        return True

    def start(self) -> bool:
        return self._propagate(list(range(len(self.g.vertices))))

    def next_free(self, pos: int) -> int:
        order = self.order
        while pos < len(order) and self.val[order[pos]] is not None:
            pos += 1
        return pos

    def balanced(self) -> bool:
        """Each component of the unassigned edges must carry zero total deficit.

        Unassigned edges only move value between vertices of their own
        component, so a nonzero component sum can never be repaired.
        """
        ar = self.ar
        rem_out, rem_in, part, val = self.rem_out, self.rem_in, self.part, self.val
        inc, ends = self.inc, self.ends
        seen = bytearray(len(part))
        for s in range(len(part)):
            if seen[s] or rem_out[s] + rem_in[s] == 0:
                continue
            seen[s] = 1
            stack = [s]
            total = ar.zero
            while stack:
                v = stack.pop()
                total = ar.add(total, part[v])
                for j, _ in inc[v]:
                    if val[j] is None:
                        t, h = ends[j]
                        w = h if t == v else t
                        if not seen[w]:
                            seen[w] = 1
                            stack.append(w)
            if total != ar.zero:
                return False
        return True

    def solve(self, pos: int = 0) -> bool:
        pos = self.next_free(pos)
        if pos == len(self.order):
            return True
        if not self.balanced():
            return False
        i = self.order[pos]
        for x in self.ar.values:
            mark = len(self.trail)
            if self.assign(i, x) and self.solve(pos + 1):
                return True
            self.undo(mark)
        return False

    def result(self, group) -> EdgeAssignment:
        dec = self.ar.decode
        return EdgeAssignment(group, {e: dec(self.val[i]) for i, (e, _, _) in enumerate(self.g.edges)})


def _search(g: Multigraph, alphabet, threads: int = 1) -> EdgeAssignment | None:
    group = None if isinstance(alphabet, IntegerAlphabet) else alphabet.group
    zero_allowed = 0 in alphabet if group is None else group.zero in alphabet
    if g.bridges and not zero_allowed:
        return None
    s = _FlowSearch(g, alphabet)
    if not s.start():
        return None
    pos = s.next_free(0)
    if threads <= 1 or pos == len(s.order):
        return s.result(group) if s.solve(pos) else None

    # Disjoint subtrees per value of the first free edge; the reduction keeps
    # value order so the answer equals the sequential one.
    i = s.order[pos]

    def branch(x):
        t = s.copy()
        if t.assign(i, x) and t.solve(pos + 1):
            return t.result(group)
        return None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(branch, s.ar.values))
    return next((r for r in results if r is not None), None)


def find_flow(g: Multigraph, a: FlowAlphabet, threads: int = 1) -> EdgeAssignment | None:
    """The lexicographically first A-flow (edge input order, alphabet order), or None."""
    return _search(g, a, threads)


def count_flows(g: Multigraph, a, max_edges: int = EXHAUSTIVE_COUNT_LIMIT) -> int:
    """Number of maps E -> A (canonical orientation) satisfying every vertex law.

    Plain enumeration with a check whenever a vertex has all of its edges
    valued; loops are free and multiply the count by |A|.
    """
    if len(g.edges) > max_edges:
        raise FlowError(f"exhaustive count limited to {max_edges} edges, graph has {len(g.edges)}")
    ints = isinstance(a, IntegerAlphabet)
    values = list(a.elements)
    zero = 0 if ints else a.group.zero
    ends = g.canonical_edges
    order = [i for i, (t, h) in enumerate(ends) if t != h]
    last_at = {}
    for pos, i in enumerate(order):
        for v in ends[i]:
            last_at[v] = pos
    closing = [[] for _ in order]
    for v, pos in last_at.items():
        closing[pos].append(v)
    sums = [zero] * len(g.vertices)

    def rec(pos: int) -> int:
        if pos == len(order):
            return 1
        t, h = ends[order[pos]]
        total = 0
        for x in values:
            sums[t] = sums[t] + x
            sums[h] = sums[h] - x
            if all(sums[v] == zero for v in closing[pos]):
                total += rec(pos + 1)
            sums[t] = sums[t] - x
            sums[h] = sums[h] + x
        return total

    return rec(0) * len(values) ** len(g.loop_indices)


def find_k_flow(g: Multigraph, k: int, threads: int = 1) -> EdgeAssignment | None:
    """Integer flow with values in {+-1, ..., +-(k-1)}."""
    return _search(g, alphabet_k_flow(k), threads)


def k_flow_iff_zk(g: Multigraph, k: int, strict: bool = True) -> tuple[bool, bool]:
    """(has a k-flow, has a non-elusive Z_k-flow)."""
    pair = (find_k_flow(g, k) is not None, find_flow(g, alphabet_nonzero(group_make([k]))) is not None)
    if strict and pair[0] != pair[1]:
        raise EquivalenceError(f"k-flow / Z_{k}-flow existence disagree: {pair}")
    return pair


def order_equivalence(g: Multigraph, h1: FiniteAbelianGroup, h2: FiniteAbelianGroup, strict: bool = True) -> tuple[bool, bool]:
    """(non-elusive h1-flow exists, non-elusive h2-flow exists) for groups of equal order."""
    if not same_order(h1, h2):
        raise FlowError(f"{h1.label} and {h2.label} have different orders")
    pair = (
        find_flow(g, alphabet_nonzero(h1)) is not None,
        find_flow(g, alphabet_nonzero(h2)) is not None,
    )
    if strict and pair[0] != pair[1]:
        raise EquivalenceError(f"{h1.label} / {h2.label} flow existence disagree: {pair}")
    return pair


# -- binary flows and cycle space ------------------------------------------------


def indicator_flow(g: Multigraph, f: Iterable[str]) -> EdgeAssignment:
    """delta_F: 1 on F, 0 elsewhere, over Z2."""
    chosen = set(f)
    unknown = chosen - set(g.endpoints)
    if unknown:
        raise GraphError(f"unknown edge ids {sorted(unknown)}")
    one, zero = Z2.element(1), Z2.zero
    return EdgeAssignment(Z2, {e: one if e in chosen else zero for e, _, _ in g.edges})


def z2_flow_iff_cycle_space(g: Multigraph, f: Iterable[str], strict: bool = True) -> tuple[bool, bool]:
    f = list(f)
    pair = (
        verify_flow(g, indicator_flow(g, f), alphabet_all(Z2)).ok,
        is_cycle_space_member(g, f),
    )
    if strict and pair[0] != pair[1]:
        raise EquivalenceError(f"delta_F flow / cycle space membership disagree: {pair}")
    return pair


def z4_to_double_cover(g: Multigraph, f: EdgeAssignment) -> tuple[frozenset, frozenset]:
    """Supports of the two coordinate projections of a non-elusive Z2xZ2-flow."""
    if f.group is None or f.group.moduli != (2, 2):
        raise FlowError("expected a Z2xZ2 assignment")
    check = verify_flow(g, f, alphabet_nonzero(f.group))
    if not check:
        if check.bad_edge is not None:
            raise FlowError(f"edge {check.bad_edge!r} carries zero")
        raise FlowError(f"not a flow: nonzero sum on cut with A = {sorted(map(str, check.violated_cut.side_a))}")
    e1 = frozenset(e for e, x in f.values.items() if x.coords[0])
    e2 = frozenset(e for e, x in f.values.items() if x.coords[1])
    return e1, e2


def double_cover_to_z4(g: Multigraph, e1: Iterable[str], e2: Iterable[str]) -> EdgeAssignment:
    """f(e) = (delta_{E1}(e), delta_{E2}(e)), a non-elusive Z2xZ2-flow."""
    e1, e2 = set(e1), set(e2)
    for e, _, _ in g.edges:
        if e not in e1 and e not in e2:
            raise FlowError(f"edge {e!r} is covered by neither edge set")
    for name, part in (("first", e1), ("second", e2)):
        odd = odd_vertices(g, part)
        if odd:
            raise FlowError(f"{name} edge set is not in the cycle space: vertex {odd[0]!r} has odd degree")
    return EdgeAssignment(
        Z2xZ2, {e: Z2xZ2.element(int(e in e1), int(e in e2)) for e, _, _ in g.edges}
    )


# -- S^1 value propagation --------------------------------------------------------
#
# An S^1-flow that takes the value z1 on the seed edge takes values in
# +-{z1, z2, z3} everywhere once a connected degree-3 edge dominating set
# exists. Dividing by z1, values live in the sixth roots of unity, handled
# exactly in Z[w] (w a primitive cube root of unity, w^2 = -1 - w) as pairs
# (a, b) meaning a + b*w.

_ROOTS = ((1, 0), (0, 1), (-1, -1))  # 1, w, w^2


def _zw_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _signed_root(sign: int, cls: int):
    a, b = _ROOTS[cls]
    return (sign * a, sign * b)


@dataclass(frozen=True)
class S1Pattern:
    """Per edge: class c (value z_{c+1}) and sign (+1 when the canonical
    orientation carries z_{c+1}, -1 when it carries -z_{c+1})."""

    classes: Mapping[str, int]
    signs: Mapping[str, int]

    def partition(self) -> tuple[frozenset, frozenset, frozenset]:
        return tuple(frozenset(e for e, c in self.classes.items() if c == k) for k in range(3))

    def r3_orientation(self, g: Multigraph) -> dict[str, tuple[DirectedEdge, int]]:
        """Orientation under which every edge carries a cube root of unity w^c."""
        out = {}
        for e, c in self.classes.items():
            d = g.canonical(e)
            out[e] = (d if self.signs[e] > 0 else d.reversed(), c)
        return out

    def to_z3_flow(self) -> EdgeAssignment:
        """Image under the ring map Z[w] -> Z3 sending w to 1: the constant 1
        along the R3 orientation, which is nowhere zero."""
        z3 = group_make([3])
        return EdgeAssignment(z3, {e: z3.element(1 if s > 0 else 2) for e, s in self.signs.items()})


def is_r3_flow(g: Multigraph, oriented: Mapping[str, tuple[DirectedEdge, int]]) -> bool:
    """Exact check that the oriented cube-root values sum to zero at every vertex."""
    sums = {v: (0, 0) for v in g.vertices}
    for d, c in oriented.values():
        if d.is_loop:
            continue
        sums[d.tail] = _zw_add(sums[d.tail], _signed_root(1, c))
        sums[d.head] = _zw_add(sums[d.head], _signed_root(-1, c))
    return all(s == (0, 0) for s in sums.values())


def s1_value_propagation(g: Multigraph, u_set=None, seed: str | None = None) -> S1Pattern:
    """Propagate the seed value z_1 through the degree-3 dominating set.

    Exhaustive over sixth roots of unity relative to z_1; raises NoS1FlowError
    when no consistent class assignment exists.
    """
    if g.loop_indices:
        raise FlowError("S^1-flows are considered on loop-free multigraphs")
    if u_set is None:
        u_set = edge_dominating_degree3_set(g)
        if u_set is None:
            raise FlowError("precondition failed: no connected edge dominating set of degree-3 vertices")
    problem = check_edge_dominating_degree3(g, u_set)
    if problem is not None:
        raise FlowError(f"precondition failed: {problem}")
    u_set = frozenset(u_set)
    if seed is None:
        seed = next(e for e, a, b in g.edges if a in u_set or b in u_set)
    if seed not in g.endpoints:
        raise GraphError(f"unknown seed edge {seed!r}")

    ends = g.canonical_edges
    inc = g.incidence
    n_e = len(g.edges)
    cls: list = [None] * n_e
    sgn: list = [None] * n_e
    in_u = [v in u_set for v in g.vertices]
    units = [_signed_root(sg, c) for c in range(3) for sg in (1, -1)]

    def vertex_ok(v: int) -> bool:
        total = (0, 0)
        free = 0
        seen = []
        for j, s in inc[v]:
            if cls[j] is None:
                free += 1
            else:
                total = _zw_add(total, _signed_root(s * sgn[j], cls[j]))
                seen.append((s * sgn[j], cls[j]))
        if in_u[v]:
            # Three unit values summing to zero: one sign, three distinct classes.
            if len({x for x, _ in seen}) > 1 or len({c for _, c in seen}) < len(seen):
                return False
        if free == 0:
            return total == (0, 0)
        if free == 1:
            return any(_zw_add(total, u) == (0, 0) for u in units)
        return True

    seed_i = g.edge_index[seed]
    order = [seed_i] + [i for i in range(n_e) if i != seed_i]

    def rec(pos: int) -> bool:
        if pos == n_e:
            return True
        i = order[pos]
        options = [(1, 0)] if pos == 0 else [(sg, c) for c in range(3) for sg in (1, -1)]
        t, h = ends[i]
        for sg, c in options:
            cls[i], sgn[i] = c, sg
            if vertex_ok(t) and vertex_ok(h) and rec(pos + 1):
                return True
        cls[i] = sgn[i] = None
        return False

    if not rec(0):
        raise NoS1FlowError(seed)
    names = [e for e, _, _ in g.edges]
    return S1Pattern({names[i]: cls[i] for i in range(n_e)}, {names[i]: sgn[i] for i in range(n_e)})
