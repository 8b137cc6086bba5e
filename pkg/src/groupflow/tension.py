"""Tensions: edge assignments summing to zero around every cycle.

Two independent routes decide whether an assignment is a tension: summing
around a fundamental-cycle basis, and building a potential with a weighted
union-find. Both run on integer element codes so exhaustive sweeps stay cheap.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .flows import EdgeAssignment, FlowError
from .graph import DirectedEdge, Multigraph
from .groups import FiniteAbelianGroup, FlowAlphabet
from .infinite import No, YesUpTo, alphabet_to_json
from .presentation import PeriodicPresentation, PresentationError


@dataclass(frozen=True)
class TensionCheck:
    ok: bool
    violated_cycle: tuple[DirectedEdge, ...] | None = None

    def __bool__(self):
        return self.ok


class CycleBasis:
    """Fundamental cycles of a BFS spanning forest (vertex order), as signed edge indices.

    Each cycle starts with its chord traversed tail to head and returns
    through the tree; sign +1 means the edge is traversed along its
    canonical orientation. A loop is a one-edge cycle.
    """

    def __init__(self, g: Multigraph):
        self.graph = g
        ends = g.canonical_edges
        n = len(g.vertices)
        adj: list[list] = [[] for _ in range(n)]
        for i, (t, h) in enumerate(ends):
            if t != h:
                adj[t].append((h, i, +1))
                adj[h].append((t, i, -1))
        parent: list = [None] * n  # (parent vertex, edge index, sign from parent to child)
        depth = [-1] * n
        tree = set()
        for root in range(n):
            if depth[root] >= 0:
                continue
            depth[root] = 0
            queue = deque([root])
            while queue:
                x = queue.popleft()
                for y, i, s in adj[x]:
                    if depth[y] < 0:
                        depth[y] = depth[x] + 1
                        parent[y] = (x, i, s)
                        tree.add(i)
                        queue.append(y)
        self.tree = frozenset(tree)
        cycles = []
        for i, (t, h) in enumerate(ends):
            if i in tree:
                continue
            if t == h:
                cycles.append(((i, +1),))
                continue
            # chord t -> h, then h up to the meeting point and down to t
            up_h, up_t = [], []
            a, b = h, t
            while depth[a] > depth[b]:
                x, j, s = parent[a]
                up_h.append((j, -s))
                a = x
            while depth[b] > depth[a]:
                x, j, s = parent[b]
                up_t.append((j, s))
                b = x
            while a != b:
                x, j, s = parent[a]
                up_h.append((j, -s))
                a = x
                x, j, s = parent[b]
                up_t.append((j, s))
                b = x
            cycles.append(((i, +1),) + tuple(up_h) + tuple(reversed(up_t)))
        self.cycles = tuple(cycles)

    def directed(self, cycle) -> tuple[DirectedEdge, ...]:
        g = self.graph
        out = []
        for i, s in cycle:
            d = g.canonical(g.edges[i][0])
            out.append(d if s > 0 else d.reversed())
        return tuple(out)

    def first_violation(self, codes: Sequence[int], group: FiniteAbelianGroup) -> int | None:
        """Index of the first cycle with a nonzero sum, or None."""
        add, neg = group.add_table, group.neg_table
        for k, cycle in enumerate(self.cycles):
            s = 0
            for i, sign in cycle:
                x = codes[i]
                s = add[s][x if sign > 0 else neg[x]]
            if s:
                return k
        return None


def _codes(g: Multigraph, f: EdgeAssignment) -> list[int]:
    if f.group is None:
        raise FlowError("tensions are checked over a finite group")
    missing = [e for e, _, _ in g.edges if e not in f.values]
    if missing:
        raise FlowError(f"assignment has no value on edge {missing[0]!r}")
    return [f.group.code(f.values[e]) for e, _, _ in g.edges]


def verify_tension(g: Multigraph, f: EdgeAssignment, basis: CycleBasis | None = None) -> TensionCheck:
    """Zero sum around every fundamental cycle (hence every cycle, the group being abelian)."""
    basis = basis or CycleBasis(g)
    k = basis.first_violation(_codes(g, f), f.group)
    if k is None:
        return TensionCheck(True)
    return TensionCheck(False, basis.directed(basis.cycles[k]))


# -- potentials ---------------------------------------------------------------------


def tension_from_potential(g: Multigraph, potential: Mapping) -> EdgeAssignment:
    """f(tail -> head) = potential(head) - potential(tail)."""
    values = {}
    group = None
    for e, _, _ in g.edges:
        d = g.canonical(e)
        x = potential[d.head] - potential[d.tail]
        group = x.group
        values[e] = x
    if group is None:
        if not potential:
            raise FlowError("empty potential on an edgeless graph has no group")
        group = next(iter(potential.values())).group
    return EdgeAssignment(group, values)


def potential_codes(g: Multigraph, codes: Sequence[int], group: FiniteAbelianGroup) -> list[int] | None:
    """A potential (element codes per vertex) realizing ``codes``, or None.

    Weighted union-find over the edges in input order: off[v] is the
    potential of v minus that of its root.
    """
    add, neg = group.add_table, group.neg_table
    n = len(g.vertices)
    parent = list(range(n))
    off = [0] * n

    def find(x):
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        acc = 0
        for y in reversed(path):
            acc = add[acc][off[y]]
            off[y] = acc
            parent[y] = x
        return x

    for i, (t, h) in enumerate(g.canonical_edges):
        rt, rh = find(t), find(h)
        ot = off[t] if t != rt else 0
        oh = off[h] if h != rh else 0
        if rt == rh:
            if add[oh][neg[ot]] != codes[i]:
                return None
        else:
            parent[rh] = rt
            off[rh] = add[add[ot][codes[i]]][neg[oh]]
    return [0 if find(v) == v else off[v] for v in range(n)]


def is_potential_difference(g: Multigraph, f: EdgeAssignment) -> bool:
    return potential_codes(g, _codes(g, f), f.group) is not None


# -- search -------------------------------------------------------------------------------


def find_tension(g: Multigraph, a: FlowAlphabet) -> EdgeAssignment | None:
    """Lexicographically first A-tension (edge input order, alphabet order).

    An edge joining two components of the edges decided so far is free; an
    edge inside one component has its value forced by the potentials.
    """
    group = a.group
    add, neg = group.add_table, group.neg_table
    allowed = frozenset(a.codes)
    choices = tuple(sorted(allowed, key=a.codes.index))
    ends = g.canonical_edges
    n = len(g.vertices)
    comp = list(range(n))
    pot = [0] * n
    values = [0] * len(ends)

    def rec(i: int) -> bool:
        if i == len(ends):
            return True
        t, h = ends[i]
        if comp[t] == comp[h]:
            x = add[pot[h]][neg[pot[t]]]
            if x not in allowed:
                return False
            values[i] = x
            return rec(i + 1)
        ct, ch = comp[t], comp[h]
        moved = [v for v in range(n) if comp[v] == ch]
        saved = [pot[v] for v in moved]
        for x in choices:
            # shift h's component so that pot[h] - pot[t] = x
            shift = add[add[pot[t]][x]][neg[saved[moved.index(h)]]]
            for v, p0 in zip(moved, saved):
                comp[v] = ct
                pot[v] = add[p0][shift]
            values[i] = x
            if rec(i + 1):
                return True
        for v, p0 in zip(moved, saved):
            comp[v] = ch
            pot[v] = p0
        return False

    if not rec(0):
        return None
    els = group.elements
    return EdgeAssignment(group, {e: els[values[i]] for i, (e, _, _) in enumerate(g.edges)})


# -- infinite graphs ------------------------------------------------------------------------


@dataclass(frozen=True)
class TensionCertificate:
    """A finite window (an induced subgraph of the infinite graph) with no A-tension."""

    depth: int
    alphabet: FlowAlphabet
    window: Multigraph
    transcript: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet": alphabet_to_json(self.alphabet),
            "window": self.window.to_json(),
            "transcript": list(self.transcript),
        }


def check_infinite_tension(p: PeriodicPresentation, a: FlowAlphabet, max_depth: int = 16) -> No | YesUpTo:
    """No at the first window without an A-tension, else YesUpTo(max_depth).

    Cycles of a window are cycles of the infinite graph, so a window without
    an A-tension rules one out everywhere.
    """
    if max_depth < 0:
        raise PresentationError("max_depth must be >= 0")
    transcript = []
    tensions = []
    for n in range(max_depth + 1):
        w = p.materialize(n).graph
        f = find_tension(w, a)
        line = f"depth {n}: window with {len(w.vertices)} vertices and {len(w.edges)} edges"
        if f is None:
            transcript.append(f"{line}; no tension")
            return No(TensionCertificate(n, a, w, tuple(transcript)))
        transcript.append(f"{line}; tension found")
        tensions.append(f)
    return YesUpTo(max_depth, tuple(tensions))


def replay_tension_certificate(cert: TensionCertificate, p: PeriodicPresentation | None = None) -> bool:
    if p is not None and p.materialize(cert.depth).graph != cert.window:
        return False
    return find_tension(cert.window, cert.alphabet) is None


def tension_certificate_dumps(cert: TensionCertificate) -> str:
    return json.dumps(cert.to_json(), sort_keys=True, separators=(",", ":"))
