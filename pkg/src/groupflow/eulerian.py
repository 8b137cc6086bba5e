"""Spanning Eulerian subgraphs and the Z2xZ2-flows they induce.

A connected graph with a spanning Eulerian subgraph C has a non-elusive
Z2xZ2-flow: (0, 1) on C, plus (1, 0) around a cycle made of each outside
edge and a path inside C joining its ends.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .contraction import exhaustion_quotient
from .flows import Z2xZ2, EdgeAssignment, FlowError, verify_flow
from .graph import GraphError, Multigraph
from .groups import alphabet_nonzero
from .infinite import No, YesUpTo
from .presentation import PeriodicPresentation, PresentationError

DEFAULT_MAX_EDGES = 16

EdgeSubset = tuple  # edge ids in the host's edge order


def spanning_eulerian_reason(g: Multigraph, c: Iterable[str]) -> str | None:
    """Why ``c`` is not a spanning Eulerian subgraph of ``g``, or None if it is.

    Spanning Eulerian: connected, touches every vertex, all degrees even.
    """
    chosen = set(c)
    unknown = chosen - set(g.edge_index)
    if unknown:
        return f"unknown edge {sorted(unknown, key=str)[0]!r}"
    sub = g.edge_subgraph([e for e, _, _ in g.edges if e in chosen], keep_vertices=True)
    if len(g.vertices) > 1:
        for v, d in zip(sub.vertices, sub.degrees):
            if d == 0:
                return f"vertex {v!r} is not covered"
    for v, d in zip(sub.vertices, sub.degrees):
        if d % 2:
            return f"vertex {v!r} has odd degree {d}"
    if not sub.is_connected:
        return "subgraph is not connected"
    return None


def find_spanning_eulerian(g: Multigraph, max_edges: int | None = DEFAULT_MAX_EDGES) -> EdgeSubset | None:
    """Lexicographically first spanning Eulerian subgraph, loops never chosen.

    Edges are decided in input order with inclusion tried first, so among all
    answers the result has the largest characteristic vector in edge order.
    A vertex whose edges are all decided must have even positive degree.
    ``max_edges=None`` lifts the size guard.
    """
    g.require_connected()
    ends = g.canonical_edges
    order = [i for i, (t, h) in enumerate(ends) if t != h]
    if max_edges is not None and len(order) > max_edges:
        raise GraphError(
            f"exhaustive search is limited to {max_edges} non-loop edges (got {len(order)}); "
            "pass max_edges=None to search anyway"
        )
    n = len(g.vertices)
    if n == 1:
        return ()
    last = [-1] * n  # position in ``order`` of each vertex's final edge
    for pos, i in enumerate(order):
        t, h = ends[i]
        last[t] = pos
        last[h] = pos
    if min(last) < 0:
        return None
    deg = [0] * n
    chosen: list[int] = []

    def connected() -> bool:
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = n
        for i in chosen:
            a, b = find(ends[i][0]), find(ends[i][1])
            if a != b:
                parent[a] = b
                comps -= 1
        return comps == 1

    def closed_ok(pos: int, t: int, h: int) -> bool:
        return all(last[v] != pos or (deg[v] > 0 and deg[v] % 2 == 0) for v in (t, h))

    def rec(pos: int) -> bool:
        if pos == len(order):
            return connected()
        i = order[pos]
        t, h = ends[i]
        deg[t] += 1
        deg[h] += 1
        chosen.append(i)
        if closed_ok(pos, t, h) and rec(pos + 1):
            return True
        chosen.pop()
        deg[t] -= 1
        deg[h] -= 1
        return closed_ok(pos, t, h) and rec(pos + 1)

    if not rec(0):
        return None
    return tuple(g.edges[i][0] for i in sorted(chosen))


def _path_in(g: Multigraph, c: set, u, v) -> list[str]:
    """Edge ids of a shortest u-v path inside ``c`` (BFS in vertex/edge order)."""
    if u == v:
        return []
    vi = g.vertex_index
    adj: dict = {}
    for (t, h), (e, _, _) in zip(g.canonical_edges, g.edges):
        if e in c and t != h:
            adj.setdefault(t, []).append((h, e))
            adj.setdefault(h, []).append((t, e))
    start, goal = vi[u], vi[v]
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x == goal:
            break
        for y, e in adj.get(x, ()):
            if y not in prev:
                prev[y] = (x, e)
                queue.append(y)
    if goal not in prev:
        raise FlowError(f"no path between {u!r} and {v!r} inside the Eulerian subgraph")
    path = []
    x = goal
    while prev[x] is not None:
        x, e = prev[x]
        path.append(e)
    return path[::-1]


def supereulerian_flow(g: Multigraph, c: Iterable[str]) -> EdgeAssignment:
    """Non-elusive Z2xZ2-flow from a spanning Eulerian subgraph ``c``."""
    c = set(c)
    reason = spanning_eulerian_reason(g, c)
    if reason is not None:
        raise FlowError(f"not a spanning Eulerian subgraph: {reason}")
    grp = Z2xZ2
    one, two = grp.element(1, 0), grp.element(0, 1)
    values = {e: (two if e in c else grp.zero) for e, _, _ in g.edges}
    for e, u, v in g.edges:
        if e in c:
            continue
        for x in [e] + _path_in(g, c, u, v):
            values[x] = values[x] + one
    f = EdgeAssignment(grp, values)
    check = verify_flow(g, f, alphabet_nonzero(grp))
    if not check:
        raise FlowError("constructed assignment failed verification")
    return f


# -- finite shadows of Hamiltonian circles -------------------------------------------


@dataclass(frozen=True)
class CircleTemplate:
    """Edges of a circle, periodically: cell edges and glue names, plus prefix edges."""

    cell: frozenset = frozenset()
    glue: frozenset = frozenset()
    prefix: frozenset = frozenset()

    @classmethod
    def from_json(cls, data: Mapping, p: PeriodicPresentation | None = None) -> CircleTemplate:
        if not isinstance(data, Mapping) or set(data) - {"cell", "glue", "prefix"}:
            raise PresentationError("circle template must be an object with keys cell, glue, prefix")
        try:
            t = cls(*(frozenset(str(x) for x in data.get(k, [])) for k in ("cell", "glue", "prefix")))
        except TypeError:
            raise PresentationError("circle template entries must be lists of edge names") from None
        if p is not None:
            t.check(p)
        return t

    @classmethod
    def load(cls, path: str | Path, p: PeriodicPresentation | None = None) -> CircleTemplate:
        return cls.from_json(json.loads(Path(path).read_text()), p)

    def check(self, p: PeriodicPresentation) -> None:
        known = (
            ("cell", self.cell, {e for e, _, _ in p.cell.edges}),
            ("glue", self.glue, {gl.name for gl in p.cell_glue}),
            ("prefix", self.prefix, {e for e, _, _ in p.prefix.edges} | {gl.name for gl in p.prefix_glue}),
        )
        for kind, names, allowed in known:
            bad = sorted(names - allowed)
            if bad:
                raise PresentationError(f"circle template names unknown {kind} edge {bad[0]!r}")

    def selects(self, edge_id: str) -> bool:
        base, sep, _ = edge_id.rpartition("@")
        if not sep:
            return edge_id in self.prefix
        return base in self.cell or base in self.glue

    def to_json(self) -> dict:
        return {k: sorted(getattr(self, k)) for k in ("cell", "glue", "prefix")}


@dataclass(frozen=True)
class ShadowCertificate:
    """A depth whose quotient does not carry the circle's image as a spanning Eulerian subgraph."""

    depth: int
    quotient: Multigraph
    shadow: tuple
    reason: str
    transcript: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "quotient": self.quotient.to_json(),
            "shadow": list(self.shadow),
            "reason": self.reason,
            "transcript": list(self.transcript),
        }


def hamilton_shadow_flow(
    p: PeriodicPresentation, circle: CircleTemplate | Mapping, max_depth: int = 16
) -> No | YesUpTo:
    """At each depth, turn the circle's image in G_n into a non-elusive Z2xZ2-flow.

    YesUpTo carries the verified flows; No carries the first depth where the
    image is not spanning Eulerian.
    """
    if not isinstance(circle, CircleTemplate):
        circle = CircleTemplate.from_json(circle, p)
    else:
        circle.check(p)
    if max_depth < 0:
        raise PresentationError("max_depth must be >= 0")
    flows = []
    transcript = []
    for n in range(max_depth + 1):
        q, _ = exhaustion_quotient(p, n)
        g = q.quotient
        shadow = tuple(e for e, _, _ in g.edges if circle.selects(e))
        reason = spanning_eulerian_reason(g, shadow) if g.is_connected else "quotient is not connected"
        line = f"depth {n}: shadow has {len(shadow)} of {len(g.edges)} quotient edges"
        if reason is not None:
            transcript.append(f"{line}; {reason}")
            return No(ShadowCertificate(n, g, shadow, reason, tuple(transcript)))
        flows.append(supereulerian_flow(g, shadow))
        transcript.append(f"{line}; spanning Eulerian, flow verified")
    return YesUpTo(max_depth, tuple(flows))
