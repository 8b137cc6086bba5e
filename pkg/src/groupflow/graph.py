"""Finite multigraphs with directed-edge views, cuts and the binary cycle space."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Hashable, Iterable, Iterator

Vertex = Hashable

DEFAULT_MAX_CUT_VERTICES = 20


class GraphError(ValueError):
    """Raised for malformed graphs or violated graph preconditions."""


class DisconnectedGraphError(GraphError):
    def __init__(self, first: Iterable[Vertex], second: Iterable[Vertex]):
        self.components = (sorted(map(str, first)), sorted(map(str, second)))
        super().__init__(
            f"graph is disconnected: components {self.components[0]} and {self.components[1]}"
        )


@dataclass(frozen=True)
class DirectedEdge:
    edge: str
    tail: Vertex
    head: Vertex

    def reversed(self) -> DirectedEdge:
        return DirectedEdge(self.edge, self.head, self.tail)

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class OrientedCut:
    """A bipartition (A, B) together with its A->B crossing edges."""

    side_a: frozenset
    side_b: frozenset
    crossing: tuple[DirectedEdge, ...]

    def reversed(self) -> OrientedCut:
        return OrientedCut(self.side_b, self.side_a, tuple(d.reversed() for d in self.crossing))

    @property
    def edge_ids(self) -> frozenset:
        return frozenset(d.edge for d in self.crossing)

    def __len__(self) -> int:
        return len(self.crossing)


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Undirected multigraph; loops and parallel edges allowed.

    ``edges`` holds ``(edge id, u, v)`` triples. Input order of both vertices
    and edges is significant: it fixes every deterministic iteration order in
    the package, and the canonical orientation of an edge points from the
    endpoint that comes first in ``vertices`` to the other one.
    """

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        vertices = tuple(self.vertices)
        edges = tuple((str(e), u, v) for e, u, v in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        if len(set(vertices)) != len(vertices):
            raise GraphError("duplicate vertex ids")
        known = set(vertices)
        seen = set()
        for e, u, v in edges:
            if e in seen:
                raise GraphError(f"duplicate edge id {e!r}")
            seen.add(e)
            if u not in known or v not in known:
                raise GraphError(f"edge {e!r} has an endpoint outside the vertex set")

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Multigraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    # -- indices -----------------------------------------------------------

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict:
        return {e: i for i, (e, _, _) in enumerate(self.edges)}

    @cached_property
    def endpoints(self) -> dict:
        return {e: (u, v) for e, u, v in self.edges}

    @cached_property
    def canonical_edges(self) -> tuple[tuple[int, int], ...]:
        """(tail index, head index) per edge, tail being the earlier vertex."""
        idx = self.vertex_index
        out = []
        for _, u, v in self.edges:
            a, b = idx[u], idx[v]
            out.append((a, b) if a <= b else (b, a))
        return tuple(out)

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex index: (edge index, +1 if tail / -1 if head); loops omitted."""
        inc = [[] for _ in self.vertices]
        for i, (t, h) in enumerate(self.canonical_edges):
            if t == h:
                continue
            inc[t].append((i, 1))
            inc[h].append((i, -1))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def loop_indices(self) -> tuple[int, ...]:
        return tuple(i for i, (t, h) in enumerate(self.canonical_edges) if t == h)

    def canonical(self, edge: str) -> DirectedEdge:
        t, h = self.canonical_edges[self.edge_index[edge]]
        return DirectedEdge(edge, self.vertices[t], self.vertices[h])

    def directed_edges(self) -> Iterator[DirectedEdge]:
        """Both orientations of every non-loop edge; the single one of a loop."""
        for e, _, _ in self.edges:
            d = self.canonical(e)
            yield d
            if not d.is_loop:
                yield d.reversed()

    def degree(self, v: Vertex) -> int:
        return sum((u == v) + (w == v) for _, u, w in self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * len(self.vertices)
        for t, h in self.canonical_edges:
            deg[t] += 1
            deg[h] += 1
        return tuple(deg)

    def neighbours(self, v: Vertex) -> list:
        out = []
        for _, a, b in self.edges:
            if a == v and b != v:
                out.append(b)
            elif b == v and a != v:
                out.append(a)
        return out

    @cached_property
    def components(self) -> tuple[tuple, ...]:
        """Connected components as vertex tuples, in first-vertex order."""
        adj = [[] for _ in self.vertices]
        for t, h in self.canonical_edges:
            if t != h:
                adj[t].append(h)
                adj[h].append(t)
        seen = [False] * len(self.vertices)
        comps = []
        for s in range(len(self.vertices)):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(tuple(self.vertices[i] for i in sorted(comp)))
        return tuple(comps)

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def require_connected(self) -> None:
        comps = self.components
        if len(comps) > 1:
            raise DisconnectedGraphError(comps[0], comps[1])

    @cached_property
    def bridges(self) -> frozenset:
        """Edge ids of non-loop edges whose removal disconnects their component."""
        adj = [[] for _ in self.vertices]
        for i, (t, h) in enumerate(self.canonical_edges):
            if t != h:
                adj[t].append((h, i))
                adj[h].append((t, i))
        n = len(self.vertices)
        disc = [-1] * n
        low = [0] * n
        found = set()
        clock = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            disc[root] = low[root] = clock
            clock += 1
            stack = [(root, -1, iter(adj[root]))]
            while stack:
                x, via, it = stack[-1]
                advanced = False
                for y, ei in it:
                    if ei == via:
                        continue
                    if disc[y] == -1:
                        disc[y] = low[y] = clock
                        clock += 1
                        stack.append((y, ei, iter(adj[y])))
                        advanced = True
                        break
                    low[x] = min(low[x], disc[y])
                if advanced:
                    continue
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[x])
                    if low[x] > disc[parent]:
                        found.add(self.edges[via][0])
        return frozenset(found)

    # -- derived graphs ----------------------------------------------------

    def edge_subgraph(self, edge_ids: Iterable[str], keep_vertices: bool = True) -> Multigraph:
        keep = set(edge_ids)
        edges = [x for x in self.edges if x[0] in keep]
        if keep_vertices:
            return Multigraph(self.vertices, edges)
        used = {u for _, u, _ in edges} | {v for _, _, v in edges}
        return Multigraph([v for v in self.vertices if v in used], edges)

    def without_loops(self) -> Multigraph:
        return Multigraph(self.vertices, [x for x in self.edges if x[1] != x[2]])

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(x) for x in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> Multigraph:
        try:
            vertices = data["vertices"]
            edges = [(e, u, v) for e, u, v in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        return cls(vertices, edges)

    @classmethod
    def load(cls, path: str | Path) -> Multigraph:
        return cls.from_json(json.loads(Path(path).read_text()))


def oriented_cut(g: Multigraph, side_a: Iterable[Vertex]) -> OrientedCut:
    """The cut (A, V \\ A) of ``g`` with crossing edges oriented A -> B."""
    a = frozenset(side_a)
    unknown = a - set(g.vertices)
    if unknown:
        raise GraphError(f"cut side mentions unknown vertices {sorted(map(str, unknown))}")
    b = frozenset(v for v in g.vertices if v not in a)
    crossing = []
    for e, u, v in g.edges:
        if u in a and v in b:
            crossing.append(DirectedEdge(e, u, v))
        elif v in a and u in b:
            crossing.append(DirectedEdge(e, v, u))
    return OrientedCut(a, b, tuple(crossing))


def _check_cut_size(g: Multigraph, max_vertices: int) -> None:
    if len(g.vertices) > max_vertices:
        raise GraphError(
            f"cut enumeration over {len(g.vertices)} vertices exceeds the guard of {max_vertices}"
        )


def _side_sets(g: Multigraph) -> Iterator[frozenset]:
    # Characteristic vectors with the first vertex fixed on side A, in
    # lexicographic order of (x_1, ..., x_{n-1}); the all-ones vector is A = V.
    first, rest = g.vertices[0], g.vertices[1:]
    for bits in itertools.product((0, 1), repeat=len(rest)):
        if rest and all(bits):
            continue
        if not rest:
            return
        yield frozenset([first] + [v for v, b in zip(rest, bits) if b])


def enumerate_cuts(g: Multigraph, max_vertices: int = DEFAULT_MAX_CUT_VERTICES) -> Iterator[OrientedCut]:
    """Every cut of a connected graph once, side A holding the first vertex."""
    g.require_connected()
    _check_cut_size(g, max_vertices)
    for a in _side_sets(g):
        yield oriented_cut(g, a)


def cut_masks(g: Multigraph, max_vertices: int = DEFAULT_MAX_CUT_VERTICES) -> tuple[int, ...]:
    """Crossing-edge bitmasks (bit i = edge i) of all bipartitions of ``g``.

    Works on disconnected graphs too; empty crossing sets are dropped.
    """
    _check_cut_size(g, max_vertices)
    n = len(g.vertices)
    if n < 2:
        return ()
    masks = []
    ends = g.canonical_edges
    for bits in range(1 << (n - 1)):
        side = (bits << 1) | 1  # vertex 0 always on side A
        if side == (1 << n) - 1:
            continue
        m = 0
        for i, (t, h) in enumerate(ends):
            if ((side >> t) & 1) != ((side >> h) & 1):
                m |= 1 << i
        if m:
            masks.append(m)
    return tuple(masks)


def edge_mask(g: Multigraph, edge_ids: Iterable[str]) -> int:
    idx = g.edge_index
    m = 0
    for e in edge_ids:
        try:
            m |= 1 << idx[e]
        except KeyError:
            raise GraphError(f"unknown edge id {e!r}") from None
    return m


def odd_vertices(g: Multigraph, f: Iterable[str]) -> list:
    """Vertices of odd degree in the spanning subgraph with edge set ``f``."""
    chosen = set(f)
    unknown = chosen - set(g.endpoints)
    if unknown:
        raise GraphError(f"unknown edge ids {sorted(unknown)}")
    parity = [0] * len(g.vertices)
    for i, (t, h) in enumerate(g.canonical_edges):
        if g.edges[i][0] in chosen and t != h:
            parity[t] ^= 1
            parity[h] ^= 1
    return [g.vertices[i] for i, p in enumerate(parity) if p]


def is_cycle_space_member(g: Multigraph, f: Iterable[str]) -> bool:
    """True iff ``f`` meets every cut of ``g`` evenly, i.e. all ``f``-degrees are even."""
    return not odd_vertices(g, f)


def edge_connectivity(g: Multigraph, max_vertices: int = DEFAULT_MAX_CUT_VERTICES) -> int:
    g.require_connected()
    if len(g.vertices) < 2:
        raise GraphError("edge connectivity needs at least two vertices")
    return min(len(c) for c in enumerate_cuts(g, max_vertices))


def is_bridgeless(g: Multigraph) -> bool:
    g.require_connected()
    return not g.bridges


def check_edge_dominating_degree3(g: Multigraph, u_set: Iterable[Vertex]) -> str | None:
    """Return why ``u_set`` is not a connected degree-3 edge dominating set, or None."""
    u = set(u_set)
    if not u:
        return "empty vertex set"
    if u - set(g.vertices):
        return "vertex set mentions unknown vertices"
    idx = g.vertex_index
    for v in u:
        if g.degrees[idx[v]] != 3:
            return f"vertex {v!r} does not have degree 3"
    for e, a, b in g.edges:
        if a not in u and b not in u:
            return f"edge {e!r} is not dominated"
    start = next(iter(u))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.neighbours(x):
            if y in u and y not in seen:
                seen.add(y)
                queue.append(y)
    if seen != u:
        return "vertex set does not induce a connected subgraph"
    return None


def edge_dominating_degree3_set(g: Multigraph, max_candidates: int = DEFAULT_MAX_CUT_VERTICES):
    """A connected edge dominating vertex set whose vertices all have degree 3.

    Subsets of the degree-3 vertices are tried from largest to smallest, in
    lexicographic order within a size, so a maximal set is returned.
    Returns None when no such set exists.
    """
    if g.loop_indices:
        raise GraphError("edge dominating sets are defined here for loop-free graphs only")
    cands = [v for v, d in zip(g.vertices, g.degrees) if d == 3]
    if len(cands) > max_candidates:
        raise GraphError(f"{len(cands)} degree-3 vertices exceed the search guard {max_candidates}")
    if not g.edges:
        return None
    for size in range(len(cands), 0, -1):
        for combo in itertools.combinations(cands, size):
            if check_edge_dominating_degree3(g, combo) is None:
                return frozenset(combo)
    return None
