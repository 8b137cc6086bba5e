"""Quotients by finite cut families, the vertex map phi, and exhaustion quotients."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .flows import EdgeAssignment
from .graph import (
    GraphError,
    Multigraph,
    OrientedCut,
    enumerate_cuts,
    oriented_cut,
)
from .presentation import PeriodicPresentation, PresentationError, cell_order


class ContractionError(GraphError):
    pass


@dataclass(frozen=True)
class CutFamily:
    """Cuts C_1..C_t of ``host``.

    Finite hosts take OrientedCut values (or plain A-side vertex sets).
    Presentations take specs: ``{"side": [...]}`` for a finite side A,
    ``{"prefix": i}`` for prefix plus all cells below i, and
    ``{"tail": dummy, "depth": n}`` for one tail component of G minus S_n.
    """

    host: object
    cuts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))

    def __len__(self):
        return len(self.cuts)


@dataclass(frozen=True)
class ContractionMap:
    """Host vertex -> quotient vertex; edges keep their ids.

    ``dropped`` lists host edges with no quotient counterpart (deleted loops).
    """

    vertex_map: Mapping
    dropped: frozenset = frozenset()
    # Vertex classes of a presentation window that stand for whole tail components.
    tails: Mapping = field(default_factory=dict)

    def __call__(self, v):
        return self.vertex_map[v]

    def preimage(self, w) -> tuple:
        return tuple(v for v, x in self.vertex_map.items() if x == w)

    def blocks(self) -> dict:
        out: dict = {}
        for v, w in self.vertex_map.items():
            out.setdefault(w, []).append(v)
        return out

    def to_json(self) -> dict:
        return {
            "vertex_map": [[v, w] for v, w in self.vertex_map.items()],
            "dropped": sorted(self.dropped),
            "tails": {k: v for k, v in self.tails.items()},
        }


@dataclass(frozen=True)
class ContractedGraph:
    quotient: Multigraph
    loops: frozenset = frozenset()
    loops_omitted: bool = False

    @property
    def words(self) -> tuple:
        return self.quotient.vertices


def _bits(sides: Sequence[frozenset], v) -> str:
    return "".join("0" if v in a else "1" for a in sides)


def _validated_side(host: Multigraph, cut) -> frozenset:
    if isinstance(cut, OrientedCut):
        verts = set(host.vertices)
        if cut.side_a & cut.side_b or (cut.side_a | cut.side_b) != verts:
            raise ContractionError("not a cut: sides do not partition the vertex set")
        side = cut.side_a
        expected = set()
        for e, u, v in host.edges:
            if u in side and v not in side:
                expected.add((e, u, v))
            elif v in side and u not in side:
                expected.add((e, v, u))
        given = {(d.edge, d.tail, d.head) for d in cut.crossing}
        if given != expected or len(given) != len(cut.crossing):
            raise ContractionError("not a cut: crossing edges differ from the A-B edges")
        return cut.side_a
    side = frozenset(cut)
    if side - set(host.vertices):
        raise ContractionError("not a cut: side mentions unknown vertices")
    return side


def contract_sides(host: Multigraph, sides: Sequence[frozenset]) -> tuple[ContractedGraph, ContractionMap]:
    """G_M for the cuts (A_i, V \\ A_i); word bit i is 0 on side A_i."""
    vmap = {}
    order = []
    seen = set()
    for v in host.vertices:
        w = _bits(sides, v)
        vmap[v] = w
        if w not in seen:
            seen.add(w)
            order.append(w)
    edges = []
    loops = []
    for e, u, v in host.edges:
        a, b = vmap[u], vmap[v]
        edges.append((e, a, b))
        if a == b:
            loops.append(e)
    return ContractedGraph(Multigraph(order, edges), frozenset(loops)), ContractionMap(vmap)


def contract(host, m: CutFamily | Iterable) -> tuple[ContractedGraph, ContractionMap]:
    """Contract ``host`` with respect to a finite cut family.

    Quotient vertices are the realized words, listed by first appearance
    along the host vertex order. Finite hosts keep every edge (loops flagged);
    presentations keep only the finitely many non-loop edges.
    """
    cuts = m.cuts if isinstance(m, CutFamily) else tuple(m)
    if isinstance(host, PeriodicPresentation):
        return _contract_presentation(host, cuts)
    if not isinstance(host, Multigraph):
        raise ContractionError(f"unsupported host {type(host).__name__}")
    sides = [_validated_side(host, c) for c in cuts]
    if not host.vertices:
        raise ContractionError("cannot contract an empty graph")
    return contract_sides(host, sides)


def push_flow(f: EdgeAssignment, host: Multigraph, cmap: ContractionMap, quotient: Multigraph) -> EdgeAssignment:
    """The same directed values read in the quotient's canonical orientations."""
    out = {}
    for e, u, v in host.edges:
        if e not in quotient.endpoints:
            continue
        x = f.values[e]
        d = host.canonical(e)
        a, b = cmap(d.tail), cmap(d.head)
        q = quotient.canonical(e)
        out[e] = x if q.is_loop or (q.tail, q.head) == (a, b) else -x
    return EdgeAssignment(f.group, out)


# -- cut sandwich ----------------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    ok: bool
    forward_ok: bool
    backward_ok: bool
    offending: object = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_cut_sandwich(host, m: CutFamily | Iterable, q: ContractedGraph, cmap: ContractionMap) -> SandwichReport:
    """M is contained in the cuts of G_M, which pull back to finite cuts of the host.

    Checks that every surviving host edge joins the words of its ends, that
    each cut of M is a union of word blocks with the same crossing edges in
    the quotient, and that every cut of the quotient pulls back to a host cut
    with the same crossing edges. Crossing sets are compared as bitmasks over
    host edge positions: the crossing set of a side is the XOR of the
    incidence masks of its vertices. For presentations the check runs on the
    exhaustion window the contraction was computed from.
    """
    cuts = m.cuts if isinstance(m, CutFamily) else tuple(m)
    if isinstance(host, PeriodicPresentation):
        base, sides = _presentation_sides(host, cuts)
    else:
        base = host
        sides = [_validated_side(host, c) for c in cuts]
    quotient = q.quotient
    qidx = quotient.vertex_index
    hidx = base.vertex_index
    word = [qidx[cmap(v)] for v in base.vertices]
    q_ends = quotient.endpoints
    inc_h = [0] * len(base.vertices)
    inc_q = [0] * len(quotient.vertices)
    for pos, (e, u, v) in enumerate(base.edges):
        a, b = hidx[u], hidx[v]
        if e in q_ends:
            x, y = q_ends[e]
            if {qidx[x], qidx[y]} != {word[a], word[b]}:
                return SandwichReport(False, False, False, e, f"edge {e!r} does not join the words of its ends")
        elif word[a] != word[b]:
            return SandwichReport(False, False, False, e, f"edge {e!r} is missing from the quotient")
        if a == b:
            continue
        bit = 1 << pos
        inc_h[a] ^= bit
        inc_h[b] ^= bit
        if e in q_ends:
            x, y = qidx[q_ends[e][0]], qidx[q_ends[e][1]]
            if x != y:
                inc_q[x] ^= bit
                inc_q[y] ^= bit
    for side in sides:
        words = {word[hidx[v]] for v in side}
        if any(word[i] in words for i, v in enumerate(base.vertices) if v not in side):
            return SandwichReport(False, False, True, side, "cut sides share a word")
        h_mask = q_mask = 0
        for v in side:
            h_mask ^= inc_h[hidx[v]]
        for w in words:
            q_mask ^= inc_q[w]
        if h_mask != q_mask:
            return SandwichReport(False, False, True, side, "cut of M is not a cut of the quotient")
    k = len(quotient.vertices)
    if k > 1:
        blocks = [[] for _ in range(k)]
        for i, w in enumerate(word):
            blocks[w].append(i)
        for bits in range(1, 1 << (k - 1)):
            chosen = [0] + [w for w in range(1, k) if bits >> (w - 1) & 1]
            q_mask = h_mask = 0
            for w in chosen:
                q_mask ^= inc_q[w]
                for i in blocks[w]:
                    h_mask ^= inc_h[i]
            if h_mask != q_mask:
                side = [quotient.vertices[w] for w in chosen]
                return SandwichReport(False, True, False, side, "quotient cut does not pull back")
    return SandwichReport(True, True, True)


# -- exhaustion quotients ------------------------------------------------------------


def exhaustion_quotient(host, n: int) -> tuple[ContractedGraph, ContractionMap]:
    """G_n: keep S_n, contract each component of the rest to a dummy vertex.

    Loops are deleted and multiple edges kept. For a finite host S_n is the
    first n + 1 vertices; for a presentation it is the prefix plus the first
    n + 1 cells.
    """
    if n < 0:
        raise ContractionError("depth must be >= 0")
    if isinstance(host, PeriodicPresentation):
        return _presentation_quotient(host, n)
    keep = list(host.vertices[: n + 1])
    kept = set(keep)
    rest = host.edge_subgraph([e for e, u, v in host.edges if u not in kept and v not in kept])
    vmap = {v: v for v in keep}
    dummies = []
    for comp in rest.components:
        outside = [v for v in comp if v not in kept]
        if not outside:
            continue
        name = f"dummy:{len(dummies)}"
        dummies.append(name)
        for v in outside:
            vmap[v] = name
    return _quotient_from_map(host, keep + dummies, vmap)


def _quotient_from_map(host: Multigraph, order, vmap, tails=None):
    edges = []
    dropped = []
    for e, u, v in host.edges:
        a, b = vmap[u], vmap[v]
        if a == b:
            dropped.append(e)
        else:
            edges.append((e, a, b))
    q = ContractedGraph(Multigraph(order, edges), frozenset(), loops_omitted=bool(dropped))
    return q, ContractionMap(vmap, frozenset(dropped), tails or {})


def _presentation_quotient(p: PeriodicPresentation, n: int):
    window = p.materialize(n)
    g = window.graph
    vmap = {v: v for v in g.vertices}
    order = list(g.vertices)
    edges = [x for x in g.edges if x[1] != x[2]]
    dropped = [x[0] for x in g.edges if x[1] == x[2]]
    tails = {}
    for side in ("R", "L"):
        ports = [pt for pt in window.ports if pt.side == side]
        if not ports:
            continue
        local = [pt.outside.rsplit("@", 1)[0] for pt in ports]
        boundary = list(dict.fromkeys(local))
        classes = p.tail_partition(boundary, side)
        # Dummies in order of their first port.
        rank = {}
        for name in local:
            for k, cls in enumerate(classes):
                if name in cls and k not in rank:
                    rank[k] = len(rank)
        cell = window.hi + 1 if side == "R" else window.lo - 1
        for k, cls in enumerate(classes):
            dummy = f"dummy:{side}{rank[k]}"
            tails[dummy] = {"side": side, "cell": cell, "touches": sorted(f"{x}@{cell}" for x in cls)}
        by_name = {x: f"dummy:{side}{rank[k]}" for k, cls in enumerate(classes) for x in cls}
        order.extend(sorted(set(by_name.values()), key=lambda d: int(d[len("dummy:") + 1:])))
        for pt, name in zip(ports, local):
            edges.append((pt.edge, pt.inside, by_name[name]))
    q = ContractedGraph(Multigraph(order, edges), frozenset(), loops_omitted=bool(dropped))
    return q, ContractionMap(vmap, frozenset(dropped), tails)


# -- contraction of presentations ------------------------------------------------------


def _parse_vertex(p: PeriodicPresentation, v: str) -> int | None:
    """Cell index of a host vertex name (None for prefix vertices)."""
    if v in p.prefix.vertices:
        return None
    name, sep, idx = str(v).rpartition("@")
    try:
        i = int(idx)
    except ValueError:
        i = None
    if not sep or i is None or name not in p.cell.vertices or (i < 0 and not p.two_way):
        raise ContractionError(f"not a vertex of the presentation: {v!r}")
    return i


def _depth_for_cells(p: PeriodicPresentation, needed: Iterable[int]) -> int:
    needed = set(needed)
    if not needed or p.is_finite:
        return 0
    depth = 0
    for depth, i in enumerate(cell_order(p.two_way)):
        needed.discard(i)
        if not needed:
            return depth
    raise AssertionError("unreachable")


def _normalize_spec(spec):
    if isinstance(spec, Mapping):
        return dict(spec)
    if isinstance(spec, (list, tuple, set, frozenset)):
        return {"side": list(spec)}
    raise ContractionError(f"malformed cut spec {spec!r}")


def _presentation_sides(p: PeriodicPresentation, cuts) -> tuple[Multigraph, list[frozenset]]:
    """The exhaustion window G_N covering the family, and each cut's A side in it."""
    specs = [_normalize_spec(c) for c in cuts]
    cells = []
    depth = 0
    for spec in specs:
        if "side" in spec:
            for v in spec["side"]:
                i = _parse_vertex(p, v)
                if i is not None:
                    cells.append(i)
        elif "prefix" in spec:
            i = int(spec["prefix"])
            if not p.two_way:
                i = max(i, 0)
            if not p.is_finite:
                cells.extend(c for c in (i - 1, i) if p.two_way or c >= 0)
        elif "tail" in spec:
            depth = max(depth, int(spec["depth"]))
        else:
            raise ContractionError(f"malformed cut spec {spec!r}")
    depth = max(depth, _depth_for_cells(p, cells))
    q, cmap = _presentation_quotient(p, depth)
    g = q.quotient
    lo_hi = p.window_cells(depth)
    lo, hi = (min(lo_hi), max(lo_hi)) if lo_hi else (0, -1)
    sides = []
    for spec in specs:
        if "side" in spec:
            side = frozenset(str(v) for v in spec["side"])
            if not side:
                raise ContractionError("not a cut: empty side")
        elif "prefix" in spec:
            i = int(spec["prefix"])
            side = set(p.prefix.vertices)
            for v in g.vertices:
                if v in cmap.tails:
                    if cmap.tails[v]["side"] == "L" and lo <= i:
                        side.add(v)
                elif v not in p.prefix.vertices and _parse_vertex(p, v) < i:
                    side.add(v)
            side = frozenset(side)
        else:
            side = _tail_side(p, g, cmap, spec, depth)
        if side == frozenset(g.vertices):
            raise ContractionError("not a cut: side A is everything")
        sides.append(side)
    return g, sides


def _tail_side(p, g: Multigraph, cmap: ContractionMap, spec, depth: int) -> frozenset:
    n = int(spec["depth"])
    q_n, map_n = _presentation_quotient(p, n)
    dummy = spec["tail"]
    if dummy not in map_n.tails:
        raise ContractionError(f"no tail component {dummy!r} at depth {n}")
    inner = set(p.materialize(n).graph.vertices)
    # Port edges of the dummy at depth n lead into its component.
    starts = set()
    for e, u, v in q_n.quotient.edges:
        if dummy in (u, v):
            a, b = g.endpoints[e]
            starts.update(x for x in (a, b) if x not in inner)
    seen = set(starts)
    queue = deque(starts)
    while queue:
        x = queue.popleft()
        for y in g.neighbours(x):
            if y not in inner and y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def _contract_presentation(p: PeriodicPresentation, cuts):
    g, sides = _presentation_sides(p, cuts)
    q, cmap = contract_sides(g, sides)
    quotient = q.quotient
    keep = [x for x in quotient.edges if x[1] != x[2]]
    trimmed = Multigraph(quotient.vertices, keep)
    return ContractedGraph(trimmed, frozenset(), loops_omitted=True), cmap


def load_cut_family(host, path_or_data) -> CutFamily:
    """Cuts JSON: a list of A-side vertex lists or spec objects."""
    data = path_or_data
    if not isinstance(data, (list, dict)):
        with open(path_or_data) as fh:
            data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("cuts", [])
    if isinstance(host, Multigraph):
        idx = {str(v): v for v in host.vertices}
        cuts = []
        for c in data:
            side = c["side"] if isinstance(c, dict) else c
            try:
                cuts.append(oriented_cut(host, [idx[str(v)] for v in side]))
            except KeyError as exc:
                raise ContractionError(f"not a cut: unknown vertex {exc}") from None
        return CutFamily(host, tuple(cuts))
    return CutFamily(host, tuple(_normalize_spec(c) for c in data))


def pretty_word(word: str) -> str:
    """Readable form of a word: A for bit 0, B for bit 1."""
    return word.translate(str.maketrans("01", "AB"))


__all__ = [
    "ContractedGraph",
    "ContractionError",
    "ContractionMap",
    "CutFamily",
    "PresentationError",
    "SandwichReport",
    "contract",
    "contract_sides",
    "exhaustion_quotient",
    "load_cut_family",
    "push_flow",
    "verify_cut_sandwich",
]
