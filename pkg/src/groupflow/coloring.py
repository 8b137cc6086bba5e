"""Semi-k-edge-colorings, their flows, and the cubic / regular gadget expansions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .contraction import CutFamily
from .flows import EdgeAssignment, FlowError, find_flow, verify_flow
from .graph import (
    DEFAULT_MAX_CUT_VERTICES,
    DirectedEdge,
    GraphError,
    Multigraph,
    OrientedCut,
    _check_cut_size,
    oriented_cut,
)
from .groups import FiniteAbelianGroup, alphabet_nonzero, cyclic, group_make, semi_coloring_alphabet


class ColoringError(ValueError):
    def __init__(self, message: str, cut: OrientedCut | None = None):
        self.cut = cut
        super().__init__(message)


@dataclass(frozen=True)
class EdgeColoring:
    k: int
    colors: Mapping[str, int]

    def __post_init__(self):
        if self.k < 1:
            raise ColoringError("k must be >= 1")
        colors = {str(e): int(c) for e, c in self.colors.items()}
        bad = [e for e, c in colors.items() if not 1 <= c <= self.k]
        if bad:
            raise ColoringError(f"edge {bad[0]!r} has a color outside 1..{self.k}")
        object.__setattr__(self, "colors", colors)

    def __getitem__(self, e: str) -> int:
        return self.colors[e]

    def to_json(self) -> dict:
        return {"k": self.k, "colors": dict(self.colors)}

    @classmethod
    def from_json(cls, data: Mapping) -> EdgeColoring:
        try:
            return cls(int(data["k"]), data["colors"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ColoringError(f"malformed coloring JSON: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> EdgeColoring:
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ColoringCheck:
    ok: bool
    violated_cut: OrientedCut | None = None

    def __bool__(self):
        return self.ok


def _require_total(g: Multigraph, c: EdgeColoring) -> None:
    for e, _, _ in g.edges:
        if e not in c.colors:
            raise ColoringError(f"coloring has no color on edge {e!r}")


def is_semi_coloring(g: Multigraph, c: EdgeColoring, max_vertices: int = DEFAULT_MAX_CUT_VERTICES) -> ColoringCheck:
    """Per-color crossing counts share one parity in every cut (all bipartitions)."""
    _require_total(g, c)
    _check_cut_size(g, max_vertices)
    n = len(g.vertices)
    if n < 2:
        return ColoringCheck(True)
    masks = [0] * (c.k + 1)
    for i, (e, _, _) in enumerate(g.edges):
        masks[c.colors[e]] |= 1 << i
    masks = masks[1:]
    ends = g.canonical_edges
    for bits in range(1 << (n - 1)):
        side = (bits << 1) | 1
        if side == (1 << n) - 1:
            continue
        cut = 0
        for i, (t, h) in enumerate(ends):
            if (side >> t ^ side >> h) & 1:
                cut |= 1 << i
        parities = {bin(cut & m).count("1") & 1 for m in masks}
        if len(parities) > 1:
            a = [g.vertices[j] for j in range(n) if side >> j & 1]
            return ColoringCheck(False, oriented_cut(g, a))
    return ColoringCheck(True)


def vertex_parities_agree(g: Multigraph, c: EdgeColoring) -> bool:
    """Every vertex meets all colors with the same parity (loops excluded)."""
    _require_total(g, c)
    par = [[0] * c.k for _ in g.vertices]
    for i, (t, h) in enumerate(g.canonical_edges):
        if t != h:
            col = c.colors[g.edges[i][0]] - 1
            par[t][col] ^= 1
            par[h][col] ^= 1
    return all(len(set(p)) == 1 for p in par)


def find_semi_coloring(g: Multigraph, k: int) -> EdgeColoring | None:
    """Lexicographically first semi-k-edge-coloring (edge input order, colors 1..k).

    Pruned on vertex parities: a vertex with r uncolored edges and parity
    vector p can still end with all parities equal to t only if the number
    of colors off t is at most r and has the parity of r.
    """
    if k < 1:
        raise ColoringError("k must be >= 1")
    ends = g.canonical_edges
    order = [i for i, (t, h) in enumerate(ends) if t != h]
    n = len(g.vertices)
    rem = [0] * n
    for i in order:
        t, h = ends[i]
        rem[t] += 1
        rem[h] += 1
    par = [0] * n  # bitmask of odd colors
    colors = [1] * len(g.edges)

    def feasible(v: int) -> bool:
        off = bin(par[v]).count("1")
        r = rem[v]
        return any(d <= r and (r - d) % 2 == 0 for d in (off, k - off))

    for v in range(n):
        if not feasible(v):
            return None

    def rec(pos: int) -> bool:
        if pos == len(order):
            return True
        i = order[pos]
        t, h = ends[i]
        rem[t] -= 1
        rem[h] -= 1
        for col in range(k):
            bit = 1 << col
            par[t] ^= bit
            par[h] ^= bit
            if feasible(t) and feasible(h):
                colors[i] = col + 1
                if rec(pos + 1):
                    return True
            par[t] ^= bit
            par[h] ^= bit
        rem[t] += 1
        rem[h] += 1
        return False

    if not rec(0):
        return None
    return EdgeColoring(k, {e: colors[i] for i, (e, _, _) in enumerate(g.edges)})


# -- colorings and flows over the (k-1)-fold sum of Z2 ---------------------------------


def coloring_to_flow(g: Multigraph, c: EdgeColoring) -> EdgeAssignment:
    """Color i < k goes to the basis vector e_i, color k to e_1 + ... + e_{k-1}."""
    check = is_semi_coloring(g, c)
    if not check:
        raise ColoringError("not a semi-coloring: per-color counts differ in parity on a cut", check.violated_cut)
    alpha = semi_coloring_alphabet(c.k)
    images = _color_images(c.k)
    return EdgeAssignment(alpha.group, {e: images[c.colors[e]] for e, _, _ in g.edges})


def _color_images(k: int) -> dict:
    group = semi_coloring_alphabet(k).group
    images = {i + 1: group.element(tuple(int(i == j) for j in range(k - 1))) for i in range(k - 1)}
    images[k] = group.element((1,) * (k - 1))
    return images


def flow_to_coloring(g: Multigraph, f: EdgeAssignment, k: int) -> EdgeColoring:
    """Inverse of coloring_to_flow; for k = 2 both colors share one image and color 1 is used."""
    alpha = semi_coloring_alphabet(k)
    if f.group != alpha.group:
        raise ColoringError(f"expected an assignment over {alpha.group.label}")
    check = verify_flow(g, f, alpha)
    if not check:
        if check.bad_edge is not None:
            raise ColoringError(f"edge {check.bad_edge!r} carries a value outside the coloring alphabet")
        raise ColoringError("not a flow: nonzero sum on a cut", check.violated_cut)
    back = {}
    for col, x in sorted(_color_images(k).items()):
        back.setdefault(x, col)
    return EdgeColoring(k, {e: back[f.values[e]] for e, _, _ in g.edges})


def semi3_iff_z4(g: Multigraph, group: FiniteAbelianGroup | None = None, strict: bool = True) -> tuple[bool, bool]:
    """(semi-3-edge-colorable, non-elusive flow over ``group`` exists); group defaults to Z2xZ2."""
    from .flows import EquivalenceError

    group = group or group_make([2, 2], "Z2xZ2")
    if group.order != 4:
        raise FlowError("the semi-3-coloring equivalence is about groups of order 4")
    pair = (find_semi_coloring(g, 3) is not None, find_flow(g, alphabet_nonzero(group)) is not None)
    if strict and pair[0] != pair[1]:
        raise EquivalenceError(f"semi-3-coloring / {group.label}-flow existence disagree: {pair}")
    return pair


# -- gadget expansions ----------------------------------------------------------------------


@dataclass
class _Builder:
    """Mutable multigraph with directed edges (value on tail -> head)."""

    order: list = field(default_factory=list)
    owner: dict = field(default_factory=dict)  # new vertex -> original vertex
    ends: dict = field(default_factory=dict)  # edge -> [tail, head]
    value: dict = field(default_factory=dict)
    gadget: list = field(default_factory=list)

    def add_vertex(self, v, origin):
        self.order.append(v)
        self.owner[v] = origin

    def add_edge(self, e, tail, head, x=None, gadget=True):
        if e in self.ends:
            raise GraphError(f"generated edge id {e!r} collides with an existing edge")
        self.ends[e] = [tail, head]
        self.value[e] = x
        if gadget:
            self.gadget.append(e)

    def half_edges(self, v) -> list[tuple[str, int]]:
        out = []
        for e, (t, h) in self.ends.items():
            if t == v:
                out.append((e, 0))
            if h == v:
                out.append((e, 1))
        return out

    def graph(self, keep) -> Multigraph:
        order = [v for v in self.order if v in keep]
        return Multigraph(order, [(e, t, h) for e, (t, h) in self.ends.items()])


def _class_cuts(h: Multigraph, owner: Mapping, g: Multigraph) -> CutFamily:
    cuts = []
    for v in g.vertices[:-1]:
        cuts.append(oriented_cut(h, [w for w in h.vertices if owner[w] == v]))
    return CutFamily(h, tuple(cuts))


@dataclass(frozen=True)
class Expansion:
    """Expanded graph, the cut family contracting it back, and its witness data.

    ``owner`` sends every new vertex to the original vertex whose class it
    belongs to; ``gadget_edges`` are the added edges (loops after contraction).
    """

    graph: Multigraph
    cuts: CutFamily
    owner: Mapping
    gadget_edges: frozenset
    flow: EdgeAssignment | None = None
    coloring: EdgeColoring | None = None


def _out(b: _Builder, half) -> object:
    e, end = half
    x = b.value[e]
    return x if end == 0 else -x


def _move(b: _Builder, half, target) -> None:
    e, end = half
    b.ends[e][end] = target


def expand_to_cubic(g: Multigraph, f: EdgeAssignment, k: int) -> Expansion:
    """A cubic graph with a non-elusive Z_k-flow that contracts onto ``g``.

    Vertices of degree >= 4 shed pairs of incident edges: a pair whose
    outgoing values cancel moves to a new degree-2 vertex, any other pair
    moves to a new vertex joined back by one edge (a claw). Each remaining
    degree-2 vertex is then replaced by K_{3,3} minus one edge, and an
    isolated vertex by a whole K_{3,3}.
    """
    if k < 3 or k % 2 == 0:
        raise FlowError("expand_to_cubic needs an odd k >= 3")
    zk = cyclic(k)
    if f.group != zk:
        raise FlowError(f"expected a {zk.label} assignment")
    check = verify_flow(g, f, alphabet_nonzero(zk))
    if not check:
        raise FlowError("input is not a non-elusive flow" + (f" (edge {check.bad_edge!r})" if check.bad_edge else ""))

    b = _Builder()
    for v in g.vertices:
        b.add_vertex(v, v)
    for e, _, _ in g.edges:
        d = g.canonical(e)
        b.add_edge(e, d.tail, d.head, f.values[e], gadget=False)
    alive = set(g.vertices)
    pieces: dict = {v: [] for v in g.vertices}

    def new_vertex(v, tag):
        name = f"{v}/{tag}{len(pieces[v])}"
        pieces[v].append(name)
        b.add_vertex(name, v)
        alive.add(name)
        return name

    zero = zk.zero
    for v in g.vertices:
        while True:
            halves = b.half_edges(v)
            if len(halves) < 4:
                break
            pair = next(
                ((h1, h2) for i, h1 in enumerate(halves) for h2 in halves[i + 1:] if _out(b, h1) + _out(b, h2) == zero),
                None,
            )
            if pair is not None:
                w = new_vertex(v, "split")
                _move(b, pair[0], w)
                _move(b, pair[1], w)
                continue
            h1, h2 = halves[0], halves[1]
            w = new_vertex(v, "claw")
            y = -(_out(b, h1) + _out(b, h2))
            _move(b, h1, w)
            _move(b, h2, w)
            b.add_edge(f"{w}:stem", w, v, y)

    for v in g.vertices:
        for w in [v] + list(pieces[v]):
            halves = b.half_edges(w)
            if len(halves) == 3:
                continue
            if len(halves) == 2:
                _k33_splice(b, w, v, halves, zk, new_vertex)
            elif len(halves) == 0:
                _k33_splice(b, w, v, [], zk, new_vertex)
            else:
                raise FlowError(f"vertex {w!r} has degree {len(halves)}; a nowhere-zero flow rules this out")
            alive.discard(w)

    h = b.graph(alive)
    flow = EdgeAssignment.from_directed(h, zk, {DirectedEdge(e, t, hd): b.value[e] for e, (t, hd) in b.ends.items()})
    owner = {w: b.owner[w] for w in h.vertices}
    return Expansion(h, _class_cuts(h, owner, g), owner, frozenset(b.gadget), flow=flow)


def _k33_splice(b: _Builder, w, v, halves, zk, new_vertex) -> None:
    """Replace ``w`` by K_{3,3} minus p0q0; the first half-edge lands on q0, the second on p0."""
    zero = zk.zero
    if halves:
        y = -_out(b, halves[0])
    else:
        y = zk.element(1)
    a = next(x for x in zk.elements if x != zero and x != -y)
    vals = (y, a, -(y + a))
    ps = [new_vertex(v, "p") for _ in range(3)]
    qs = [new_vertex(v, "q") for _ in range(3)]
    for i in range(3):
        for j in range(3):
            if halves and i == 0 and j == 0:
                continue
            b.add_edge(f"{ps[0]}:p{i}q{j}", ps[i], qs[j], vals[(i + j) % 3])
    if halves:
        _move(b, halves[0], qs[0])
        _move(b, halves[1], ps[0])


def round_robin(k: int) -> list[tuple[int, int, int]]:
    """Proper k-edge-coloring of K_{k+1} (k odd) by the circle method: (u, v, color)."""
    if k % 2 == 0:
        raise ColoringError("round-robin coloring of K_{k+1} needs k odd")
    out = []
    for r in range(k):
        out.append((k, r, r + 1))
        for i in range(1, (k - 1) // 2 + 1):
            out.append(((r - i) % k, (r + i) % k, r + 1))
    return out


def expand_to_regular(g: Multigraph, c: EdgeColoring) -> Expansion:
    """A k-regular properly k-edge-colored graph that contracts onto ``g``.

    A vertex whose color counts are odd keeps its first incident edge of
    each color. The remaining incident edges come in same-colored pairs (in
    edge order); each pair is spliced through K_{k+1} minus the edge of its
    color at vertex k. An isolated vertex becomes a whole K_{k+1}.
    """
    k = c.k
    if k % 2 == 0:
        raise ColoringError("expand_to_regular needs an odd k")
    _require_total(g, c)
    check = is_semi_coloring(g, c)
    if not check:
        raise ColoringError("not a semi-coloring: per-color counts differ in parity on a cut", check.violated_cut)

    rr = round_robin(k)
    b = _Builder()
    color = dict(c.colors)
    for v in g.vertices:
        b.add_vertex(v, v)
    for e, _, _ in g.edges:
        d = g.canonical(e)
        b.add_edge(e, d.tail, d.head, gadget=False)
    alive = set(g.vertices)
    count: dict = {v: 0 for v in g.vertices}

    def gadget(v, skip_color):
        j = count[v]
        count[v] += 1
        names = [f"{v}/K{j}.{i}" for i in range(k + 1)]
        for name in names:
            b.add_vertex(name, v)
            alive.add(name)
        for u, w, col in rr:
            if skip_color is not None and u == k and col == skip_color:
                continue
            e = f"{v}/K{j}:{u}-{w}"
            b.add_edge(e, names[u], names[w])
            color[e] = col
        return names

    for v in g.vertices:
        halves = b.half_edges(v)
        if not halves:
            gadget(v, None)
            alive.discard(v)
            continue
        kept = {}
        for half in halves:
            kept.setdefault(color[half[0]], half)
        by_color: dict = {}
        odd = len(kept) == k and all(
            sum(1 for x in halves if color[x[0]] == col) % 2 == 1 for col in range(1, k + 1)
        )
        for half in halves:
            if odd and kept.get(color[half[0]]) == half:
                continue
            by_color.setdefault(color[half[0]], []).append(half)
        for col in sorted(by_color):
            group = by_color[col]
            if len(group) % 2:
                raise ColoringError(f"vertex {v!r} meets color {col} an odd number of times after pairing")
            for x in range(0, len(group), 2):
                names = gadget(v, col)
                _move(b, group[x], names[k])
                _move(b, group[x + 1], names[col - 1])
        if not odd:
            alive.discard(v)

    h = b.graph(alive)
    owner = {w: b.owner[w] for w in h.vertices}
    return Expansion(
        h, _class_cuts(h, owner, g), owner, frozenset(b.gadget), coloring=EdgeColoring(k, color)
    )


def is_proper_regular_coloring(h: Multigraph, c: EdgeColoring) -> bool:
    """Every vertex has exactly one edge of each of the k colors (so no loops)."""
    if h.loop_indices:
        return False
    seen = {v: [] for v in h.vertices}
    for e, u, v in h.edges:
        seen[u].append(c.colors[e])
        seen[v].append(c.colors[e])
    return all(sorted(cols) == list(range(1, c.k + 1)) for cols in seen.values())


def contraction_mismatch(ex: Expansion, g: Multigraph) -> str | None:
    """Why contracting ``ex.graph`` along ``ex.cuts`` fails to give back ``g``, or None.

    Words are renamed to original vertices through ``ex.owner``; gadget edges
    must all become loops and are then dropped.
    """
    from .contraction import contract

    q, cmap = contract(ex.graph, ex.cuts)
    rename = {}
    for w in ex.graph.vertices:
        word, v = cmap(w), ex.owner[w]
        if rename.setdefault(word, v) != v:
            return f"word {word!r} mixes the classes of {rename[word]!r} and {v!r}"
    if len(set(rename.values())) != len(rename):
        return "two words share an original vertex"
    if set(rename.values()) != set(g.vertices):
        return "the classes do not cover the original vertices"
    got = {}
    for e, a, b in q.quotient.edges:
        if e in ex.gadget_edges:
            if a != b:
                return f"gadget edge {e!r} crosses between classes"
            continue
        got[e] = sorted((rename[a], rename[b]), key=repr)
    want = {e: sorted((u, v), key=repr) for e, u, v in g.edges}
    if got != want:
        diff = next((e for e in sorted(set(got) | set(want)) if got.get(e) != want.get(e)), None)
        return f"edge {diff!r} does not map back onto the input"
    return None
