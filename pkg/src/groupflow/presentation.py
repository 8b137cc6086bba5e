"""Finitely presented periodic infinite graphs and their finite windows.

A presentation is a prefix fragment followed by copies of one repeating cell,
cell ``i`` glued to cell ``i + 1``. Cell vertex ``x`` in copy ``i`` is named
``"x@i"`` and cell edge ``e`` becomes ``"e@i"``; a glue edge named ``g``
between copies ``i`` and ``i + 1`` is ``"g@i"``. Two-way presentations extend
to negative indices. Windows grow in the exhaustion order 0, 1, -1, 2, -2, ...
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Mapping

from .graph import GraphError, Multigraph


class PresentationError(GraphError):
    pass


@dataclass(frozen=True)
class Fragment:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]

    @classmethod
    def from_json(cls, data: Mapping | None) -> Fragment:
        if not data:
            return cls((), ())
        try:
            g = Multigraph.from_json({"vertices": data.get("vertices", []), "edges": data.get("edges", [])})
        except GraphError as exc:
            raise PresentationError(f"malformed fragment: {exc}") from None
        return cls(tuple(str(v) for v in g.vertices), tuple((e, str(u), str(v)) for e, u, v in g.edges))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(x) for x in self.edges]}


@dataclass(frozen=True)
class Glue:
    """Edge ``name`` joining ``source`` (cell or prefix vertex) to ``target``.

    ``from_prefix`` glue joins a prefix vertex to ``target`` in cell 0;
    otherwise it joins ``source`` in cell i to ``target`` in cell i + 1.
    """

    source: str
    target: str
    name: str
    from_prefix: bool


@dataclass(frozen=True)
class Port:
    """A glue edge leaving a window: ``inside`` is in the window, ``outside`` is not."""

    edge: str
    inside: str
    outside: str
    side: str  # "L" or "R"


@dataclass(frozen=True)
class Window:
    graph: Multigraph
    ports: tuple[Port, ...]
    cells: tuple[int, ...]

    @property
    def lo(self) -> int:
        return min(self.cells) if self.cells else 0

    @property
    def hi(self) -> int:
        return max(self.cells) if self.cells else -1


def cell_order(two_way: bool):
    """0, 1, 2, ... or 0, 1, -1, 2, -2, ..."""
    i = 0
    while True:
        yield i
        if two_way:
            i = -i + 1 if i <= 0 else -i
        else:
            i += 1


def vname(v: str, i: int) -> str:
    return f"{v}@{i}"


@dataclass(frozen=True)
class PeriodicPresentation:
    prefix: Fragment
    cell: Fragment
    glue: tuple[Glue, ...]
    two_way: bool = False

    def __post_init__(self):
        pre = set(self.prefix.vertices)
        cell = set(self.cell.vertices)
        names = set()
        for gl in self.glue:
            if gl.from_prefix and gl.source not in pre:
                raise PresentationError(f"glue {gl.name!r}: unknown prefix vertex {gl.source!r}")
            if not gl.from_prefix and gl.source not in cell:
                raise PresentationError(f"glue {gl.name!r}: unknown cell vertex {gl.source!r}")
            if gl.target not in cell:
                raise PresentationError(f"glue {gl.name!r}: unknown cell vertex {gl.target!r}")
            if gl.name in names:
                raise PresentationError(f"duplicate glue name {gl.name!r}")
            names.add(gl.name)
        if not self.cell.vertices and any(not gl.from_prefix for gl in self.glue):
            raise PresentationError("glue between cells needs a nonempty cell")

    @property
    def is_finite(self) -> bool:
        return not self.cell.vertices

    @cached_property
    def cell_glue(self) -> tuple[Glue, ...]:
        return tuple(gl for gl in self.glue if not gl.from_prefix)

    @cached_property
    def prefix_glue(self) -> tuple[Glue, ...]:
        return tuple(gl for gl in self.glue if gl.from_prefix)

    @cached_property
    def max_degree(self) -> int:
        """Local finiteness bound: no materialized vertex exceeds this degree."""
        deg: dict = {}

        def bump(key, k=1):
            deg[key] = deg.get(key, 0) + k

        for _, u, v in self.prefix.edges:
            bump(("p", u))
            bump(("p", v))
        for _, u, v in self.cell.edges:
            bump(("c", u))
            bump(("c", v))
        for gl in self.glue:
            bump(("p" if gl.from_prefix else "c", gl.source))
            bump(("c", gl.target))
        return max(deg.values(), default=0)

    # -- windows ------------------------------------------------------------

    def window_cells(self, n: int) -> tuple[int, ...]:
        if n < 0:
            raise PresentationError("depth must be >= 0")
        if self.is_finite:
            return ()
        gen = cell_order(self.two_way)
        return tuple(next(gen) for _ in range(n + 1))

    def materialize(self, n: int) -> Window:
        """Prefix plus the first ``n + 1`` cells in exhaustion order, with ports.

        Vertices and edges are listed in the order they appear as the window
        grows, so the depth-n window is an ordered prefix of depth n + 1.
        """
        cells = self.window_cells(n)
        present: set[int] = set()
        vertices = list(self.prefix.vertices)
        edges = [tuple(x) for x in self.prefix.edges]
        for i in cells:
            present.add(i)
            vertices.extend(vname(v, i) for v in self.cell.vertices)
            edges.extend((vname(e, i), vname(u, i), vname(v, i)) for e, u, v in self.cell.edges)
            if i == 0:
                edges.extend((gl.name, gl.source, vname(gl.target, 0)) for gl in self.prefix_glue)
            if i - 1 in present:
                edges.extend(self._glue_edges(i - 1))
            if i + 1 in present:
                edges.extend(self._glue_edges(i))
        ports = []
        if cells:
            lo, hi = min(cells), max(cells)
            for gl in self.cell_glue:
                ports.append(Port(vname(gl.name, hi), vname(gl.source, hi), vname(gl.target, hi + 1), "R"))
            if self.two_way:
                for gl in self.cell_glue:
                    ports.append(Port(vname(gl.name, lo - 1), vname(gl.target, lo), vname(gl.source, lo - 1), "L"))
        try:
            graph = Multigraph(vertices, edges)
        except GraphError as exc:
            raise PresentationError(f"malformed presentation: {exc}") from None
        return Window(graph, tuple(ports), cells)

    def _glue_edges(self, i: int):
        return [(vname(gl.name, i), vname(gl.source, i), vname(gl.target, i + 1)) for gl in self.cell_glue]

    # -- tails ----------------------------------------------------------------

    def tail_partition(self, boundary: list[str], side: str) -> list[list[str]]:
        """Group local vertex names of the first tail cell by infinite-tail component.

        ``boundary`` lists cell-local names in the first cell outside the
        window on ``side``; two of them share a class iff they are joined by a
        path that stays in the tail. Runs the cell-by-cell union-find until its
        state (partition of boundary labels and frontier vertices) repeats;
        afterwards the boundary partition can no longer change.
        """
        if side == "R":
            links = [(gl.source, gl.target) for gl in self.cell_glue]
        else:
            links = [(gl.target, gl.source) for gl in self.cell_glue]
        frontier = sorted({a for a, _ in links})
        cell_edges = [(u, v) for _, u, v in self.cell.edges]

        parent: dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)

        def project(step: int) -> frozenset:
            labels = [("B", b) for b in boundary] + [("F", x) for x in frontier]
            keys = [("B", b) for b in boundary] + [("V", step, x) for x in frontier]
            classes: dict = {}
            for lab, key in zip(labels, keys):
                classes.setdefault(find(key), set()).add(lab)
            return frozenset(frozenset(c) for c in classes.values())

        step = 0
        for b in boundary:
            union(("B", b), ("V", 0, b))
        for v in self.cell.vertices:
            find(("V", 0, v))
        for u, v in cell_edges:
            union(("V", 0, u), ("V", 0, v))
        seen = {project(0)}
        while True:
            step += 1
            for u, v in cell_edges:
                union(("V", step, u), ("V", step, v))
            for a, b in links:
                union(("V", step - 1, a), ("V", step, b))
            state = project(step)
            if state in seen:
                break
            seen.add(state)
        groups: dict = {}
        for b in boundary:
            groups.setdefault(find(("B", b)), []).append(b)
        return list(groups.values())

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        glue = []
        for gl in self.glue:
            src = f"prefix.{gl.source}" if gl.from_prefix else f"cell.{gl.source}"
            dst = f"cell.{gl.target}" if gl.from_prefix else f"next.{gl.target}"
            glue.append([src, dst, gl.name])
        return {
            "prefix": self.prefix.to_json(),
            "cell": self.cell.to_json(),
            "glue": glue,
            "direction": "two-way" if self.two_way else "one-way",
        }

    @classmethod
    def from_json(cls, data: Mapping) -> PeriodicPresentation:
        if not isinstance(data, Mapping):
            raise PresentationError("presentation JSON must be an object")
        direction = data.get("direction", "one-way")
        if direction not in ("one-way", "two-way"):
            raise PresentationError(f"unknown direction {direction!r}")
        glue = []
        for j, entry in enumerate(data.get("glue", [])):
            if not isinstance(entry, (list, tuple)) or len(entry) not in (2, 3):
                raise PresentationError(f"malformed glue entry {entry!r}")
            src, dst = str(entry[0]), str(entry[1])
            name = str(entry[2]) if len(entry) == 3 else f"g{j}"
            s_kind, _, s_name = src.partition(".")
            d_kind, _, d_name = dst.partition(".")
            if s_kind == "cell" and d_kind == "next":
                glue.append(Glue(s_name, d_name, name, False))
            elif s_kind == "prefix" and d_kind == "cell":
                glue.append(Glue(s_name, d_name, name, True))
            else:
                raise PresentationError(f"malformed glue entry {entry!r}: expected cell.x -> next.y or prefix.p -> cell.y")
        return cls(
            Fragment.from_json(data.get("prefix")),
            Fragment.from_json(data.get("cell")),
            tuple(glue),
            direction == "two-way",
        )

    @classmethod
    def load(cls, path: str | Path) -> PeriodicPresentation:
        return cls.from_json(json.loads(Path(path).read_text()))


def finite_presentation(g: Multigraph) -> PeriodicPresentation:
    """A presentation with an empty repeating cell: the graph ``g`` itself."""
    frag = Fragment(tuple(str(v) for v in g.vertices), tuple((e, str(u), str(v)) for e, u, v in g.edges))
    return PeriodicPresentation(frag, Fragment((), ()), ())
