"""Named graphs and the canonical enumeration of small connected multigraphs."""

from __future__ import annotations

import itertools
from typing import Iterator

from .graph import Multigraph

# A multigraph on vertices 0..n-1 is kept as a symmetric multiplicity matrix
# (loops on the diagonal) while enumerating.

Matrix = tuple[tuple[int, ...], ...]


def _refine(mat: Matrix, cells: list[list[int]]) -> list[list[int]]:
    """Equitable refinement of an ordered partition; cell order is invariant."""
    while True:
        where = {}
        for ci, cell in enumerate(cells):
            for v in cell:
                where[v] = ci
        new_cells: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            sigs = {}
            for v in cell:
                counts = [0] * len(cells)
                row = mat[v]
                for u, mult in enumerate(row):
                    if mult and u != v:
                        counts[where[u]] += mult
                sigs[v] = (row[v], tuple(counts))
            groups: dict = {}
            for v in cell:
                groups.setdefault(sigs[v], []).append(v)
            if len(groups) > 1:
                changed = True
            for key in sorted(groups):
                new_cells.append(groups[key])
        cells = new_cells
        if not changed:
            return cells


def _form(mat: Matrix, order: list[int]) -> tuple[int, ...]:
    n = len(order)
    return tuple(mat[order[i]][order[j]] for i in range(n) for j in range(i, n))


def canonical_form(mat: Matrix) -> tuple[int, tuple[int, ...]]:
    """Isomorphism-invariant certificate via individualisation and refinement."""
    n = len(mat)
    best = None

    def search(cells):
        nonlocal best
        cells = _refine(mat, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            form = _form(mat, [c[0] for c in cells])
            if best is None or form < best:
                best = form
            return
        for v in cells[target]:
            rest = [u for u in cells[target] if u != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:])

    search([list(range(n))])
    return n, best


def _from_form(n: int, form: tuple[int, ...]) -> Matrix:
    mat = [[0] * n for _ in range(n)]
    it = iter(form)
    for i in range(n):
        for j in range(i, n):
            mat[i][j] = mat[j][i] = next(it)
    return tuple(tuple(r) for r in mat)


def matrix_to_graph(mat: Matrix) -> Multigraph:
    n = len(mat)
    edges = []
    for i in range(n):
        for j in range(i, n):
            for _ in range(mat[i][j]):
                edges.append((f"e{len(edges)}", i, j))
    return Multigraph(list(range(n)), edges)


def graph_to_matrix(g: Multigraph) -> Matrix:
    n = len(g.vertices)
    mat = [[0] * n for _ in range(n)]
    for t, h in g.canonical_edges:
        mat[t][h] += 1
        if t != h:
            mat[h][t] += 1
    return tuple(tuple(r) for r in mat)


def graph_certificate(g: Multigraph) -> tuple[int, tuple[int, ...]]:
    return canonical_form(graph_to_matrix(g))


def _extensions(mat: Matrix) -> Iterator[Matrix]:
    n = len(mat)
    for i in range(n):
        for j in range(i, n):
            rows = [list(r) for r in mat]
            rows[i][j] += 1
            if i != j:
                rows[j][i] += 1
            yield tuple(tuple(r) for r in rows)
    for i in range(n):
        rows = [list(r) + [0] for r in mat] + [[0] * (n + 1)]
        rows[i][n] = rows[n][i] = 1
        yield tuple(tuple(r) for r in rows)


def connected_multigraph_levels(max_edges: int) -> list[list[tuple[int, tuple[int, ...]]]]:
    """Certificates of connected multigraphs (loops, parallel edges) by edge count.

    Every connected multigraph with m >= 1 edges arises from one with m - 1
    edges by adding a loop, an edge between present vertices, or a pendant
    edge to a new vertex; duplicates are removed by certificate.
    """
    levels = [[(1, (0,))]]
    for _ in range(max_edges):
        seen = {}
        for n, form in levels[-1]:
            for ext in _extensions(_from_form(n, form)):
                cert = canonical_form(ext)
                seen.setdefault(cert, None)
        levels.append(sorted(seen))
    return levels


def connected_multigraphs(max_edges: int) -> Iterator[Multigraph]:
    """All connected multigraphs with at most ``max_edges`` edges, up to isomorphism."""
    for level in connected_multigraph_levels(max_edges):
        for n, form in level:
            yield matrix_to_graph(_from_form(n, form))


# -- named graphs -------------------------------------------------------------


def _edges(pairs) -> list[tuple[str, object, object]]:
    return [(f"e{i}", u, v) for i, (u, v) in enumerate(pairs)]


def path(n: int) -> Multigraph:
    return Multigraph(list(range(n)), _edges((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Multigraph:
    return Multigraph(list(range(n)), _edges((i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> Multigraph:
    return Multigraph(list(range(n)), _edges(itertools.combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Multigraph:
    return Multigraph(list(range(a + b)), _edges((i, a + j) for i in range(a) for j in range(b)))


def wheel(spokes: int) -> Multigraph:
    """Hub 0 joined to a rim cycle 1..spokes."""
    rim = [(i, i % spokes + 1) for i in range(1, spokes + 1)]
    return Multigraph(list(range(spokes + 1)), _edges(rim + [(0, i) for i in range(1, spokes + 1)]))


def theta(paths: int = 3) -> Multigraph:
    """Two vertices joined by ``paths`` parallel edges."""
    return Multigraph([0, 1], _edges([(0, 1)] * paths))


def petersen() -> Multigraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Multigraph(list(range(10)), _edges(outer + spokes + inner))


def bouquet(loops: int) -> Multigraph:
    return Multigraph([0], _edges([(0, 0)] * loops))
