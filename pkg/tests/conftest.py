from __future__ import annotations

from hypothesis import settings
from hypothesis import strategies as st

from groupflow.graph import Multigraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def connected_graphs(draw, max_vertices: int = 5, max_extra: int = 5, loops: bool = True):
    """Connected multigraph: a random spanning tree plus extra edges (parallels and loops allowed)."""
    n = draw(st.integers(1, max_vertices))
    vertices = [f"v{i}" for i in range(n)]
    pairs = [(draw(st.integers(0, i - 1)), i) for i in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_extra))
    pairs += [(a, b) for a, b in extra if loops or a != b]
    edges = [(f"e{j}", vertices[a], vertices[b]) for j, (a, b) in enumerate(pairs)]
    return Multigraph(vertices, edges)


def graph(vertices, edges) -> Multigraph:
    return Multigraph(list(vertices), [(f"e{j}", u, v) for j, (u, v) in enumerate(edges)])


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
