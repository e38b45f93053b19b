import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pegraph import (  # noqa: E402
    build_complete,
    build_complete_bipartite,
    build_cycle,
    build_grid2d,
    build_path,
    build_star,
    from_edges,
    gaussian_kernel_graph,
)

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE1_EDGES = [(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6), (6, 7), (7, 8)]
EXAMPLE1_SIGNAL = [-1.0, -2.3, 0.0, -3.0, 1.0, 5.0, 1.0, -1.1]
EXAMPLE1_PAIRS = [
    (-1, -1.15), (-2.3, -0.5), (0, -1.325), (-3, 2.5),
    (1, 2.5), (5, -0.333), (1, 1.95), (-1.1, 1),
]


def example1_graph():
    return from_edges(8, [(a - 1, b - 1) for a, b in EXAMPLE1_EDGES], name="example1")


def random_digraph(n, p, seed):
    rng = np.random.default_rng(seed)
    arcs = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
    return from_edges(n, arcs, directed=True, name=f"digraph({n},{p},{seed})")


def small_graphs():
    """Every graph with at most 8 vertices used by oracle comparisons."""
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 3, size=(6, 2))
    return {
        "example1": example1_graph(),
        "path4": build_path(4),
        "dpath6": build_path(6, directed=True),
        "cycle5": build_cycle(5),
        "star5": build_star(5),
        "k4": build_complete(4),
        "k23": build_complete_bipartite(2, 3),
        "grid2x3": build_grid2d(2, 3),
        "dgrid2x3": build_grid2d(2, 3, directed=True),
        "dgrid3x2": build_grid2d(3, 2, directed=True),
        "digraph7": random_digraph(7, 0.3, 1),
        "digraph8": random_digraph(8, 0.2, 5),
        "kernel6": gaussian_kernel_graph(pts, 1.0, 2.0),
    }


@pytest.fixture
def example1():
    return example1_graph(), np.array(EXAMPLE1_SIGNAL)


@pytest.fixture(params=sorted(small_graphs()))
def small_graph(request):
    return small_graphs()[request.param]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(mod.summary_line(number))
