import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hashgnn import AttributedGraph  # noqa: E402


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line per criterion, echoed now and in the summary."""

    def record(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        request.config.acceptance_lines.append(line)
        print(line)
        return ok

    return record


def random_graph(rng, n, p=0.3, universe=10, max_attrs=4, empty_prob=0.0):
    """Erdos-Renyi graph with random small attribute sets."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    attrs = []
    for _ in range(n):
        if rng.random() < empty_prob:
            attrs.append(set())
        else:
            size = int(rng.integers(1, min(max_attrs, universe) + 1))
            attrs.append(set(rng.choice(universe, size=size, replace=False).tolist()))
    return AttributedGraph.from_edges(n, edges, attrs, universe)


@pytest.fixture
def path3():
    # 3-node path 0-1-2 with attribute sets {0,1}, {1,2}, {2,3}
    return AttributedGraph.from_edges(3, [(0, 1), (1, 2)], [{0, 1}, {1, 2}, {2, 3}], 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
