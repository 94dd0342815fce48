import numpy as np
import pytest

from percroute import DoubleTree, Hypercube, Mesh, Complete


def bfs_distances(topology, source):
    """Plain BFS over ``neighbors``; independent of the closed-form distances."""
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for x in frontier:
            for y, _ in topology.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist


SMALL_TOPOLOGIES = [
    Hypercube(1), Hypercube(3), Hypercube(6),
    Mesh(1, 5), Mesh(2, 4), Mesh(2, 8), Mesh(3, 3),
    DoubleTree(1), DoubleTree(3), DoubleTree(5),
    Complete(2), Complete(7),
]


@pytest.fixture(params=SMALL_TOPOLOGIES, ids=str)
def small_topology(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: full-size acceptance criteria (slow)")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
