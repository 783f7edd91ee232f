import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree

from transtree.graph import Network, SpanningTree
from transtree.instances import canonical_instances, generate_leaf

ACCEPTANCE_KEY = pytest.StashKey[list]()


def random_network(rng, n_min=2, n_max=30, extra=1.0, balanced=True):
    """Connected random graph with random lengths and balanced random sources."""
    n = int(rng.integers(n_min, n_max + 1))
    edges = {(int(rng.integers(0, v)), v) for v in range(1, n)}
    for _ in range(int(extra * n)):
        i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
        edges.add((i, j))
    edges = sorted(edges)
    lengths = rng.uniform(0.2, 3.0, size=len(edges))
    s = rng.normal(size=n)
    if balanced:
        s -= s.mean()
    return Network(n, edges, lengths, s)


def random_tree(net, rng):
    """Random spanning tree via Kruskal on random weights (independent of Wilson)."""
    w = rng.uniform(1.0, 2.0, size=net.edge_count)
    n = net.vertex_count
    mat = coo_matrix((w, (net.edges[:, 0], net.edges[:, 1])), shape=(n, n)).tocsr()
    mst = minimum_spanning_tree(mat).tocoo()
    index = net.edge_index
    return SpanningTree(net, [index[tuple(sorted((int(i), int(j))))] for i, j in zip(mst.row, mst.col)])


@pytest.fixture(scope="session")
def leaf():
    return generate_leaf()


@pytest.fixture(scope="session")
def corpus():
    return canonical_instances()


@pytest.fixture(scope="session")
def leaf_convex(leaf):
    """Convex optimum of the leaf at gamma = 1, solved once per session."""
    from transtree.convex import minimize_convex

    return minimize_convex(leaf)


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
