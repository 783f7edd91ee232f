import json

import numpy as np
import pytest

from transtree import io
from transtree.descent import DescentConfig, monte_carlo, tree_energy
from transtree.energy import ModelParams
from transtree.graph import Network, validate_network
from transtree.instances import (
    EnumerationRefused,
    LeafSpec,
    brute_force_optimum,
    complete_graph,
    cycle_graph,
    enumerate_spanning_trees,
    generate_leaf,
    grid_graph,
    spanning_tree_count,
)


def float_matrix_tree_count(net):
    n = net.vertex_count
    lap = np.zeros((n, n))
    for i, j in net.edges:
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    return int(round(np.linalg.det(lap[1:, 1:])))


def test_default_leaf_counts(leaf):
    assert leaf.vertex_count == 122
    assert leaf.edge_count == 323
    assert validate_network(leaf).ok
    assert abs(leaf.sources.sum()) <= 1e-12


def test_leaf_sources(leaf):
    assert leaf.sources[0] == 1.0
    assert np.all(leaf.sources[1:] == -1.0 / 121)
    assert leaf.coordinates[0, 0] == leaf.coordinates[:, 0].min()


def test_leaf_lengths_are_euclidean(leaf):
    xy = leaf.coordinates
    d = np.linalg.norm(xy[leaf.edges[:, 0]] - xy[leaf.edges[:, 1]], axis=1)
    np.testing.assert_allclose(leaf.lengths, d, atol=1e-12)


def test_leaf_is_planar_triangulation(leaf):
    # Euler: a connected plane graph has E <= 3V - 6
    assert leaf.edge_count <= 3 * leaf.vertex_count - 6
    xy = leaf.coordinates
    segs = xy[leaf.edges]

    def cross(o, a, b):
        return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])

    for k in range(leaf.edge_count):
        p, q = segs[k]
        others = np.array([m for m in range(leaf.edge_count) if not set(leaf.edges[m]) & set(leaf.edges[k])])
        r, s = segs[others, 0], segs[others, 1]
        d1, d2 = cross(p, q, r), cross(p, q, s)
        d3, d4 = cross(r, s, p), cross(r, s, q)
        assert not np.any((d1 * d2 < 0) & (d3 * d4 < 0))


def test_leaf_is_deterministic():
    a, b = generate_leaf(), generate_leaf()
    assert io.dumps(io.network_to_dict(a)) == io.dumps(io.network_to_dict(b))


def test_leaf_target_rescaling():
    net = generate_leaf(LeafSpec(target_vertices=60))
    assert net.vertex_count == 60
    assert validate_network(net).ok
    assert net.sources[0] == 1.0 and np.all(net.sources[1:] == -1 / 59)


def test_leaf_spec_validation():
    with pytest.raises(ValueError):
        LeafSpec(target_vertices=1)
    with pytest.raises(ValueError):
        LeafSpec(spacing=0.0)


def test_corpus_shapes(corpus):
    names = [name for name, _ in corpus]
    assert names[:7] == ["path2", "path3", "triangle", "cycle4", "star5", "grid3x3", "k5"]
    assert len(corpus) == 27
    for name, net in corpus:
        assert validate_network(net).ok, name
        assert abs(net.sources.sum()) <= 1e-12
        assert net.vertex_count <= 9
        if name.startswith("random"):
            assert net.vertex_count <= 8 and net.edge_count <= 14


def test_corpus_is_deterministic(corpus):
    from transtree.instances import canonical_instances

    again = canonical_instances()
    for (_, a), (_, b) in zip(corpus, again):
        assert json.dumps(io.network_to_dict(a)) == json.dumps(io.network_to_dict(b))


@pytest.mark.parametrize(
    "net, expected",
    [(cycle_graph(3), 3), (cycle_graph(4), 4), (grid_graph(3, 3), 192), (complete_graph(5), 125)],
)
def test_tree_counts(net, expected):
    assert float_matrix_tree_count(net) == expected
    assert spanning_tree_count(net) == expected
    trees = list(enumerate_spanning_trees(net))
    assert len(trees) == expected
    assert len({t.tree_edges for t in trees}) == expected


def test_enumeration_matches_matrix_tree_on_corpus(corpus):
    for name, net in corpus:
        trees = list(enumerate_spanning_trees(net))
        assert len(trees) == float_matrix_tree_count(net), name
        assert [t.tree_edges for t in trees] == sorted(t.tree_edges for t in trees)


def test_enumeration_refusal_cites_exact_count():
    with pytest.raises(EnumerationRefused) as err:
        list(enumerate_spanning_trees(complete_graph(5), cap=100))
    assert err.value.count == 125
    assert "125" in str(err.value)


def test_leaf_count_is_refused(leaf):
    with pytest.raises(EnumerationRefused) as err:
        next(enumerate_spanning_trees(leaf))
    assert err.value.count > 10**40


@pytest.mark.parametrize("gamma", [0.3, 1.0])
def test_two_node_brute_force(gamma):
    net = Network(2, [(0, 1)], [2.5], [1.0, -1.0])
    params = ModelParams(gamma, nu=2.0)
    tree, e = brute_force_optimum(net, params)
    assert tree.tree_edges == (0,)
    assert e == pytest.approx((1 + 1 / gamma) * 2.0 ** (1 / (gamma + 1)) * 2.5)


def test_triangle_brute_force_by_hand():
    net = cycle_graph(3)
    params = ModelParams(0.5)
    p = params.flux_exponent
    # path through the source (star at 0): two edges with |Q| = 1/2;
    # paths rooted elsewhere: one edge with |Q| = 1 and one with |Q| = 1/2
    star = 3 * (2 * 0.5**p)
    other = 3 * (1.0 + 0.5**p)
    tree, e = brute_force_optimum(net, params)
    assert e == pytest.approx(min(star, other), rel=1e-14)
    assert tree.tree_edges == (0, 2)


def test_brute_force_lower_bounds_monte_carlo(corpus):
    params = ModelParams(0.4)
    for name, net in corpus[5:12]:
        _, e = brute_force_optimum(net, params)
        mc = monte_carlo(net, DescentConfig(params, seed=4), 10)
        assert e <= mc.best_energy + 1e-12, name


def test_brute_force_tie_break_is_first_in_order():
    net = cycle_graph(4)
    params = ModelParams(0.5)
    tree, e = brute_force_optimum(net, params)
    first = next(t for t in enumerate_spanning_trees(net) if tree_energy(net, t, params) == e)
    assert tree == first
