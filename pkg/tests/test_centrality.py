import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transtree.centrality import (
    OrientedNetwork,
    grc,
    local_reaching_centrality,
    orient_by_flux,
    sink_weights,
)
from transtree.descent import DescentConfig, monte_carlo
from transtree.energy import ModelParams
from transtree.graph import Network, SpanningTree, tree_fluxes
from transtree.instances import path_graph, unit_source

from conftest import random_network, random_tree


def directed_path(n):
    return OrientedNetwork(n, tuple((k, k + 1) for k in range(n - 1)))


def test_orient_path_tree():
    net = path_graph(3)
    onet = orient_by_flux(net, tree_fluxes(net, SpanningTree(net, (0, 1))))
    assert onet.directed_edges == ((0, 1), (1, 2))


def test_orient_reverses_negative_flux():
    net = Network(2, [(0, 1)], [1.0], [-1.0, 1.0])
    onet = orient_by_flux(net, tree_fluxes(net, SpanningTree(net, (0,))))
    assert onet.directed_edges == ((1, 0),)


def test_orient_zero_sources_is_empty():
    net = path_graph(4).with_sources(np.zeros(4))
    assert orient_by_flux(net, np.zeros(3)).directed_edges == ()


def test_orient_drops_below_tolerance():
    net = path_graph(3)
    onet = orient_by_flux(net, np.array([1.0, 1e-13]))
    assert onet.directed_edges == ((0, 1),)


def test_local_reaching_on_path():
    onet = directed_path(3)
    assert local_reaching_centrality(onet, 0) == 1.0
    assert local_reaching_centrality(onet, 1) == 0.5
    assert local_reaching_centrality(onet, 2) == 0.0


def test_single_vertex_is_undefined():
    with pytest.raises(ValueError):
        local_reaching_centrality(OrientedNetwork(1, ()), 0)
    with pytest.raises(ValueError):
        grc(OrientedNetwork(1, ()))


@pytest.mark.parametrize("n", [2, 3, 5, 17, 122])
def test_out_star_grc_is_one(n):
    onet = OrientedNetwork(n, tuple((0, k) for k in range(1, n)))
    report = grc(onet)
    assert report.grc == 1.0
    assert report.cr_max == 1.0


def closed_form_path_grc(n):
    # C_R(k) = (n-1-k)/(n-1), max 1, so GRC = sum_k k/(n-1)^2 = n/(2(n-1))
    return sum(k / (n - 1) for k in range(n)) / (n - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 10, 50])
def test_directed_path_closed_form(n):
    expected = n / (2 * (n - 1))
    assert closed_form_path_grc(n) == pytest.approx(expected, abs=1e-15)
    assert grc(directed_path(n)).grc == pytest.approx(expected, abs=1e-12)


def test_path_three_is_three_quarters():
    assert grc(directed_path(3)).grc == pytest.approx(0.75, abs=1e-15)


random_digraphs = st.integers(2, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
                 max_size=3 * n, unique=True),
        st.permutations(range(n)),
    )
)


@settings(max_examples=150, deadline=None)
@given(random_digraphs)
def test_grc_range_and_relabeling(case):
    n, edges, perm = case
    report = grc(OrientedNetwork(n, tuple(edges)))
    assert 0.0 <= report.grc <= 1.0
    assert report.cr_max == report.local_cr.max()
    relabeled = OrientedNetwork(n, tuple((perm[u], perm[v]) for u, v in edges))
    assert grc(relabeled).grc == pytest.approx(report.grc, abs=1e-12)


def test_single_source_tree_source_reaches_all():
    rng = np.random.default_rng(6)
    for _ in range(40):
        net = random_network(rng, n_min=3, n_max=25)
        src = int(rng.integers(0, net.vertex_count))
        net = net.with_sources(unit_source(net.vertex_count, src))
        report = grc(orient_by_flux(net, tree_fluxes(net, random_tree(net, rng))))
        assert report.local_cr[src] == 1.0
        assert report.cr_max == 1.0


def test_weighted_variant_matches_on_uniform_sinks(leaf):
    rng = np.random.default_rng(12)
    weights = sink_weights(leaf)
    for _ in range(10):
        onet = orient_by_flux(leaf, tree_fluxes(leaf, random_tree(leaf, rng)))
        assert grc(onet, weights).grc == pytest.approx(grc(onet).grc, abs=1e-12)


def test_leaf_optimum_stem_has_no_inflow(leaf):
    summary = monte_carlo(leaf, DescentConfig(ModelParams(0.5), seed=1), 5)
    onet = orient_by_flux(leaf, tree_fluxes(leaf, summary.best_run.final_tree))
    assert any(u == 0 for u, _ in onet.directed_edges)
    assert not any(v == 0 for _, v in onet.directed_edges)
