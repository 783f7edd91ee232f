"""Flux orientation and global reaching centrality (GRC)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import Network, reachable_set


@dataclass(frozen=True)
class OrientedNetwork:
    vertex_count: int
    directed_edges: tuple[tuple[int, int], ...]

    @cached_property
    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.directed_edges:
            adj[u].append(v)
        return adj


@dataclass(frozen=True)
class GrcReport:
    local_cr: np.ndarray
    cr_max: float
    grc: float


def default_zero_tol(net: Network) -> float:
    return 1e-12 * max(1.0, float(np.max(np.abs(net.sources))))


def orient_by_flux(net: Network, q: np.ndarray, zero_tol: float | None = None) -> OrientedNetwork:
    """Direct each edge along its flux; edges with ``|Q| <= zero_tol`` are dropped."""
    if zero_tol is None:
        zero_tol = default_zero_tol(net)
    q = np.asarray(q, dtype=float)
    directed = []
    for (i, j), flux in zip(net.edges.tolist(), q.tolist()):
        if flux > zero_tol:
            directed.append((i, j))
        elif flux < -zero_tol:
            directed.append((j, i))
    return OrientedNetwork(net.vertex_count, tuple(directed))


def local_reaching_centrality(onet: OrientedNetwork, i: int, weights: np.ndarray | None = None) -> float:
    """Share of the other vertices reachable from ``i`` along outgoing edges.

    With ``weights`` the share is weight-based instead: the sum of weights over
    reachable vertices divided by the total weight.
    """
    if onet.vertex_count < 2:
        raise ValueError("reaching centrality needs at least 2 vertices")
    reached = reachable_set(onet.successors, i)
    if weights is None:
        return len(reached) / (onet.vertex_count - 1)
    return float(sum(weights[v] for v in reached) / np.sum(weights))


def grc(onet: OrientedNetwork, weights: np.ndarray | None = None) -> GrcReport:
    """``GRC = sum_i (C_R^max - C_R(i)) / (|V| - 1)``."""
    n = onet.vertex_count
    if n < 2:
        raise ValueError("GRC needs at least 2 vertices")
    local = np.array([local_reaching_centrality(onet, i, weights) for i in range(n)])
    cr_max = float(local.max())
    return GrcReport(local, cr_max, float(np.sum(cr_max - local) / (n - 1)))


def sink_weights(net: Network) -> np.ndarray:
    """Weights for the weighted GRC: sink strengths ``|S_j|``, zero at sources."""
    return np.where(net.sources < 0, -net.sources, 0.0)


def flux_grc(net: Network, q: np.ndarray, zero_tol: float | None = None) -> float:
    return grc(orient_by_flux(net, q, zero_tol)).grc
