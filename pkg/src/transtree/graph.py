"""Networks, spanning trees, cut partitions and closed-form tree fluxes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

SOURCE_BALANCE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected graph with edge lengths and nodal source strengths.

    Edges are stored as an ``(m, 2)`` integer array normalized to ``i < j``.
    Positive sources are inflow nodes, negative ones are sinks.
    """

    vertex_count: int
    edges: np.ndarray
    lengths: np.ndarray
    sources: np.ndarray
    coordinates: np.ndarray | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        edges = np.sort(edges, axis=1)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "lengths", np.asarray(self.lengths, dtype=float).reshape(-1))
        object.__setattr__(self, "sources", np.asarray(self.sources, dtype=float).reshape(-1))
        if self.coordinates is not None:
            coords = np.asarray(self.coordinates, dtype=float).reshape(-1, 2)
            object.__setattr__(self, "coordinates", coords)
        if len(self.lengths) != len(edges):
            raise ValueError(f"{len(self.lengths)} lengths for {len(edges)} edges")
        if len(self.sources) != self.vertex_count:
            raise ValueError(f"{len(self.sources)} sources for {self.vertex_count} vertices")
        if self.coordinates is not None and len(self.coordinates) != self.vertex_count:
            raise ValueError("coordinates must have one row per vertex")
        for arr in (self.edges, self.lengths, self.sources, self.coordinates):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> list[list[int]]:
        """Edge indices incident to each vertex."""
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for k, (i, j) in enumerate(self.edges.tolist()):
            inc[i].append(k)
            inc[j].append(k)
        return inc

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(i, j): k for k, (i, j) in enumerate(self.edges.tolist())}

    def with_sources(self, sources: Sequence[float]) -> "Network":
        return Network(self.vertex_count, self.edges, self.lengths, sources, self.coordinates)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_network(net: Network) -> ValidationReport:
    """Check the standing assumptions: connected, balanced, positive lengths, simple."""
    problems = []
    n = net.vertex_count
    if n < 1:
        problems.append("empty graph")
        return ValidationReport(tuple(problems))
    e = net.edges
    if len(e) and (e.min() < 0 or e.max() >= n):
        problems.append("edge references an invalid vertex id")
        return ValidationReport(tuple(problems))
    if np.any(e[:, 0] == e[:, 1]):
        problems.append("self-loop")
    if len({(int(i), int(j)) for i, j in e}) != len(e):
        problems.append("duplicate edge")
    if np.any(~(net.lengths > 0)):
        problems.append("nonpositive length")
    total = float(np.sum(net.sources))
    if abs(total) > SOURCE_BALANCE_TOL:
        problems.append(f"unbalanced sources: sum S_i = {total:.6g}")
    ds = DisjointSet(range(n))
    for i, j in e.tolist():
        ds.merge(i, j)
    if ds.n_subsets != 1:
        problems.append(f"disconnected: {ds.n_subsets} components")
    return ValidationReport(tuple(problems))


def _is_spanning_tree(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    if len(edges) != n - 1:
        return False
    ds = DisjointSet(range(n))
    for i, j in edges:
        if ds.connected(i, j):
            return False
        ds.merge(i, j)
    return ds.n_subsets == 1


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """A set of ``|V|-1`` edge indices of ``network`` forming a tree."""

    network: Network = field(repr=False)
    tree_edges: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(int(k) for k in self.tree_edges))
        object.__setattr__(self, "tree_edges", idx)
        if len(set(idx)) != len(idx) or (idx and (idx[0] < 0 or idx[-1] >= self.network.edge_count)):
            raise ValueError("tree edge indices out of range or repeated")
        pairs = (tuple(self.network.edges[k]) for k in idx)
        if not _is_spanning_tree(self.network.vertex_count, pairs):
            raise ValueError("edges do not form a spanning tree")

    def __eq__(self, other):
        if not isinstance(other, SpanningTree):
            return NotImplemented
        return self.network is other.network and self.tree_edges == other.tree_edges

    def __hash__(self):
        return hash((id(self.network), self.tree_edges))

    def __contains__(self, edge: int) -> bool:
        return edge in self._edge_set

    @cached_property
    def _edge_set(self) -> frozenset[int]:
        return frozenset(self.tree_edges)

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per vertex, ``(neighbor, edge index)`` pairs restricted to the tree."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.network.vertex_count)]
        for k in self.tree_edges:
            i, j = self.network.edges[k].tolist()
            adj[i].append((j, k))
            adj[j].append((i, k))
        # neighbor order, not edge order, so traversals ignore edge labeling
        for nbrs in adj:
            nbrs.sort()
        return adj

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [tuple(self.network.edges[k].tolist()) for k in self.tree_edges]

    def swapped(self, remove: int, add: int) -> "SpanningTree":
        edges = set(self.tree_edges)
        edges.remove(remove)
        edges.add(add)
        return SpanningTree(self.network, tuple(edges))


def cut_partition(tree: SpanningTree, edge: int) -> tuple[frozenset[int], frozenset[int]]:
    """Split the vertices by deleting tree edge ``edge``.

    Returns ``(V_i, V_j)`` where ``i < j`` are the edge endpoints and ``V_i`` is
    the component of ``i`` once the edge is gone.
    """
    if edge not in tree:
        raise ValueError(f"edge {edge} is not in the tree")
    i, j = tree.network.edges[edge].tolist()
    seen = {i}
    stack = [i]
    while stack:
        u = stack.pop()
        for v, k in tree.adjacency[u]:
            if k != edge and v not in seen:
                seen.add(v)
                stack.append(v)
    side_i = frozenset(seen)
    side_j = frozenset(range(tree.network.vertex_count)) - side_i
    return side_i, side_j


def tree_fluxes(net: Network, tree: SpanningTree) -> np.ndarray:
    """Signed flux on every edge for conductivities supported on ``tree``.

    The flux through a tree edge ``(i, j)`` is the net source of the side
    containing ``i``; positive means flow from ``i`` to ``j``. The symmetric form
    ``sum_{V_i} S - sum_{V_j} S`` equals twice this when sources balance, so the
    one-sided sum is the value consistent with mass conservation.
    Non-tree edges carry zero flux.
    """
    if tree.network is not net:
        raise ValueError("tree does not span this network")
    n = net.vertex_count
    parent = np.full(n, -1)
    parent_edge = np.full(n, -1)
    order = [0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    for u in order:
        for v, k in tree.adjacency[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                parent_edge[v] = k
                order.append(v)
    subtotal = net.sources.copy()
    q = np.zeros(net.edge_count)
    for v in reversed(order[1:]):
        k = parent_edge[v]
        # outflow of the subtree below v goes v -> parent
        q[k] = subtotal[v] if v == net.edges[k, 0] else -subtotal[v]
        subtotal[parent[v]] += subtotal[v]
    return q


def vertex_outflow(net: Network, q: np.ndarray) -> np.ndarray:
    """Net outflow at each vertex for per-edge fluxes in the ``i < j`` orientation."""
    out = np.zeros(net.vertex_count)
    np.add.at(out, net.edges[:, 0], q)
    np.add.at(out, net.edges[:, 1], -q)
    return out


def reachable_set(adjacency: Sequence[Sequence[int]], start: int) -> set[int]:
    """Vertices reachable from ``start`` along directed edges, ``start`` excluded."""
    if not 0 <= start < len(adjacency):
        raise ValueError(f"invalid start vertex {start}")
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    seen.discard(start)
    return seen
