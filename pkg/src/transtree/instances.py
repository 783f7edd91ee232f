"""Instance generators and the brute-force spanning-tree oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .energy import ModelParams, energy_tree_optimal
from .graph import Network, SpanningTree, tree_fluxes

DEFAULT_CAP = 10**6


class EnumerationRefused(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"graph has {count} spanning trees, above the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class LeafSpec:
    """Triangular lattice clipped to an ellipse, lightly jittered.

    The defaults give 122 vertices and 323 edges. ``target_vertices`` keeps
    that many lattice points of smallest elliptic radius, so the outline is
    the given ellipse only when the count matches it.
    """

    target_vertices: int | None = 122
    semi_major: float = 7.5
    semi_minor: float = 4.35
    spacing: float = 1.0
    offset: tuple[float, float] = (0.5, 0.0)
    jitter: float = 0.1
    jitter_seed: int = 20230601

    def __post_init__(self):
        if min(self.semi_major, self.semi_minor, self.spacing) <= 0:
            raise ValueError("leaf axes and spacing must be positive")
        if not 0 <= self.jitter < 0.25:
            raise ValueError("jitter must lie in [0, 0.25) lattice spacings to stay planar")
        if self.target_vertices is not None and self.target_vertices < 2:
            raise ValueError("a leaf needs at least 2 vertices")


def _lattice_in_ellipse(a: float, b: float, h: float, offset) -> np.ndarray:
    row_h = h * np.sqrt(3) / 2
    rows = int(b / row_h) + 2
    cols = int(a / h) + 2
    pts = []
    for r in range(-rows, rows + 1):
        y = r * row_h + offset[1]
        for c in range(-cols - 1, cols + 2):
            x = c * h + (r % 2) * h / 2 + offset[0]
            if (x / a) ** 2 + (y / b) ** 2 <= 1 + 1e-9:
                pts.append((x, y))
    return np.array(pts, dtype=float).reshape(-1, 2)


def _leaf_points(spec: LeafSpec) -> np.ndarray:
    a, b = spec.semi_major, spec.semi_minor
    target = spec.target_vertices
    if target is None:
        return _lattice_in_ellipse(a, b, spec.spacing, spec.offset)
    scale = 1.0
    pts = _lattice_in_ellipse(a, b, spec.spacing, spec.offset)
    while len(pts) < target:
        scale *= 1.25
        pts = _lattice_in_ellipse(scale * a, scale * b, spec.spacing, spec.offset)
    # the target innermost points by elliptic radius; at the default axes
    # these are exactly the points inside the ellipse
    radius = np.round((pts[:, 0] / a) ** 2 + (pts[:, 1] / b) ** 2, 12)
    order = np.lexsort((pts[:, 1], pts[:, 0], radius))
    return pts[order[:target]]


def generate_leaf(spec: LeafSpec | None = None) -> Network:
    """Planar leaf-shaped graph with a unit source at the leftmost vertex.

    Vertices are ordered by ``(x, y)`` of the unjittered lattice, so the stem
    is vertex 0. All other vertices are sinks of strength ``-1/(|V|-1)``.
    """
    spec = spec or LeafSpec()
    pts = _leaf_points(spec)
    if len(pts) < 2:
        raise ValueError("leaf spec yields fewer than 2 vertices")
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    h = spec.spacing
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    i, j = np.nonzero(np.triu(np.abs(d - h) < 1e-6 * h))
    edges = np.column_stack([i, j])

    rng = np.random.default_rng(spec.jitter_seed)
    coords = pts + rng.uniform(-spec.jitter * h, spec.jitter * h, size=pts.shape)
    lengths = np.linalg.norm(coords[edges[:, 0]] - coords[edges[:, 1]], axis=1)

    n = len(pts)
    sources = np.full(n, -1.0 / (n - 1))
    sources[0] = 1.0
    return Network(n, edges, lengths, sources, coords)


def unit_source(n: int, source: int = 0) -> np.ndarray:
    s = np.full(n, -1.0 / (n - 1))
    s[source] = 1.0
    return s


def _net(n: int, edges, lengths=None) -> Network:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if lengths is None:
        lengths = np.ones(len(edges))
    return Network(n, edges, lengths, unit_source(n))


def path_graph(n: int) -> Network:
    return _net(n, [(k, k + 1) for k in range(n - 1)])


def cycle_graph(n: int) -> Network:
    return _net(n, [(k, (k + 1) % n) for k in range(n)])


def star_graph(n: int) -> Network:
    return _net(n, [(0, k) for k in range(1, n)])


def complete_graph(n: int) -> Network:
    return _net(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> Network:
    vid = lambda r, c: r * cols + c  # noqa: E731
    edges = [(vid(r, c), vid(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(vid(r, c), vid(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    coords = [(c, -r) for r in range(rows) for c in range(cols)]
    n = rows * cols
    return Network(n, edges, np.ones(len(edges)), unit_source(n), coords)


def random_connected_graph(rng: np.random.Generator, n: int, max_edges: int) -> Network:
    """Random tree on ``n`` vertices plus extra random edges, lengths in [0.5, 2]."""
    edges = {(int(rng.integers(0, v)), v) for v in range(1, n)}
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    extra = min(len(candidates), max_edges - len(edges))
    if extra > 0:
        extra = int(rng.integers(1, extra + 1))
        for k in rng.choice(len(candidates), size=extra, replace=False):
            edges.add(candidates[k])
    edges = sorted(edges)
    lengths = np.round(rng.uniform(0.5, 2.0, size=len(edges)), 6)
    return Network(n, edges, lengths, unit_source(n))


def canonical_instances(seed: int = 7) -> list[tuple[str, Network]]:
    """Named test corpus: small structured graphs and 20 random ones (|V| <= 8)."""
    corpus = [
        ("path2", path_graph(2)),
        ("path3", path_graph(3)),
        ("triangle", cycle_graph(3)),
        ("cycle4", cycle_graph(4)),
        ("star5", star_graph(5)),
        ("grid3x3", grid_graph(3, 3)),
        ("k5", complete_graph(5)),
    ]
    for k in range(20):
        rng = np.random.default_rng([seed, k])
        n = int(rng.integers(4, 9))
        corpus.append((f"random{k:02d}", random_connected_graph(rng, n, max_edges=14)))
    return corpus


def _bareiss_det(a: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [row[:] for row in a]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


def spanning_tree_count(net: Network) -> int:
    """Number of spanning trees by the matrix-tree theorem (exact)."""
    n = net.vertex_count
    lap = [[0] * n for _ in range(n)]
    for i, j in net.edges.tolist():
        lap[i][i] += 1
        lap[j][j] += 1
        lap[i][j] -= 1
        lap[j][i] -= 1
    return _bareiss_det([row[1:] for row in lap[1:]])


def enumerate_spanning_trees(net: Network, cap: int = DEFAULT_CAP) -> Iterator[SpanningTree]:
    """Every spanning tree once, in lexicographic order of edge-index tuples.

    Include/exclude recursion over edges; the exclude branch is taken only if
    the remaining edges can still connect the graph.
    """
    count = spanning_tree_count(net)
    if count > cap:
        raise EnumerationRefused(count, cap)
    n, m = net.vertex_count, net.edge_count
    edges = net.edges.tolist()

    def still_connected(label, start):
        lab = label[:]

        def find(x):
            while lab[x] != x:
                lab[x] = lab[lab[x]]
                x = lab[x]
            return x

        parts = len({find(v) for v in range(n)})
        for i, j in edges[start:]:
            ri, rj = find(i), find(j)
            if ri != rj:
                lab[ri] = rj
                parts -= 1
        return parts == 1

    def rec(k, chosen, label):
        if len(chosen) == n - 1:
            yield SpanningTree(net, tuple(chosen))
            return
        if m - k < n - 1 - len(chosen):
            return
        i, j = edges[k]
        if label[i] != label[j]:
            old, new = label[j], label[i]
            joined = [new if x == old else x for x in label]
            yield from rec(k + 1, chosen + [k], joined)
        if still_connected(label, k + 1):
            yield from rec(k + 1, chosen, label)

    # label[v] is a component representative, kept flat
    yield from rec(0, [], list(range(n)))


def brute_force_optimum(net: Network, params: ModelParams, cap: int = DEFAULT_CAP) -> tuple[SpanningTree, float]:
    """Global tree optimum by exhaustive enumeration; ties go to the first tree."""
    best, best_e = None, np.inf
    for tree in enumerate_spanning_trees(net, cap):
        e = energy_tree_optimal(net, tree_fluxes(net, tree), params)
        if e < best_e:
            best, best_e = tree, e
    return best, float(best_e)
