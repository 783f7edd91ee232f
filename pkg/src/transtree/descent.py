"""Discrete energy descent over spanning trees with Monte-Carlo restarts."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .energy import ModelParams, energy_tree_optimal
from .graph import Network, SpanningTree, tree_fluxes

log = logging.getLogger(__name__)


class IterationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class DescentConfig:
    params: ModelParams
    seed: int = 0
    improvement_rel_tol: float = 1e-12
    max_iterations: int = 10**6

    def __post_init__(self):
        if not self.improvement_rel_tol > 0:
            raise ValueError("improvement_rel_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class DescentRun:
    final_tree: SpanningTree
    final_energy: float
    swaps_accepted: int
    energy_trace: tuple[float, ...] | None = None


@dataclass
class McSummary:
    runs: int
    best_run: DescentRun
    best_index: int
    best_energy: float
    worst_energy: float
    energy_std: float
    energies: np.ndarray
    swaps: np.ndarray
    grc_values: np.ndarray | None = None
    final_trees: list[SpanningTree] = field(default_factory=list, repr=False)


class _Compiled:
    """CSR adjacency and contiguous arrays handed to the kernels."""

    def __init__(self, net: Network):
        self.n = net.vertex_count
        self.m = net.edge_count
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        for v, inc in enumerate(net.incident):
            ptr[v + 1] = ptr[v] + len(inc)
        nbr = np.empty(ptr[-1], dtype=np.int64)
        eid = np.empty(ptr[-1], dtype=np.int64)
        for v, inc in enumerate(net.incident):
            for slot, k in enumerate(inc):
                i, j = net.edges[k]
                nbr[ptr[v] + slot] = j if i == v else i
                eid[ptr[v] + slot] = k
        self.ptr, self.nbr, self.eid = ptr, nbr, eid
        self.edges = np.ascontiguousarray(net.edges)
        self.lengths = np.ascontiguousarray(net.lengths)
        self.sources = np.ascontiguousarray(net.sources)
        self.zero_tol = 1e-14 * max(1.0, float(np.sum(np.abs(net.sources))))


_compiled_cache: dict[int, tuple[Network, _Compiled]] = {}


def _compiled(net: Network) -> _Compiled:
    hit = _compiled_cache.get(id(net))
    if hit is None or hit[0] is not net:
        if len(_compiled_cache) > 64:
            _compiled_cache.clear()
        hit = (net, _Compiled(net))
        _compiled_cache[id(net)] = hit
    return hit[1]


def _draw_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**32))


def _mask(net: Network, tree: SpanningTree) -> np.ndarray:
    mask = np.zeros(net.edge_count, dtype=np.bool_)
    mask[list(tree.tree_edges)] = True
    return mask


def random_spanning_tree(net: Network, rng: np.random.Generator) -> SpanningTree:
    """Uniformly distributed spanning tree (Wilson's algorithm)."""
    cn = _compiled(net)
    mask = _kernels.wilson_tree(cn.n, cn.ptr, cn.nbr, cn.eid, cn.m, _draw_seed(rng))
    return SpanningTree(net, tuple(np.flatnonzero(mask).tolist()))


def tree_energy(net: Network, tree: SpanningTree, params: ModelParams) -> float:
    return energy_tree_optimal(net, tree_fluxes(net, tree), params)


def swap_energies(net: Network, tree: SpanningTree, edge: int, params: ModelParams) -> np.ndarray:
    """Energy of every 1-swap neighbor obtained by removing tree edge ``edge``.

    Entry ``k`` is the energy after inserting edge ``k``; ``inf`` where ``k``
    does not reconnect the cut.
    """
    if edge not in tree:
        raise ValueError(f"edge {edge} is not in the tree")
    cn = _compiled(net)
    base = tree_energy(net, tree, params)
    deltas = _kernels.swap_deltas_for(
        cn.n, cn.ptr, cn.nbr, cn.eid, cn.edges, cn.lengths, cn.sources,
        _mask(net, tree), edge, params.flux_exponent, cn.zero_tol,
    )
    return base + params.tree_prefactor * deltas


def descend(
    net: Network,
    init: SpanningTree,
    cfg: DescentConfig,
    rng: np.random.Generator,
    keep_trace: bool = False,
) -> DescentRun:
    """Single-edge-swap descent from ``init`` to a 1-swap local minimum.

    A tree edge is picked uniformly among those not yet tried since the last
    accepted swap; the best cut-reconnecting replacement (lowest edge index on
    ties) is accepted when it lowers the energy by more than
    ``improvement_rel_tol`` relatively.
    """
    if init.network is not net:
        raise ValueError("initial tree does not span this network")
    cn = _compiled(net)
    params = cfg.params
    mask, swaps, trace, status = _kernels.descend_kernel(
        cn.n, cn.ptr, cn.nbr, cn.eid, cn.edges, cn.lengths, cn.sources,
        _mask(net, init), params.flux_exponent, cn.zero_tol,
        cfg.improvement_rel_tol, cfg.max_iterations, _draw_seed(rng),
    )
    if status == _kernels.STATUS_ITERATION_CAP:
        raise IterationCapExceeded(f"descent exceeded {cfg.max_iterations} scans")
    if status != _kernels.STATUS_OK:
        raise RuntimeError("descent produced a non-spanning edge set")
    tree = SpanningTree(net, tuple(np.flatnonzero(mask).tolist()))
    energy = tree_energy(net, tree, params)
    return DescentRun(
        final_tree=tree,
        final_energy=energy,
        swaps_accepted=int(swaps),
        energy_trace=tuple((params.tree_prefactor * trace).tolist()) if keep_trace else None,
    )


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Independent generator for one Monte-Carlo run, keyed by ``(seed, run_index)``."""
    return np.random.default_rng(np.random.SeedSequence([seed, run_index]))


def single_run(net: Network, cfg: DescentConfig, run_index: int) -> DescentRun:
    rng = run_rng(cfg.seed, run_index)
    return descend(net, random_spanning_tree(net, rng), cfg, rng)


def monte_carlo(net: Network, cfg: DescentConfig, runs: int, workers: int = 1) -> McSummary:
    """Best of ``runs`` independent descents from uniform random spanning trees.

    Results are collected in run order, so the summary does not depend on
    ``workers``. Ties for the best energy go to the lowest run index.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: single_run(net, cfg, r), range(runs)))
    else:
        results = [single_run(net, cfg, r) for r in range(runs)]
    energies = np.array([r.final_energy for r in results])
    best = int(np.argmin(energies))
    log.debug("monte carlo: %d runs, best %.12g at run %d", runs, energies[best], best)
    return McSummary(
        runs=runs,
        best_run=results[best],
        best_index=best,
        best_energy=float(energies[best]),
        worst_energy=float(energies.max()),
        energy_std=float(energies.std()),
        energies=energies,
        swaps=np.array([r.swaps_accepted for r in results]),
        final_trees=[r.final_tree for r in results],
    )
