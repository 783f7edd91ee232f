"""Projected gradient descent for the convex gamma = 1 energy."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .energy import SolverError, solve_kirchhoff
from .graph import Network, SpanningTree, _is_spanning_tree

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, gradient_norm: float):
        super().__init__(message)
        self.gradient_norm = gradient_norm


@dataclass(frozen=True)
class GradientConfig:
    nu: float = 1.0
    c_floor: float = 1e-12
    initial_c: float = 1.0
    initial_step: float = 1.0
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    stop_rel_tol: float = 1e-10
    stall_iters: int = 10
    max_iters: int = 10**5

    def __post_init__(self):
        positive = (self.nu, self.c_floor, self.initial_c, self.initial_step,
                    self.sufficient_decrease, self.stop_rel_tol)
        if min(positive) <= 0:
            raise ValueError("gradient config values must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")


@dataclass
class ConvexResult:
    conductivities: np.ndarray
    energy: float
    iterations: int
    projected_gradient_norm: float
    energy_history: list[float] = field(default_factory=list, repr=False)


def _energy_and_gradient(net: Network, c: np.ndarray, nu: float):
    """Energy and gradient at gamma = 1, both through pressure drops.

    With ``Q/C = dP/L`` the partial derivative ``(-Q^2/C^2 + nu) L`` becomes
    ``(nu - (dP/L)^2) L``, which stays finite on edges with ``C = 0`` and is the
    one-sided derivative there.
    """
    try:
        p = solve_kirchhoff(net, c)
    except SolverError:
        return np.inf, None
    grad_p = (p[net.edges[:, 0]] - p[net.edges[:, 1]]) / net.lengths
    e = float(np.sum((c * grad_p**2 + nu * c) * net.lengths))
    g = (nu - grad_p**2) * net.lengths
    return e, g


def minimize_convex(net: Network, cfg: GradientConfig | None = None) -> ConvexResult:
    """Global minimizer of the gamma = 1 energy over ``C >= 0``.

    Backtracking projected gradient with an Armijo test on the projected step.
    Entries falling below ``c_floor`` are set to exactly zero. Stops once the
    relative energy decrease stays under ``stop_rel_tol`` for ``stall_iters``
    consecutive iterations.
    """
    cfg = cfg or GradientConfig()
    c = np.full(net.edge_count, cfg.initial_c)
    e, g = _energy_and_gradient(net, c, cfg.nu)
    if g is None:
        raise SolverError("initial conductivities do not admit a Kirchhoff solution")
    history = [e]
    step = cfg.initial_step
    stalled = 0
    pg_norm = np.inf
    for it in range(1, cfg.max_iters + 1):
        t = min(step / cfg.shrink, 1e6)
        while True:
            trial = np.maximum(c - t * g, 0.0)
            trial[trial < cfg.c_floor] = 0.0
            d = trial - c
            e_new, g_new = _energy_and_gradient(net, trial, cfg.nu)
            if e_new <= e + cfg.sufficient_decrease * float(g @ d):
                break
            t *= cfg.shrink
            if t < 1e-300:
                e_new, g_new, trial = e, g, c
                break
        step = t
        # projected gradient: zero on bound-active coordinates pushing outward
        pg = np.where((trial == 0.0) & (g_new > 0), 0.0, g_new)
        pg_norm = float(np.linalg.norm(pg))
        rel = (e - e_new) / max(abs(e), 1e-300)
        c, e, g = trial, e_new, g_new
        history.append(e)
        stalled = stalled + 1 if rel < cfg.stop_rel_tol else 0
        if stalled >= cfg.stall_iters:
            log.debug("convex baseline converged after %d iterations, E=%.15g", it, e)
            return ConvexResult(c, e, it, pg_norm, history)
    raise ConvergenceError(
        f"projected gradient did not converge in {cfg.max_iters} iterations", pg_norm
    )


def extract_tree_support(c: np.ndarray, net: Network, threshold: float = 1e-6) -> SpanningTree | None:
    """The spanning tree formed by ``{C > threshold}``, or None if it is not one.

    None means the minimizer is not an extremal (loop-free) point of the
    minimizer set; that is a legitimate outcome at gamma = 1.
    """
    active = np.flatnonzero(np.asarray(c) > threshold)
    pairs = [tuple(net.edges[k].tolist()) for k in active]
    if not _is_spanning_tree(net.vertex_count, pairs):
        return None
    return SpanningTree(net, tuple(active.tolist()))
