"""Energy functionals, the Kirchhoff pressure solve and optimal conductivities.

The network energy for conductivities ``C`` is

    E[C] = sum_ij (Q_ij^2 / C_ij + nu / gamma * C_ij**gamma) * L_ij,

with ``Q_ij = C_ij (P_i - P_j) / L_ij`` and pressures fixed by Kirchhoff's law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import Network

RESIDUAL_TOL = 1e-10


class SolverError(RuntimeError):
    """Kirchhoff's law has no solution for the given active set."""

    def __init__(self, message: str, component: list[int] | None = None):
        super().__init__(message)
        self.component = component


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    nu: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.nu > 0.0:
            raise ValueError(f"nu must be positive, got {self.nu}")

    @property
    def flux_exponent(self) -> float:
        """Power of ``|Q|`` in the tree-optimal energy, ``2 gamma / (gamma + 1)``."""
        return 2.0 * self.gamma / (self.gamma + 1.0)

    @property
    def tree_prefactor(self) -> float:
        """``(1 + 1/gamma) * nu**(1/(gamma+1))``; equals ``2 sqrt(nu)`` at gamma = 1."""
        return (1.0 + 1.0 / self.gamma) * self.nu ** (1.0 / (self.gamma + 1.0))


def _active_components(net: Network, c: np.ndarray):
    active = c > 0
    e = net.edges[active]
    n = net.vertex_count
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    return connected_components(adj, directed=False)


def solve_kirchhoff(net: Network, c: np.ndarray) -> np.ndarray:
    """Pressures satisfying Kirchhoff's law on the active (``C > 0``) subgraph.

    Gauge: the lowest-indexed vertex of each active component has ``P = 0``;
    vertices touching no active edge get ``P = 0`` as well.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (net.edge_count,):
        raise ValueError(f"expected {net.edge_count} conductivities, got shape {c.shape}")
    if np.any(c < 0):
        raise ValueError("conductivities must be nonnegative")
    n = net.vertex_count
    s = net.sources
    scale = max(1.0, float(np.max(np.abs(s)))) if n else 1.0
    ncomp, labels = _active_components(net, c)

    w = c / net.lengths
    i, j = net.edges[:, 0], net.edges[:, 1]
    lap = np.zeros((n, n))
    np.add.at(lap, (i, i), w)
    np.add.at(lap, (j, j), w)
    np.add.at(lap, (i, j), -w)
    np.add.at(lap, (j, i), -w)

    p = np.zeros(n)
    for comp in range(ncomp):
        members = np.flatnonzero(labels == comp)
        net_source = float(np.sum(s[members]))
        if abs(net_source) > RESIDUAL_TOL * scale * max(1, len(members)):
            raise SolverError(
                f"active component {members.tolist()} has net source {net_source:.6g}",
                component=members.tolist(),
            )
        if len(members) == 1:
            continue
        free = members[1:]
        p[free] = np.linalg.solve(lap[np.ix_(free, free)], s[free])

    residual = np.max(np.abs(lap @ p - s)) if n else 0.0
    if residual > RESIDUAL_TOL * scale:
        raise SolverError(f"Kirchhoff residual {residual:.3g} exceeds tolerance")
    return p


def fluxes_from_pressures(net: Network, c: np.ndarray, p: np.ndarray) -> np.ndarray:
    i, j = net.edges[:, 0], net.edges[:, 1]
    return np.asarray(c, dtype=float) * (p[i] - p[j]) / net.lengths


def kirchhoff_fluxes(net: Network, c: np.ndarray) -> np.ndarray:
    return fluxes_from_pressures(net, c, solve_kirchhoff(net, c))


def energy_full(net: Network, c: np.ndarray, params: ModelParams) -> float:
    """Energy of arbitrary conductivities; edges with ``C = 0`` contribute nothing."""
    c = np.asarray(c, dtype=float)
    p = solve_kirchhoff(net, c)
    dp = (p[net.edges[:, 0]] - p[net.edges[:, 1]]) / net.lengths
    # Q^2/C written as C*(dP/L)^2 so that C = 0 needs no special case
    dissipation = c * dp**2
    metabolic = params.nu / params.gamma * c**params.gamma
    return float(np.sum((dissipation + metabolic) * net.lengths))


def optimal_conductivity(q: np.ndarray, params: ModelParams) -> np.ndarray:
    """Conductivities minimizing the energy for fixed fluxes, ``(Q^2/nu)^(1/(gamma+1))``."""
    q = np.asarray(q, dtype=float)
    return (q**2 / params.nu) ** (1.0 / (params.gamma + 1.0))


def energy_tree_optimal(net: Network, q: np.ndarray, params: ModelParams) -> float:
    """Energy at optimal conductivities for fixed fluxes.

    Substituting the optimal conductivity into the energy gives
    ``(1 + 1/gamma) nu^(1/(gamma+1)) sum |Q|^(2 gamma/(gamma+1)) L``.
    """
    q = np.abs(np.asarray(q, dtype=float))
    return params.tree_prefactor * float(np.sum(q**params.flux_exponent * net.lengths))


def energy_gradient(net: Network, c: np.ndarray, params: ModelParams) -> np.ndarray:
    """Partial derivatives ``(-Q^2/C^2 + nu C^(gamma-1)) L`` at strictly positive ``C``."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0):
        raise ValueError("energy gradient is singular where C_ij = 0")
    q = kirchhoff_fluxes(net, c)
    return (-(q**2) / c**2 + params.nu * c ** (params.gamma - 1.0)) * net.lengths
