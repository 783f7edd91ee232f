"""Gamma sweeps, GRC aggregation and the gamma = 1 validation, with their outputs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import io, plotting
from .centrality import default_zero_tol, flux_grc
from .convex import ConvexResult, GradientConfig, minimize_convex
from .descent import DescentConfig, McSummary, monte_carlo
from .energy import ModelParams
from .graph import Network, tree_fluxes, validate_network
from .instances import canonical_instances, generate_leaf, path_graph, star_graph

log = logging.getLogger(__name__)

DEFAULT_GAMMAS = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
EXACT_GAP = 1e-9
NEAR_GAP = 0.01


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    instance: str
    seed: int
    gammas: tuple[float, ...] = DEFAULT_GAMMAS
    runs: int = 1000
    nu: float = 1.0
    output_dir: Path = Path("results")
    workers: int = 1

    def __post_init__(self):
        if not self.gammas:
            raise ValueError("at least one gamma is required")
        for g in self.gammas:
            if not 0 < g <= 1:
                raise ValueError(f"gamma {g} outside (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def builtin_instances() -> dict[str, Any]:
    table = {
        "leaf122": generate_leaf,
        "star8": lambda: star_graph(8),
        "path6": lambda: path_graph(6),
    }
    for name, net in canonical_instances():
        table.setdefault(name, lambda net=net: net)
    return table


def load_instance(spec: str) -> Network:
    """Resolve ``builtin:<name>`` or a path to a network JSON file; validate it."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        table = builtin_instances()
        if name not in table:
            raise InvalidInstance(f"unknown builtin instance {name!r}; choose from {sorted(table)}")
        net = table[name]()
    else:
        try:
            net = io.load_network(Path(spec))
        except ValueError as exc:
            raise InvalidInstance(str(exc)) from exc
    report = validate_network(net)
    if not report.ok:
        raise InvalidInstance("; ".join(report.violations))
    return net


def summary_record(net: Network, summary: McSummary, params: ModelParams, seed: int) -> dict[str, Any]:
    tree = summary.best_run.final_tree
    q = tree_fluxes(net, tree)
    record = {
        "gamma": params.gamma,
        "nu": params.nu,
        "seed": seed,
        "runs": summary.runs,
        "best_run_index": summary.best_index,
        "best_energy": summary.best_energy,
        "worst_energy": summary.worst_energy,
        "energy_std": summary.energy_std,
        "best_tree_edge_indices": list(tree.tree_edges),
        "best_tree_edges": [list(e) for e in tree.edge_pairs()],
        "best_tree_fluxes": [q[k] for k in tree.tree_edges],
        "energies": summary.energies.tolist(),
        "swaps": summary.swaps.tolist(),
    }
    if summary.grc_values is not None:
        record["grc_values"] = summary.grc_values.tolist()
        record["grc_best"] = float(summary.grc_values[summary.best_index])
    return record


def sweep_gamma(net: Network, gamma: float, cfg: ExperimentConfig) -> tuple[McSummary, dict[str, Any]]:
    params = ModelParams(gamma, cfg.nu)
    summary = monte_carlo(net, DescentConfig(params, seed=cfg.seed), cfg.runs, workers=cfg.workers)
    tol = default_zero_tol(net)
    summary.grc_values = np.array([flux_grc(net, tree_fluxes(net, t), tol) for t in summary.final_trees])
    return summary, summary_record(net, summary, params, cfg.seed)


def cmd_optimize(cfg: ExperimentConfig, net: Network | None = None) -> dict[float, dict[str, Any]]:
    """Monte-Carlo descent per gamma; writes summaries, renders and energy plots."""
    net = net if net is not None else load_instance(cfg.instance)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    records = {}
    for gamma in cfg.gammas:
        summary, record = sweep_gamma(net, gamma, cfg)
        log.info("gamma=%g best=%.10g worst=%.10g std=%.4g", gamma, record["best_energy"],
                 record["worst_energy"], record["energy_std"])
        io.write_json(io.summary_path(out, gamma), record)
        q = tree_fluxes(net, summary.best_run.final_tree)
        tag = io.gamma_tag(gamma)
        (out / f"network_{tag}.dot").write_text(io.flux_dot(net, q), encoding="utf-8")
        if net.coordinates is not None:
            plotting.plot_flux_network(net, q, out / f"network_{tag}.svg", title=rf"$\gamma={tag}$")
        records[gamma] = record
    gammas = list(records)
    rows = [[g, records[g]["best_energy"], records[g]["worst_energy"], records[g]["energy_std"]] for g in gammas]
    io.write_csv(out / "energy_stats.csv", ["gamma", "best_energy", "worst_energy", "energy_std"], rows)
    plotting.plot_energy_stats(gammas, *zip(*[r[1:] for r in rows]), out / "energy_stats.png")
    return records


def cmd_grc(cfg: ExperimentConfig, net: Network | None = None) -> dict[str, Any]:
    """Per-gamma GRC of the best network plus per-run mean and spread.

    Reads ``summary_<gamma>.json`` from the output directory and computes any
    missing ones inline.
    """
    out = cfg.output_dir
    missing = [g for g in cfg.gammas if not io.summary_path(out, g).exists()]
    if missing:
        net = net if net is not None else load_instance(cfg.instance)
        cmd_optimize(ExperimentConfig(**{**cfg.__dict__, "gammas": tuple(missing)}), net)
    entries = []
    for gamma in cfg.gammas:
        record = io.read_json(io.summary_path(out, gamma))
        if "grc_values" not in record:
            raise ValueError(f"summary for gamma={gamma:g} carries no per-run GRC values")
        values = np.asarray(record["grc_values"])
        entries.append({
            "gamma": gamma,
            "grc_best": record["grc_best"],
            "grc_mean": float(values.mean()),
            "grc_std": float(values.std()),
        })
    report = {"instance": cfg.instance, "entries": entries}
    io.write_json(out / "grc.json", report)
    io.write_csv(out / "grc.csv", ["gamma", "grc_best", "grc_std"],
                 [[e["gamma"], e["grc_best"], e["grc_std"]] for e in entries])
    plotting.plot_grc([e["gamma"] for e in entries], [e["grc_best"] for e in entries],
                      [e["grc_std"] for e in entries], out / "grc.png")
    return report


@dataclass
class ValidationOutcome:
    convex_energy: float
    best_energy: float
    gaps: np.ndarray
    exact_fraction: float
    within_1pct_fraction: float
    summary: McSummary = field(repr=False)

    def as_dict(self) -> dict[str, Any]:
        out = {
            "convex_energy": self.convex_energy,
            "best_energy": self.best_energy,
            "runs": len(self.gaps),
            "exact_fraction": self.exact_fraction,
            "within_1pct_fraction": self.within_1pct_fraction,
            "max_gap": float(self.gaps.max()),
        }
        if len(self.gaps) == 1:
            out["gap"] = float(self.gaps[0])
        return out


def cmd_validate(net: Network, runs: int, seed: int, nu: float = 1.0, workers: int = 1,
                 gradient: GradientConfig | None = None, convex: ConvexResult | None = None) -> ValidationOutcome:
    """Compare Monte-Carlo tree descent against the convex optimum at gamma = 1.

    A precomputed ``convex`` result (same network and ``nu``) skips the solve.
    """
    if convex is None:
        convex = minimize_convex(net, gradient or GradientConfig(nu=nu))
    summary = monte_carlo(net, DescentConfig(ModelParams(1.0, nu), seed=seed), runs, workers=workers)
    gaps = (summary.energies - convex.energy) / abs(convex.energy)
    return ValidationOutcome(
        convex_energy=convex.energy,
        best_energy=summary.best_energy,
        gaps=gaps,
        exact_fraction=float(np.mean(gaps <= EXACT_GAP)),
        within_1pct_fraction=float(np.mean(gaps <= NEAR_GAP)),
        summary=summary,
    )
