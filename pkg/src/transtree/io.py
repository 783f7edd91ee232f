"""File formats: network JSON, run summaries, CSV tables and DOT renders."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from .graph import Network


def network_to_dict(net: Network) -> dict[str, Any]:
    return {
        "vertex_count": int(net.vertex_count),
        "edges": net.edges.tolist(),
        "lengths": net.lengths.tolist(),
        "sources": net.sources.tolist(),
        "coordinates": None if net.coordinates is None else net.coordinates.tolist(),
    }


def network_from_dict(data: dict[str, Any]) -> Network:
    try:
        return Network(
            vertex_count=int(data["vertex_count"]),
            edges=np.asarray(data["edges"], dtype=np.int64).reshape(-1, 2),
            lengths=data["lengths"],
            sources=data["sources"],
            coordinates=data.get("coordinates"),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed network JSON: {exc}") from exc


def dumps(obj: Any) -> str:
    """Canonical JSON text; reloading and dumping again is byte-identical."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def save_network(net: Network, path: Path) -> None:
    write_json(path, network_to_dict(net))


def load_network(path: Path) -> Network:
    return network_from_dict(read_json(path))


def gamma_tag(gamma: float) -> str:
    return f"{gamma:g}"


def summary_path(out_dir: Path, gamma: float) -> Path:
    return Path(out_dir) / f"summary_{gamma_tag(gamma)}.json"


def write_csv(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def flux_dot(net: Network, q: np.ndarray, zero_tol: float = 0.0, max_width: float = 6.0) -> str:
    """Directed DOT graph of the edges carrying flux, pen width ~ sqrt(|Q|).

    Edges point along the flow. Vertex positions are pinned when the network
    has coordinates.
    """
    q = np.asarray(q, dtype=float)
    qmax = float(np.max(np.abs(q))) if len(q) else 0.0
    lines = ["digraph network {", "  node [shape=point];"]
    for v in range(net.vertex_count):
        attrs = [f'source="{net.sources[v]:.12g}"']
        if net.coordinates is not None:
            x, y = net.coordinates[v]
            attrs.append(f'pos="{x:.6f},{y:.6f}!"')
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for (i, j), flux in zip(net.edges.tolist(), q.tolist()):
        if abs(flux) <= zero_tol:
            continue
        u, v = (i, j) if flux > 0 else (j, i)
        width = max_width * np.sqrt(abs(flux) / qmax)
        lines.append(f'  {u} -> {v} [penwidth={width:.4f}, flux="{abs(flux):.12g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
