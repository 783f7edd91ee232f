"""Command-line entry point: ``transtree {generate,optimize,grc,validate}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .convex import ConvergenceError
from .descent import IterationCapExceeded
from .experiment import (
    DEFAULT_GAMMAS,
    ExperimentConfig,
    InvalidInstance,
    cmd_grc,
    cmd_optimize,
    cmd_validate,
    load_instance,
)
from .instances import LeafSpec, generate_leaf

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_CONVERGENCE = 0, 1, 2, 3

DEFAULTS = {
    "gammas": list(DEFAULT_GAMMAS),
    "runs": 1000,
    "nu": 1.0,
    "out": "results",
    "workers": 1,
    "seed": None,
    "instance": None,
}

log = logging.getLogger("transtree")


def _gamma_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _add_experiment_args(p: argparse.ArgumentParser, gammas: bool = True) -> None:
    # None means "not given", so config-file values can fill in
    p.add_argument("--instance", help="network JSON path or builtin:<name> (e.g. builtin:leaf122)")
    if gammas:
        p.add_argument("--gammas", type=_gamma_list, help="comma-separated metabolic exponents")
    p.add_argument("--runs", type=int, help="Monte-Carlo restarts per gamma")
    p.add_argument("--nu", type=float, help="metabolic coefficient")
    p.add_argument("--seed", type=int, help="master RNG seed (required)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="parallel descent threads")
    p.add_argument("--config", type=Path, help="JSON file with any of the options above")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transtree", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a builtin instance as network JSON")
    gen.add_argument("--builtin", default="leaf122")
    gen.add_argument("--out", required=True, type=Path)

    _add_experiment_args(sub.add_parser("optimize", help="Monte-Carlo tree descent over a gamma sweep"))
    _add_experiment_args(sub.add_parser("grc", help="GRC of the optimized networks per gamma"))
    _add_experiment_args(sub.add_parser("validate", help="gamma = 1 check against the convex optimum"),
                         gammas=False)
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge CLI flags over the config file over defaults."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(io.read_json(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["instance"] is None:
        raise InvalidInstance("no instance given (--instance or config file)")
    if merged["seed"] is None:
        raise InvalidInstance("a seed is required (--seed or config file)")
    return merged


def _experiment_config(opts: dict) -> ExperimentConfig:
    return ExperimentConfig(
        instance=opts["instance"],
        seed=int(opts["seed"]),
        gammas=tuple(float(g) for g in opts["gammas"]),
        runs=int(opts["runs"]),
        nu=float(opts["nu"]),
        output_dir=Path(opts["out"]),
        workers=int(opts["workers"]),
    )


def _run(args: argparse.Namespace) -> int:
    if args.command == "generate":
        if args.builtin == "leaf122":
            net = generate_leaf(LeafSpec())
        else:
            net = load_instance(f"builtin:{args.builtin}")
        io.save_network(net, args.out)
        print(f"wrote {args.out}: {net.vertex_count} vertices, {net.edge_count} edges")
        return EXIT_OK

    opts = resolve_options(args)
    if args.command == "validate":
        net = load_instance(opts["instance"])
        outcome = cmd_validate(net, int(opts["runs"]), int(opts["seed"]), float(opts["nu"]),
                               workers=int(opts["workers"]))
        report = outcome.as_dict()
        out = Path(opts["out"])
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "validate.json", report)
        print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_OK

    cfg = _experiment_config(opts)
    if args.command == "optimize":
        records = cmd_optimize(cfg)
        for gamma, rec in records.items():
            print(f"gamma={gamma:g}\tbest={rec['best_energy']:.10g}\tworst={rec['worst_energy']:.10g}"
                  f"\tstd={rec['energy_std']:.6g}")
    else:
        report = cmd_grc(cfg)
        for entry in report["entries"]:
            print(f"gamma={entry['gamma']:g}\tgrc_best={entry['grc_best']:.6f}\tgrc_std={entry['grc_std']:.6f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (ConvergenceError, IterationCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InvalidInstance, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
