"""Command-line experiment runner.

Usage:
    kposim <experiment-name> --config <file> [--out <dir>] [--workers N]
           [--audit] [--strict-truncation]
    kposim list
    kposim validate --config <file>

Exit codes: 0 success, 2 config error, 3 partial failure (some grid points
failed), 4 convergence-audit flags present under --audit.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, KposimError
from .experiments import REGISTRY, build_config, run_experiment, validate_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3
EXIT_AUDIT = 4


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kposim",
        description="Config-driven sweeps over the registered KPO "
                    "experiments; writes a CSV and a JSON manifest per run.")
    sub = parser.add_subparsers(dest="command", metavar="<experiment|list|validate>")
    sub.add_parser("list", help="list registered experiments")
    val = sub.add_parser("validate", help="check a config file and exit")
    val.add_argument("--config", required=True, help="JSON config file")
    val.add_argument("--experiment", default=None,
                     help="experiment name when the config omits one")
    for name in REGISTRY:
        run = sub.add_parser(name, help=REGISTRY[name].description)
        run.add_argument("--config", default=None, help="JSON config file")
        run.add_argument("--out", default=".", help="output directory")
        run.add_argument("--workers", type=int, default=1,
                         help="parallel grid-point workers")
        run.add_argument("--audit", action="store_true",
                         help="re-run corner points at doubled n_max and "
                              "halved step; flag metric shifts")
        run.add_argument("--strict-truncation", action="store_true",
                         help="treat truncation-adequacy warnings as errors")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    if args.command == "list":
        for name, exp in REGISTRY.items():
            print(f"{name}: {exp.description}")
        return EXIT_OK

    try:
        if args.command == "validate":
            cfg = _load_config(args.config)
            name = cfg.get("experiment", args.experiment)
            if name is None:
                raise ConfigError(
                    "config has no 'experiment' key; pass --experiment")
            merged = build_config(name, {k: v for k, v in cfg.items()
                                         if k != "experiment"})
            validate_config(name, merged)
            print(f"config OK for experiment {name}")
            return EXIT_OK

        name = args.command
        overrides = _load_config(args.config)
        overrides.pop("experiment", None)
        result = run_experiment(name, overrides, out_dir=args.out,
                                workers=max(1, args.workers),
                                audit=args.audit,
                                strict_truncation=args.strict_truncation)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KposimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    print(f"{name}: {len(result.rows)} grid points, "
          f"{result.n_failed} failed, "
          f"{result.manifest['wall_time_s']:.1f}s -> {args.out}")
    if result.n_failed:
        for row in result.rows:
            if row["status"] == "failed":
                print(f"  point {row['grid_index']} failed: {row['error']}",
                      file=sys.stderr)
        return EXIT_PARTIAL
    if args.audit and result.audit_flags:
        for flag in result.audit_flags:
            print(f"  audit flag: {flag}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
