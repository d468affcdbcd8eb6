"""Command-line experiment runner.

Subcommands: run <config> [<config> ...], list, describe <scenario>. Output
root comes from the config, the FRACLAB_OUT environment variable, or the
working directory. Multiple configs run sequentially by default; --parallel
runs them in separate processes (scenarios are pure and write to
per-scenario directories, so runs never contend). Exit codes: 0 all scenario
assertions pass, 1 assertion failure, 2 config error, 3 resource refusal;
with several configs the worst code wins.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ConfigError, load_config
from .scenarios import SCENARIOS, ResourceRefusal, run_scenario

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclab",
        description="run nonlocal exterior-value experiments and write manifests + CSV artifacts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the scenarios named in config files")
    p_run.add_argument("configs", nargs="+", metavar="config",
                       help="TOML config with a schema tag and [scenario] table")
    p_run.add_argument("--parallel", action="store_true",
                       help="run independent configs in separate processes")
    sub.add_parser("list", help="list scenario names with one-line descriptions")
    p_desc = sub.add_parser("describe", help="describe one scenario")
    p_desc.add_argument("scenario", help="scenario name")
    return parser


def _run_one(config_path: str):
    """Run one config; returns (exit_code, printable lines)."""
    lines = []
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        return EXIT_CONFIG, [f"config error: {exc}"]

    if cfg.name not in SCENARIOS:
        lines.append(f"config error: unknown scenario {cfg.name!r}; valid names:")
        lines.extend(f"  {name}" for name in SCENARIOS)
        return EXIT_CONFIG, lines

    root = cfg.output or os.environ.get("FRACLAB_OUT") or "."
    outdir = Path(root) / cfg.name
    try:
        manifest = run_scenario(cfg.name, cfg.overrides, outdir, cfg.seed)
    except ResourceRefusal as exc:
        return EXIT_RESOURCE, [f"resource refusal: {exc}"]
    except ConfigError as exc:
        return EXIT_CONFIG, [f"config error: {exc}"]

    for a in manifest["assertions"]:
        status = "PASS" if a["passed"] else "FAIL"
        lines.append(f"[{status}] {a['name']}: value {a['value']} vs {a['comparison']} {a['threshold']}")
    lines.append(f"manifest: {outdir / 'manifest.json'}")
    return (EXIT_OK if manifest["passed"] else EXIT_ASSERTION), lines


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for name in SCENARIOS:
            print(f"{name}: {SCENARIOS[name][1]}")
        return EXIT_OK

    if args.command == "describe":
        if args.scenario not in SCENARIOS:
            print(f"unknown scenario {args.scenario!r}; valid names:", file=sys.stderr)
            for name in SCENARIOS:
                print(f"  {name}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"{args.scenario}: {SCENARIOS[args.scenario][1]}")
        return EXIT_OK

    if args.parallel and len(args.configs) > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_run_one, args.configs))
    else:
        results = [_run_one(path) for path in args.configs]

    worst = EXIT_OK
    for path, (code, lines) in zip(args.configs, results):
        if len(args.configs) > 1:
            print(f"== {path}")
        stream = sys.stderr if code in (EXIT_CONFIG, EXIT_RESOURCE) else sys.stdout
        for line in lines:
            print(line, file=stream)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
