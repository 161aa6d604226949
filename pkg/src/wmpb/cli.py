"""Command-line entry point.

Every subcommand reads a declarative JSON config (``--config default``
uses the built-in synthetic-corpus experiment) plus flag overrides, and
exits 0 on success, 2 on usage or configuration errors, 1 on runtime
failures.  Failures also print one machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import runner
from .errors import ConfigError, WorkbenchError
from .runner import PAIRING_NUMERALS, ExperimentConfig, RunPaths

SUBCOMMANDS = (
    "build-corpus",
    "generate",
    "paraphrase",
    "similarity",
    "detect",
    "evaluate",
    "report",
    "run-all",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wmpb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default="default", help="config file path, or 'default'")
        p.add_argument("--seed", type=int, default=None, help="override global_seed")
        p.add_argument("--rounds", type=int, default=None, help="override paraphrase rounds")
        p.add_argument("--watermark", choices=["on", "off"], default=None)
        p.add_argument("--paraphraser", default=None, help="restrict to one configured paraphraser")
        p.add_argument("--pairing", default=None, help="restrict to one pairing: i, ii, iii, iv, or v")
        p.add_argument("--output", default=None, help="override output_dir")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config == "default":
        config = runner.default_config()
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, encoding="utf-8") as fh:
                config = ExperimentConfig.from_json(json.load(fh))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config {path}: {exc}") from exc
    if args.seed is not None:
        config.global_seed = args.seed
    if args.rounds is not None:
        config.rounds = args.rounds
    if args.watermark == "off":
        config.watermark = None
    elif args.watermark == "on" and config.watermark is None:
        from .watermark import WatermarkParams

        config.watermark = WatermarkParams()
    if args.output is not None:
        config.output_dir = args.output
    if args.paraphraser is not None:
        keep = [p for p in config.paraphrasers if p["name"] == args.paraphraser]
        if not keep:
            raise ConfigError(f"no configured paraphraser named {args.paraphraser!r}")
        config.paraphrasers = keep
    if args.pairing is not None:
        if args.pairing not in PAIRING_NUMERALS:
            raise ConfigError(f"unknown pairing {args.pairing!r}; use i..v")
        config.pairings = [PAIRING_NUMERALS[args.pairing]]
    return config


def _cells_path(config: ExperimentConfig) -> Path:
    return RunPaths(config).reports / "cells.json"


def run_command(command: str, config: ExperimentConfig) -> None:
    paths = RunPaths(config)
    if command == "build-corpus":
        build_dir = runner.build_hlpc(config)
        print(f"corpus written to {build_dir}")
    elif command == "generate":
        for spec in config.sources:
            counts = runner.stage_generate(config, spec)
            print(f"{spec.name}: generated {counts}")
    elif command == "paraphrase":
        for spec in config.sources:
            counts = runner.stage_paraphrase(config, spec)
            print(f"{spec.name}: paraphrased {counts}")
    elif command == "similarity":
        rows = []
        for spec in config.sources:
            rows += runner.stage_similarity(config, spec)
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    elif command == "detect":
        paths.detections.mkdir(parents=True, exist_ok=True)
        for spec in config.sources:
            counts = runner.stage_detect(config, spec)
            print(f"{spec.name}: scored {counts}")
    elif command == "evaluate":
        bundle = runner.evaluate(config)
        paths.reports.mkdir(parents=True, exist_ok=True)
        runner.save_bundle(bundle, _cells_path(config))
        ok = sum(1 for c in bundle.cells if c.summary)
        print(f"evaluated {len(bundle.cells)} cells ({ok} ok) -> {_cells_path(config)}")
    elif command == "report":
        cells = _cells_path(config)
        if not cells.exists():
            raise ConfigError(f"missing {cells}; run `evaluate` first")
        manifest = runner.emit_report(runner.load_bundle(cells), paths.reports)
        print(f"report written to {paths.reports} (content hash {manifest['content_hash'][:12]})")
    elif command == "run-all":
        manifest = runner.run_all(config)
        print(f"run complete: {paths.reports} (content hash {manifest['content_hash'][:12]})")
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown command {command}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        run_command(args.command, config)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except WorkbenchError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
