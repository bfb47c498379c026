"""Command-line entry point: ``renyi-bounds <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, ExperimentConfig, emit, emit_json, load
from .experiments import RUNNERS, DominanceViolation, InfeasibleParameters
from .linalg import DimensionError

EXIT_OK = 0
EXIT_ACCEPTANCE_FAILED = 1
EXIT_DOMINANCE = 2
EXIT_INFEASIBLE = 3
EXIT_CONFIG = 4

log = logging.getLogger("renyi_bounds")

EXPERIMENT_COMMANDS = ("quench", "lr-probe", "tail-bound", "negativity")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key=value or JSON config file")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--threads", type=int, default=1, help="worker threads over grid cells")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--graph-lr", action="store_true", help="use t' = 2Jt instead of 4Jt")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renyi-bounds", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENT_COMMANDS:
        _common(sub.add_parser(name, help=f"run the {name} experiment"))
    va = sub.add_parser("verify-all", help="run the acceptance criteria and print one line each")
    va.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    va.add_argument("-v", "--verbose", action="store_true")
    tpl = sub.add_parser("emit-config-template", help="print a commented default config")
    tpl.add_argument("--experiment", choices=EXPERIMENT_COMMANDS, default="quench")
    tpl.add_argument("--format", choices=("csv", "json"), default="csv", help="json gives the JSON mirror")
    tpl.add_argument("--out", type=Path)
    return parser


def _resolve_config(args) -> ExperimentConfig:
    cfg = load(args.config) if args.config else ExperimentConfig(experiment=args.command)
    changes = {"experiment": args.command}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.graph_lr:
        changes["graph_lr"] = True
    if args.format:
        changes["output_format"] = args.format
    if args.out:
        changes["output_path"] = str(args.out)
    return replace(cfg, **changes)


def _write(text: str, path: str | Path | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _run_experiment(args) -> int:
    cfg = _resolve_config(args)
    log.info("running %s", cfg.experiment)
    table = RUNNERS[cfg.experiment](cfg, max(1, args.threads))
    _write(table.render(cfg.output_format), cfg.output_path)
    return EXIT_OK


def _verify_all(args) -> int:
    from .acceptance import run_all

    results = run_all(args.only)
    for res in results:
        print(res.line(), flush=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE_FAILED


def _emit_template(args) -> int:
    cfg = ExperimentConfig(experiment=args.experiment)
    _write(emit_json(cfg) if args.format == "json" else emit(cfg, with_docs=True), args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify-all":
            return _verify_all(args)
        if args.command == "emit-config-template":
            return _emit_template(args)
        return _run_experiment(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except DominanceViolation as exc:
        log.error("dominance violation: %s", exc)
        return EXIT_DOMINANCE
    except (InfeasibleParameters, DimensionError) as exc:
        log.error("infeasible parameters: %s", exc)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
