"""
RCPP Command Line
-----------------
    python -m harness.cli run --config params.yaml
    python -m harness.cli suite --config configs/compressor_comparison.yaml
    python -m harness.cli theory --config params.yaml --suggest
    python -m harness.cli estimate-compressor --config params.yaml --chain x

Exit status: 0 on success, 1 on divergence, invalid configuration or
missing theory constants.
"""

import argparse
import json
import logging
import os
import sys
from typing import Optional

import numpy as np
from pydantic import ValidationError

from compressors.constants import estimate_constants
from graph.mixing import ConvergenceError
from harness.config import ConfigError, load_config, parse_override
from harness.csv_io import atomic_write_text
from harness.experiment import run_experiment
from harness.suite import load_suite, run_suite
from harness.theory_report import print_theory
from problems.base import SolverError, UnsupportedMetricError

logger = logging.getLogger("rcpp")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="Experiment (or suite) YAML file")
    parser.add_argument("--out", default=None, help="Output directory (overrides the config)")
    parser.add_argument("--seed", type=int, default=None, help="Overrides experiment.seed")
    parser.add_argument("--record-every", type=int, default=None, help="Overrides algorithm.record_every")
    parser.add_argument("--svg", choices=["on", "off"], default=None)
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="Dotted config override, e.g. algorithm.gamma_x=0.3 (repeatable)",
    )
    parser.add_argument("--verbose", action="store_true", help="Per-iteration progress at DEBUG level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcpp", description="Robust compressed push-pull simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("run", help="Run one experiment"))
    _common(sub.add_parser("suite", help="Run a suite of experiment variants"))

    theory = sub.add_parser("theory", help="Report step-size bounds and rates")
    _common(theory)
    theory.add_argument("--suggest", action="store_true", help="Also print heuristic norm constants")

    est = sub.add_parser("estimate-compressor", help="Estimate compression contract constants")
    _common(est)
    est.add_argument("--chain", choices=["x", "y"], default="x")
    est.add_argument("--samples", type=int, default=8000)
    est.add_argument("--input-scale", type=float, default=10.0)
    est.add_argument("--dim", type=int, default=None, help="Defaults to problem.p")
    return parser


def _overrides(args) -> dict:
    overrides = dict(parse_override(item) for item in args.set)
    if args.seed is not None:
        overrides["experiment.seed"] = args.seed
    if args.record_every is not None:
        overrides["algorithm.record_every"] = args.record_every
    return overrides


def _svg(args) -> Optional[bool]:
    return None if args.svg is None else args.svg == "on"


def cmd_run(args) -> int:
    config = load_config(args.config, _overrides(args))
    result = run_experiment(config, out_dir=args.out, svg=_svg(args))
    return result.status


def cmd_suite(args) -> int:
    suite, base = load_suite(args.config, _overrides(args))
    status, _ = run_suite(suite, base, out_dir=args.out, svg=_svg(args))
    return status


def cmd_theory(args) -> int:
    config = load_config(args.config, _overrides(args))
    return print_theory(config, suggest=args.suggest)


def cmd_estimate(args) -> int:
    config = load_config(args.config, _overrides(args))
    spec = config.algorithm.x_compressor if args.chain == "x" else config.algorithm.y_compressor
    dim = args.dim or config.problem.p
    rng = np.random.default_rng(config.experiment.seed)
    constants = estimate_constants(spec, dim, config.algorithm.r, args.samples, args.input_scale, rng)
    out_dir = args.out or config.experiment.out_dir
    path = os.path.join(out_dir, "compression_constants.json")
    payload = {"spec": spec.model_dump(mode="json"), "label": spec.label(), **constants.to_dict()}
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info(f"Compression constants written to {path}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "suite": cmd_suite,
    "theory": cmd_theory,
    "estimate-compressor": cmd_estimate,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        handlers=[logging.StreamHandler()],
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration:\n{e}")
    except FileNotFoundError as e:
        logger.error(str(e))
    except (ConvergenceError, SolverError, UnsupportedMetricError) as e:
        logger.error(f"{type(e).__name__}: {e}")
    except ValueError as e:
        # malformed inputs referenced by the config: edge lists, datasets, codec domains
        logger.error(f"{type(e).__name__}: {e}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
