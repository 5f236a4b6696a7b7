#!/usr/bin/env python3
"""
chodim command-line entry point

    chodim simulate  --config run.json [--serial] [--seed N] [--out DIR]
    chodim check     {energy,tangent,liouville,metric-identity} --config run.json
    chodim dimension --config run.json
    chodim lyapunov  --config run.json
    chodim selftest

Exit codes: 0 success, 1 configuration error, 2 inconclusive,
3 hypothesis, metric or bound failure, 4 numerical blow-up, 5 residual check failure,
6 internal error.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import List, Optional

from chodim import __version__
from chodim.commands import CHECK_SUITES, cmd_check, cmd_dimension, cmd_lyapunov, cmd_selftest, cmd_simulate
from chodim.core.config import settings
from chodim.core.dependencies import get_executor
from chodim.core.exceptions import ChodimBaseException, HypothesisValidationError, InternalError
from chodim.core.logging import configure_logging
from chodim.models.run_config import SEED_LIMIT, RunConfig

logger = logging.getLogger(__name__)

COMMANDS = {
    "simulate": cmd_simulate,
    "dimension": cmd_dimension,
    "lyapunov": cmd_lyapunov,
    "selftest": cmd_selftest,
}


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < SEED_LIMIT:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {value}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration JSON (defaults apply when omitted)")
    common.add_argument("--serial", action="store_true", help="Force the in-thread, bit-reproducible path")
    common.add_argument("--seed", type=_seed, help="Override the configured seed")
    common.add_argument("--out", help="Directory to write results")
    common.add_argument("--log-level", help="Override CHODIM_LOG_LEVEL")

    parser = argparse.ArgumentParser(prog="chodim", description="Volume contraction lab for the hyperbolic CHO equation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="Integrate and write snapshots plus the energy CSV")
    check = sub.add_parser("check", parents=[common], help="Run one residual suite")
    check.add_argument("which", choices=CHECK_SUITES)
    sub.add_parser("dimension", parents=[common], help="Dimension bound from volume contraction")
    sub.add_parser("lyapunov", parents=[common], help="Lyapunov spectrum and Kaplan-Yorke dimension")
    sub.add_parser("selftest", parents=[common], help="Quick residual checks on tiny sizes")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    return config.with_overrides(seed=args.seed, output_dir=args.out)


def write_error(exc: ChodimBaseException, out_dir: Path) -> Optional[Path]:
    """Diagnostic JSON next to the run outputs"""
    payload = exc.to_dict()
    if isinstance(exc, HypothesisValidationError) and exc.witness is not None:
        payload["witness"] = exc.witness
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "error.json"
        path.write_text(json.dumps(payload, indent=2, default=str))
        return path
    except OSError as e:
        logger.error("could not write error.json: %s", e)
        return None


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger.debug("settings: %s", settings.get_all_settings())
    out_dir = Path(args.out or settings.OUTPUT_DIR)
    try:
        config = load_config(args)
        out_dir = Path(config.output_dir or settings.OUTPUT_DIR)
        executor = get_executor(True if args.serial else None)
        if args.command == "check":
            manifest = cmd_check(config, args.which, executor)
        else:
            manifest = COMMANDS[args.command](config, executor)
        logger.info("%s finished, manifest at %s", args.command, manifest)
        return 0
    except ChodimBaseException as exc:
        logger.error("%s: %s", exc.error_code, exc.message)
        write_error(exc, out_dir)
        return exc.exit_code
    except Exception as exc:
        logger.exception("unexpected error")
        internal = InternalError(details={"error": str(exc)})
        write_error(internal, out_dir)
        return internal.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
