import argparse
import sys
from pathlib import Path

from src.cli import commands
from src.cli.verification import CASES
from src.core.exceptions import PursuitError, ScenarioError
from src.shared import constants
from src.shared.logger import get_logger
from src.shared.models import parse_real

logger = get_logger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; usage errors are configuration errors here."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(constants.EXIT_CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def _real(text: str) -> float:
    try:
        return float(parse_real(text))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number or pi multiple: {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pursuit", description="Pure-pursuit simulator for circular and elliptical evaders")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    simulate = sub.add_parser("simulate", help="Integrate a scenario and write the trajectory CSV plus a summary")
    simulate.add_argument("--config", required=True, type=Path, help="Scenario file (key=value)")
    simulate.add_argument("--out", type=Path, default=None, help="Output directory")

    portrait = sub.add_parser("portrait", help="Write phase-portrait samples, its SVG plot and the (x, y) trajectory plot")
    portrait.add_argument("--config", required=True, type=Path)
    portrait.add_argument("--out", type=Path, default=None)
    portrait.add_argument("--axis", choices=["rho", "mu"], default="rho", help="Horizontal axis: rho or mu = log rho")
    portrait.add_argument("--discard", type=float, default=0.0, help="phi length of transient to drop")

    orbit = sub.add_parser("orbit", help="Find the pi-periodic orbit (0 < n < 1)")
    orbit.add_argument("--config", required=True, type=Path)
    orbit.add_argument("--out", type=Path, default=None)
    orbit.add_argument(
        "--all-seeds", action="store_true", help="Also iterate the four canonical seeds and plot their convergence"
    )
    orbit.add_argument("--seed-span", type=_real, default=None, help="phi length of the seed runs, e.g. 20pi")

    capture = sub.add_parser("capture", help="Measured capture against the analytic bounds")
    capture.add_argument("--config", required=True, type=Path)
    capture.add_argument("--out", type=Path, default=None)

    verify = sub.add_parser("verify", help="Run the acceptance suite")
    verify.add_argument("--case", type=int, action="append", choices=sorted(CASES), help="Run only this case (repeatable)")
    verify.add_argument("--out", type=Path, default=None, help="Write per-case trajectories under this directory")
    verify.add_argument("--bound-scale", type=float, default=1.0, help="Scale the capture upper bound (negative control)")
    verify.add_argument("--workers", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": lambda: commands.cmd_simulate(args.config, args.out),
        "portrait": lambda: commands.cmd_portrait(args.config, args.out, args.axis, args.discard),
        "orbit": lambda: commands.cmd_orbit(args.config, args.out, args.all_seeds, seed_span=args.seed_span),
        "capture": lambda: commands.cmd_capture(args.config, args.out),
        "verify": lambda: commands.cmd_verify(args.case, args.out, args.bound_scale, args.workers),
    }
    try:
        return handlers[args.command]()
    except ScenarioError as e:
        logger.error(f"Configuration error: {e}")
        return constants.EXIT_CONFIG_ERROR
    except PursuitError as e:
        logger.error(f"Numerical failure: {e}")
        return constants.EXIT_NUMERICAL_FAILURE
