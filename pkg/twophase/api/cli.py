"""
Command-line frontend

    python -m twophase rho-n --dim 3
    python -m twophase eigen --profile ball.json --out csv
    python -m twophase sweep --dims 2,3 --fractions 0.3,0.7 --contrasts 1.01,1.05 --out sweep.csv

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from loguru import logger

from ..exceptions import EXIT_OK, EXIT_VALIDATION, TwoPhaseError, ValidationError
from ..services import experiments, rearrangement
from ..services.critical_radius import critical_point, touch_radius
from ..services.eigensolver import RadialProfile, principal_eigenvalue
from ..services.radial_geometry import VolumeSpec
from ..services.special_functions import bessel_j, bessel_j_prime, bessel_zero
from ..utils.config import use_config
from ..utils.helpers import format_number, get_timestamp_string, parse_number_list
from ..utils.logging_config import setup_logging
from . import export
from .schemas import dump_profile, load_profile


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as ValidationError"""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _number_list(cast):
    def parse(text: str):
        try:
            return parse_number_list(text, cast)
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}: {e}")
    return parse


def _add_volume(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--fraction", type=float, help="high-region volume as a fraction of the unit ball")
    group.add_argument("--measure", type=float, help="absolute high-region volume A")


def _add_output(parser: argparse.ArgumentParser, formats=("csv", "json")) -> None:
    parser.add_argument("--out", choices=formats, help="emit full data in this format")
    parser.add_argument("--output", help="write the data to FILE instead of stdout")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="twophase", description="Two-phase radial conductor eigenvalue toolkit")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--log-level", help="log level for stderr (default from configuration)")
    parser.add_argument("--metadata", action="store_true", help="prefix output with a timestamp header")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = commands.add_parser("bessel", help="evaluate J_nu(x)")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--derivative", action="store_true", help="evaluate J'_nu(x) instead")

    p = commands.add_parser("zero", help="m-th positive zero of J_nu")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--m", type=int, required=True)

    p = commands.add_parser("rho-n", help="critical radius of the Laplacian ground state")
    p.add_argument("--dim", type=int, required=True)

    p = commands.add_parser("eigen", help="principal eigenvalue of a profile document")
    p.add_argument("--profile", required=True)
    p.add_argument("--tol", type=float)
    _add_output(p)

    for name, help_text in (("improve", "rearrangement steps, prints the resulting profile"),
                            ("optimize", "iterate rearrangement steps, prints the trace")):
        p = commands.add_parser(name, help=help_text)
        p.add_argument("--profile", required=True)
        _add_volume(p, required=False)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--tol", type=float)
        if name == "optimize":
            _add_output(p)
        else:
            p.add_argument("--output")

    p = commands.add_parser("lowcontrast", help="sublevel set of the Laplacian ground state gradient")
    p.add_argument("--dim", type=int, required=True)
    _add_volume(p, required=True)
    p.add_argument("--output")

    p = commands.add_parser("counterexample", help="one rearrangement step on the centred ball")
    p.add_argument("--dim", type=int, required=True)
    _add_volume(p, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--output")

    p = commands.add_parser("sweep", help="counterexample checks over a parameter grid")
    p.add_argument("--dims", type=_number_list(int), required=True)
    p.add_argument("--fractions", type=_number_list(float), required=True)
    p.add_argument("--contrasts", type=_number_list(float), required=True)
    p.add_argument("--out", required=True, help="output FILE (.csv or .json)")
    p.add_argument("--workers", type=int)

    p = commands.add_parser("transition", help="verdict scan over fractions at fixed contrast")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--contrast", type=float, required=True)
    p.add_argument("--fractions", type=_number_list(float), required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--output")

    p = commands.add_parser("limit", help="ball gradient data as the contrast approaches 1")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--contrasts", type=_number_list(float))
    p.add_argument("--output")
    return parser


def _volume(args: argparse.Namespace, dim: int, default: Optional[float] = None) -> VolumeSpec:
    if args.measure is not None:
        return VolumeSpec(dim, args.measure)
    if args.fraction is not None:
        return VolumeSpec.from_fraction(dim, args.fraction)
    return VolumeSpec(dim, default)


def _emit(args: argparse.Namespace, text: str, kind: str = "text", output: Optional[str] = None) -> None:
    if args.metadata:
        if kind == "json":
            payload = {"metadata": {"command": args.command, "generated": get_timestamp_string()}}
            payload.update(json.loads(text))
            text = json.dumps(payload, indent=2) + "\n"
        else:
            text = export.metadata_header(args.command) + text
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {args.command} output to {output}")
    else:
        sys.stdout.write(text)


def _lines(**values) -> str:
    return "".join(f"{key}={format_number(value)}\n" for key, value in values.items())


def cmd_bessel(args) -> None:
    value = bessel_j_prime(args.nu, args.x) if args.derivative else bessel_j(args.nu, args.x)
    _emit(args, f"{format_number(value)}\n")


def cmd_zero(args) -> None:
    _emit(args, f"{format_number(bessel_zero(args.nu, args.m))}\n")


def cmd_rho_n(args) -> None:
    rho, t_star = critical_point(args.dim)
    _emit(args, _lines(rho_n=rho, t_star=t_star, touch_radius=touch_radius(args.dim)))


def cmd_eigen(args) -> None:
    profile = load_profile(args.profile)
    sol = principal_eigenvalue(profile, args.tol)
    if args.out == "csv":
        _emit(args, export.solution_csv(sol), "csv", args.output)
    elif args.out == "json":
        _emit(args, export.solution_json(sol), "json", args.output)
    else:
        _emit(args, _lines(**{"lambda": sol.lam}), output=args.output)


def _start(args) -> Tuple[RadialProfile, VolumeSpec]:
    profile = load_profile(args.profile)
    return profile, _volume(args, profile.dim, profile.high_measure)


def cmd_improve(args) -> None:
    profile, spec = _start(args)
    steps = 1 if args.max_iter is None else args.max_iter
    if steps < 1:
        raise ValidationError(f"--max-iter must be >= 1, got {steps}")
    for _ in range(steps):
        improved, sol = rearrangement.improve(profile, spec, args.tol)
        logger.info(f"lambda {sol.lam:.15g}, high region {improved.high_region().intervals}")
        if improved is profile:
            break
        profile = improved
    _emit(args, dump_profile(profile), "json", args.output)


def cmd_optimize(args) -> None:
    profile, spec = _start(args)
    trace = rearrangement.optimize(profile, spec, args.max_iter, solver_tol=args.tol)
    if args.out == "json":
        _emit(args, export.trace_json(trace), "json", args.output)
    else:
        _emit(args, export.trace_csv(trace), "csv", args.output)


def cmd_lowcontrast(args) -> None:
    result = rearrangement.low_contrast_optimizer(args.dim, _volume(args, args.dim))
    _emit(args, export.low_contrast_json(args.dim, result), "json", args.output)


def cmd_counterexample(args) -> None:
    report = experiments.check_counterexample(args.dim, _volume(args, args.dim), args.alpha, args.beta, args.tol)
    _emit(args, json.dumps(export.report_dict(report), indent=2) + "\n", "json", args.output)


def cmd_sweep(args) -> None:
    reports = experiments.sweep(args.dims, args.fractions, args.contrasts, args.workers, args.config)
    if args.out.endswith(".json"):
        _emit(args, export.sweep_json(reports), "json", args.out)
    else:
        _emit(args, export.sweep_csv(reports), "csv", args.out)
    failed = sum(1 for report in reports if report.error)
    if failed:
        logger.warning(f"{failed} of {len(reports)} grid points failed")


def cmd_transition(args) -> None:
    scan = experiments.transition_scan(args.dim, args.contrast, args.fractions, args.workers)
    _emit(args, export.transition_json(scan), "json", args.output)


def cmd_limit(args) -> None:
    table = experiments.contrast_limit(args.dim, args.fraction, args.contrasts)
    _emit(args, export.contrast_limit_csv(table), "csv", args.output)


COMMANDS: Dict[str, Callable[[argparse.Namespace], None]] = {
    "bessel": cmd_bessel,
    "zero": cmd_zero,
    "rho-n": cmd_rho_n,
    "eigen": cmd_eigen,
    "improve": cmd_improve,
    "optimize": cmd_optimize,
    "lowcontrast": cmd_lowcontrast,
    "counterexample": cmd_counterexample,
    "sweep": cmd_sweep,
    "transition": cmd_transition,
    "limit": cmd_limit,
}


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse `argv`, run the subcommand and return the exit code

    Errors are reported as one line on stderr: "error: <Class>: <message>".
    """
    try:
        args = build_parser().parse_args(argv)
        settings = use_config(args.config)
        setup_logging(args.log_level or settings.logging_level, settings.logging_dir)
        COMMANDS[args.command](args)
    except TwoPhaseError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e.message}\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())
