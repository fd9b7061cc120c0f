"""
CSV and JSON writers for solutions, improvement traces and sweeps

Numbers are written with 15 significant digits and '.' as decimal separator.
Apart from the optional metadata header the output depends only on the inputs.
"""
import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence

from ..services.eigensolver import EigenSolution
from ..services.experiments import ContrastLimit, CounterexampleReport, TransitionScan
from ..services.radial_geometry import RadialSet
from ..services.rearrangement import ImprovementTrace, LowContrastResult
from ..utils.helpers import format_number, get_timestamp_string
from .schemas import ProfileDocument


SOLUTION_COLUMNS = ["r", "y", "y_prime", "sigma"]
TRACE_COLUMNS = ["step", "lambda", "high_measure", "intervals"]
SWEEP_COLUMNS = ["n", "A_fraction", "alpha", "beta", "rho", "rho_n", "lambda_ball",
                 "lambda_improved", "gap", "y2p1", "z", "verdict", "error"]


def metadata_header(command: str) -> str:
    return f"# twophase {command} generated {get_timestamp_string()}\n"


def _csv(columns: Sequence[str], rows: List[List[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([value if isinstance(value, str) else format_number(value) for value in row])
    return buffer.getvalue()


def _json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _number(value: Optional[float]):
    """JSON value carrying the same 15 digits as the CSV output"""
    if value is None or value != value:
        return None
    return float(format_number(value))


def _intervals(region: Optional[RadialSet]) -> List[List[float]]:
    if region is None:
        return []
    return [[_number(lo), _number(hi)] for lo, hi in region.intervals]


def _intervals_text(region: RadialSet) -> str:
    return ";".join(f"{format_number(lo)}:{format_number(hi)}" for lo, hi in region.intervals)


def solution_csv(sol: EigenSolution) -> str:
    """
    One row per solver node; interface radii appear twice, once per side

    Args:
        sol: Normalized eigen solution

    Returns:
        CSV text with columns r, y, y_prime, sigma
    """
    rows = [[r, y, yp, s] for r, y, yp, s in zip(sol.grid, sol.y, sol.y_prime, sol.sigma)]
    return f"# lambda={format_number(sol.lam)}\n" + _csv(SOLUTION_COLUMNS, rows)


def solution_json(sol: EigenSolution) -> str:
    return _json({
        "lambda": _number(sol.lam),
        "profile": ProfileDocument.from_profile(sol.profile).model_dump(),
        "flux_jumps": [_number(jump) for jump in sol.flux_jumps()],
        "r": [_number(v) for v in sol.grid],
        "y": [_number(v) for v in sol.y],
        "y_prime": [_number(v) for v in sol.y_prime],
        "sigma": [_number(v) for v in sol.sigma],
    })


def trace_csv(trace: ImprovementTrace) -> str:
    rows = [[k, step.lam, step.profile.high_measure, _intervals_text(step.profile.high_region())]
            for k, step in enumerate(trace.steps)]
    return _csv(TRACE_COLUMNS, rows)


def trace_json(trace: ImprovementTrace) -> str:
    return _json({
        "converged": trace.converged,
        "steps": [
            {
                "step": k,
                "lambda": _number(step.lam),
                "high_measure": _number(step.profile.high_measure),
                "intervals": _intervals(step.profile.high_region()),
            }
            for k, step in enumerate(trace.steps)
        ],
        "fixed_point": ProfileDocument.from_profile(trace.fixed_point).model_dump(),
    })


def _sweep_row(report: CounterexampleReport) -> List[Any]:
    return [report.dim, report.fraction, report.alpha, report.beta, report.rho, report.rho_n,
            report.lambda_ball, report.lambda_improved, report.gap, report.y2_prime_at_1,
            report.z, report.verdict.value, report.error]


def sweep_csv(reports: Sequence[CounterexampleReport]) -> str:
    return _csv(SWEEP_COLUMNS, [_sweep_row(report) for report in reports])


def report_dict(report: CounterexampleReport) -> Dict[str, Any]:
    return {
        "n": report.dim,
        "A": _number(report.A),
        "A_fraction": _number(report.fraction),
        "alpha": _number(report.alpha),
        "beta": _number(report.beta),
        "rho": _number(report.rho),
        "rho_n": _number(report.rho_n),
        "lambda_ball": _number(report.lambda_ball),
        "lambda_improved": _number(report.lambda_improved),
        "gap": _number(report.gap),
        "relative_gap": _number(report.relative_gap),
        "y2p1": _number(report.y2_prime_at_1),
        "z": _number(report.z),
        "y1p_rho": _number(report.y1_prime_at_rho),
        "y2p_rho": _number(report.y2_prime_at_rho),
        "psi_p_rho": _number(report.psi_prime_at_rho),
        "psi_p_1": _number(report.psi_prime_at_1),
        "d_n": _number(report.d_n),
        "verdict": report.verdict.value,
        "improved_set": _intervals(report.improved_set),
        "error": report.error,
    }


def sweep_json(reports: Sequence[CounterexampleReport]) -> str:
    return _json({"reports": [report_dict(report) for report in reports]})


def transition_json(scan: TransitionScan) -> str:
    return _json({
        "n": scan.dim,
        "contrast": _number(scan.contrast),
        "rho_n": _number(scan.rho_n),
        "rho_n_fraction": _number(scan.rho_n ** scan.dim),
        "first_refuted_fraction": _number(scan.first_refuted_fraction),
        "reports": [report_dict(report) for report in scan.reports],
    })


def contrast_limit_csv(table: ContrastLimit) -> str:
    columns = ["contrast", "boundary_deviation", "interface_deviation", "interface_jump",
               "interface_gap", "half_d_n", "gap_exceeds_half_d_n"]
    rows = [[row.contrast, row.boundary_deviation, row.interface_deviation, row.interface_jump,
             row.interface_gap, 0.5 * table.d_n, row.gap_exceeds_half_dn] for row in table.rows]
    return _csv(columns, rows)


def low_contrast_json(dim: int, result: LowContrastResult) -> str:
    return _json({
        "n": dim,
        "t": _number(result.t),
        "measure": _number(result.achieved_measure),
        "intervals": _intervals(result.region),
        "shape": result.shape.value,
        "ball_transition_measure": _number(result.ball_transition_measure),
        "touch_transition_measure": _number(result.touch_transition_measure),
    })
