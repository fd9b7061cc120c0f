"""
Counterexample experiments for the centred-ball conjecture

For a ball D0 = B(0, rho) of high conductivity, one rearrangement step moves
part of the high material to a shell touching r = 1 whenever |y'(1)| lies
below the maximum of |y'| on [0, rho]. At low contrast this happens whenever
rho exceeds the critical radius rho_n, and the step then lowers lambda.
"""
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..exceptions import DomainError, TwoPhaseError
from ..utils.config import get_settings, use_config
from ..utils.logging_config import LogContext
from .critical_radius import ground_state, psi_prime_abs, rho_n
from .eigensolver import EigenSolution, Material, RadialProfile, principal_eigenvalue
from .radial_geometry import RadialSet, VolumeSpec, ball_radius_for_volume
from .rearrangement import improve


VERDICT_BAND = 10.0


class Verdict(str, Enum):
    REFUTED = "refuted"
    NOT_REFUTED = "not_refuted"
    INCONCLUSIVE = "inconclusive"
    ERROR = "error"


@dataclass(frozen=True)
class CounterexampleReport:
    """Outcome of one rearrangement step applied to the centred ball"""

    dim: int
    A: float
    fraction: float
    alpha: float
    beta: float
    rho: float = float("nan")
    rho_n: float = float("nan")
    lambda_ball: float = float("nan")
    lambda_improved: float = float("nan")
    improved_set: Optional[RadialSet] = None
    y2_prime_at_1: float = float("nan")     # |y'(1)|, outer piece
    z: float = float("nan")                 # max |y'| on [0, rho]
    y1_prime_at_rho: float = float("nan")   # |y'(rho-)|
    y2_prime_at_rho: float = float("nan")   # |y'(rho+)|
    psi_prime_at_rho: float = float("nan")
    psi_prime_at_1: float = float("nan")
    d_n: float = float("nan")
    verdict: Verdict = Verdict.ERROR
    error: str = ""

    @property
    def gap(self) -> float:
        return self.lambda_ball - self.lambda_improved

    @property
    def relative_gap(self) -> float:
        return self.gap / self.lambda_ball

    @property
    def boundary_below_max(self) -> bool:
        """|y'(1)| < z: the sublevel set reaches the outer sphere"""
        return self.y2_prime_at_1 < self.z


@dataclass(frozen=True)
class TransitionScan:
    dim: int
    contrast: float
    rho_n: float
    reports: Tuple[CounterexampleReport, ...]
    first_refuted_fraction: Optional[float] = None


@dataclass(frozen=True)
class LimitRow:
    contrast: float
    boundary_deviation: float    # ||y2'(1)| - |psi'(1)||
    interface_deviation: float   # ||y2'(rho)| - |psi'(rho)||
    interface_jump: float        # ||y2'(rho)| - |y1'(rho)||
    interface_gap: float         # ||y2'(rho)| - |y2'(1)||
    gap_exceeds_half_dn: bool


@dataclass(frozen=True)
class ContrastLimit:
    dim: int
    fraction: float
    d_n: float
    rows: Tuple[LimitRow, ...] = field(default_factory=tuple)

    @property
    def deviations_decrease(self) -> bool:
        """Deviations shrink as the contrast approaches 1 (rows ordered by decreasing contrast)"""
        boundary = [row.boundary_deviation for row in self.rows]
        interface = [row.interface_deviation for row in self.rows]
        return all(a > b for a, b in zip(boundary, boundary[1:])) and \
            all(a > b for a, b in zip(interface, interface[1:]))


def ball_profile(dim: int, spec: VolumeSpec, alpha: float, beta: float) -> RadialProfile:
    """
    High material on the centred ball of volume A, low material outside

    Args:
        dim: Dimension n
        spec: Volume of the high region
        alpha: Low conductivity
        beta: High conductivity, beta >= alpha

    Returns:
        Two-layer profile with interface at rho = (A / omega_n)^(1/n)
    """
    if spec.dim != dim:
        raise DomainError(f"volume spec dimension {spec.dim} differs from n={dim}")
    if not (0.0 < alpha <= beta):
        raise DomainError(f"conductivities must satisfy 0 < alpha <= beta, got alpha={alpha}, beta={beta}")
    rho = ball_radius_for_volume(spec)
    return RadialProfile.build(dim, alpha, beta, [(rho, Material.HIGH), (1.0, Material.LOW)])


def _max_inner_gradient(sol: EigenSolution, rho: float) -> float:
    z = 0.0
    for piece in sol.pieces:
        if piece.r_lo >= rho:
            break
        z = max(z, float(np.max(np.abs(piece.y_prime[piece.r <= rho]))))
    return z


def _one_sided(sol: EigenSolution, r: float, side: str) -> float:
    for piece in sol.pieces:
        if (side == "left" and piece.r_hi == r) or (side == "right" and piece.r_lo == r):
            index = -1 if side == "left" else 0
            return abs(float(piece.y_prime[index]))
    return abs(float(sol.gradient_curve(r, side)))


def _verdict(profile: RadialProfile, improved: RadialProfile, lambda_ball: float,
             lambda_improved: float, tol: float) -> Verdict:
    if profile.alpha == profile.beta:
        return Verdict.NOT_REFUTED
    band = VERDICT_BAND * tol * lambda_ball
    gap = lambda_ball - lambda_improved
    if abs(gap) <= band:
        return Verdict.INCONCLUSIVE
    if gap > band and not improved.high_region().is_centered_ball():
        return Verdict.REFUTED
    return Verdict.NOT_REFUTED


def check_counterexample(dim: int, spec: VolumeSpec, alpha: float, beta: float,
                         tol: Optional[float] = None) -> CounterexampleReport:
    """
    Solve on the centred ball, apply one rearrangement step and compare

    Args:
        dim: Dimension n
        spec: Volume A of the high region
        alpha: Low conductivity
        beta: High conductivity
        tol: Eigenvalue tolerance (default from settings)

    Returns:
        CounterexampleReport; verdict is refuted when lambda drops by more
        than 10 tol lambda and the improved set is no longer a centred ball
    """
    tol = get_settings().solver_tol if tol is None else float(tol)
    profile = ball_profile(dim, spec, alpha, beta)
    rho = profile.layers[0].r_outer

    with LogContext(f"counterexample n={dim} A/omega={spec.fraction:.6g} beta/alpha={beta / alpha:.6g}") as ctx:
        improved, sol_ball = improve(profile, spec, tol)
        lambda_improved = sol_ball.lam if improved is profile else principal_eigenvalue(improved, tol).lam
        ctx.details.update(lambda_ball=sol_ball.lam, lambda_improved=lambda_improved)

    gs = ground_state(dim)
    psi_rho, psi_1 = psi_prime_abs(gs, rho), psi_prime_abs(gs, 1.0)
    verdict = _verdict(profile, improved, sol_ball.lam, lambda_improved, tol)
    report = CounterexampleReport(
        dim=dim,
        A=spec.A,
        fraction=spec.fraction,
        alpha=alpha,
        beta=beta,
        rho=rho,
        rho_n=rho_n(dim),
        lambda_ball=sol_ball.lam,
        lambda_improved=lambda_improved,
        improved_set=improved.high_region(),
        y2_prime_at_1=abs(float(sol_ball.pieces[-1].y_prime[-1])),
        z=_max_inner_gradient(sol_ball, rho),
        y1_prime_at_rho=_one_sided(sol_ball, rho, "left"),
        y2_prime_at_rho=_one_sided(sol_ball, rho, "right"),
        psi_prime_at_rho=psi_rho,
        psi_prime_at_1=psi_1,
        d_n=psi_rho - psi_1,
        verdict=verdict,
    )
    logger.info(f"n={dim} rho={rho:.6g} (rho_n={report.rho_n:.6g}) beta/alpha={beta / alpha:.6g}: "
                f"lambda {report.lambda_ball:.12g} -> {report.lambda_improved:.12g}, {verdict.value}")
    return report


def _sweep_point(point: Tuple[int, float, float]) -> CounterexampleReport:
    dim, fraction, contrast = point
    try:
        spec = VolumeSpec.from_fraction(dim, fraction)
        return check_counterexample(dim, spec, 1.0, contrast)
    except TwoPhaseError as e:
        logger.error(f"Grid point n={dim} fraction={fraction} contrast={contrast} failed: {e.message}")
        return CounterexampleReport(dim=dim, A=float("nan"), fraction=fraction, alpha=1.0, beta=contrast,
                                    error=f"{type(e).__name__}: {e.message}")
    except Exception as e:
        logger.exception(f"Grid point n={dim} fraction={fraction} contrast={contrast} failed unexpectedly")
        return CounterexampleReport(dim=dim, A=float("nan"), fraction=fraction, alpha=1.0, beta=contrast,
                                    error=f"{type(e).__name__}: {e}")


def sweep(dims: Sequence[int], fractions: Sequence[float], contrasts: Sequence[float],
          workers: Optional[int] = None, config_path: Optional[str] = None) -> List[CounterexampleReport]:
    """
    Run check_counterexample over the product grid with alpha = 1, beta = contrast

    Args:
        dims: Dimensions
        fractions: High-region volumes as fractions of omega_n
        contrasts: beta/alpha values
        workers: Process count (default from settings); 1 runs in-process
        config_path: YAML file the worker processes load

    Returns:
        One report per requested grid point, repeats included, in
        lexicographic (dim, fraction, contrast) order; failed points carry
        the error and verdict "error"
    """
    if not dims or not fractions or not contrasts:
        raise DomainError("sweep grids must be nonempty")
    workers = get_settings().experiments_workers if workers is None else int(workers)
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")

    grid = list(itertools.product(sorted(int(d) for d in dims),
                                  sorted(float(f) for f in fractions),
                                  sorted(float(c) for c in contrasts)))
    logger.info(f"Sweep over {len(grid)} grid points with {workers} worker(s)")

    if workers == 1 or len(grid) == 1:
        return [_sweep_point(point) for point in grid]
    with ProcessPoolExecutor(max_workers=workers, initializer=use_config, initargs=(config_path,)) as pool:
        return list(pool.map(_sweep_point, grid))


def transition_scan(dim: int, contrast: float, fractions: Sequence[float],
                    workers: Optional[int] = None) -> TransitionScan:
    """
    Verdicts along a fraction scan at fixed contrast, with the first refuted fraction

    At low contrast the flip lies below rho_n^n, near the touch radius where
    the sublevel sets of |psi'| first reach the outer sphere.
    """
    reports = sweep([dim], fractions, [contrast], workers)
    first = next((r.fraction for r in reports if r.verdict == Verdict.REFUTED), None)
    critical = rho_n(dim)
    logger.info(f"n={dim} beta/alpha={contrast}: first refuted fraction {first}, rho_n^n={critical ** dim:.6g}")
    return TransitionScan(dim, contrast, critical, tuple(reports), first)


def contrast_limit(dim: int, fraction: float, contrasts: Optional[Sequence[float]] = None) -> ContrastLimit:
    """
    Gradient data of the ball eigenfunction as beta/alpha approaches 1

    |y'(1)| and |y'(rho+)| tend to |psi'(1)| and |psi'(rho)|, and the jump at
    rho closes, so ||y'(rho+)| - |y'(1)|| ends up above d_n / 2.

    Args:
        dim: Dimension n
        fraction: Ball volume as a fraction of omega_n
        contrasts: beta/alpha values (default from settings)

    Returns:
        ContrastLimit with rows ordered by decreasing contrast
    """
    contrasts = get_settings().experiments_contrasts if contrasts is None else contrasts
    if not contrasts or any(c < 1.0 for c in contrasts):
        raise DomainError("contrasts must be a nonempty list of values >= 1")
    spec = VolumeSpec.from_fraction(dim, fraction)
    gs = ground_state(dim)
    rows = []
    d_n = float("nan")
    for contrast in sorted(set(contrasts), reverse=True):
        profile = ball_profile(dim, spec, 1.0, contrast)
        rho = profile.layers[0].r_outer
        sol = principal_eigenvalue(profile)
        psi_rho, psi_1 = psi_prime_abs(gs, rho), psi_prime_abs(gs, 1.0)
        d_n = psi_rho - psi_1
        y2_1 = abs(float(sol.pieces[-1].y_prime[-1]))
        y1_rho, y2_rho = _one_sided(sol, rho, "left"), _one_sided(sol, rho, "right")
        rows.append(LimitRow(
            contrast=contrast,
            boundary_deviation=abs(y2_1 - psi_1),
            interface_deviation=abs(y2_rho - psi_rho),
            interface_jump=abs(y2_rho - y1_rho),
            interface_gap=abs(y2_rho - y2_1),
            gap_exceeds_half_dn=abs(y2_rho - y2_1) > 0.5 * d_n,
        ))
    return ContrastLimit(dim, fraction, d_n, tuple(rows))
