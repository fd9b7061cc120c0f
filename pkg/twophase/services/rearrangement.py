"""
Rearrangement step for the two-phase eigenvalue problem

For a fixed eigenfunction u0 the energy int sigma |grad u0|^2 is minimized
over the rearrangement class by placing the high conductivity where
|grad u0| is smallest: D1 = {|grad u0| <= t} with |D1| = A. Solving again on
D1 never raises the eigenvalue, and lowers it strictly whenever D1 != D0.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from ..exceptions import DomainError
from ..utils.config import get_settings
from .critical_radius import ground_state, psi_prime_abs, rho_n, touch_radius
from .eigensolver import EigenSolution, RadialProfile, gradient_energy, principal_eigenvalue
from .radial_geometry import (
    CurveSegment,
    RadialCurve,
    RadialSet,
    VolumeSpec,
    membership_mask,
    unit_ball_volume,
)


THRESHOLD_STOL = 1e-12
MEASURE_RTOL = 1e-10
GROUND_STATE_SAMPLES = 2049


class SetShape(str, Enum):
    CENTERED_BALL = "centered_ball"
    BALL_AND_BOUNDARY_ANNULUS = "ball_and_boundary_annulus"
    WHOLE_BALL = "whole_ball"
    OTHER = "other"


def classify(region: RadialSet) -> SetShape:
    """Shape of a sublevel set: centred ball, ball plus outer shell, ..."""
    if region.is_centered_ball():
        return SetShape.CENTERED_BALL
    if len(region.intervals) == 1 and region.intervals[0] == (0.0, 1.0):
        return SetShape.WHOLE_BALL
    if (len(region.intervals) == 2 and region.intervals[0][0] == 0.0
            and region.touches_boundary()):
        return SetShape.BALL_AND_BOUNDARY_ANNULUS
    return SetShape.OTHER


@dataclass(frozen=True)
class ThresholdResult:
    """Threshold t on |grad u0| and the sublevel set D1 = {|grad u0| <= t}"""

    t: float
    region: RadialSet
    achieved_measure: float


@dataclass(frozen=True)
class LowContrastResult(ThresholdResult):
    """Sublevel set of the Laplacian ground state gradient with its classification"""

    shape: SetShape = SetShape.OTHER
    ball_transition_measure: float = 0.0   # |B(0, rho_n)|
    touch_transition_measure: float = 0.0  # |B(0, a*)|, |psi'(a*)| = |psi'(1)|


@dataclass(frozen=True)
class TraceStep:
    profile: RadialProfile
    lam: float


@dataclass(frozen=True)
class ImprovementTrace:
    steps: Tuple[TraceStep, ...]
    converged: bool
    fixed_point: RadialProfile

    @property
    def lambdas(self) -> List[float]:
        return [step.lam for step in self.steps]


def _monotone_runs(values: np.ndarray) -> List[Tuple[int, int, bool]]:
    """Maximal index ranges (start, end, increasing) on which `values` is monotone"""
    runs = []
    start, direction = 0, 0.0
    for i, d in enumerate(np.sign(np.diff(values))):
        if d == 0.0:
            continue
        if direction == 0.0:
            direction = d
        elif d != direction:
            runs.append((start, i, direction > 0))
            start, direction = i, d
    runs.append((start, len(values) - 1, direction >= 0))
    return runs


@lru_cache(maxsize=512)
def _segment_runs(segment: CurveSegment) -> List[Tuple[int, int, bool]]:
    return _monotone_runs(segment.values)


def _crossing(segment: CurveSegment, s: float, i: int, j: int) -> float:
    return brentq(lambda x: float(segment(x)) - s, segment.r[i], segment.r[j], xtol=1e-15)


def _segment_sublevel(segment: CurveSegment, s: float) -> List[Tuple[float, float]]:
    r, v = segment.r, segment.values
    shells = []
    for i0, i1, increasing in _segment_runs(segment):
        run = v[i0:i1 + 1]
        low, high = (run[0], run[-1]) if increasing else (run[-1], run[0])
        if high <= s:
            shells.append((r[i0], r[i1]))
        elif low > s:
            continue
        elif increasing:
            j = i0 + int(np.searchsorted(run, s, side="right")) - 1
            shells.append((r[i0], _crossing(segment, s, j, j + 1)))
        else:
            j = i1 - int(np.searchsorted(run[::-1], s, side="right")) + 1
            shells.append((_crossing(segment, s, j - 1, j), r[i1]))
    return shells


def sublevel_set(curve: RadialCurve, s: float) -> RadialSet:
    """{r : curve(r) <= s} as a RadialSet"""
    shells = []
    for segment in curve.segments:
        shells.extend(_segment_sublevel(segment, s))
    return RadialSet.build(curve.dim, shells, get_settings().rearrangement_sliver)


def measure_below(curve: RadialCurve, s: float) -> float:
    """|{x : curve(|x|) <= s}|"""
    return sublevel_set(curve, s).measure


def _fill(inner: RadialSet, outer: RadialSet, target: float) -> RadialSet:
    """
    Set between `inner` and `outer` with measure `target`, keeping the same
    fraction of every shell of outer minus inner, on the side touching inner.
    """
    n = inner.dim
    m_in, m_out = inner.measure, outer.measure
    if m_out <= m_in:
        return outer
    fraction = min(1.0, max(0.0, (target - m_in) / (m_out - m_in)))
    inner_lows = {lo for lo, _ in inner.intervals}
    inner_highs = {hi for _, hi in inner.intervals}

    def near(x, candidates):
        return any(abs(x - c) <= 1e-12 for c in candidates)

    kept = []
    for lo, hi in outer.difference(inner).intervals:
        v_lo, v_hi = lo ** n, hi ** n
        width = fraction * (v_hi - v_lo)
        if near(lo, inner_highs):
            kept.append((lo, (v_lo + width) ** (1.0 / n)))
        elif near(hi, inner_lows):
            kept.append(((v_hi - width) ** (1.0 / n), hi))
        else:
            mid = 0.5 * (v_lo + v_hi)
            kept.append(((mid - 0.5 * width) ** (1.0 / n), (mid + 0.5 * width) ** (1.0 / n)))
    return inner.union(RadialSet.build(n, kept))


def _threshold_curve(curve: RadialCurve, spec: VolumeSpec) -> ThresholdResult:
    if spec.dim != curve.dim:
        raise DomainError(f"volume spec dimension {spec.dim} differs from curve dimension {curve.dim}")
    settings = get_settings()
    omega = unit_ball_volume(spec.dim)
    measure_tol = MEASURE_RTOL * omega

    s_lo, s_hi = 0.0, curve.maximum()
    region_lo, region_hi = sublevel_set(curve, s_lo), sublevel_set(curve, s_hi)
    while region_hi.measure - spec.A > measure_tol and s_hi - s_lo > THRESHOLD_STOL:
        mid = 0.5 * (s_lo + s_hi)
        region = sublevel_set(curve, mid)
        if region.measure >= spec.A:
            s_hi, region_hi = mid, region
        else:
            s_lo, region_lo = mid, region

    region = region_hi
    if region.measure - spec.A > measure_tol:
        region = _fill(region_lo, region_hi, spec.A)

    max_intervals = (settings.rearrangement_max_layers - 1) // 2
    region = region.capped(max_intervals)
    logger.debug(f"Threshold t={s_hi:.15g}: {region.intervals} (|D|={region.measure:.15g}, A={spec.A:.15g})")
    return ThresholdResult(t=s_hi, region=region, achieved_measure=region.measure)


def level_threshold(sol: Union[EigenSolution, RadialCurve], spec: VolumeSpec) -> ThresholdResult:
    """
    Sublevel set of |y'| with prescribed measure A

    t = inf{s : |{|y'| <= s}| >= A} is found by bisection on the measure map,
    which is continuous and nondecreasing in s.

    Args:
        sol: Eigen solution (or any sampled gradient curve)
        spec: Target measure

    Returns:
        ThresholdResult with |region| = A within 1e-10 omega_n
    """
    curve = sol.gradient_curve if isinstance(sol, EigenSolution) else sol
    return _threshold_curve(curve, spec)


def _check_measure(profile: RadialProfile, spec: VolumeSpec) -> None:
    omega = unit_ball_volume(spec.dim)
    if profile.dim != spec.dim:
        raise DomainError(f"profile dimension {profile.dim} differs from volume spec dimension {spec.dim}")
    if abs(profile.high_measure - spec.A) > 1e-8 * omega:
        raise DomainError(f"profile high-region measure {profile.high_measure} differs from A={spec.A}")


def _same_shells(first: RadialSet, second: RadialSet, width: float) -> bool:
    if len(first.intervals) != len(second.intervals):
        return False
    return all(abs(a - b) <= width for p, q in zip(first.intervals, second.intervals) for a, b in zip(p, q))


def _step(sol: EigenSolution, spec: VolumeSpec) -> RadialProfile:
    profile = sol.profile
    result = level_threshold(sol, spec)
    if _same_shells(result.region, profile.high_region(), get_settings().rearrangement_sliver):
        return profile
    return RadialProfile.from_high_region(profile.dim, profile.alpha, profile.beta, result.region)


def improve(profile: RadialProfile, spec: VolumeSpec,
            tol: Optional[float] = None) -> Tuple[RadialProfile, EigenSolution]:
    """
    One rearrangement step: solve on `profile`, move the high material to the
    sublevel set of |y'| of measure A.

    Args:
        profile: Current profile with high-region measure A
        spec: Target measure
        tol: Eigenvalue tolerance (default from settings)

    Returns:
        (new profile, eigen solution of the input profile)
    """
    _check_measure(profile, spec)
    sol = principal_eigenvalue(profile, tol)
    if profile.alpha == profile.beta:
        return profile, sol
    return _step(sol, spec), sol


def optimize(initial: RadialProfile, spec: VolumeSpec, max_iter: Optional[int] = None,
             tol: Optional[float] = None, solver_tol: Optional[float] = None) -> ImprovementTrace:
    """
    Iterate the rearrangement step until consecutive high regions agree

    Args:
        initial: Starting profile with high-region measure A
        spec: Target measure
        max_iter: Step budget (default from settings)
        tol: Fixed-point threshold on the symmetric difference, as a fraction
            of omega_n (default from settings)
        solver_tol: Eigenvalue tolerance (default from settings)

    Returns:
        ImprovementTrace; `converged` is False when the budget ran out
    """
    settings = get_settings()
    max_iter = settings.rearrangement_max_iter if max_iter is None else int(max_iter)
    tol = settings.rearrangement_set_tol if tol is None else float(tol)
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    _check_measure(initial, spec)
    omega = unit_ball_volume(spec.dim)

    profile = initial
    sol = principal_eigenvalue(profile, solver_tol)
    steps = [TraceStep(profile, sol.lam)]
    converged = False
    for iteration in range(max_iter):
        if profile.alpha == profile.beta:
            converged = True
            break
        candidate = _step(sol, spec)
        change = candidate.high_region().symmetric_difference_measure(profile.high_region())
        logger.debug(f"Step {iteration}: lambda={sol.lam:.15g}, set change {change / omega:.3e}")
        if change < tol * omega:
            converged = True
            break
        profile = candidate
        sol = principal_eigenvalue(profile, solver_tol)
        steps.append(TraceStep(profile, sol.lam))

    if not converged:
        logger.warning(f"Rearrangement iteration stopped after {max_iter} steps without a fixed point")
    return ImprovementTrace(tuple(steps), converged, profile)


@lru_cache(maxsize=32)
def ground_state_gradient_curve(dim: int, samples: int = GROUND_STATE_SAMPLES) -> RadialCurve:
    """|psi'| of the Laplacian ground state sampled on a uniform grid"""
    gs = ground_state(dim)
    r = np.linspace(0.0, 1.0, samples)
    values = np.array([psi_prime_abs(gs, x) for x in r])
    return RadialCurve(dim, (CurveSegment(r, values),))


def low_contrast_optimizer(dim: int, spec: VolumeSpec) -> LowContrastResult:
    """
    Sublevel set {|psi'| <= t} of measure A built from the Laplacian ground
    state, the low-contrast approximation of the optimal high region

    Also reports the two candidate transition volumes: |B(0, rho_n)| and
    |B(0, a*)| where the sublevel set first reaches the outer sphere.
    """
    if spec.dim != dim:
        raise DomainError(f"volume spec dimension {spec.dim} differs from n={dim}")
    result = _threshold_curve(ground_state_gradient_curve(dim), spec)
    omega = unit_ball_volume(dim)
    return LowContrastResult(
        t=result.t,
        region=result.region,
        achieved_measure=result.achieved_measure,
        shape=classify(result.region),
        ball_transition_measure=omega * rho_n(dim) ** dim,
        touch_transition_measure=omega * touch_radius(dim) ** dim,
    )


def weighted_energy(sol: EigenSolution, region: RadialSet) -> float:
    """
    int (beta chi_D + alpha chi_D^c) |y'|^2 for the fixed eigenfunction of `sol`

    Among sets D of equal measure the sublevel set of |y'| minimizes this.
    """
    alpha, beta = sol.profile.alpha, sol.profile.beta
    sigma = lambda r: np.where(membership_mask(region, r), beta, alpha)
    breaks = [x for interval in region.intervals for x in interval]
    return gradient_energy(sol, sigma, breaks)


def value_measures(profile: RadialProfile) -> Dict[float, float]:
    """Measure of every level set {sigma = value} of a profile"""
    omega = unit_ball_volume(profile.dim)
    high = profile.high_measure
    if profile.alpha == profile.beta:
        return {profile.alpha: omega}
    levels = {profile.alpha: omega - high, profile.beta: high}
    return {value: measure for value, measure in levels.items() if measure > 0.0}


def distribution_function(profile: RadialProfile, tau: float) -> float:
    """|{x : sigma(x) >= tau}|"""
    return sum(measure for value, measure in value_measures(profile).items() if value >= tau)


def are_rearrangements(first: RadialProfile, second: RadialProfile, tol: float = 1e-10) -> bool:
    """
    True when the two conductivities have equal distribution functions

    For two-phase profiles this holds exactly when (alpha, beta) agree and
    the high regions have the same measure.
    """
    if first.dim != second.dim:
        return False
    a, b = value_measures(first), value_measures(second)
    if sorted(a) != sorted(b):
        return False
    omega = unit_ball_volume(first.dim)
    return all(abs(a[value] - b[value]) <= tol * omega for value in a)
