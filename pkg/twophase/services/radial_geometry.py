"""
Radially symmetric subsets of the unit n-ball

Sets are stored in radius space as sorted disjoint intervals; conversion to
n-dimensional measure happens only inside this module.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import PchipInterpolator

from ..exceptions import DomainError
from .special_functions import gamma_half


SLIVER_WIDTH = 1e-12

Interval = Tuple[float, float]


def check_dimension(dim: int) -> int:
    """Validate a space dimension n >= 2"""
    if isinstance(dim, bool) or int(dim) != dim or dim < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {dim}")
    return int(dim)


def unit_ball_volume(dim: int) -> float:
    """
    Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1)

    Args:
        dim: Dimension n >= 2

    Returns:
        omega_n
    """
    dim = check_dimension(dim)
    return math.pi ** (dim / 2.0) / gamma_half(dim + 2)


def _normalize(intervals: Iterable[Interval], sliver: float) -> Tuple[Interval, ...]:
    cleaned = []
    for lo, hi in intervals:
        lo, hi = max(0.0, float(lo)), min(1.0, float(hi))
        # endpoints within a sliver of the centre or the sphere land on them
        lo = 0.0 if lo <= sliver else lo
        hi = 1.0 if hi >= 1.0 - sliver else hi
        if hi - lo > sliver:
            cleaned.append((lo, hi))
    cleaned.sort()

    merged: List[List[float]] = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1] + sliver:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class RadialSet:
    """Finite union of disjoint radial shells {x : r_lo <= |x| <= r_hi} in the unit n-ball"""

    dim: int
    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self):
        check_dimension(self.dim)
        previous_hi = -1.0
        for lo, hi in self.intervals:
            if not (0.0 <= lo < hi <= 1.0):
                raise DomainError(f"interval ({lo}, {hi}) must satisfy 0 <= r_lo < r_hi <= 1")
            if lo < previous_hi:
                raise DomainError("intervals must be sorted and pairwise disjoint")
            previous_hi = hi

    @classmethod
    def build(cls, dim: int, intervals: Iterable[Interval], sliver: float = SLIVER_WIDTH) -> "RadialSet":
        """Clip to [0, 1], merge overlaps and drop intervals thinner than `sliver`"""
        return cls(check_dimension(dim), _normalize(intervals, sliver))

    @classmethod
    def ball(cls, dim: int, radius: float) -> "RadialSet":
        return cls.build(dim, [(0.0, radius)])

    @classmethod
    def whole(cls, dim: int) -> "RadialSet":
        return cls(check_dimension(dim), ((0.0, 1.0),))

    @property
    def measure(self) -> float:
        return set_measure(self)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def touches_boundary(self, tol: float = SLIVER_WIDTH) -> bool:
        """True when the set holds a shell [b, 1] adjacent to the outer sphere"""
        return bool(self.intervals) and self.intervals[-1][1] >= 1.0 - tol

    def is_centered_ball(self, tol: float = SLIVER_WIDTH) -> bool:
        """True for a single interval [0, a] with a < 1"""
        return (len(self.intervals) == 1 and self.intervals[0][0] <= tol
                and self.intervals[0][1] < 1.0 - tol)

    def complement(self) -> "RadialSet":
        gaps = []
        cursor = 0.0
        for lo, hi in self.intervals:
            gaps.append((cursor, lo))
            cursor = hi
        gaps.append((cursor, 1.0))
        return RadialSet.build(self.dim, gaps)

    def union(self, other: "RadialSet") -> "RadialSet":
        self._check_same_dim(other)
        return RadialSet.build(self.dim, self.intervals + other.intervals)

    def intersection(self, other: "RadialSet") -> "RadialSet":
        self._check_same_dim(other)
        pieces = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                pieces.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return RadialSet.build(self.dim, pieces)

    def difference(self, other: "RadialSet") -> "RadialSet":
        return self.intersection(other.complement())

    def symmetric_difference_measure(self, other: "RadialSet") -> float:
        """|A \\ B| + |B \\ A|"""
        return max(0.0, self.measure + other.measure - 2.0 * self.intersection(other).measure)

    def capped(self, max_intervals: int) -> "RadialSet":
        """
        Drop the thinnest intervals (in measure) until at most `max_intervals`
        remain, returning the dropped measure to the largest remaining interval.
        """
        if len(self.intervals) <= max_intervals:
            return self
        n = self.dim
        kept = sorted(self.intervals, key=lambda iv: iv[1] ** n - iv[0] ** n, reverse=True)
        dropped = kept[max_intervals:]
        kept = sorted(kept[:max_intervals])
        lost = sum(hi ** n - lo ** n for lo, hi in dropped)
        logger.warning(f"Merging {len(dropped)} sliver interval(s), volume fraction {lost:.3e}")

        biggest = max(range(len(kept)), key=lambda k: kept[k][1] ** n - kept[k][0] ** n)
        lo, hi = kept[biggest]
        upper_room = (kept[biggest + 1][0] if biggest + 1 < len(kept) else 1.0) ** n - hi ** n
        grow_up = min(lost, upper_room)
        hi = (hi ** n + grow_up) ** (1.0 / n)
        lower_limit = kept[biggest - 1][1] ** n if biggest > 0 else 0.0
        lo = max(lower_limit, lo ** n - (lost - grow_up)) ** (1.0 / n)
        kept[biggest] = (lo, hi)
        return RadialSet.build(n, kept)

    def _check_same_dim(self, other: "RadialSet") -> None:
        if other.dim != self.dim:
            raise DomainError(f"cannot combine sets of dimension {self.dim} and {other.dim}")


@dataclass(frozen=True)
class VolumeSpec:
    """Prescribed measure A of the high-conductivity region, 0 < A < omega_n"""

    dim: int
    A: float

    def __post_init__(self):
        omega = unit_ball_volume(self.dim)
        if not (0.0 < self.A < omega):
            raise DomainError(f"volume A={self.A} must lie in (0, {omega}) for n={self.dim}")

    @classmethod
    def from_fraction(cls, dim: int, fraction: float) -> "VolumeSpec":
        if not (0.0 < fraction < 1.0):
            raise DomainError(f"fraction must lie in (0, 1), got {fraction}")
        return cls(check_dimension(dim), fraction * unit_ball_volume(dim))

    @property
    def fraction(self) -> float:
        return self.A / unit_ball_volume(self.dim)


def set_measure(s: RadialSet) -> float:
    """omega_n * sum(r_hi^n - r_lo^n)"""
    n = s.dim
    return unit_ball_volume(n) * math.fsum(hi ** n - lo ** n for lo, hi in s.intervals)


def ball_radius_for_volume(spec: VolumeSpec) -> float:
    """Radius rho with |B(0, rho)| = A"""
    omega = unit_ball_volume(spec.dim)
    if not (0.0 < spec.A < omega):
        raise DomainError(f"volume A={spec.A} must lie in (0, {omega})")
    return (spec.A / omega) ** (1.0 / spec.dim)


@dataclass(frozen=True, eq=False)
class CurveSegment:
    """Samples of a nonnegative radial function on [r[0], r[-1]], continuous inside"""

    r: np.ndarray
    values: np.ndarray

    @cached_property
    def interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.r, self.values, extrapolate=False)

    def __call__(self, r):
        return self.interpolant(r)


@dataclass(frozen=True, eq=False)
class RadialCurve:
    """
    Piecewise-continuous radial function sampled on consecutive segments

    Segments meet at breakpoints where the function may jump (material
    interfaces); values are interpolated with monotone cubics inside each one.
    """

    dim: int
    segments: Tuple[CurveSegment, ...]

    def segment_at(self, r: float, side: str = "left") -> CurveSegment:
        if side not in ("left", "right"):
            raise DomainError(f"side must be 'left' or 'right', got {side!r}")
        first, last = self.segments[0], self.segments[-1]
        for seg in self.segments:
            lo, hi = seg.r[0], seg.r[-1]
            if not (lo <= r <= hi):
                continue
            if side == "left" and (r > lo or seg is first):
                return seg
            if side == "right" and (r < hi or seg is last):
                return seg
        raise DomainError(f"radius {r} outside the sampled range")

    def __call__(self, r: float, side: str = "left") -> float:
        return float(self.segment_at(float(r), side)(r))

    def maximum(self) -> float:
        return float(max(np.max(seg.values) for seg in self.segments))


def membership_mask(region: RadialSet, r: np.ndarray) -> np.ndarray:
    """Vectorized r in region"""
    r = np.asarray(r, dtype=float)
    mask = np.zeros(r.shape, dtype=bool)
    for lo, hi in region.intervals:
        mask |= (r >= lo) & (r <= hi)
    return mask
