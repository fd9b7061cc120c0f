"""
Principal eigenpair of -div(sigma grad u) = lambda u on the unit n-ball for
piecewise-constant radial conductivities

The radial equation y'' + (n-1)/r y' + (lambda/sigma) y = 0 is integrated in
the flux form

    y' = w / sigma,    w' = -(n-1)/r w - lambda y,

where w = sigma y' is continuous across every interface. Each layer is
integrated separately so interfaces are always integration nodes, and the
derivative jump y'(r+) = (sigma-/sigma+) y'(r-) comes out exactly.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..exceptions import BracketingError, ConvergenceError, DomainError, SolverError
from ..utils.config import get_settings
from ..utils.quadrature import gauss_panels
from .radial_geometry import (
    CurveSegment,
    RadialCurve,
    RadialSet,
    check_dimension,
    unit_ball_volume,
)
from .special_functions import bessel_zero


BRACKET_MARGIN = 1e-6


class Material(str, Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(frozen=True)
class Layer:
    r_outer: float
    material: Material


@dataclass(frozen=True)
class RadialProfile:
    """
    Conductivity beta on the high layers and alpha on the low layers

    Layer k occupies (r_outer[k-1], r_outer[k]]; the last layer ends at 1.
    """

    dim: int
    alpha: float
    beta: float
    layers: Tuple[Layer, ...]

    def __post_init__(self):
        check_dimension(self.dim)
        if not (0.0 < self.alpha <= self.beta):
            raise DomainError(f"conductivities must satisfy 0 < alpha <= beta, got alpha={self.alpha}, beta={self.beta}")
        if not self.layers:
            raise DomainError("profile needs at least one layer")
        previous = 0.0
        for k, layer in enumerate(self.layers):
            if not isinstance(layer.material, Material):
                raise DomainError(f"layers[{k}].material must be 'low' or 'high'")
            if not (previous < layer.r_outer <= 1.0):
                raise DomainError(f"layers[{k}].r_outer={layer.r_outer} must increase strictly inside (0, 1]")
            if k > 0 and layer.material == self.layers[k - 1].material:
                raise DomainError(f"layers[{k}] repeats the material of the previous layer")
            previous = layer.r_outer
        if self.layers[-1].r_outer != 1.0:
            raise DomainError("the last layer must end at r_outer = 1")

    @classmethod
    def build(cls, dim: int, alpha: float, beta: float,
              layers: Iterable[Tuple[float, Union[Material, str]]]) -> "RadialProfile":
        """Create a profile, merging adjacent layers of the same material"""
        merged: List[Layer] = []
        for k, (r_outer, material) in enumerate(layers):
            try:
                material = Material(material)
            except ValueError:
                raise DomainError(f"layers[{k}].material must be 'low' or 'high', got {material!r}")
            if merged and merged[-1].material == material:
                merged[-1] = Layer(float(r_outer), material)
            else:
                merged.append(Layer(float(r_outer), material))
        return cls(dim, float(alpha), float(beta), tuple(merged))

    @classmethod
    def homogeneous(cls, dim: int, conductivity: float) -> "RadialProfile":
        return cls(dim, conductivity, conductivity, (Layer(1.0, Material.LOW),))

    @classmethod
    def from_high_region(cls, dim: int, alpha: float, beta: float, region: RadialSet) -> "RadialProfile":
        """Profile whose high-conductivity layers are exactly the shells of `region`"""
        layers = []
        for lo, hi in region.intervals:
            if lo > 0.0:
                layers.append((lo, Material.LOW))
            layers.append((hi, Material.HIGH))
        if not layers or layers[-1][0] < 1.0:
            layers.append((1.0, Material.LOW))
        return cls.build(dim, alpha, beta, layers)

    def conductivity(self, material: Material) -> float:
        return self.beta if material == Material.HIGH else self.alpha

    @property
    def interfaces(self) -> List[float]:
        return [layer.r_outer for layer in self.layers[:-1]]

    def bounds(self) -> List[Tuple[float, float, float]]:
        """(r_inner, r_outer, sigma) for every layer"""
        out, inner = [], 0.0
        for layer in self.layers:
            out.append((inner, layer.r_outer, self.conductivity(layer.material)))
            inner = layer.r_outer
        return out

    def sigma(self, r: float) -> float:
        for layer in self.layers:
            if r <= layer.r_outer:
                return self.conductivity(layer.material)
        raise DomainError(f"radius {r} outside [0, 1]")

    def sigma_array(self, r: np.ndarray) -> np.ndarray:
        radii = np.array([layer.r_outer for layer in self.layers])
        values = np.array([self.conductivity(layer.material) for layer in self.layers])
        index = np.clip(np.searchsorted(radii, r, side="left"), 0, len(radii) - 1)
        return values[index]

    def high_region(self) -> RadialSet:
        """RadialSet of the layers holding the high-conductivity material"""
        shells, inner = [], 0.0
        for layer in self.layers:
            if layer.material == Material.HIGH:
                shells.append((inner, layer.r_outer))
            inner = layer.r_outer
        return RadialSet.build(self.dim, shells)

    @property
    def high_measure(self) -> float:
        return self.high_region().measure

    def scaled(self, factor: float) -> "RadialProfile":
        if factor <= 0.0:
            raise DomainError(f"scale factor must be positive, got {factor}")
        return RadialProfile(self.dim, self.alpha * factor, self.beta * factor, self.layers)

    def with_conductivities(self, alpha: float, beta: float) -> "RadialProfile":
        return RadialProfile(self.dim, alpha, beta, self.layers)


def _evaluate(dense, sigma: float, dim: int, start: Optional[Tuple[float, float]],
              r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(y, y') from the dense flux solution, with the two-term series below the start radius"""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    y = np.empty_like(r)
    yp = np.empty_like(r)
    inner = np.zeros(r.shape, dtype=bool)
    if start is not None:
        eps, k2 = start
        inner = r < eps
        y[inner] = 1.0 - k2 * r[inner] ** 2 / (2.0 * dim)
        yp[inner] = -k2 * r[inner] / dim
    if np.any(~inner):
        values = dense(r[~inner])
        y[~inner] = values[0]
        yp[~inner] = values[1] / sigma
    return y, yp


@dataclass(frozen=True, eq=False)
class SolutionPiece:
    """One layer of a radial solution: samples plus the integrator's dense output"""

    dim: int
    r_lo: float
    r_hi: float
    sigma: float
    r: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    steps: np.ndarray
    dense: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    start: Optional[Tuple[float, float]] = None  # (eps, lambda / sigma) near r = 0
    scale: float = 1.0

    def state(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(y, y') at radii inside the piece"""
        y, yp = _evaluate(self.dense, self.sigma, self.dim, self.start, r)
        return self.scale * y, self.scale * yp

    def rescaled(self, factor: float) -> "SolutionPiece":
        return SolutionPiece(self.dim, self.r_lo, self.r_hi, self.sigma, self.r, factor * self.y,
                             factor * self.y_prime, self.steps, self.dense, self.start,
                             factor * self.scale)



@dataclass(frozen=True, eq=False)
class ShootResult:
    lam: float
    boundary_value: float
    pieces: Tuple[SolutionPiece, ...]

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([p.y for p in self.pieces])

    def sign_changes(self, include_boundary: bool = True) -> int:
        values = self.y if include_boundary else self.y[:-1]
        signs = np.sign(values)
        signs = signs[signs != 0]
        return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """
    Principal eigenpair with the eigenfunction normalized to unit L2 norm

    `grid`, `y` and `y_prime` concatenate the per-layer samples; interface
    radii appear twice, carrying the left and then the right derivative.
    """

    profile: RadialProfile
    lam: float
    pieces: Tuple[SolutionPiece, ...]
    tol: float

    @property
    def eigenvalue(self) -> float:
        return self.lam

    @property
    def dim(self) -> int:
        return self.profile.dim

    @property
    def grid(self) -> np.ndarray:
        return np.concatenate([p.r for p in self.pieces])

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([p.y for p in self.pieces])

    @property
    def y_prime(self) -> np.ndarray:
        return np.concatenate([p.y_prime for p in self.pieces])

    @property
    def sigma(self) -> np.ndarray:
        return np.concatenate([np.full(p.r.shape, p.sigma) for p in self.pieces])

    @cached_property
    def gradient_curve(self) -> RadialCurve:
        """|y'| as a piecewise monotone-cubic curve, one segment per layer"""
        return RadialCurve(self.dim, tuple(CurveSegment(p.r, np.abs(p.y_prime)) for p in self.pieces))

    def flux_jumps(self) -> List[float]:
        """sigma+ y'(r+) - sigma- y'(r-) at every interface"""
        return [right.sigma * right.y_prime[0] - left.sigma * left.y_prime[-1]
                for left, right in zip(self.pieces[:-1], self.pieces[1:])]

    def value(self, r: float) -> float:
        piece = self._piece_at(r)
        return float(piece.state(np.array([r]))[0][0])

    def _piece_at(self, r: float) -> SolutionPiece:
        for piece in self.pieces:
            if piece.r_lo <= r <= piece.r_hi:
                return piece
        raise DomainError(f"radius {r} outside [0, 1]")


def _solver_options(rtol: Optional[float], atol: Optional[float]) -> Tuple[float, float]:
    settings = get_settings()
    return (rtol if rtol is not None else settings.solver_rtol,
            atol if atol is not None else settings.solver_atol)


def shoot(profile: RadialProfile, lambda_trial: float,
          rtol: Optional[float] = None, atol: Optional[float] = None) -> ShootResult:
    """
    Integrate the radial equation outward from the centre for a trial eigenvalue

    Args:
        profile: Conductivity profile
        lambda_trial: Trial eigenvalue, > 0
        rtol: Relative integrator tolerance (default from settings)
        atol: Absolute integrator tolerance (default from settings)

    Returns:
        ShootResult with y(1) as boundary_value and the sampled curve
    """
    if not lambda_trial > 0.0:
        raise DomainError(f"trial eigenvalue must be positive, got {lambda_trial}")
    rtol, atol = _solver_options(rtol, atol)
    settings = get_settings()
    n = profile.dim
    lam = float(lambda_trial)
    grid = np.linspace(0.0, 1.0, settings.solver_grid_points)

    bounds = profile.bounds()
    eps = min(settings.solver_start_radius, 0.5 * bounds[0][1])
    sigma0 = bounds[0][2]
    state = np.array([1.0 - lam / sigma0 * eps * eps / (2.0 * n), -lam * eps / n])

    pieces = []
    for k, (r_lo, r_hi, sigma) in enumerate(bounds):
        t0 = eps if k == 0 else r_lo

        def rhs(r, s, sigma=sigma):
            return [s[1] / sigma, -(n - 1) / r * s[1] - lam * s[0]]

        sol = solve_ivp(rhs, (t0, r_hi), state, method="RK45", rtol=rtol, atol=atol, dense_output=True)
        if sol.status != 0:
            raise SolverError(f"integration failed on layer {k} ({r_lo}, {r_hi}] at lambda={lam}: {sol.message}")

        inside = grid[(grid > r_lo) & (grid < r_hi)]
        nodes = np.unique(np.concatenate([[r_lo, r_hi], inside, sol.t]))
        start = (eps, lam / sigma0) if k == 0 else None
        y, yp = _evaluate(sol.sol, sigma, n, start, nodes)
        pieces.append(SolutionPiece(n, r_lo, r_hi, sigma, nodes, y, yp, sol.t, sol.sol, start))
        state = sol.y[:, -1]

    return ShootResult(lam, float(state[0]), tuple(pieces))


def _is_below_principal(result: ShootResult) -> bool:
    return result.boundary_value > 0.0 and result.sign_changes() == 0


def principal_eigenvalue(profile: RadialProfile, tol: Optional[float] = None) -> EigenSolution:
    """
    Smallest eigenvalue and its positive, L2-normalized radial eigenfunction

    The eigenvalue lies in [alpha mu^2, beta mu^2] (mu = j_{n/2-1,1}) by
    comparing Rayleigh quotients with the homogeneous ball. Shots below the
    principal eigenvalue stay positive on (0, 1]; the bracket is narrowed until
    its upper end crosses exactly one zero, then refined with Brent's method.

    Args:
        profile: Conductivity profile
        tol: Relative tolerance on lambda (default from settings, >= 1e-12)

    Returns:
        EigenSolution
    """
    settings = get_settings()
    tol = settings.solver_tol if tol is None else float(tol)
    if tol < 1e-12:
        raise DomainError(f"eigenvalue tolerance must be >= 1e-12, got {tol}")

    n = profile.dim
    mu = bessel_zero(n / 2.0 - 1.0, 1)
    lo = profile.alpha * mu * mu * (1.0 - BRACKET_MARGIN)
    hi = profile.beta * mu * mu * (1.0 + BRACKET_MARGIN)

    shots: Dict[float, ShootResult] = {}

    def fire(lam: float) -> ShootResult:
        if lam not in shots:
            shots[lam] = shoot(profile, lam)
        return shots[lam]

    if not _is_below_principal(fire(lo)):
        raise BracketingError(f"lower bound alpha*mu^2={lo} is not below the principal eigenvalue")

    for _ in range(settings.solver_max_iterations):
        if fire(hi).sign_changes() == 1:
            break
        mid = 0.5 * (lo + hi)
        if _is_below_principal(fire(mid)):
            lo = mid
        else:
            hi = mid
    else:
        raise ConvergenceError(f"could not isolate the principal eigenvalue in [{lo}, {hi}]")

    lam, info = brentq(lambda x: fire(x).boundary_value, lo, hi,
                       xtol=1e-15 * lo, rtol=max(0.25 * tol, 4.0 * np.finfo(float).eps),
                       maxiter=settings.solver_max_iterations, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(f"eigenvalue refinement stopped after {info.iterations} iterations: {info.flag}")

    result = fire(lam)
    if result.sign_changes(include_boundary=False) != 0:
        raise SolverError(f"eigenfunction at lambda={lam} changes sign inside the ball (not a ground state)")

    solution = _normalized(profile, result, tol)
    logger.debug(f"Principal eigenvalue n={n} ({len(profile.layers)} layers): {lam:.15g} after {len(shots)} shots")
    return solution


def _normalized(profile: RadialProfile, result: ShootResult, tol: float) -> EigenSolution:
    n = profile.dim
    surface = n * unit_ball_volume(n)
    norm_sq = 0.0
    for piece in result.pieces:
        norm_sq += gauss_panels(lambda r, p=piece: p.state(r)[0] ** 2 * surface * r ** (n - 1), piece.steps)
    factor = 1.0 / np.sqrt(norm_sq)
    pieces = tuple(piece.rescaled(factor) for piece in result.pieces)
    return EigenSolution(profile, result.lam, pieces, tol)


def gradient_energy(sol: EigenSolution, sigma_fn: Callable[[np.ndarray], np.ndarray],
                    breaks: Sequence[float] = ()) -> float:
    """
    int_0^1 sigma(r) y'(r)^2 n omega_n r^(n-1) dr for the fixed eigenfunction

    Args:
        sol: Eigen solution supplying y'
        sigma_fn: Vectorized weight, piecewise constant with jumps only at
            layer interfaces or at `breaks`
        breaks: Extra radii where sigma_fn jumps

    Returns:
        Weighted Dirichlet energy
    """
    n = sol.dim
    surface = n * unit_ball_volume(n)
    total = 0.0
    for piece in sol.pieces:
        inner = [b for b in breaks if piece.steps[0] < b < piece.steps[-1]]
        edges = np.unique(np.concatenate([piece.steps, inner]))
        integrand = lambda r, p=piece: sigma_fn(r) * p.state(r)[1] ** 2 * surface * r ** (n - 1)
        total += gauss_panels(integrand, edges)
    return total


def rayleigh_quotient(profile: RadialProfile, sol: EigenSolution) -> float:
    """
    int sigma |y'|^2 over the ball for a normalized solution

    Equals sol.lam when `profile` is the profile the solution was computed for.
    """
    if profile.dim != sol.dim:
        raise DomainError("profile and solution dimensions differ")
    return gradient_energy(sol, profile.sigma_array, profile.interfaces)


def gradient_magnitude(sol: EigenSolution, r: float, side: str = "left") -> float:
    """
    |y'(r)| from monotone cubic interpolation of the sampled derivative

    At an interface `side` selects the one-sided limit.
    """
    if not (0.0 <= r <= 1.0):
        raise DomainError(f"radius must lie in [0, 1], got {r}")
    if r == 0.0:
        return 0.0
    return sol.gradient_curve(r, side)
