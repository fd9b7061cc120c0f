"""
Dirichlet-Laplacian ground state of the unit n-ball and its critical radius

The radial ground state is psi(r) = r^(1-n/2) J_{n/2-1}(mu r) with mu the first
zero of J_{n/2-1}; it is written here through S_nu(x) = x^-nu J_nu(x) so that
psi and |psi'| are evaluated without cancellation near the centre.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

from loguru import logger
from scipy.optimize import bisect, brentq

from ..exceptions import BracketingError, DomainError
from ..utils.quadrature import adaptive_simpson
from .radial_geometry import check_dimension, unit_ball_volume
from .special_functions import bessel_j_scaled, bessel_zero


ROOT_XTOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class GroundState:
    """Normalized radial ground state of -Laplace on the unit n-ball"""

    dim: int
    mu: float
    norm_constant: float

    @property
    def nu(self) -> float:
        return self.dim / 2.0 - 1.0

    @property
    def eigenvalue(self) -> float:
        return self.mu * self.mu


def _raw_psi(dim: int, mu: float, r: float) -> float:
    nu = dim / 2.0 - 1.0
    return mu ** nu * bessel_j_scaled(nu, mu * r)


@lru_cache(maxsize=32)
def ground_state(dim: int) -> GroundState:
    """
    Ground state data for dimension n: mu = j_{n/2-1,1} and the constant
    scaling psi to unit L2 norm over the ball.
    """
    dim = check_dimension(dim)
    mu = bessel_zero(dim / 2.0 - 1.0, 1)
    surface = dim * unit_ball_volume(dim)

    integrand = lambda r: _raw_psi(dim, mu, r) ** 2 * surface * r ** (dim - 1)
    norm_sq, error = adaptive_simpson(integrand, 0.0, 1.0, tol=NORM_TOL)
    logger.debug(f"Ground state n={dim}: mu={mu:.15g}, |psi|^2={norm_sq:.15g} (err {error:.1e})")
    return GroundState(dim=dim, mu=mu, norm_constant=1.0 / math.sqrt(norm_sq))


def _check_radius(r: float) -> float:
    r = float(r)
    if not (0.0 <= r <= 1.0):
        raise DomainError(f"radius must lie in [0, 1], got r={r}")
    return r


def psi(gs: GroundState, r: float) -> float:
    """Normalized ground state value psi(r), finite and maximal at r = 0"""
    r = _check_radius(r)
    return gs.norm_constant * _raw_psi(gs.dim, gs.mu, r)


def psi_prime_abs(gs: GroundState, r: float) -> float:
    """
    |psi'(r)| = C mu^(nu+2) r S_{nu+1}(mu r), nonnegative on [0, 1]

    (x^-nu J_nu)' = -x^-nu J_{nu+1} gives psi' = -C mu^(nu+1) (mu r)^-nu J_{nu+1}(mu r).
    """
    r = _check_radius(r)
    if r == 0.0:
        return 0.0
    return gs.norm_constant * gs.mu ** (gs.nu + 2.0) * r * bessel_j_scaled(gs.nu + 1.0, gs.mu * r)


def g(dim: int, t: float) -> float:
    """
    g(t) = (n-1) J_{n/2}(t) / J_{n/2-1}(t) on (0, mu), increasing from 0 to infinity
    """
    gs = ground_state(dim)
    if not (0.0 < t < gs.mu):
        raise DomainError(f"g is defined on (0, {gs.mu}), got t={t}")
    return (dim - 1) * t * bessel_j_scaled(gs.nu + 1.0, t) / bessel_j_scaled(gs.nu, t)


def _critical_equation(dim: int, t: float) -> float:
    """t J_nu(t) - (n-1) J_{nu+1}(t), divided by t^(nu+1) (same sign, finite at 0)"""
    nu = dim / 2.0 - 1.0
    return bessel_j_scaled(nu, t) - (dim - 1) * bessel_j_scaled(nu + 1.0, t)


@lru_cache(maxsize=32)
def critical_point(dim: int) -> Tuple[float, float]:
    """
    Maximum point of |psi'| as (rho_n, t*) with t* = mu rho_n

    The critical equation is positive near 0 and negative near mu with a single
    sign change in between.
    """
    gs = ground_state(dim)
    lo, hi = 0.01 * gs.mu, 0.99 * gs.mu
    f_lo, f_hi = _critical_equation(dim, lo), _critical_equation(dim, hi)
    if not (f_lo > 0.0 > f_hi):
        raise BracketingError(f"critical equation for n={dim} not bracketed on [{lo}, {hi}]")

    t_star = bisect(lambda t: _critical_equation(dim, t), lo, hi, xtol=ROOT_XTOL)
    logger.debug(f"Critical point n={dim}: t*={t_star:.15g}, rho_n={t_star / gs.mu:.15g}")
    return t_star / gs.mu, t_star


def rho_n(dim: int) -> float:
    """Critical radius rho_n in (0, 1): unique maximum point of |psi'|"""
    return critical_point(dim)[0]


@lru_cache(maxsize=32)
def touch_radius(dim: int) -> float:
    """
    Radius a* in (0, rho_n) with |psi'(a*)| = |psi'(1)|

    Sublevel sets of |psi'| below the level |psi'(1)| are centred balls; above
    it they also contain a shell touching r = 1.
    """
    gs = ground_state(dim)
    boundary = psi_prime_abs(gs, 1.0)
    return brentq(lambda a: psi_prime_abs(gs, a) - boundary, 0.0, rho_n(dim), xtol=ROOT_XTOL)
