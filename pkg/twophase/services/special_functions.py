"""
Bessel functions of the first kind, their zeros and half-integer gamma values

J_nu is evaluated from its power series. The alternating sum is carried out
in mpmath working precision wide enough to absorb the cancellation between
terms, so the result keeps full double precision on the working range
0 <= x <= 60.
"""
import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from loguru import logger
from mpmath import mp
from scipy.optimize import bisect

from ..exceptions import BracketingError, DomainError, RangeError
from ..utils.quadrature import adaptive_simpson


MAX_ARGUMENT = 60.0
ZERO_SCAN_STEP = 0.1
ZERO_XTOL = 1e-12
SERIES_RTOL = 1e-18
MAX_SERIES_TERMS = 1000


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not nu >= 0.0:
        raise DomainError(f"Bessel order must be nonnegative, got nu={nu}")
    return nu


def _check_argument(x: float) -> float:
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"Bessel argument must be nonnegative, got x={x}")
    if x > MAX_ARGUMENT:
        raise RangeError(f"Bessel argument x={x} exceeds the working range [0, {MAX_ARGUMENT}]")
    return x


def gamma_half(two_a: int) -> float:
    """
    Gamma function at a = two_a / 2 for a positive integer two_a

    Args:
        two_a: Twice the argument

    Returns:
        Gamma(k) = (k-1)! for integer a, (2k)! sqrt(pi) / (4^k k!) for a = k + 1/2
    """
    if isinstance(two_a, bool) or int(two_a) != two_a or two_a < 1:
        raise DomainError(f"gamma_half needs a positive integer 2a, got {two_a}")
    two_a = int(two_a)
    if two_a % 2 == 0:
        return float(math.factorial(two_a // 2 - 1))
    k = (two_a - 1) // 2
    return math.factorial(2 * k) / (4 ** k * math.factorial(k)) * math.sqrt(math.pi)


def _gamma(a: float) -> float:
    if (2.0 * a).is_integer() and a > 0:
        return gamma_half(int(2.0 * a))
    return math.gamma(a)


def _series_sum(nu: float, x: float) -> float:
    """
    Sum_k (-x^2/4)^k / (k! (nu+1)_k), the bracket of J_nu(x) = (x/2)^nu / Gamma(nu+1) * S
    """
    if x == 0.0:
        return 1.0
    # Largest term is about exp(x); keep 34 digits beyond it
    digits = 34 + int(0.45 * x)
    with mp.workdps(digits):
        z = mp.mpf(x) ** 2 / 4
        dnu = mp.mpf(nu)
        term = mp.mpf(1)
        total = mp.mpf(1)
        for k in range(1, MAX_SERIES_TERMS):
            term = -term * z / (k * (dnu + k))
            total += term
            past_peak = k * (nu + k) > 2.0 * x * x / 4.0
            if past_peak and (term == 0 or abs(term) <= SERIES_RTOL * abs(total)):
                break
        return float(total)


def bessel_j_scaled(nu: float, x: float) -> float:
    """
    x^(-nu) J_nu(x), regular at the origin where it equals 1 / (2^nu Gamma(nu+1))

    Args:
        nu: Order, nu >= 0
        x: Argument in [0, 60]

    Returns:
        Scaled Bessel value
    """
    nu = _check_order(nu)
    x = _check_argument(x)
    return _series_sum(nu, x) / (2.0 ** nu * _gamma(nu + 1.0))


def bessel_j(nu: float, x: float) -> float:
    """
    Bessel function of the first kind J_nu(x)

    Args:
        nu: Order, nu >= 0
        x: Argument in [0, 60]

    Returns:
        J_nu(x)
    """
    nu = _check_order(nu)
    x = _check_argument(x)
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    return (0.5 * x) ** nu / _gamma(nu + 1.0) * _series_sum(nu, x)


def bessel_j_prime(nu: float, x: float) -> float:
    """
    Derivative J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x)

    At x = 0 the formula is singular; for nu >= 1 the series limit is returned
    (1/2 for nu = 1, 0 above), for nu < 1 a DomainError is raised.
    """
    nu = _check_order(nu)
    x = _check_argument(x)
    if x == 0.0:
        if nu < 1.0:
            raise DomainError(f"J'_nu(0) is not available for nu={nu} < 1")
        return 0.5 if nu == 1.0 else 0.0
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


@lru_cache(maxsize=256)
def _zeros(nu: float, count: int) -> Tuple[float, ...]:
    f = lambda t: bessel_j(nu, t)

    found = []
    left = max(nu, 0.5)
    f_left = f(left)
    while len(found) < count:
        right = left + ZERO_SCAN_STEP
        if right > MAX_ARGUMENT:
            raise BracketingError(
                f"only {len(found)} of {count} zeros of J_{nu} isolated below x={MAX_ARGUMENT}"
            )
        f_right = f(right)
        if f_left == 0.0:
            found.append(left)
        elif f_left * f_right < 0.0:
            root = bisect(f, left, right, xtol=ZERO_XTOL)
            found.append(_secant_polish(f, root, left, right))
        left, f_left = right, f_right

    logger.debug(f"Zeros of J_{nu}: {found}")
    return tuple(found)


def _secant_polish(f, root: float, left: float, right: float) -> float:
    h = ZERO_XTOL
    f0 = f(root)
    f1 = f(root + h)
    if f1 == f0:
        return root
    polished = root - f0 * h / (f1 - f0)
    # Keep the bisection answer unless the secant step improves the residual
    if left < polished < right and abs(f(polished)) < abs(f0):
        return polished
    return root


def bessel_zero(nu: float, m: int) -> float:
    """
    m-th positive zero j_{nu,m} of J_nu

    Zeros of J_nu exceed nu and are spaced by more than pi (interlacing with
    J_{nu+1}), so a 0.1 scan cannot skip a pair of sign changes.

    Args:
        nu: Order, nu >= 0
        m: Index of the zero, m >= 1

    Returns:
        j_{nu,m}
    """
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise DomainError(f"zero index must be a positive integer, got m={m}")
    return bessel_zeros(nu, int(m))[-1]


def bessel_zeros(nu: float, count: int) -> List[float]:
    """First `count` positive zeros of J_nu"""
    nu = _check_order(nu)
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")
    return list(_zeros(nu, int(count)))


def _product_coefficients(nu1: float, nu2: float, terms: int) -> np.ndarray:
    """Even power-series coefficients of x^-(nu1+nu2) J_nu1(x) J_nu2(x)"""
    def coefficients(nu):
        c = np.empty(terms)
        c[0] = 1.0 / (2.0 ** nu * _gamma(nu + 1.0))
        for k in range(1, terms):
            c[k] = -c[k - 1] / (4.0 * k * (nu + k))
        return c

    return np.convolve(coefficients(nu1), coefficients(nu2))[:terms]


def cross_product_check(nu1: float, nu2: float, tau: float, tol: float = 1e-10) -> Tuple[float, float]:
    """
    Both sides of the Bessel cross-product identity

        (nu2^2 - nu1^2) int_0^tau J_nu2(s) J_nu1(s) / s ds
            = tau (J'_nu2(tau) J_nu1(tau) - J_nu2(tau) J'_nu1(tau))

    The integrand behaves like s^(nu1+nu2-1) at the origin. Its head on
    [0, min(tau, 1/2)] is integrated term by term from the series; the rest
    goes through adaptive Simpson.

    Args:
        nu1: First order, >= 0
        nu2: Second order, >= 0
        tau: Upper limit, > 0
        tol: Absolute quadrature tolerance

    Returns:
        (lhs, rhs)
    """
    nu1 = _check_order(nu1)
    nu2 = _check_order(nu2)
    tau = _check_argument(tau)
    if tau == 0.0:
        raise DomainError("tau must be positive")

    rhs = _cross_rhs_scaled(nu1, nu2, tau)

    factor = nu2 * nu2 - nu1 * nu1
    if factor == 0.0:
        return 0.0, rhs

    a = nu1 + nu2
    head_end = min(tau, 0.5)
    coeffs = _product_coefficients(nu1, nu2, 30)
    powers = a + 2.0 * np.arange(coeffs.size)
    head = float(np.sum(coeffs * head_end ** powers / powers))

    tail = 0.0
    if tau > head_end:
        integrand = lambda s: bessel_j(nu2, s) * bessel_j(nu1, s) / s
        tail, _ = adaptive_simpson(integrand, head_end, tau, tol=tol)

    return factor * (head + tail), rhs


def _cross_rhs_scaled(nu1: float, nu2: float, tau: float) -> float:
    """
    Right-hand side written through S_nu = x^-nu J_nu, exact at small tau

    With J_nu = x^nu S_nu and J'_nu = nu x^(nu-1) S_nu - x^(nu+1) S_{nu+1}:
    tau (J'_2 J_1 - J_2 J'_1) = tau^(nu1+nu2) [(nu2 - nu1) S_2 S_1 + tau^2 (S_2 S_{1+1} - S_{2+1} S_1)]
    """
    s1 = bessel_j_scaled(nu1, tau)
    s2 = bessel_j_scaled(nu2, tau)
    s1p = bessel_j_scaled(nu1 + 1.0, tau)
    s2p = bessel_j_scaled(nu2 + 1.0, tau)
    bracket = (nu2 - nu1) * s2 * s1 + tau * tau * (s2 * s1p - s2p * s1)
    return tau ** (nu1 + nu2) * bracket
