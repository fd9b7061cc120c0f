"""
Numerical integration helpers

Adaptive Simpson for scalar integrands that must meet an absolute tolerance,
and composite Gauss-Legendre panels for vectorized integrands sampled on a
known set of breakpoints.
"""
from collections.abc import Callable
from functools import lru_cache
from typing import Tuple

import numpy as np

from ..exceptions import QuadratureError


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 50,
) -> Tuple[float, float]:
    """
    Adaptive Simpson's rule with Richardson correction

    Args:
        f: Scalar integrand
        a: Lower bound
        b: Upper bound
        tol: Absolute error tolerance
        max_depth: Maximum recursion depth

    Returns:
        Tuple of (integral_value, error_estimate)

    Raises:
        QuadratureError: If a subinterval at max_depth still misses its share of tol
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, error = adaptive_simpson(f, b, a, tol, max_depth)
        return -value, error

    failed = []

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(a, b, fa, fm, fb, s_whole, depth, tol):
        m = 0.5 * (a + b)
        h = 0.25 * (b - a)
        flm = f(a + h)
        frm = f(b - h)

        s_left = _simpson(fa, flm, fm, h)
        s_right = _simpson(fm, frm, fb, h)
        s_combined = s_left + s_right
        error_estimate = (s_combined - s_whole) / 15.0

        if abs(error_estimate) <= tol:
            return s_combined + error_estimate, abs(error_estimate)
        if depth >= max_depth:
            failed.append(abs(error_estimate))
            return s_combined + error_estimate, abs(error_estimate)

        left, left_err = _adaptive(a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0)
        right, right_err = _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)
        return left + right, left_err + right_err

    fa = f(a)
    fb = f(b)
    fm = f(0.5 * (a + b))
    s_whole = _simpson(fa, fm, fb, 0.5 * (b - a))

    value, error = _adaptive(a, b, fa, fm, fb, s_whole, 0, tol)
    if failed and error > tol:
        raise QuadratureError(f"adaptive Simpson on [{a}, {b}] hit depth {max_depth}", error)
    return value, error


@lru_cache(maxsize=8)
def _legendre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_panels(
    f: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    order: int = 6,
) -> float:
    """
    Composite Gauss-Legendre rule over consecutive breakpoints

    Args:
        f: Vectorized integrand
        edges: Sorted panel breakpoints
        order: Gauss points per panel

    Returns:
        Integral over [edges[0], edges[-1]]
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return 0.0
    nodes, weights = _legendre_rule(order)
    lo = edges[:-1]
    half = 0.5 * np.diff(edges)
    points = (lo + half)[:, None] + half[:, None] * nodes[None, :]
    values = np.asarray(f(points.ravel()), dtype=float).reshape(points.shape)
    return float(np.sum(half[:, None] * weights[None, :] * values))
