"""
Tests for the Laplacian ground state and the critical radius rho_n
"""
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from twophase.exceptions import DomainError
from twophase.services.critical_radius import (
    critical_point,
    g,
    ground_state,
    psi,
    psi_prime_abs,
    rho_n,
    touch_radius,
)
from twophase.services.special_functions import bessel_zero
from twophase.utils.quadrature import adaptive_simpson


def three_d_critical_t():
    # |psi'| ~ (t cos t - sin t) / t^2 is extremal where (t^2 - 2) sin t + 2 t cos t = 0
    return brentq(lambda t: (t * t - 2.0) * math.sin(t) + 2.0 * t * math.cos(t), 1.5, 2.5, xtol=1e-15)


class TestGroundState:
    def test_mu_is_first_zero(self):
        assert ground_state(3).mu == pytest.approx(math.pi, abs=1e-12)
        assert ground_state(2).mu == pytest.approx(bessel_zero(0.0, 1), abs=1e-15)

    def test_three_dimensional_closed_form(self):
        # psi(r) = sin(pi r) / (sqrt(2 pi) r)
        gs = ground_state(3)
        for r in (0.1, 0.4, 0.77):
            assert psi(gs, r) == pytest.approx(math.sin(math.pi * r) / (math.sqrt(2 * math.pi) * r), rel=1e-9)
        assert psi(gs, 0.0) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-9)
        assert psi_prime_abs(gs, 1.0) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-9)

    @pytest.mark.parametrize("dim", [2, 4, 5])
    def test_unit_norm(self, dim):
        gs = ground_state(dim)
        surface = 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)
        norm_sq, _ = adaptive_simpson(lambda r: psi(gs, r) ** 2 * surface * r ** (dim - 1), 0.0, 1.0, tol=1e-11)
        assert norm_sq == pytest.approx(1.0, rel=1e-8)

    def test_derivative_matches_finite_difference(self):
        gs = ground_state(4)
        h = 1e-6
        for r in (0.2, 0.5, 0.9):
            fd = (psi(gs, r + h) - psi(gs, r - h)) / (2 * h)
            assert psi_prime_abs(gs, r) == pytest.approx(-fd, rel=1e-6)

    def test_radius_checked(self):
        with pytest.raises(DomainError):
            psi(ground_state(2), 1.2)


class TestCriticalRadius:
    def test_three_dimensions_against_closed_form(self):
        t_star = three_d_critical_t()
        rho, t = critical_point(3)
        assert t == pytest.approx(t_star, abs=1e-10)
        assert rho == pytest.approx(t_star / math.pi, abs=1e-10)
        assert rho == pytest.approx(0.6627, abs=1e-4)

    @pytest.mark.parametrize("dim", [2, 3, 4, 5, 8])
    def test_rho_n_is_interior_maximum(self, dim):
        gs = ground_state(dim)
        rho = rho_n(dim)
        assert 0.0 < rho < 1.0
        peak = psi_prime_abs(gs, rho)
        for offset in (1e-3, 1e-2, 0.1):
            if rho - offset > 0.0:
                assert psi_prime_abs(gs, rho - offset) < peak
            if rho + offset <= 1.0:
                assert psi_prime_abs(gs, rho + offset) < peak

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_gradient_is_unimodal(self, dim):
        gs = ground_state(dim)
        values = np.array([psi_prime_abs(gs, float(r)) for r in np.linspace(0.0, 1.0, 1000)])
        signs = np.sign(np.diff(values))
        assert signs[0] > 0 and signs[-1] < 0
        assert np.count_nonzero(signs[1:] != signs[:-1]) == 1

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_gap_d_n_positive(self, dim):
        gs = ground_state(dim)
        assert psi_prime_abs(gs, rho_n(dim)) - psi_prime_abs(gs, 1.0) > 0.0

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_g_increasing(self, dim):
        mu = ground_state(dim).mu
        values = [g(dim, t) for t in (0.1, 0.5, 1.0, 1.5, 0.9 * mu, 0.999 * mu)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert g(dim, 1e-4) < 1e-3

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_g_increasing_on_random_pairs(self, rng, dim):
        mu = ground_state(dim).mu
        pairs = np.sort(rng.uniform(1e-3, 0.999 * mu, size=(100, 2)), axis=1)
        for lo, hi in pairs:
            if hi - lo > 1e-9:
                assert g(dim, float(lo)) < g(dim, float(hi))

    def test_g_domain(self):
        with pytest.raises(DomainError):
            g(3, math.pi)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_touch_radius(self, dim):
        gs = ground_state(dim)
        a_star = touch_radius(dim)
        assert 0.0 < a_star < rho_n(dim)
        assert psi_prime_abs(gs, a_star) == pytest.approx(psi_prime_abs(gs, 1.0), rel=1e-10)
