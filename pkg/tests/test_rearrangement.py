"""
Tests for sublevel thresholding, the rearrangement step and its iteration
"""
import numpy as np
import pytest

from conftest import random_profile, random_region_of_measure
from twophase.exceptions import DomainError
from twophase.services.critical_radius import rho_n, touch_radius
from twophase.services.eigensolver import Material, RadialProfile, principal_eigenvalue
from twophase.services.radial_geometry import CurveSegment, RadialCurve, RadialSet, VolumeSpec, unit_ball_volume
from twophase.services.rearrangement import (
    SetShape,
    are_rearrangements,
    classify,
    distribution_function,
    improve,
    level_threshold,
    low_contrast_optimizer,
    measure_below,
    optimize,
    sublevel_set,
    weighted_energy,
)


@pytest.fixture
def v_curve():
    """|r - 0.5| sampled on a grid containing the kink"""
    r = np.linspace(0.0, 1.0, 101)
    return RadialCurve(2, (CurveSegment(r, np.abs(r - 0.5)),))


class TestSublevelSets:
    def test_v_shaped_curve(self, v_curve):
        region = sublevel_set(v_curve, 0.2)
        assert len(region.intervals) == 1
        lo, hi = region.intervals[0]
        assert lo == pytest.approx(0.3, abs=1e-12)
        assert hi == pytest.approx(0.7, abs=1e-12)

    def test_levels_at_extremes(self, v_curve):
        assert sublevel_set(v_curve, -1.0).is_empty
        assert sublevel_set(v_curve, 0.5).intervals == ((0.0, 1.0),)

    def test_measure_monotone(self, v_curve):
        levels = np.linspace(0.0, 0.5, 26)
        measures = [measure_below(v_curve, s) for s in levels]
        assert all(a <= b for a, b in zip(measures, measures[1:]))

    def test_jump_between_segments(self):
        left = CurveSegment(np.linspace(0.0, 0.5, 51), np.linspace(0.0, 1.0, 51))
        right = CurveSegment(np.linspace(0.5, 1.0, 51), np.linspace(3.0, 2.0, 51))
        curve = RadialCurve(2, (left, right))
        region = sublevel_set(curve, 2.5)
        assert region.intervals[0] == (0.0, 0.5)
        assert region.intervals[1][0] == pytest.approx(0.75, abs=1e-12)
        assert region.touches_boundary()

    def test_measure_map_is_lipschitz(self, v_curve):
        # {|r - 0.5| <= s} in the plane has area 2 pi s for s <= 0.5
        levels = np.linspace(0.0, 0.5, 2001)
        measures = np.array([measure_below(v_curve, s) for s in levels])
        increments = np.diff(measures)
        assert np.all(increments >= -1e-12)
        assert np.max(increments) <= 2.0 * np.pi * (levels[1] - levels[0]) * (1.0 + 1e-6) + 1e-12
        assert measures[-1] == pytest.approx(np.pi, rel=1e-12)

    def test_level_threshold_hits_measure(self, v_curve):
        spec = VolumeSpec.from_fraction(2, 0.4)
        result = level_threshold(v_curve, spec)
        assert result.achieved_measure == pytest.approx(spec.A, abs=1e-10 * np.pi)
        assert result.region.measure == result.achieved_measure
        assert measure_below(v_curve, result.t) >= spec.A - 1e-10 * np.pi

    def test_level_threshold_on_plateau(self):
        # A flat stretch makes the measure map jump; the set is filled to A exactly
        r = np.linspace(0.0, 1.0, 201)
        values = np.where(r < 0.3, r, np.where(r < 0.6, 0.3, r - 0.3))
        curve = RadialCurve(3, (CurveSegment(r, values),))
        spec = VolumeSpec.from_fraction(3, 0.1)
        result = level_threshold(curve, spec)
        assert result.t == pytest.approx(0.3, abs=1e-9)
        assert result.achieved_measure == pytest.approx(spec.A, abs=1e-9)

    def test_dimension_mismatch(self, v_curve):
        with pytest.raises(DomainError):
            level_threshold(v_curve, VolumeSpec.from_fraction(3, 0.4))


class TestClassification:
    def test_shapes(self):
        assert classify(RadialSet.ball(2, 0.5)) == SetShape.CENTERED_BALL
        assert classify(RadialSet.whole(2)) == SetShape.WHOLE_BALL
        assert classify(RadialSet.build(2, [(0.0, 0.3), (0.8, 1.0)])) == SetShape.BALL_AND_BOUNDARY_ANNULUS
        assert classify(RadialSet.build(2, [(0.2, 0.3)])) == SetShape.OTHER


class TestImprove:
    def test_refutes_ball_at_low_contrast(self, ball_profile_3d):
        spec = VolumeSpec.from_fraction(3, 0.729)
        improved, sol = improve(ball_profile_3d, spec)
        assert improved is not ball_profile_3d
        region = improved.high_region()
        assert region.touches_boundary()
        assert region.measure == pytest.approx(spec.A, rel=1e-9)
        assert principal_eigenvalue(improved).lam < sol.lam

    def test_homogeneous_returns_input(self):
        p = RadialProfile.build(2, 1.0, 1.0, [(0.5, Material.HIGH), (1.0, Material.LOW)])
        spec = VolumeSpec(2, p.high_measure)
        improved, _ = improve(p, spec)
        assert improved is p

    def test_measure_mismatch(self, ball_profile_3d):
        with pytest.raises(DomainError):
            improve(ball_profile_3d, VolumeSpec.from_fraction(3, 0.5))

    @pytest.mark.parametrize("dim", [2, 3])
    def test_descent_on_random_profiles(self, rng, dim):
        for _ in range(4):
            profile = random_profile(rng, dim)
            spec = VolumeSpec(dim, profile.high_measure)
            improved, sol = improve(profile, spec)
            lam_new = principal_eigenvalue(improved).lam
            assert lam_new <= sol.lam * (1.0 + 10 * 1e-10)
            assert improved.high_measure == pytest.approx(spec.A, rel=1e-8)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_strict_descent_when_region_moves(self, rng, dim):
        moved = 0
        for _ in range(6):
            profile = random_profile(rng, dim)
            spec = VolumeSpec(dim, profile.high_measure)
            improved, sol = improve(profile, spec)
            change = improved.high_region().symmetric_difference_measure(profile.high_region())
            if change > 0.05 * unit_ball_volume(dim):
                moved += 1
                assert principal_eigenvalue(improved).lam < sol.lam * (1.0 - 1e-9)
        assert moved > 0


class TestThresholdMinimality:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_threshold_beats_random_rearrangements(self, rng, dim):
        profile = RadialProfile.build(dim, 1.0, 2.0, [(0.3, "low"), (0.8, "high"), (1.0, "low")])
        spec = VolumeSpec(dim, profile.high_measure)
        sol = principal_eigenvalue(profile)
        best = weighted_energy(sol, level_threshold(sol, spec).region)
        for _ in range(100):
            candidate = random_region_of_measure(rng, dim, spec.fraction, shells=int(rng.integers(1, 5)))
            assert best <= weighted_energy(sol, candidate) * (1.0 + 1e-9)

    def test_energy_of_own_region_is_eigenvalue(self, ball_profile_3d):
        sol = principal_eigenvalue(ball_profile_3d)
        energy = weighted_energy(sol, ball_profile_3d.high_region())
        assert energy == pytest.approx(sol.lam, rel=1e-6)


class TestOptimize:
    def test_trace_is_monotone_and_converges(self, ball_profile_3d):
        spec = VolumeSpec.from_fraction(3, 0.729)
        trace = optimize(ball_profile_3d, spec, max_iter=30)
        assert trace.converged
        lambdas = trace.lambdas
        assert all(b <= a * (1.0 + 1e-9) for a, b in zip(lambdas, lambdas[1:]))
        assert trace.fixed_point.high_region().touches_boundary()
        assert trace.fixed_point.high_measure == pytest.approx(spec.A, rel=1e-8)

    def test_budget_exhaustion_is_reported(self, ball_profile_3d):
        spec = VolumeSpec.from_fraction(3, 0.729)
        trace = optimize(ball_profile_3d, spec, max_iter=1, tol=1e-300)
        assert not trace.converged
        assert len(trace.steps) == 2

    def test_restart_from_fixed_point_stops_at_once(self, ball_profile_3d):
        spec = VolumeSpec.from_fraction(3, 0.729)
        trace = optimize(ball_profile_3d, spec, max_iter=30)
        assert trace.converged
        again = optimize(trace.fixed_point, spec, max_iter=30)
        assert again.converged
        assert len(again.steps) == 1
        assert again.fixed_point == trace.fixed_point

    def test_rejects_zero_budget(self, ball_profile_3d):
        with pytest.raises(DomainError):
            optimize(ball_profile_3d, VolumeSpec.from_fraction(3, 0.729), max_iter=0)


class TestLowContrast:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_small_volume_gives_centered_ball(self, dim):
        fraction = 0.5 * touch_radius(dim) ** dim
        result = low_contrast_optimizer(dim, VolumeSpec.from_fraction(dim, fraction))
        assert result.shape == SetShape.CENTERED_BALL
        assert result.region.intervals[0][1] == pytest.approx(fraction ** (1.0 / dim), rel=1e-7)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_large_volume_adds_boundary_annulus(self, dim):
        fraction = 0.5 * (touch_radius(dim) ** dim + 1.0)
        result = low_contrast_optimizer(dim, VolumeSpec.from_fraction(dim, fraction))
        assert result.shape == SetShape.BALL_AND_BOUNDARY_ANNULUS
        assert result.achieved_measure == pytest.approx(fraction * unit_ball_volume(dim), rel=1e-9)

    def test_transition_volumes(self):
        result = low_contrast_optimizer(3, VolumeSpec.from_fraction(3, 0.5))
        omega = unit_ball_volume(3)
        assert result.ball_transition_measure == pytest.approx(omega * rho_n(3) ** 3)
        assert result.touch_transition_measure == pytest.approx(omega * touch_radius(3) ** 3)
        assert result.touch_transition_measure < result.ball_transition_measure

    @pytest.mark.slow
    @pytest.mark.parametrize("dim", [2, 3])
    def test_matches_low_contrast_fixed_point(self, dim):
        spec = VolumeSpec.from_fraction(dim, 0.5)
        start = RadialProfile.from_high_region(dim, 1.0, 1.01, RadialSet.ball(dim, 0.5 ** (1.0 / dim)))
        trace = optimize(start, spec)
        approx = low_contrast_optimizer(dim, spec).region
        difference = trace.fixed_point.high_region().symmetric_difference_measure(approx)
        assert difference <= 0.05 * unit_ball_volume(dim)


class TestRearrangementClass:
    def test_distribution_function(self, ball_profile_3d):
        omega = unit_ball_volume(3)
        high = ball_profile_3d.high_measure
        assert distribution_function(ball_profile_3d, 0.5) == pytest.approx(omega)
        assert distribution_function(ball_profile_3d, 1.02) == pytest.approx(high)
        assert distribution_function(ball_profile_3d, 2.0) == 0.0

    def test_same_measure_profiles_are_rearrangements(self, ball_profile_3d):
        improved, _ = improve(ball_profile_3d, VolumeSpec.from_fraction(3, 0.729))
        assert are_rearrangements(ball_profile_3d, improved, tol=1e-8)

    def test_different_measure_or_contrast(self, ball_profile_3d):
        smaller = RadialProfile.build(3, 1.0, 1.05, [(0.8, "high"), (1.0, "low")])
        assert not are_rearrangements(ball_profile_3d, smaller)
        assert not are_rearrangements(ball_profile_3d, ball_profile_3d.with_conductivities(1.0, 2.0))
