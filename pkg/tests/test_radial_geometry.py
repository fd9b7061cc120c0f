"""
Tests for radial sets, volume specs and sampled radial curves
"""
import math

import numpy as np
import pytest

from twophase.exceptions import DomainError
from twophase.services.radial_geometry import (
    CurveSegment,
    RadialCurve,
    RadialSet,
    VolumeSpec,
    ball_radius_for_volume,
    membership_mask,
    set_measure,
    unit_ball_volume,
)


class TestUnitBallVolume:
    def test_known_values(self):
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)
        assert unit_ball_volume(4) == pytest.approx(math.pi ** 2 / 2.0, rel=1e-15)
        assert unit_ball_volume(5) == pytest.approx(8.0 * math.pi ** 2 / 15.0, rel=1e-15)

    @pytest.mark.parametrize("dim", [0, 1, -3])
    def test_rejects_small_dimensions(self, dim):
        with pytest.raises(DomainError):
            unit_ball_volume(dim)


class TestRadialSet:
    def test_build_merges_overlaps_and_drops_slivers(self):
        s = RadialSet.build(2, [(0.5, 0.7), (0.1, 0.3), (0.25, 0.4), (0.8, 0.8 + 1e-14)])
        assert s.intervals == ((0.1, 0.4), (0.5, 0.7))

    def test_build_clips_to_unit_interval(self):
        s = RadialSet.build(3, [(-0.2, 0.3), (0.9, 1.4)])
        assert s.intervals == ((0.0, 0.3), (0.9, 1.0))

    def test_build_snaps_sliver_endpoints(self):
        s = RadialSet.build(2, [(5e-13, 0.3), (0.5, 1.0 - 5e-13)])
        assert s.intervals == ((0.0, 0.3), (0.5, 1.0))
        assert s.touches_boundary()

    def test_constructor_validates(self):
        with pytest.raises(DomainError):
            RadialSet(2, ((0.5, 0.4),))
        with pytest.raises(DomainError):
            RadialSet(2, ((0.1, 0.5), (0.4, 0.6)))

    def test_measure_of_ball_and_shell(self):
        assert RadialSet.ball(2, 0.5).measure == pytest.approx(math.pi / 4.0, rel=1e-15)
        shell = RadialSet.build(3, [(0.5, 1.0)])
        assert shell.measure == pytest.approx(unit_ball_volume(3) * 0.875, rel=1e-15)
        assert set_measure(RadialSet(2)) == 0.0

    def test_complement_and_union(self):
        s = RadialSet.build(2, [(0.2, 0.4), (0.6, 1.0)])
        c = s.complement()
        assert c.intervals == ((0.0, 0.2), (0.4, 0.6))
        assert s.union(c).intervals == ((0.0, 1.0),)
        assert s.intersection(c).is_empty

    def test_difference_and_symmetric_difference(self):
        a = RadialSet.ball(2, 0.6)
        b = RadialSet.build(2, [(0.4, 0.8)])
        assert a.difference(b).intervals == ((0.0, 0.4),)
        expected = math.pi * (0.4 ** 2 + (0.8 ** 2 - 0.6 ** 2))
        assert a.symmetric_difference_measure(b) == pytest.approx(expected, rel=1e-12)

    def test_shape_predicates(self):
        assert RadialSet.ball(3, 0.7).is_centered_ball()
        assert not RadialSet.whole(3).is_centered_ball()
        two = RadialSet.build(3, [(0.0, 0.5), (0.9, 1.0)])
        assert not two.is_centered_ball()
        assert two.touches_boundary()

    def test_capped_preserves_measure(self):
        s = RadialSet.build(2, [(0.0, 0.3), (0.35, 0.36), (0.5, 0.7), (0.9, 0.9005)])
        capped = s.capped(2)
        assert len(capped.intervals) == 2
        assert capped.measure == pytest.approx(s.measure, rel=1e-12)
        assert s.capped(10) is s

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(DomainError):
            RadialSet.ball(2, 0.5).union(RadialSet.ball(3, 0.5))

    def test_membership_mask(self):
        s = RadialSet.build(2, [(0.2, 0.4)])
        mask = membership_mask(s, np.array([0.1, 0.2, 0.3, 0.4, 0.5]))
        assert mask.tolist() == [False, True, True, True, False]


class TestVolumeSpec:
    def test_bounds(self):
        with pytest.raises(DomainError):
            VolumeSpec(2, 0.0)
        with pytest.raises(DomainError):
            VolumeSpec(2, math.pi)
        assert VolumeSpec(2, 1.0).fraction == pytest.approx(1.0 / math.pi)

    def test_from_fraction(self):
        spec = VolumeSpec.from_fraction(3, 0.729)
        assert spec.A == pytest.approx(0.729 * unit_ball_volume(3))
        with pytest.raises(DomainError):
            VolumeSpec.from_fraction(3, 1.0)

    def test_ball_radius(self):
        assert ball_radius_for_volume(VolumeSpec(2, math.pi / 4.0)) == pytest.approx(0.5, rel=1e-15)
        assert ball_radius_for_volume(VolumeSpec.from_fraction(3, 0.729)) == pytest.approx(0.9, rel=1e-14)


class TestRadialCurve:
    @pytest.fixture
    def jump_curve(self):
        left = CurveSegment(np.linspace(0.0, 0.5, 11), np.linspace(0.0, 1.0, 11))
        right = CurveSegment(np.linspace(0.5, 1.0, 11), np.linspace(2.0, 1.5, 11))
        return RadialCurve(2, (left, right))

    def test_one_sided_values_at_breakpoint(self, jump_curve):
        assert jump_curve(0.5, "left") == pytest.approx(1.0)
        assert jump_curve(0.5, "right") == pytest.approx(2.0)

    def test_interior_interpolation(self, jump_curve):
        assert jump_curve(0.25) == pytest.approx(0.5, abs=1e-12)
        assert jump_curve(0.75) == pytest.approx(1.75, abs=1e-12)

    def test_endpoints_and_maximum(self, jump_curve):
        assert jump_curve(0.0, "left") == pytest.approx(0.0)
        assert jump_curve(1.0, "right") == pytest.approx(1.5)
        assert jump_curve.maximum() == pytest.approx(2.0)

    def test_bad_side(self, jump_curve):
        with pytest.raises(DomainError):
            jump_curve(0.3, "middle")
