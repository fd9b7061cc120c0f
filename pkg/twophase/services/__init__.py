"""Services package"""
from .critical_radius import critical_point, ground_state, rho_n, touch_radius
from .eigensolver import EigenSolution, Material, RadialProfile, principal_eigenvalue, rayleigh_quotient, shoot
from .experiments import Verdict, ball_profile, check_counterexample, sweep
from .radial_geometry import RadialSet, VolumeSpec, unit_ball_volume
from .rearrangement import improve, level_threshold, low_contrast_optimizer, optimize
from .special_functions import bessel_j, bessel_j_prime, bessel_zero, gamma_half

__all__ = [
    'critical_point',
    'ground_state',
    'rho_n',
    'touch_radius',
    'EigenSolution',
    'Material',
    'RadialProfile',
    'principal_eigenvalue',
    'rayleigh_quotient',
    'shoot',
    'Verdict',
    'ball_profile',
    'check_counterexample',
    'sweep',
    'RadialSet',
    'VolumeSpec',
    'unit_ball_volume',
    'improve',
    'level_threshold',
    'low_contrast_optimizer',
    'optimize',
    'bessel_j',
    'bessel_j_prime',
    'bessel_zero',
    'gamma_half',
]
