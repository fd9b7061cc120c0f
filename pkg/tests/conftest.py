"""
Shared fixtures for the test suite
"""
import os

import numpy as np
import pytest

from twophase.services.eigensolver import Material, RadialProfile
from twophase.services.radial_geometry import RadialSet
from twophase.utils.config import reset_settings, use_config


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from config/config.yaml without TPC_ overrides"""
    for key in list(os.environ):
        if key.startswith("TPC_"):
            monkeypatch.delenv(key, raising=False)
    use_config(None)
    yield
    use_config(None)
    reset_settings()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def ball_profile_3d():
    """n = 3, high conductivity 1.05 on B(0, 0.9), low conductivity 1 outside"""
    return RadialProfile.build(3, 1.0, 1.05, [(0.9, Material.HIGH), (1.0, Material.LOW)])


def random_profile(rng, dim: int, max_interfaces: int = 4) -> RadialProfile:
    """Random layered profile with contrast up to 4"""
    count = int(rng.integers(1, max_interfaces + 1))
    radii = np.sort(rng.uniform(0.05, 0.95, size=count))
    radii = radii[np.concatenate([[True], np.diff(radii) > 0.02])]
    alpha = float(rng.uniform(0.5, 2.0))
    beta = alpha * float(rng.uniform(1.1, 4.0))
    first = Material.HIGH if rng.random() < 0.5 else Material.LOW
    layers = []
    material = first
    for r in list(radii) + [1.0]:
        layers.append((float(r), material))
        material = Material.LOW if material == Material.HIGH else Material.HIGH
    return RadialProfile.build(dim, alpha, beta, layers)


def random_region_of_measure(rng, dim: int, fraction: float, shells: int = 3):
    """Random union of `shells` shells with volume fraction `fraction`"""
    lengths = rng.dirichlet(np.ones(shells)) * fraction
    gaps = rng.dirichlet(np.ones(shells + 1)) * (1.0 - fraction)
    intervals, v = [], 0.0
    for gap, length in zip(gaps, lengths):
        v += gap
        intervals.append((v ** (1.0 / dim), (v + length) ** (1.0 / dim)))
        v += length
    return RadialSet.build(dim, intervals)


def relative_error(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)
