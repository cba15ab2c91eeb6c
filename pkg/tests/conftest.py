import numpy as np
import pytest

from secris.config import ExperimentConfig
from secris.channel import build_scenario, eve_second_moments


@pytest.fixture
def desk():
    """Reference-scenario instance at desk scale (M=8, N=16)."""
    cfg = ExperimentConfig()
    geom = cfg.to_geometry()
    stats = cfg.to_fading_stats()
    sc = build_scenario(geom, stats, (0, 42))
    es = eve_second_moments(geom, stats)
    return sc, es, stats, cfg.p_max_watt()


@pytest.fixture
def small():
    """Small instance (M=4, N=8) for cheap loops."""
    cfg = ExperimentConfig()
    cfg.geometry["m"] = 4
    cfg.geometry["ny"] = 8
    geom = cfg.to_geometry()
    stats = cfg.to_fading_stats()
    sc = build_scenario(geom, stats, (1, 42))
    es = eve_second_moments(geom, stats)
    return sc, es, stats, cfg.p_max_watt()


def random_feasible(sc, p_max, seed):
    rng = np.random.default_rng(seed)
    phi = np.exp(2j * np.pi * rng.random(sc.n))
    w = rng.standard_normal(sc.m) + 1j * rng.standard_normal(sc.m)
    w = np.sqrt(p_max) * w / np.linalg.norm(w)
    return phi, w
