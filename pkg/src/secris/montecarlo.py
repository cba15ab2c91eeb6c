"""Monte Carlo estimation of the ergodic secrecy rate and the closed-form
expectation check it validates against.

Draws are addressed by absolute index and accumulated in fixed-size blocks
whose partial sums are combined with exact (fsum) summation, so splitting a
run across workers at block boundaries reproduces the serial estimate
bit-for-bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import objective as obj
from .channel import EveStatistics, ScenarioChannels, sample_eve_batch

BLOCK = 4096


@dataclass(frozen=True)
class EsrEstimate:
    mean: float     # bps/Hz
    stderr: float   # bps/Hz
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0 or self.mean < 0:
            raise ValueError("estimate must have non-negative mean and stderr")


def _block_ranges(n: int):
    for start in range(0, n, BLOCK):
        yield start, min(start + BLOCK, n)


def _eve_gains(phi, w, sc, es, seed, start, count):
    """|(h_IE^H Phi H_AI + h_AE^H) w|^2 for draws [start, start+count)."""
    h_ae, h_ie = sample_eve_batch(es, seed, start, count)
    t = h_ae.conj() @ w
    if phi.size:
        x = phi * (sc.h_ai @ w)
        t = t + h_ie.conj() @ x
    return np.abs(t) ** 2


def _accumulate(values_fn, n: int, workers: int = 1) -> tuple[float, float]:
    """(sum, sum of squares) over n draws, partition-invariant by construction."""
    def block(rng_pair):
        start, stop = rng_pair
        v = values_fn(start, stop - start)
        return math.fsum(v.tolist()), math.fsum((v * v).tolist())

    ranges = list(_block_ranges(n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, ranges))
    else:
        parts = [block(r) for r in ranges]
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    return total, total_sq


def esr_estimate(phi, w, sc: ScenarioChannels, es: EveStatistics,
                 sigma2_u: float, sigma2_e: float, n: int, seed,
                 workers: int = 1) -> EsrEstimate:
    """Sample mean of (R_U - R_E)^+ over n independent Eve channel draws."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    r_u = obj.rate_user(phi, w, sc, sigma2_u)

    def values(start, count):
        gains = _eve_gains(phi, w, sc, es, seed, start, count)
        r_e = np.log2(1.0 + gains / sigma2_e)
        return np.maximum(r_u - r_e, 0.0)

    total, total_sq = _accumulate(values, n, workers)
    mean = total / n
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return EsrEstimate(mean=max(0.0, mean), stderr=math.sqrt(var / n),
                       n_samples=n, seed=int(seed) if np.isscalar(seed) else 0)


def expectation_oracle(phi, w, sc: ScenarioChannels, es: EveStatistics,
                       n: int, seed, workers: int = 1) -> tuple[float, float, float]:
    """Monte Carlo check of the closed-form Eve power term.

    Returns (mc_mean, closed_form, z_score) where the closed form is
    w^H G_A w + x^H G_I x + 2 Re[w^H G_AI x] with x = Phi H_AI w.
    """
    if n < 1000:
        raise ValueError("need at least 1e3 samples for a meaningful z-score")

    def values(start, count):
        return _eve_gains(phi, w, sc, es, seed, start, count)

    total, total_sq = _accumulate(values, n, workers)
    mc_mean = total / n
    var = max(0.0, (total_sq - n * mc_mean * mc_mean) / (n - 1))
    stderr = math.sqrt(var / n)
    closed = obj.eve_expected_power(phi, w, sc, es)
    z = 0.0 if stderr == 0 else (mc_mean - closed) / stderr
    return mc_mean, closed, z
