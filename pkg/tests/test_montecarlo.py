import math

import numpy as np
import pytest

from secris import objective as obj
from secris.montecarlo import EsrEstimate, esr_estimate, expectation_oracle

from conftest import random_feasible


class TestEsrEstimate:
    def test_zero_beam_zero_rate(self, small):
        sc, es, stats, p_max = small
        phi, _ = random_feasible(sc, p_max, 0)
        w = np.zeros(sc.m, complex)
        est = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                           5000, seed=(0, 1))
        assert est.mean == 0.0
        assert est.stderr == 0.0

    def test_pure_los_eve_degenerate(self, small):
        # K -> inf on both Eve links: every draw is the LoS channel, so the
        # estimate has zero spread and equals the deterministic rate gap.
        sc, es, stats, p_max = small
        import dataclasses

        es_inf = dataclasses.replace(es, k_ae=math.inf, k_ie=math.inf)
        phi, w = random_feasible(sc, p_max, 1)
        est = esr_estimate(phi, w, sc, es_inf, stats.sigma2_u, stats.sigma2_e,
                           4096, seed=(0, 1))
        assert est.stderr == 0.0
        h_ae = math.sqrt(es.gain_ae) * es.hbar_ae
        h_ie = math.sqrt(es.gain_ie) * es.hbar_ie
        gain = abs(np.vdot(h_ae, w) + np.vdot(h_ie, phi * (sc.h_ai @ w))) ** 2
        expect = max(0.0, obj.rate_user(phi, w, sc, stats.sigma2_u)
                     - math.log2(1 + gain / stats.sigma2_e))
        assert est.mean == pytest.approx(expect, rel=1e-10)

    def test_deterministic_and_block_partition_invariant(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 2)
        a = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                         10_000, seed=(3, 1))
        b = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                         10_000, seed=(3, 1))
        assert (a.mean, a.stderr) == (b.mean, b.stderr)
        c = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                         10_000, seed=(3, 1), workers=4)
        assert (a.mean, a.stderr) == (c.mean, c.stderr)

    def test_seed_changes_estimate(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 2)
        a = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                         5_000, seed=(3, 1))
        b = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                         5_000, seed=(4, 1))
        assert a.mean != b.mean

    def test_stderr_sqrt_n_law(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 5)
        small_n = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                               4_000, seed=(6, 1))
        large_n = esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e,
                               64_000, seed=(6, 1))
        ratio = small_n.stderr / large_n.stderr
        assert ratio == pytest.approx(4.0, rel=0.25)

    def test_validation(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 0)
        with pytest.raises(ValueError):
            esr_estimate(phi, w, sc, es, stats.sigma2_u, stats.sigma2_e, 1, seed=0)
        with pytest.raises(ValueError):
            EsrEstimate(mean=-1.0, stderr=0.0, n_samples=10, seed=0)


class TestExpectationOracle:
    def test_zscore_small(self, small):
        sc, es, stats, p_max = small
        n_hit = 0
        for seed in range(20):
            phi, w = random_feasible(sc, p_max, seed)
            _, _, z = expectation_oracle(phi, w, sc, es, 50_000, seed=(seed, 2))
            n_hit += abs(z) <= 3.0
        assert n_hit >= 19

    def test_closed_form_matches_objective(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 11)
        _, closed, _ = expectation_oracle(phi, w, sc, es, 2_000, seed=(0, 2))
        assert closed == pytest.approx(obj.eve_expected_power(phi, w, sc, es),
                                       abs=1e-15)

    def test_minimum_samples_enforced(self, small):
        sc, es, stats, p_max = small
        phi, w = random_feasible(sc, p_max, 0)
        with pytest.raises(ValueError):
            expectation_oracle(phi, w, sc, es, 100, seed=0)
