"""Reference schemes: optimal beamforming without RIS, element-wise
alternating optimization (labeled "ao_ew" everywhere; it stands in for the
SDR-based AO of the literature, which needs an SDP solver), and a
random-phase / matched-filter sanity floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import objective as obj
from .channel import EveStatistics, ScenarioChannels
from .objective import Solution


@dataclass
class BaselineResult:
    scheme: str
    solution: Solution
    iterations: int = 0


def dominant_gen_eigvec(a_mat: np.ndarray, b_mat: np.ndarray,
                        tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Unit-norm maximizer of the generalized Rayleigh quotient (v^H A v)/(v^H B v).

    Power iteration on B^{-1} A through a Cholesky factorization of B.
    B must be positive definite; A Hermitian PSD. Near-degenerate top
    eigenvalues return either maximizer.
    """
    m = a_mat.shape[0]
    try:
        cho = scipy.linalg.cho_factor(b_mat)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError("B must be positive definite") from exc

    # Deterministic, dense start: superposition of basis vectors with
    # distinct phases avoids being orthogonal to the dominant eigenvector
    # for any particular A.
    v = np.exp(1j * np.arange(m)) / math.sqrt(m)
    lam_prev = math.inf
    for _ in range(max_iter):
        y = scipy.linalg.cho_solve(cho, a_mat @ v)
        ny = np.linalg.norm(y)
        if ny == 0:  # A v = 0: any vector is optimal for a zero quotient
            return v
        v = y / ny
        lam = (np.vdot(v, a_mat @ v).real) / (np.vdot(v, b_mat @ v).real)
        if abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            break
        lam_prev = lam
    return v


def rayleigh_quotient(v: np.ndarray, a_mat: np.ndarray, b_mat: np.ndarray) -> float:
    return float(np.vdot(v, a_mat @ v).real / np.vdot(v, b_mat @ v).real)


def best_feasible_beam(a0: np.ndarray, b0: np.ndarray, p_max: float) -> tuple[np.ndarray, float]:
    """Maximize (w^H A0 w + 1)/(w^H B0 w + 1) over ||w||^2 <= P_max.

    Adding I/P_max to both matrices turns the power-constrained ratio into an
    unconstrained generalized Rayleigh quotient: at w = sqrt(P) v with unit v,
    (P v^H A0 v + 1)/(P v^H B0 v + 1) = v^H (A0 + I/P) v / v^H (B0 + I/P) v.
    Along any ray the ratio is monotone in the radius, so the optimum sits on
    the power boundary whenever it beats 1, else at w = 0.
    """
    m = a0.shape[0]
    shift = np.eye(m) / p_max
    v = dominant_gen_eigvec(a0 + shift, b0 + shift)
    lam = rayleigh_quotient(v, a0 + shift, b0 + shift)
    if lam > 1.0:
        return math.sqrt(p_max) * v, lam
    return np.zeros(m, dtype=complex), 1.0


def no_ris_beamformer(sc: ScenarioChannels, es: EveStatistics,
                      sigma2_u: float, sigma2_e: float, p_max: float) -> BaselineResult:
    """Optimal LESR beamformer with the RIS absent (phi = 0 encodes no panel)."""
    a0 = np.outer(sc.h_au, sc.h_au.conj()) / sigma2_u
    b0 = es.g_a / sigma2_e
    w, lam = best_feasible_beam(a0, b0, p_max)
    phi = np.zeros(sc.n, dtype=complex)
    value = max(0.0, math.log2(lam))
    return BaselineResult("no_ris", Solution(phi=phi, w=w, lesr=value), iterations=1)


def ao_elementwise(sc: ScenarioChannels, es: EveStatistics,
                   sigma2_u: float, sigma2_e: float, p_max: float,
                   n_grid: int = 360, tol: float = 1e-4,
                   max_rounds: int = 50) -> BaselineResult:
    """Alternating optimization: closed-form beamformer, then per-element
    1-D phase grid search on the secrecy ratio with unit modulus exact.

    Each block step cannot decrease the objective (the grid always includes
    the incumbent phase), so the LESR sequence is non-decreasing.
    """
    n = sc.n
    phi = np.ones(n, dtype=complex)
    thetas = 2.0 * np.pi * np.arange(n_grid) / n_grid
    cand = np.exp(1j * thetas)

    lesr_prev = -math.inf
    w = np.zeros(sc.m, dtype=complex)
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        bq = obj.beam_quadratics(phi, sc, es, sigma2_u, sigma2_e)
        w, _ = best_feasible_beam(bq.a_mat, bq.b_mat, p_max)
        if np.vdot(w, w).real == 0.0:
            break

        if n:
            pq = obj.phase_quadratics(w, sc, es, sigma2_u, sigma2_e)
            c_phi = pq.c_mat @ phi
            d_phi = pq.d_mat @ phi
            u_val = pq.num(phi)
            v_val = pq.den(phi)
            for i in range(n):
                bu = c_phi[i] - pq.c_mat[i, i] * phi[i] + pq.c1[i]
                bv = d_phi[i] - pq.d_mat[i, i] * phi[i] + pq.d1[i]
                cu = u_val - 2.0 * (phi[i].conj() * bu).real
                cv = v_val - 2.0 * (phi[i].conj() * bv).real
                trial = np.append(cand, phi[i])  # incumbent keeps monotonicity
                num = cu + 2.0 * (trial.conj() * bu).real
                den = cv + 2.0 * (trial.conj() * bv).real
                j = int(np.argmax(num / den))
                new = trial[j]
                if new != phi[i]:
                    delta = new - phi[i]
                    c_phi = c_phi + pq.c_mat[:, i] * delta
                    d_phi = d_phi + pq.d_mat[:, i] * delta
                    phi[i] = new
                    u_val = cu + 2.0 * (new.conj() * bu).real
                    v_val = cv + 2.0 * (new.conj() * bv).real

        val = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
        if val - lesr_prev <= tol:
            lesr_prev = max(lesr_prev, val)
            break
        lesr_prev = val

    value = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
    return BaselineResult("ao_ew", Solution(phi=phi, w=w, lesr=value), iterations=rounds)


def random_phase_mrt(sc: ScenarioChannels, es: EveStatistics,
                     sigma2_u: float, sigma2_e: float, p_max: float,
                     seed=0) -> BaselineResult:
    """Uniform random unit-modulus phases, matched-filter beam at full power."""
    from . import rng

    u = rng.uniforms(seed, rng.STREAM_PHASE_INIT, 0, sc.n)
    phi = np.exp(2j * np.pi * u)
    a_eff = obj.combined_user_row(phi, sc).conj()
    norm = np.linalg.norm(a_eff)
    if norm == 0:
        w = np.zeros(sc.m, dtype=complex)
        w[0] = math.sqrt(p_max)
    else:
        w = math.sqrt(p_max) * a_eff / norm
    value = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
    return BaselineResult("random", Solution(phi=phi, w=w, lesr=value), iterations=0)
