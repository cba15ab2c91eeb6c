"""Deterministic objectives: user/Eve rates, the LESR bound, and the
augmented Lagrangian, plus the quadratic-form parameterizations the block
solver works on.

The secrecy lower bound is the ratio

    num = |(phi^T H_U + h_AU^H) w|^2 / sigma_U^2 + 1
    den = (w^H G_A w + x^H G_I x + 2 Re[w^H G_AI x]) / sigma_E^2 + 1,
    x = Phi H_AI w,

reported as [log2(num/den)]^+. Quadratic forms are evaluated directly
(x^H G x, never through matrix square roots). Analytically den >= 1 (the Eve
term is an expectation of a squared magnitude); a tiny floor guards against
rounding before division.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import EveStatistics, ScenarioChannels

_DEN_FLOOR = 1e-15


@dataclass
class Solution:
    """A beamforming pair with its reported LESR value."""

    phi: np.ndarray  # (N,) RIS reflect coefficients
    w: np.ndarray    # (M,) transmit beamformer
    lesr: float      # bps/Hz

    def power(self) -> float:
        return float(np.vdot(self.w, self.w).real)

    def max_modulus_violation(self) -> float:
        if self.phi.size == 0:
            return 0.0
        return float(np.max(np.abs(np.abs(self.phi) - 1.0)))


@dataclass(frozen=True)
class DualState:
    """Multipliers and penalty parameter of the augmented Lagrangian."""

    lam: np.ndarray  # (N,) real
    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("penalty parameter rho must be positive")
        if not np.all(np.isfinite(self.lam)):
            raise ValueError("multipliers must be finite")


@dataclass(frozen=True)
class PhaseQuadratics:
    """Ratio coefficients of the phase-block subproblem.

    num(phi) = phi^H C phi + 2 Re[phi^H c1] + c2,
    den(phi) = phi^H D phi + 2 Re[phi^H d1] + d2, with C rank-1.
    """

    c_mat: np.ndarray   # (N, N)
    c1: np.ndarray      # (N,)
    c2: float
    d_mat: np.ndarray   # (N, N)
    d1: np.ndarray      # (N,)
    d2: float

    def num(self, phi: np.ndarray) -> float:
        return float((np.vdot(phi, self.c_mat @ phi) + 2 * np.vdot(phi, self.c1)).real + self.c2)

    def den(self, phi: np.ndarray) -> float:
        return float((np.vdot(phi, self.d_mat @ phi) + 2 * np.vdot(phi, self.d1)).real + self.d2)

    def ratio(self, phi: np.ndarray) -> float:
        return self.num(phi) / max(self.den(phi), _DEN_FLOOR)


@dataclass(frozen=True)
class BeamQuadratics:
    """Ratio coefficients of the beam-block subproblem.

    num(w) = w^H A w + 1, den(w) = w^H B w + 1, with A rank-1 and B Hermitian
    PSD (it is the Eve-term expectation matrix).
    """

    a_mat: np.ndarray  # (M, M)
    b_mat: np.ndarray  # (M, M)

    def num(self, w: np.ndarray) -> float:
        return float(np.vdot(w, self.a_mat @ w).real + 1.0)

    def den(self, w: np.ndarray) -> float:
        return float(np.vdot(w, self.b_mat @ w).real + 1.0)

    def ratio(self, w: np.ndarray) -> float:
        return self.num(w) / max(self.den(w), _DEN_FLOOR)


def combined_user_row(phi: np.ndarray, sc: ScenarioChannels) -> np.ndarray:
    """Row vector phi^T H_U + h_AU^H of the effective user channel."""
    row = sc.h_au.conj()
    if phi.size:
        row = phi @ sc.h_u + row
    return row


def rate_user(phi: np.ndarray, w: np.ndarray, sc: ScenarioChannels, sigma2_u: float) -> float:
    """Achievable user rate log2(1 + |(phi^T H_U + h_AU^H) w|^2 / sigma_U^2)."""
    gain = abs(combined_user_row(phi, sc) @ w) ** 2
    return float(np.log2(1.0 + gain / sigma2_u))


def rate_eve_instant(phi: np.ndarray, w: np.ndarray, h_ae: np.ndarray, h_ie: np.ndarray,
                     sc: ScenarioChannels, sigma2_e: float) -> float:
    """Eve rate for one instantaneous channel draw (cascade via H_E = diag(h_IE*) H_AI)."""
    row = h_ae.conj()
    if phi.size:
        h_e = h_ie.conj()[:, None] * sc.h_ai
        row = phi @ h_e + row
    gain = abs(row @ w) ** 2
    return float(np.log2(1.0 + gain / sigma2_e))


def eve_expected_power(phi: np.ndarray, w: np.ndarray, sc: ScenarioChannels,
                       es: EveStatistics) -> float:
    """E|(h_IE^H Phi H_AI + h_AE^H) w|^2 in closed form from the second moments."""
    quad = np.vdot(w, es.g_a @ w).real
    if phi.size:
        x = phi * (sc.h_ai @ w)
        quad += np.vdot(x, es.g_i @ x).real
        quad += 2.0 * (np.vdot(w, es.g_ai @ x)).real
    return float(quad)


def lesr_parts(phi: np.ndarray, w: np.ndarray, sc: ScenarioChannels, es: EveStatistics,
               sigma2_u: float, sigma2_e: float) -> tuple[float, float]:
    """(num, den) of the secrecy ratio; den floored against rounding."""
    num = abs(combined_user_row(phi, sc) @ w) ** 2 / sigma2_u + 1.0
    den = eve_expected_power(phi, w, sc, es) / sigma2_e + 1.0
    return num, max(den, _DEN_FLOOR)


def lesr_unclamped(phi, w, sc, es, sigma2_u, sigma2_e) -> float:
    num, den = lesr_parts(phi, w, sc, es, sigma2_u, sigma2_e)
    return float(np.log2(num / den))


def lesr(phi, w, sc, es, sigma2_u, sigma2_e) -> float:
    """Lower bound on the ergodic secrecy rate, clamped at zero (bps/Hz)."""
    return max(0.0, lesr_unclamped(phi, w, sc, es, sigma2_u, sigma2_e))


def phase_quadratics(w: np.ndarray, sc: ScenarioChannels, es: EveStatistics,
                     sigma2_u: float, sigma2_e: float) -> PhaseQuadratics:
    """Coefficients of the secrecy ratio as a quadratic fraction in phi (w fixed)."""
    u = (sc.h_u @ w).conj()           # conj(H_U w)
    s = complex(sc.h_au.conj() @ w)   # h_AU^H w
    c_mat = np.outer(u, u.conj()) / sigma2_u
    c1 = u * s / sigma2_u
    c2 = abs(s) ** 2 / sigma2_u + 1.0

    q = sc.h_ai @ w                   # H_AI w
    d_mat = es.g_i * np.outer(q.conj(), q) / sigma2_e
    d_mat = 0.5 * (d_mat + d_mat.conj().T)
    d1 = q.conj() * (es.g_ai.conj().T @ w) / sigma2_e
    d2 = float(np.vdot(w, es.g_a @ w).real) / sigma2_e + 1.0
    return PhaseQuadratics(c_mat=c_mat, c1=c1, c2=c2, d_mat=d_mat, d1=d1, d2=d2)


def beam_quadratics(phi: np.ndarray, sc: ScenarioChannels, es: EveStatistics,
                    sigma2_u: float, sigma2_e: float) -> BeamQuadratics:
    """Coefficients of the secrecy ratio as a quadratic fraction in w (phi fixed)."""
    a = combined_user_row(phi, sc).conj()
    a_mat = np.outer(a, a.conj()) / sigma2_u
    if phi.size:
        b1 = phi[:, None] * sc.h_ai   # Phi H_AI
        b2 = es.g_ai @ b1
        b_mat = es.g_a + b1.conj().T @ es.g_i @ b1 + b2 + b2.conj().T
    else:
        b_mat = es.g_a.copy()
    b_mat = 0.5 * (b_mat + b_mat.conj().T) / sigma2_e
    return BeamQuadratics(a_mat=a_mat, b_mat=b_mat)


def penalty_sum(phi: np.ndarray, dual: DualState) -> float:
    """Minimization-form penalty (1/2 rho) sum_i (|phi_i| - 1 + rho lam_i)^2.

    The multiplier sign is the standard augmented-Lagrangian one, consistent
    with the update lam <- lam + (|phi| - 1)/rho: expanding (and dropping the
    (rho lam)^2 offset) gives lam^T (|phi| - 1) + ||(|phi| - 1)||^2 / (2 rho),
    so the multiplier counteracts accumulated violation.
    """
    if phi.size == 0:
        return 0.0
    t = np.abs(phi) - 1.0 + dual.rho * dual.lam
    return float(np.sum(t * t)) / (2.0 * dual.rho)


def al_objective(phi, w, dual: DualState, sc, es, sigma2_u, sigma2_e) -> float:
    """Augmented Lagrangian in maximization (reporting) form, log retained.

    L = lesr_unclamped - (1/2 rho) sum_i [(|phi_i| - 1 - rho lam_i)^2 - (rho lam_i)^2].

    The inner solver works on the log-free counterpart `al_inner_value`; the
    outer logarithm is monotone so the two agree on descent direction.
    """
    offset = float(np.sum((dual.rho * dual.lam) ** 2)) / (2.0 * dual.rho)
    return lesr_unclamped(phi, w, sc, es, sigma2_u, sigma2_e) - penalty_sum(phi, dual) + offset


def al_inner_value(phi, w, dual: DualState, sc, es, sigma2_u, sigma2_e) -> float:
    """Log-free minimization-form AL the BSCA blocks actually decrease:
    -num/den + penalty (the constant multiplier offset dropped)."""
    num, den = lesr_parts(phi, w, sc, es, sigma2_u, sigma2_e)
    return -num / den + penalty_sum(phi, dual)
