"""Channel model: geometry, Rician fading statistics, and sampling.

User-side links (AP-user, AP-RIS, RIS-user) are generated as known channel
realizations; the eavesdropper links are represented by their first and
second moments, from which instantaneous channels can be re-sampled for
Monte Carlo validation.

Conventions (the ones that are a modelling choice, not physics):
  * AP is a ULA along the y axis, the RIS a planar panel in the y-z plane
    (normal along x). All nodes sit at z = 0, so the panel's z factor is
    broadside (all ones) and steering reduces to the y-axis progression.
  * Steering phase progression is exp(+j 2 pi spacing m sin_angle) with
    sin_angle read off 2-D coordinate differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class Geometry:
    """Node placement and array sizes. Coordinates in meters, spacing in wavelengths."""

    ap_xy: tuple[float, float]
    ris_xy: tuple[float, float]
    user_xy: tuple[float, float]
    eve_xy: tuple[float, float]
    m: int  # AP antennas
    ny: int  # RIS elements along y
    nz: int  # RIS elements along z
    delta_a: float = 0.5
    delta_i: float = 0.5

    def __post_init__(self):
        if self.m < 1 or self.ny < 1 or self.nz < 1:
            raise ValueError("antenna/element counts must be >= 1")
        if self.delta_a <= 0 or self.delta_i <= 0:
            raise ValueError("element spacings must be positive")
        pts = [self.ap_xy, self.ris_xy, self.user_xy, self.eve_xy]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if math.dist(pts[i], pts[j]) <= 0:
                    raise ValueError("node positions must be pairwise distinct")

    @property
    def n(self) -> int:
        return self.ny * self.nz

    def dist(self, a: str, b: str) -> float:
        xy = {"ap": self.ap_xy, "ris": self.ris_xy, "user": self.user_xy, "eve": self.eve_xy}
        return math.dist(xy[a], xy[b])


@dataclass(frozen=True)
class FadingStats:
    """Large-scale fading parameters, all in linear units. K may be inf (pure LoS)."""

    zeta0: float  # reference path gain at d0
    d0: float
    alpha_au: float
    alpha_ae: float
    alpha_iu: float
    alpha_ie: float
    alpha_ai: float
    k_au: float
    k_ae: float
    k_iu: float
    k_ie: float
    k_ai: float
    sigma2_u: float
    sigma2_e: float

    def __post_init__(self):
        if self.zeta0 <= 0 or self.d0 <= 0:
            raise ValueError("zeta0 and d0 must be positive")
        for a in (self.alpha_au, self.alpha_ae, self.alpha_iu, self.alpha_ie, self.alpha_ai):
            if a < 0:
                raise ValueError("path-loss exponents must be >= 0")
        for k in (self.k_au, self.k_ae, self.k_iu, self.k_ie, self.k_ai):
            if not (k >= 0):  # rejects NaN too; inf allowed
                raise ValueError("Rician K-factors must be >= 0 (inf allowed)")
        if self.sigma2_u <= 0 or self.sigma2_e <= 0:
            raise ValueError("noise powers must be positive")


@dataclass(frozen=True)
class ScenarioChannels:
    """Perfectly known user-side channels for one scenario realization."""

    h_au: np.ndarray  # (M,)
    h_ai: np.ndarray  # (N, M)
    h_iu: np.ndarray  # (N,)
    h_u: np.ndarray   # (N, M) cascaded: diag(conj(h_iu)) @ h_ai

    def __post_init__(self):
        for arr in (self.h_au, self.h_ai, self.h_iu, self.h_u):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("channel entries must be finite")
        expected = self.h_iu.conj()[:, None] * self.h_ai
        if not np.allclose(self.h_u, expected, rtol=0, atol=0):
            raise ValueError("h_u must equal diag(conj(h_iu)) @ h_ai exactly")

    @property
    def m(self) -> int:
        return self.h_au.shape[0]

    @property
    def n(self) -> int:
        return self.h_iu.shape[0]


@dataclass(frozen=True)
class EveStatistics:
    """Second moments and LoS means of the eavesdropper links.

    Carries the scalar prefactors (path gains, K mixing weights) so that
    instantaneous channels can be re-sampled from the same statistics.
    """

    g_a: np.ndarray     # (M, M) Hermitian PSD, E[h_ae h_ae^H]
    g_i: np.ndarray     # (N, N) Hermitian PSD, E[h_ie h_ie^H]
    g_ai: np.ndarray    # (M, N) rank <= 1, E[h_ae] E[h_ie]^H
    hbar_ae: np.ndarray  # (M,) unit-modulus LoS steering
    hbar_ie: np.ndarray  # (N,)
    gain_ae: float      # path gain zeta0 (d/d0)^-alpha
    gain_ie: float
    k_ae: float
    k_ie: float

    def __post_init__(self):
        for g in (self.g_a, self.g_i):
            if g.size == 0:
                continue
            if np.max(np.abs(g - g.conj().T)) > _HERM_TOL:
                raise ValueError("second-moment matrices must be Hermitian")
            if np.min(np.linalg.eigvalsh(g)) < -1e-10:
                raise ValueError("second-moment matrices must be PSD")

    @property
    def m(self) -> int:
        return self.g_a.shape[0]

    @property
    def n(self) -> int:
        return self.g_i.shape[0]


def _los_weights(k: float) -> tuple[float, float]:
    """(LoS, NLoS) amplitude weights sqrt(K/(K+1)), sqrt(1/(K+1)); K=inf -> (1, 0)."""
    if math.isinf(k):
        return 1.0, 0.0
    return math.sqrt(k / (k + 1.0)), math.sqrt(1.0 / (k + 1.0))


def ula_response(sin_angle: float, count: int, spacing: float) -> np.ndarray:
    """Uniform-linear-array steering vector exp(j 2 pi spacing m sin_angle)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if abs(sin_angle) > 1:
        raise ValueError(f"|sin_angle| must be <= 1, got {sin_angle}")
    m = np.arange(count)
    return np.exp(2j * np.pi * spacing * m * sin_angle)


def upa_response(sin_azimuth: float, ny: int, nz: int, spacing: float) -> np.ndarray:
    """Planar-panel steering: ULA along y, broadside (all nodes at z = 0) along z."""
    y = ula_response(sin_azimuth, ny, spacing)
    return np.kron(y, np.ones(nz))


def pathloss_gain(d: float, alpha: float, zeta0: float, d0: float) -> float:
    """Distance-power-law gain zeta0 (d/d0)^-alpha (linear)."""
    if d <= 0:
        raise ValueError("distance must be positive")
    return zeta0 * (d / d0) ** (-alpha)


def _sin_to(src_xy, dst_xy) -> float:
    """Sine of the departure angle seen by a y-axis array at src toward dst."""
    dx = dst_xy[0] - src_xy[0]
    dy = dst_xy[1] - src_xy[1]
    return dy / math.hypot(dx, dy)


def build_scenario(geom: Geometry, stats: FadingStats, seed) -> ScenarioChannels:
    """Sample the user-side channels for one scenario realization.

    h_AU: Rician with K_AU (Rayleigh at the default K_AU = 0);
    H_AI: Rician with K_AI (rank-1 pure LoS at the default K_AI = inf);
    h_IU: Rician with K_IU. Deterministic given seed. Word consumption is
    fixed regardless of K so that realizations stay aligned across configs.
    """
    m, n = geom.m, geom.n

    g_au = pathloss_gain(geom.dist("ap", "user"), stats.alpha_au, stats.zeta0, stats.d0)
    g_ai = pathloss_gain(geom.dist("ap", "ris"), stats.alpha_ai, stats.zeta0, stats.d0)
    g_iu = pathloss_gain(geom.dist("ris", "user"), stats.alpha_iu, stats.zeta0, stats.d0)

    # LoS components from the fixed array orientations.
    bar_au = ula_response(_sin_to(geom.ap_xy, geom.user_xy), m, geom.delta_a)
    bar_iu = upa_response(_sin_to(geom.ris_xy, geom.user_xy), geom.ny, geom.nz, geom.delta_i)
    a_ris = upa_response(_sin_to(geom.ris_xy, geom.ap_xy), geom.ny, geom.nz, geom.delta_i)
    a_ap = ula_response(_sin_to(geom.ap_xy, geom.ris_xy), m, geom.delta_a)
    bar_ai = np.outer(a_ris, a_ap.conj())

    z = rng.complex_normals(seed, rng.STREAM_SCENARIO, 0, m + n * m + n)
    z_au = z[:m]
    z_ai = z[m:m + n * m].reshape(n, m)
    z_iu = z[m + n * m:]

    lw, nw = _los_weights(stats.k_au)
    h_au = math.sqrt(g_au) * (lw * bar_au + nw * z_au)
    lw, nw = _los_weights(stats.k_ai)
    h_ai = math.sqrt(g_ai) * (lw * bar_ai + nw * z_ai)
    lw, nw = _los_weights(stats.k_iu)
    h_iu = math.sqrt(g_iu) * (lw * bar_iu + nw * z_iu)

    h_u = h_iu.conj()[:, None] * h_ai
    return ScenarioChannels(h_au=h_au, h_ai=h_ai, h_iu=h_iu, h_u=h_u)


def eve_second_moments(geom: Geometry, stats: FadingStats) -> EveStatistics:
    """Eavesdropper channel statistics from geometry and fading parameters.

    G_i = gain_i (K/(K+1) hbar hbar^H + 1/(K+1) I) for i in {A, I};
    the cross moment is the outer product of the two mean vectors.
    """
    gain_ae = pathloss_gain(geom.dist("ap", "eve"), stats.alpha_ae, stats.zeta0, stats.d0)
    gain_ie = pathloss_gain(geom.dist("ris", "eve"), stats.alpha_ie, stats.zeta0, stats.d0)

    hbar_ae = ula_response(_sin_to(geom.ap_xy, geom.eve_xy), geom.m, geom.delta_a)
    hbar_ie = upa_response(_sin_to(geom.ris_xy, geom.eve_xy), geom.ny, geom.nz, geom.delta_i)

    def second_moment(gain, k, hbar):
        lw, nw = _los_weights(k)
        g = (lw ** 2) * np.outer(hbar, hbar.conj()) + (nw ** 2) * np.eye(hbar.shape[0])
        g = gain * g
        return 0.5 * (g + g.conj().T)  # exact Hermitian symmetry

    g_a = second_moment(gain_ae, stats.k_ae, hbar_ae)
    g_i = second_moment(gain_ie, stats.k_ie, hbar_ie)

    lw_a, _ = _los_weights(stats.k_ae)
    lw_i, _ = _los_weights(stats.k_ie)
    g_ai = math.sqrt(gain_ae) * math.sqrt(gain_ie) * lw_a * lw_i * np.outer(hbar_ae, hbar_ie.conj())

    return EveStatistics(
        g_a=g_a, g_i=g_i, g_ai=g_ai,
        hbar_ae=hbar_ae, hbar_ie=hbar_ie,
        gain_ae=gain_ae, gain_ie=gain_ie,
        k_ae=stats.k_ae, k_ie=stats.k_ie,
    )


def sample_eve_batch(es: EveStatistics, seed, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Eve channel draws [start, start+count) as arrays (count, M) and (count, N).

    Draw i is a pure function of (seed, i): any contiguous split of the index
    range reproduces the serial draws bit-for-bit.
    """
    m, n = es.m, es.n
    per = rng.words_per_eve_draw(m, n)
    z = rng.complex_normals(seed, rng.STREAM_EVE, start * per, count * (m + n))
    z = z.reshape(count, m + n)

    lw_a, nw_a = _los_weights(es.k_ae)
    lw_i, nw_i = _los_weights(es.k_ie)
    h_ae = math.sqrt(es.gain_ae) * (lw_a * es.hbar_ae[None, :] + nw_a * z[:, :m])
    h_ie = math.sqrt(es.gain_ie) * (lw_i * es.hbar_ie[None, :] + nw_i * z[:, m:])
    return h_ae, h_ie


def sample_eve_channels(es: EveStatistics, seed) -> tuple[np.ndarray, np.ndarray]:
    """One joint (h_AE, h_IE) draw; equals draw index 0 of the batch stream."""
    h_ae, h_ie = sample_eve_batch(es, seed, 0, 1)
    return h_ae[0], h_ie[0]
