"""Double-loop solver for the LESR maximization under unit-modulus and
power constraints.

Inner loop: cyclic block updates, each a gradient step with Armijo
backtracking (plain descent for the RIS phases, projected descent for the
transmit beamformer). Outer loop: multiplier/penalty updates on the
augmented Lagrangian, terminating once the reported bound stalls and the
modulus constraint is met.

Gradient convention: for a real objective f of a complex vector x,
grad = 2 df/dx*, so f(x + t d) = f(x) + t Re<grad, d> + O(t^2) and the step
x - alpha * grad is steepest descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import objective as obj
from .channel import EveStatistics, ScenarioChannels
from .objective import BeamQuadratics, DualState, PhaseQuadratics, Solution

from . import rng


@dataclass(frozen=True)
class PdcaConfig:
    """Hyperparameters of the double-loop solve."""

    rho0: float = 1.0          # initial penalty parameter
    c_rho: float = 0.7         # penalty decrease factor, in (0, 1)
    eta: float = 1e-3          # constraint-violation tolerance
    eps_outer: float = 1e-4    # |LESR change| termination threshold
    eps_inner: float = 1e-5    # |AL change| termination threshold
    alpha1_ini: float = 1.0    # initial step size, phase block
    alpha2_ini: float = 1.0    # initial step size, beam block
    ls_rho1: float = 0.5       # backtracking shrink, phase block
    ls_rho2: float = 0.5       # backtracking shrink, beam block
    ls_c1: float = 1e-3        # sufficient-decrease constant, phase block
    ls_c2: float = 1e-3        # sufficient-decrease constant, beam block
    max_outer: int = 100
    max_inner: int = 200
    max_backtracks: int = 40

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError("rho0 must be positive")
        for name in ("c_rho", "ls_rho1", "ls_rho2", "ls_c1", "ls_c2"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.alpha1_ini <= 0 or self.alpha2_ini <= 0:
            raise ValueError("initial step sizes must be positive")
        for name in ("eta", "eps_outer", "eps_inner"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class StepRecord:
    """One accepted/rejected block step inside the BSCA loop."""

    block: str           # "phi" or "w"
    alpha: float
    f_before: float      # block objective before the step
    f_after: float
    grad_sq: float       # ||grad||^2 used in the sufficient-decrease test
    accepted: bool
    al_min_after: float  # minimization-form AL after the step


@dataclass
class InnerTrace:
    steps: list[StepRecord] = field(default_factory=list)
    al_values: list[float] = field(default_factory=list)  # log-form AL per cycle
    iterations: int = 0


@dataclass
class OuterRecord:
    lesr: float
    al: float
    violation: float
    rho: float
    inner_iterations: int


@dataclass
class SolveTrace:
    outer: list[OuterRecord] = field(default_factory=list)
    inner: list[InnerTrace] = field(default_factory=list)
    truncated: bool = False
    lesr_pre_projection: float = float("nan")
    violation_pre_projection: float = float("nan")

    @property
    def inner_steps(self):
        for tr in self.inner:
            yield from tr.steps


def grad_phase(phi: np.ndarray, pq: PhaseQuadratics, dual: DualState) -> np.ndarray:
    """Gradient (2 d/dphi*) of the phase-block objective -num/den + penalty."""
    if phi.size == 0:
        return np.zeros(0, dtype=complex)
    u = pq.num(phi)
    v = pq.den(phi)
    gu = pq.c_mat @ phi + pq.c1     # d num / d phi*
    gv = pq.d_mat @ phi + pq.d1     # d den / d phi*
    frac = -2.0 * (gu * v - u * gv) / (v * v)

    mod = np.abs(phi)
    t = mod - 1.0 + dual.rho * dual.lam
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(mod > 0, phi / np.where(mod > 0, mod, 1.0), 0.0)
    pen = t * direction / dual.rho
    return frac + pen


def grad_beam(w: np.ndarray, bq: BeamQuadratics) -> np.ndarray:
    """Gradient (2 d/dw*) of the beam-block objective -(w^H A w + 1)/(w^H B w + 1)."""
    num = bq.num(w)
    den = bq.den(w)
    return -2.0 * ((bq.a_mat @ w) * den - num * (bq.b_mat @ w)) / (den * den)


def project_power(w: np.ndarray, p_max: float) -> np.ndarray:
    """Euclidean projection onto the power ball ||w||^2 <= P_max."""
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    p = np.vdot(w, w).real
    if p <= p_max:
        return w
    return w * math.sqrt(p_max / p)


def armijo_step(objective, x: np.ndarray, grad: np.ndarray, alpha_ini: float,
                shrink: float, c_armijo: float, max_backtracks: int,
                projector=None) -> tuple[np.ndarray, float, bool]:
    """Backtracking line search with sufficient decrease.

    The step size shrinks before each trial, so the first candidate uses
    shrink * alpha_ini. A candidate x_hat = projector(x - alpha grad) is
    accepted when objective(x_hat) <= objective(x) - c * alpha * ||grad||^2;
    non-finite candidate objectives count as failed trials. Returns
    (x, 0.0, False) if the trial budget is exhausted.
    """
    f0 = objective(x)
    g2 = float(np.vdot(grad, grad).real)
    alpha = alpha_ini
    for _ in range(max_backtracks):
        alpha = shrink * alpha
        cand = x - alpha * grad
        if projector is not None:
            cand = projector(cand)
        f = objective(cand)
        if math.isfinite(f) and f <= f0 - c_armijo * alpha * g2:
            return cand, alpha, True
    return x, 0.0, False


def bsca_inner(phi0: np.ndarray, w0: np.ndarray, dual: DualState,
               sc: ScenarioChannels, es: EveStatistics,
               sigma2_u: float, sigma2_e: float, p_max: float,
               cfg: PdcaConfig) -> tuple[np.ndarray, np.ndarray, InnerTrace]:
    """Block successive convex approximation sweep over (phi, w) for one AL problem.

    Terminates when the log-form AL stalls within eps_inner, both block line
    searches fail in one cycle (stationarity surrogate), or max_inner is hit.
    """
    phi = phi0.copy()
    w = w0.copy()
    trace = InnerTrace()

    def al_min():
        return obj.al_inner_value(phi, w, dual, sc, es, sigma2_u, sigma2_e)

    l_prev = obj.al_objective(phi, w, dual, sc, es, sigma2_u, sigma2_e)
    for k in range(cfg.max_inner):
        any_move = False

        if phi.size:
            pq = obj.phase_quadratics(w, sc, es, sigma2_u, sigma2_e)

            def h(p):
                return -pq.ratio(p) + obj.penalty_sum(p, dual)

            g_phi = grad_phase(phi, pq, dual)
            f_before = h(phi)
            phi_next, alpha, ok = armijo_step(
                h, phi, g_phi, cfg.alpha1_ini, cfg.ls_rho1, cfg.ls_c1, cfg.max_backtracks)
            phi = phi_next
            any_move |= ok
            trace.steps.append(StepRecord(
                block="phi", alpha=alpha, f_before=f_before, f_after=h(phi),
                grad_sq=float(np.vdot(g_phi, g_phi).real), accepted=ok,
                al_min_after=al_min()))

        bq = obj.beam_quadratics(phi, sc, es, sigma2_u, sigma2_e)

        def g(x):
            return -bq.ratio(x)

        g_w = grad_beam(w, bq)
        f_before = g(w)
        w_next, alpha, ok = armijo_step(
            g, w, g_w, cfg.alpha2_ini, cfg.ls_rho2, cfg.ls_c2, cfg.max_backtracks,
            projector=lambda x: project_power(x, p_max))
        w = w_next
        any_move |= ok
        trace.steps.append(StepRecord(
            block="w", alpha=alpha, f_before=f_before, f_after=g(w),
            grad_sq=float(np.vdot(g_w, g_w).real), accepted=ok,
            al_min_after=al_min()))

        trace.iterations = k + 1
        l_cur = obj.al_objective(phi, w, dual, sc, es, sigma2_u, sigma2_e)
        trace.al_values.append(l_cur)
        if not any_move:
            break
        if abs(l_cur - l_prev) <= cfg.eps_inner:
            break
        l_prev = l_cur
    return phi, w, trace


def initial_point(sc: ScenarioChannels, p_max: float, seed) -> tuple[np.ndarray, np.ndarray]:
    """Feasible start: uniform random unit-modulus phases, matched-filter beam
    to the combined user channel at full power."""
    n = sc.n
    u = rng.uniforms(seed, rng.STREAM_PHASE_INIT, 0, n)
    phi = np.exp(2j * np.pi * u)
    a_eff = obj.combined_user_row(phi, sc).conj()
    norm = np.linalg.norm(a_eff)
    if norm == 0:
        w = np.zeros(sc.m, dtype=complex)
        w[0] = math.sqrt(p_max)
    else:
        w = math.sqrt(p_max) * a_eff / norm
    return phi, w


def aligned_initial_point(sc: ScenarioChannels, es: EveStatistics,
                          sigma2_u: float, sigma2_e: float,
                          p_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic start: RIS phases co-phased with the direct user link,
    beamformer set to the ratio-optimal direction for those phases.

    Used as a restart when a random start collapses into the w = 0
    stationary point (every gradient vanishes there, so the loops cannot
    leave it even when a strictly positive optimum exists)."""
    from . import baselines

    norm_au = np.linalg.norm(sc.h_au)
    if norm_au == 0:
        w_mf = np.zeros(sc.m, dtype=complex)
        w_mf[0] = math.sqrt(p_max)
    else:
        w_mf = math.sqrt(p_max) * sc.h_au / norm_au
    if sc.n:
        t = sc.h_u @ w_mf
        base = np.vdot(sc.h_au, w_mf)
        phi = np.exp(1j * (np.angle(base) - np.angle(t)))
    else:
        phi = np.zeros(0, dtype=complex)
    bq = obj.beam_quadratics(phi, sc, es, sigma2_u, sigma2_e)
    w, _ = baselines.best_feasible_beam(bq.a_mat, bq.b_mat, p_max)
    if np.vdot(w, w).real == 0.0:  # keep gradients alive at the start
        w = w_mf
    return phi, w


def pdca_solve(sc: ScenarioChannels, es: EveStatistics, sigma2_u: float, sigma2_e: float,
               p_max: float, cfg: PdcaConfig | None = None,
               phi0: np.ndarray | None = None, w0: np.ndarray | None = None,
               seed=0) -> tuple[Solution, SolveTrace]:
    """Penalty-dual double-loop solve of the LESR maximization.

    Outer iteration r solves the AL problem at (rho_r, lam_r) with the inner
    BSCA loop, then tightens: multipliers move when the modulus violation is
    within eta, otherwise the penalty parameter shrinks by c_rho. Termination
    requires both a stalled LESR and a feasible (within eta) phase vector; the
    returned phases are then hard-projected to unit modulus and the reported
    LESR is evaluated at the projected point.

    When both initial blocks are left to the default seeded start and the
    solve lands exactly on the degenerate w = 0 point, one deterministic
    restart from the phase-aligned start is attempted and the better of the
    two results is returned.
    """
    default_init = phi0 is None and w0 is None
    sol, trace = _pdca_solve_from(sc, es, sigma2_u, sigma2_e, p_max, cfg,
                                  phi0, w0, seed)
    if default_init and sol.lesr <= 0.0:
        phi_a, w_a = aligned_initial_point(sc, es, sigma2_u, sigma2_e, p_max)
        sol2, trace2 = _pdca_solve_from(sc, es, sigma2_u, sigma2_e, p_max, cfg,
                                        phi_a, w_a, seed)
        if sol2.lesr > sol.lesr:
            return sol2, trace2
    return sol, trace


def _pdca_solve_from(sc, es, sigma2_u, sigma2_e, p_max, cfg, phi0, w0, seed):
    cfg = cfg or PdcaConfig()
    if phi0 is None or w0 is None:
        phi_init, w_init = initial_point(sc, p_max, seed)
        phi = phi_init if phi0 is None else phi0.copy()
        w = w_init if w0 is None else w0.copy()
    else:
        phi, w = phi0.copy(), w0.copy()
    if np.vdot(w, w).real > p_max * (1 + 1e-9):
        raise ValueError("initial beamformer violates the power constraint")

    lam = np.zeros(sc.n)
    rho = cfg.rho0
    trace = SolveTrace()
    lesr_prev = math.inf

    best = None  # (lesr, phi, w, violation)
    for r in range(cfg.max_outer):
        dual = DualState(lam=lam, rho=rho)
        phi, w, inner = bsca_inner(phi, w, dual, sc, es, sigma2_u, sigma2_e, p_max, cfg)
        trace.inner.append(inner)

        mod = np.abs(phi) if phi.size else np.zeros(0)
        violation = float(np.max(np.abs(mod - 1.0))) if phi.size else 0.0
        lesr_cur = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
        al_cur = obj.al_objective(phi, w, dual, sc, es, sigma2_u, sigma2_e)
        trace.outer.append(OuterRecord(
            lesr=lesr_cur, al=al_cur, violation=violation, rho=rho,
            inner_iterations=inner.iterations))

        if best is None or (violation <= cfg.eta and lesr_cur > best[0]):
            best = (lesr_cur, phi.copy(), w.copy(), violation)

        converged = abs(lesr_cur - lesr_prev) <= cfg.eps_outer and violation <= cfg.eta
        lesr_prev = lesr_cur
        if converged:
            break

        if violation <= cfg.eta:
            lam = lam + (mod - 1.0) / rho
        else:
            rho = cfg.c_rho * rho
    else:
        trace.truncated = True
        if best is not None and best[3] <= cfg.eta:
            _, phi, w, violation = best
        lesr_cur = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
        violation = float(np.max(np.abs(np.abs(phi) - 1.0))) if phi.size else 0.0

    trace.lesr_pre_projection = lesr_cur
    trace.violation_pre_projection = violation

    if phi.size:
        mod = np.abs(phi)
        phi = np.where(mod > 0, phi / np.where(mod > 0, mod, 1.0), 1.0)
    w = project_power(w, p_max)
    final = obj.lesr(phi, w, sc, es, sigma2_u, sigma2_e)
    return Solution(phi=phi, w=w, lesr=final), trace
