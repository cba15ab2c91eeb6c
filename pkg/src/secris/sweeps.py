"""Experiment driver: parameter sweeps over power, element count, and node
placements, with per-scheme solve + Monte Carlo ESR evaluation.

Output is a fixed-schema CSV (UTF-8, LF, full-precision floats) that is
byte-identical across repeated runs with the same master seed: every random
stream is derived from (seed, kind, sweep index, realization), rows are
sorted deterministically, and no wall-clock data enters the file.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baselines, montecarlo
from .channel import build_scenario, eve_second_moments
from .config import ExperimentConfig
from .objective import Solution
from .solver import pdca_solve

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "schema_version", "kind", "sweep_value", "scheme", "m", "n_ris",
    "p_max_dbm", "seed", "n_realizations", "n_mc",
    "lesr", "esr_mean", "esr_stderr", "iterations",
)

SWEEP_KINDS = ("power", "elements", "eve_y", "user_y", "ris_y")
_KIND_ID = {k: i + 1 for i, k in enumerate(SWEEP_KINDS)}
_SCHEME_ID = {"pdca": 1, "ao_ew": 2, "no_ris": 3, "random": 4}

WORKERS_ENV = "SECRIS_WORKERS"


def _apply_sweep_value(cfg: ExperimentConfig, kind: str, value) -> ExperimentConfig:
    out = ExperimentConfig.from_dict(cfg.to_dict())
    if kind == "power":
        out.p_max_dbm = float(value)
    elif kind == "elements":
        ny = int(out.geometry["ny"])
        n = int(value)
        if n % ny != 0:
            raise ValueError(f"element count {n} not a multiple of ny={ny}")
        out.geometry["nz"] = n // ny
    elif kind == "eve_y":
        out.geometry["eve_xy"] = [out.geometry["eve_xy"][0], float(value)]
    elif kind == "user_y":
        out.geometry["user_xy"] = [out.geometry["user_xy"][0], float(value)]
    elif kind == "ris_y":
        out.geometry["ris_xy"] = [out.geometry["ris_xy"][0], float(value)]
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    return out


def run_scheme(scheme: str, sc, es, sigma2_u, sigma2_e, p_max, cfg: ExperimentConfig,
               seed) -> tuple[Solution, int]:
    if scheme == "pdca":
        sol, trace = pdca_solve(sc, es, sigma2_u, sigma2_e, p_max,
                                cfg.to_pdca_config(), seed=seed)
        return sol, len(trace.outer)
    if scheme == "ao_ew":
        res = baselines.ao_elementwise(sc, es, sigma2_u, sigma2_e, p_max)
        return res.solution, res.iterations
    if scheme == "no_ris":
        res = baselines.no_ris_beamformer(sc, es, sigma2_u, sigma2_e, p_max)
        return res.solution, res.iterations
    if scheme == "random":
        res = baselines.random_phase_mrt(sc, es, sigma2_u, sigma2_e, p_max, seed=seed)
        return res.solution, res.iterations
    raise ValueError(f"unknown scheme {scheme!r}")


def _realization_task(cfg_dict: dict, kind: str, value_idx: int, value, realization: int,
                      master_seed: int) -> dict:
    """One (sweep point, realization): solve every scheme and MC-evaluate ESR."""
    cfg = ExperimentConfig.from_dict(cfg_dict)
    point_cfg = _apply_sweep_value(cfg, kind, value)
    geom = point_cfg.to_geometry()
    stats = point_cfg.to_fading_stats()
    kid = _KIND_ID[kind]
    scen_seed = (master_seed, kid, value_idx, realization)
    sc = build_scenario(geom, stats, scen_seed)
    es = eve_second_moments(geom, stats)
    p_max = point_cfg.p_max_watt()

    out = {}
    for scheme in point_cfg.schemes:
        solve_seed = (master_seed, kid, value_idx, realization, _SCHEME_ID[scheme], 1)
        sol, iters = run_scheme(scheme, sc, es, stats.sigma2_u, stats.sigma2_e,
                                p_max, point_cfg, solve_seed)
        mc_seed = (master_seed, kid, value_idx, realization, _SCHEME_ID[scheme], 2)
        est = montecarlo.esr_estimate(sol.phi, sol.w, sc, es, stats.sigma2_u,
                                      stats.sigma2_e, point_cfg.n_mc, mc_seed)
        out[scheme] = (sol.lesr, est.mean, est.stderr, iters)
    return out


def _format(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_sweep(cfg: ExperimentConfig, kind: str, out_path, seed: int | None = None) -> list[dict]:
    """Run one sweep and write the aggregated CSV. Returns the rows."""
    if kind not in SWEEP_KINDS:
        raise ValueError(f"sweep kind must be one of {SWEEP_KINDS}")
    master_seed = cfg.seed if seed is None else seed
    key = {"power": "power_dbm", "elements": "elements"}.get(kind, kind)
    values = cfg.sweep[key]
    n_real = cfg.n_user_realizations

    tasks = [(cfg.to_dict(), kind, vi, v, r, master_seed)
             for vi, v in enumerate(values) for r in range(n_real)]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_realization_task, *zip(*tasks)))
    else:
        results = [_realization_task(*t) for t in tasks]

    rows = []
    for vi, value in enumerate(values):
        per_real = results[vi * n_real:(vi + 1) * n_real]
        point_cfg = _apply_sweep_value(cfg, kind, value)
        for scheme in cfg.schemes:
            lesr = np.array([pr[scheme][0] for pr in per_real])
            esr = np.array([pr[scheme][1] for pr in per_real])
            mc_se = np.array([pr[scheme][2] for pr in per_real])
            iters = np.array([pr[scheme][3] for pr in per_real])
            if n_real > 1:
                # Spread across realizations dominates and already contains
                # the per-realization MC noise.
                stderr = float(np.std(esr, ddof=1) / np.sqrt(n_real))
            else:
                stderr = float(mc_se[0])
            rows.append({
                "schema_version": SCHEMA_VERSION,
                "kind": kind,
                "sweep_value": float(value),
                "scheme": scheme,
                "m": int(point_cfg.geometry["m"]),
                "n_ris": point_cfg.to_geometry().n,
                "p_max_dbm": float(point_cfg.p_max_dbm),
                "seed": master_seed,
                "n_realizations": n_real,
                "n_mc": cfg.n_mc,
                "lesr": float(np.mean(lesr)),
                "esr_mean": float(np.mean(esr)),
                "esr_stderr": stderr,
                "iterations": float(np.mean(iters)),
            })

    rows.sort(key=lambda r: (r["kind"], r["sweep_value"], r["scheme"]))
    write_rows(rows, out_path)
    return rows


def write_rows(rows: list[dict], out_path) -> None:
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format(row[c]) for c in CSV_COLUMNS])


def solve_once(cfg: ExperimentConfig, scheme: str, trace_path=None, seed: int | None = None):
    """Single scenario, single scheme; optionally dump the convergence trace."""
    master_seed = cfg.seed if seed is None else seed
    geom = cfg.to_geometry()
    stats = cfg.to_fading_stats()
    sc = build_scenario(geom, stats, (master_seed, 0, 0, 0))
    es = eve_second_moments(geom, stats)
    p_max = cfg.p_max_watt()

    trace = None
    if scheme == "pdca":
        sol, trace = pdca_solve(sc, es, stats.sigma2_u, stats.sigma2_e, p_max,
                                cfg.to_pdca_config(), seed=(master_seed, 0, 0, 0, 1, 1))
        iters = len(trace.outer)
    else:
        sol, iters = run_scheme(scheme, sc, es, stats.sigma2_u, stats.sigma2_e,
                                p_max, cfg, (master_seed, 0, 0, 0, 9, 1))

    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["outer_iter", "lesr", "al", "violation", "rho",
                             "inner_iterations"])
            if trace is not None:
                for i, rec in enumerate(trace.outer):
                    writer.writerow([i, repr(rec.lesr), repr(rec.al),
                                     repr(rec.violation), repr(rec.rho),
                                     rec.inner_iterations])
            else:
                writer.writerow([0, repr(sol.lesr), "", "", "", iters])
    return sol, trace, iters
