"""Experiment configuration: JSON in, linear-unit model objects out.

dB/dBm fields are converted exactly once, when the derived model objects
are built; the config object itself keeps the values as written so that
parse -> serialize -> parse is the identity. Unknown keys are rejected at
every level.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .channel import FadingStats, Geometry
from .solver import PdcaConfig

SCHEMES = ("pdca", "ao_ew", "no_ris", "random")

K_UMI = 10 ** 0.9  # Rician K of the RIS-side links in the reference scenario


def db2lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm2watt(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


class ConfigError(ValueError):
    pass


def _check_keys(d: dict, allowed, where: str):
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _parse_k(value) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"invalid Rician K value: {value!r}")
    return float(value)


_GEOMETRY_DEFAULTS = {
    "ap_xy": [5.0, 0.0],
    "ris_xy": [0.0, 50.0],
    "user_xy": [5.0, 60.0],
    "eve_xy": [10.0, 55.0],
    "m": 8,
    "ny": 16,
    "nz": 1,
    "delta_a": 0.5,
    "delta_i": 0.5,
}

_FADING_DEFAULTS = {
    "zeta0_db": -30.0,
    "d0": 1.0,
    "alpha_au": 3.67,
    "alpha_ae": 3.67,
    "alpha_iu": 2.2,
    "alpha_ie": 2.2,
    "alpha_ai": 2.0,
    "k_au": 0.0,
    "k_ae": 0.0,
    "k_iu": K_UMI,
    "k_ie": K_UMI,
    "k_ai": "inf",
    "sigma2_u_dbm": -90.0,
    "sigma2_e_dbm": -90.0,
}

_SWEEP_DEFAULTS = {
    "power_dbm": [-5.0, 0.0, 5.0, 10.0],
    "elements": [16, 32, 48],
    "eve_y": [40.0, 50.0, 60.0, 70.0],
    "user_y": [40.0, 50.0, 60.0, 70.0],
    "ris_y": [30.0, 40.0, 50.0, 60.0],
}

_TOP_LEVEL = ("geometry", "fading", "p_max_dbm", "schemes", "n_mc",
              "n_user_realizations", "seed", "pdca", "sweep")


@dataclass
class ExperimentConfig:
    geometry: dict = field(default_factory=lambda: copy.deepcopy(_GEOMETRY_DEFAULTS))
    fading: dict = field(default_factory=lambda: copy.deepcopy(_FADING_DEFAULTS))
    p_max_dbm: float = 5.0
    schemes: list = field(default_factory=lambda: ["pdca", "ao_ew", "no_ris"])
    n_mc: int = 20_000
    n_user_realizations: int = 20
    seed: int = 1
    pdca: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=lambda: copy.deepcopy(_SWEEP_DEFAULTS))

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        _check_keys(raw, _TOP_LEVEL, "config")
        cfg = cls()
        if "geometry" in raw:
            _check_keys(raw["geometry"], _GEOMETRY_DEFAULTS, "geometry")
            cfg.geometry.update(raw["geometry"])
        if "fading" in raw:
            _check_keys(raw["fading"], _FADING_DEFAULTS, "fading")
            cfg.fading.update(raw["fading"])
        if "sweep" in raw:
            _check_keys(raw["sweep"], _SWEEP_DEFAULTS, "sweep")
            cfg.sweep.update(raw["sweep"])
        if "pdca" in raw:
            _check_keys(raw["pdca"], PdcaConfig.__dataclass_fields__, "pdca")
            cfg.pdca = dict(raw["pdca"])
        for key in ("p_max_dbm", "n_mc", "n_user_realizations", "seed", "schemes"):
            if key in raw:
                setattr(cfg, key, raw[key])
        for s in cfg.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; valid: {SCHEMES}")
        cfg.to_geometry()     # validate ranges eagerly
        cfg.to_fading_stats()
        cfg.to_pdca_config()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return copy.deepcopy(asdict(self))

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    # Derived linear-unit model objects.

    def to_geometry(self) -> Geometry:
        g = self.geometry
        return Geometry(
            ap_xy=tuple(g["ap_xy"]), ris_xy=tuple(g["ris_xy"]),
            user_xy=tuple(g["user_xy"]), eve_xy=tuple(g["eve_xy"]),
            m=int(g["m"]), ny=int(g["ny"]), nz=int(g["nz"]),
            delta_a=float(g["delta_a"]), delta_i=float(g["delta_i"]),
        )

    def to_fading_stats(self) -> FadingStats:
        f = self.fading
        return FadingStats(
            zeta0=db2lin(float(f["zeta0_db"])), d0=float(f["d0"]),
            alpha_au=float(f["alpha_au"]), alpha_ae=float(f["alpha_ae"]),
            alpha_iu=float(f["alpha_iu"]), alpha_ie=float(f["alpha_ie"]),
            alpha_ai=float(f["alpha_ai"]),
            k_au=_parse_k(f["k_au"]), k_ae=_parse_k(f["k_ae"]),
            k_iu=_parse_k(f["k_iu"]), k_ie=_parse_k(f["k_ie"]),
            k_ai=_parse_k(f["k_ai"]),
            sigma2_u=dbm2watt(float(f["sigma2_u_dbm"])),
            sigma2_e=dbm2watt(float(f["sigma2_e_dbm"])),
        )

    def to_pdca_config(self) -> PdcaConfig:
        return PdcaConfig(**self.pdca)

    def p_max_watt(self) -> float:
        return dbm2watt(float(self.p_max_dbm))
