"""Figure specification: a small JSON document mapping sweep CSVs to one
rendered figure. Strict schema — unknown keys and missing columns are
rejected up front so a bad spec fails before any file is written.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path


class SchemaError(Exception):
    """Spec or CSV does not match the documented schema."""


_ALLOWED_KEYS = {
    "csv", "x", "y", "yerr", "dashed", "series", "out",
    "title", "xlabel", "ylabel",
}

_REQUIRED_KEYS = {"csv", "x", "y", "series", "out"}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: lines per scheme with error bars, plus a dashed companion
    column (the deterministic bound next to the Monte Carlo mean)."""

    csv_paths: tuple[str, ...]
    x: str
    y: str
    series: dict            # scheme id -> legend label
    out: str
    yerr: str | None = None     # stderr column; bars drawn at 3x
    dashed: str | None = None   # column drawn as a dashed line per scheme
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if not self.csv_paths:
            raise SchemaError("spec needs at least one input CSV")
        if not self.series:
            raise SchemaError("spec needs at least one series")

    def columns_used(self) -> list[str]:
        cols = [self.x, self.y, "scheme"]
        if self.yerr:
            cols.append(self.yerr)
        if self.dashed:
            cols.append(self.dashed)
        return cols


def load_spec(path) -> FigureSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: spec must be a JSON object")
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise SchemaError(f"{path}: unknown keys {sorted(unknown)}; "
                          f"allowed: {sorted(_ALLOWED_KEYS)}")
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise SchemaError(f"{path}: missing required keys {sorted(missing)}")

    csvs = raw["csv"]
    if isinstance(csvs, str):
        csvs = [csvs]
    base = path.parent
    csv_paths = tuple(str((base / c)) if not Path(c).is_absolute() else c
                      for c in csvs)
    out = raw["out"]
    if not Path(out).is_absolute():
        out = str(base / out)

    return FigureSpec(
        csv_paths=csv_paths,
        x=str(raw["x"]),
        y=str(raw["y"]),
        series=dict(raw["series"]),
        out=out,
        yerr=raw.get("yerr"),
        dashed=raw.get("dashed"),
        title=str(raw.get("title", "")),
        xlabel=str(raw.get("xlabel", raw["x"])),
        ylabel=str(raw.get("ylabel", raw["y"])),
    )


def read_rows(spec: FigureSpec) -> list[dict]:
    """All CSV rows, schema-checked: every referenced column must exist and
    every spec'd scheme must occur at least once."""
    rows = []
    needed = spec.columns_used()
    for p in spec.csv_paths:
        try:
            with open(p, encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                header = reader.fieldnames
                if header is None:
                    raise SchemaError(f"{p}: empty CSV (no header)")
                missing = [c for c in needed if c not in header]
                if missing:
                    raise SchemaError(
                        f"{p}: missing columns {missing}; expected at least "
                        f"{needed}, found {list(header)}")
                rows.extend(reader)
        except OSError as exc:
            raise SchemaError(f"{p}: cannot read CSV: {exc}") from exc
    if not rows:
        raise SchemaError(f"{spec.csv_paths}: no data rows")
    present = {r["scheme"] for r in rows}
    absent = [s for s in spec.series if s not in present]
    if absent:
        raise SchemaError(f"schemes {absent} not present in the data "
                          f"(found {sorted(present)})")
    return rows
