"""CSV -> figure rendering. Pure function of its inputs: a fixed style file,
no timestamps or tool-version metadata in the output, so the same CSV always
produces the same bytes (PNG and SVG).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # before pyplot: headless, deterministic backend

import matplotlib.pyplot as plt  # noqa: E402

from .spec import FigureSpec, read_rows  # noqa: E402

ERROR_BAR_SCALE = 3.0  # bars span +-3 stderr

_STYLE = resources.files("figkit") / "figkit.mplstyle"

# Fixed scheme -> color mapping so figures stay comparable across runs even
# when a spec selects a subset of schemes.
_COLORS = {
    "pdca": "#1f77b4",
    "ao_ew": "#d62728",
    "no_ris": "#2ca02c",
    "random": "#7f7f7f",
}
_FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#bcbd22"]


def _series_points(rows, spec, scheme):
    pts = [(float(r[spec.x]), r) for r in rows if r["scheme"] == scheme]
    pts.sort(key=lambda t: t[0])
    xs = [x for x, _ in pts]
    ys = [float(r[spec.y]) for _, r in pts]
    errs = ([ERROR_BAR_SCALE * float(r[spec.yerr]) for _, r in pts]
            if spec.yerr else None)
    dashed = ([float(r[spec.dashed]) for _, r in pts] if spec.dashed else None)
    return xs, ys, errs, dashed


def plot_sweep(spec: FigureSpec) -> list[str]:
    """Render one figure; returns the paths written (PNG plus SVG)."""
    rows = read_rows(spec)

    with plt.style.context(str(_STYLE)):
        fig, ax = plt.subplots()
        fallback = iter(_FALLBACK_COLORS)
        for scheme, label in spec.series.items():
            color = _COLORS.get(scheme) or next(fallback)
            xs, ys, errs, dashed = _series_points(rows, spec, scheme)
            ax.errorbar(xs, ys, yerr=errs, label=label, color=color,
                        marker="o", capsize=3)
            if dashed is not None:
                ax.plot(xs, dashed, linestyle="--", color=color, alpha=0.7)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend()

        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        png = out.with_suffix(".png")
        svg = out.with_suffix(".svg")
        # strip every metadata field that would vary between runs
        fig.savefig(png, metadata={"Software": None})
        fig.savefig(svg, metadata={"Date": None, "Creator": None,
                                   "Format": None, "Type": None})
        plt.close(fig)
    return [str(png), str(svg)]
