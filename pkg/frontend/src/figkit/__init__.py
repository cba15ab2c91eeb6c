"""figkit: render experiment sweep CSVs into publication-style figures."""

from .render import plot_sweep
from .spec import FigureSpec, SchemaError, load_spec

__all__ = ["FigureSpec", "SchemaError", "load_spec", "plot_sweep"]
