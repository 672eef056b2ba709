"""Centralized figure styling and deterministic vector output.

All figures in the package are built inside :func:`styled` functions and
written through :func:`save_figure`, so styling lives in exactly one place
and the SVG output is byte-stable: the same input files always render to
the same bytes.  Two things normally break that — matplotlib's
session-random clip-path ids and the embedded creation date — so we pin
``svg.hashsalt`` and strip the date metadata at save time.
"""

from __future__ import annotations

import functools
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

__all__ = ["RC_PARAMS", "styled", "new_figure", "save_figure"]

RC_PARAMS = {
    "svg.hashsalt": "vriesz-plots",
    "svg.fonttype": "none",       # text as text, smaller + diffable output
    "figure.dpi": 100,
    "font.size": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.titlesize": "medium",
    "lines.markersize": 5.0,
    "legend.fontsize": "small",
    "legend.framealpha": 0.9,
    "path.simplify": False,       # keep vertex streams exactly as computed
}


def styled(fn):
    """Run ``fn`` under the package rc settings (they bind at artist creation)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with matplotlib.rc_context(RC_PARAMS):
            return fn(*args, **kwargs)

    return wrapper


def new_figure(width: float = 6.4, height: float = 4.2) -> Figure:
    """A standalone Figure (no pyplot global state, headless-safe)."""
    return Figure(figsize=(width, height), layout="constrained")


def save_figure(fig: Figure, path: str | Path) -> Path:
    """Write ``fig`` as SVG with deterministic ids and no timestamps."""
    path = Path(path)
    if path.suffix.lower() != ".svg":
        raise ValueError(f"figures are written as vector SVG; got {path.name!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(RC_PARAMS):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
