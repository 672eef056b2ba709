"""The standard figures, one function per figure kind.

Every function here takes already-parsed inputs (:class:`~vriesz_plots.io.Table`
or :class:`~vriesz_plots.io.Snapshot`), returns a matplotlib ``Figure``, and
never touches physics: what is plotted is exactly what the files contain.
The ``plot_*`` wrappers at the bottom add file reading, the config-hash
consistency check, and SVG output; those are what the CLI calls.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .io import Snapshot, Table, check_hash_consistency, read_manifest, read_snapshot, read_table
from .style import new_figure, save_figure, styled

__all__ = [
    "norms_figure",
    "kg_sweep_figure",
    "phase_space_figure",
    "eps_study_figure",
    "stability_map_figure",
    "plot_norms",
    "plot_kg_sweep",
    "plot_phase_space",
    "plot_eps_study",
    "plot_stability_map",
]

# conserved quantities tracked by every run, in diagnostics-column order
_CONSERVED = ("mass", "momentum_0", "momentum_1", "L2", "energy_total")
# the loosest conservation tolerance; the drift panel never zooms in past it
_DRIFT_FLOOR = 1e-6


def _require_rows(table: Table) -> None:
    if not table.rows:
        raise ValueError(f"{table.path}: no data rows — nothing to plot")


@styled
def norms_figure(table: Table):
    """Norm-column time series plus relative drifts of conserved quantities.

    The drift panel plots ``(q(t) - q(0)) / max(|q(0)|, 1)`` on a linear axis
    whose limits never shrink below ±1e-6 (the loosest conservation
    tolerance), so a well-conserved quantity renders as a flat line and only
    genuine drift beyond tolerance bends the curve.
    """
    _require_rows(table)
    t = table.column("t")
    norm_cols = [c for c in table.columns
                 if c.startswith("Hk_r") or c.startswith("rho_Hm")]

    fig = new_figure(6.4, 6.4)
    ax_norms, ax_drift = fig.subplots(2, 1, sharex=True)

    series = norm_cols if norm_cols else ["L2", "energy_kinetic", "energy_potential"]
    for name in series:
        if name in table.columns:
            ax_norms.plot(t, table.column(name), marker=".", label=name)
    ax_norms.set_ylabel("norm value")
    ax_norms.set_title(str(table.path.name))
    ax_norms.legend(loc="best")

    worst = 0.0
    for name in _CONSERVED:
        if name == "energy_total":
            if ("energy_kinetic" not in table.columns
                    or "energy_potential" not in table.columns):
                continue
            q = table.column("energy_kinetic") + table.column("energy_potential")
        elif name in table.columns:
            q = table.column(name)
        else:
            continue
        drift = (q - q[0]) / max(abs(q[0]), 1.0)
        worst = max(worst, float(np.abs(drift).max()))
        ax_drift.plot(t, drift, marker=".", label=name)
    lim = max(_DRIFT_FLOOR, 1.1 * worst)
    ax_drift.set_ylim(-lim, lim)
    ax_drift.set_xlabel("t")
    ax_drift.set_ylabel("relative drift")
    ax_drift.legend(loc="best")
    return fig


@styled
def kg_sweep_figure(table: Table):
    """Log-log operator-norm estimates vs horizon, with fit and reference.

    Rows whose estimate or symbol norm is not strictly positive cannot be
    placed on log axes; they are skipped with a warning.  With two or more
    usable rows the figure draws a least-squares power-law fit (slope
    annotated) and the ``T^(alpha/2)`` reference line anchored at the first
    point; with a single row it shows the point alone.
    """
    _require_rows(table)
    usable = [row for row in table.rows
              if row["estimate"] and row["estimate"] > 0
              and row["symbol_norm"] and row["symbol_norm"] > 0]
    skipped = len(table.rows) - len(usable)
    if skipped:
        warnings.warn(f"{table.path}: skipping {skipped} row(s) with zero "
                      "estimate or symbol norm (cannot place on log axes)")
    if not usable:
        raise ValueError(f"{table.path}: no usable rows — nothing to plot")

    T = np.array([row["T"] for row in usable], dtype=float)
    est = np.array([row["estimate"] for row in usable], dtype=float)
    alpha = float(usable[0]["alpha"])

    fig = new_figure()
    ax = fig.subplots()
    ax.loglog(T, est, "o", label="estimate")

    if len(usable) >= 2:
        slope, intercept = np.polyfit(np.log(T), np.log(est), 1)
        t_line = np.geomspace(T.min(), T.max(), 64)
        ax.loglog(t_line, np.exp(intercept) * t_line**slope, "-",
                  label=f"fit: slope {slope:.3f}")
        ax.loglog(t_line, est[0] * (t_line / T[0]) ** (alpha / 2.0), "--",
                  label=f"reference slope alpha/2 = {alpha / 2.0:g}")
        ax.annotate(f"fitted slope {slope:.3f}", xy=(0.04, 0.92),
                    xycoords="axes fraction")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("operator norm estimate")
    ax.set_title(f"averaging-operator scaling, alpha = {alpha:g}")
    ax.legend(loc="lower right")
    return fig


@styled
def phase_space_figure(snap: Snapshot):
    """Heatmap of the stored state: f(x, v) for d=1, a central slice for d=2."""
    fig = new_figure(6.4, 4.8)
    ax = fig.subplots()
    if snap.d == 1:
        grid = snap.values.T  # rows = v, columns = x
        title = f"f(x, v) at t = {snap.t:g}"
    else:
        ix, iv = snap.Nx // 2, snap.Nv // 2
        grid = snap.values[:, ix, :, iv].T
        title = (f"f(x1, {snap.x[ix]:.3g}, v1, {snap.v[iv]:.3g}) at t = {snap.t:g}")
    # the mesh itself is rasterized inside the SVG: a 256x256 grid as vector
    # quads costs tens of MB; axes, labels, and colorbar stay vector
    mesh = ax.pcolormesh(snap.x, snap.v, grid, shading="nearest",
                         rasterized=True)
    fig.colorbar(mesh, ax=ax, label="f")
    ax.set_xlabel("x")
    ax.set_ylabel("v")
    ax.set_title(title)
    ax.grid(False)
    return fig


@styled
def eps_study_figure(table: Table):
    """Log-log screening-convergence errors vs eps (reference row excluded)."""
    _require_rows(table)
    rows = [row for row in table.rows if row["eps"] and row["eps"] > 0]
    if not rows:
        raise ValueError(f"{table.path}: only the eps=0 reference row present "
                         "— nothing to plot")
    eps = np.array([row["eps"] for row in rows], dtype=float)

    fig = new_figure()
    ax = fig.subplots()
    for col in ("sup_f_err", "rho_l2t_err"):
        err = np.array([row[col] for row in rows], dtype=float)
        ax.loglog(eps, err, "o-", label=col)
        if len(rows) >= 2 and np.all(err > 0):
            slope = np.polyfit(np.log(eps), np.log(err), 1)[0]
            ax.annotate(f"{col}: order {slope:.2f}",
                        xy=(0.04, 0.92 - 0.07 * (col == "rho_l2t_err")),
                        xycoords="axes fraction")
    ax.set_xlabel("screening eps")
    ax.set_ylabel("error vs eps=0 reference")
    ax.set_title("screening-limit convergence")
    ax.legend(loc="lower right")
    return fig


@styled
def stability_map_figure(table: Table):
    """|P| over the (tau, eta) rectangle at the smallest scanned gamma."""
    _require_rows(table)
    gammas = table.column("gamma")
    g0 = float(gammas.min())
    rows = [row for row in table.rows if row["gamma"] == g0]
    taus = np.array(sorted({row["tau"] for row in rows}))
    etas = np.array(sorted({row["eta"] for row in rows}))
    grid = np.full((etas.size, taus.size), np.nan)
    ti = {v: i for i, v in enumerate(taus)}
    ei = {v: i for i, v in enumerate(etas)}
    for row in rows:
        grid[ei[row["eta"]], ti[row["tau"]]] = row["abs_P"]

    fig = new_figure(6.4, 4.8)
    ax = fig.subplots()
    mesh = ax.pcolormesh(taus, etas, grid, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="|P|")
    ax.set_xlabel("tau")
    ax.set_ylabel("eta")
    ax.set_title(f"stability function magnitude at gamma = {g0:g}")
    ax.grid(False)
    return fig


# ---------------------------------------------------------------------------
# file-in, file-out wrappers


def _checked_table(csv_path, manifest_path) -> Table:
    table = read_table(csv_path)
    if manifest_path is not None:
        check_hash_consistency(table, read_manifest(manifest_path))
    return table


def plot_norms(csv_path, out_path, manifest_path=None) -> Path:
    return save_figure(norms_figure(_checked_table(csv_path, manifest_path)), out_path)


def plot_kg_sweep(csv_path, out_path, manifest_path=None) -> Path:
    return save_figure(kg_sweep_figure(_checked_table(csv_path, manifest_path)), out_path)


def plot_phase_space(snapshot_path, out_path, manifest_path=None) -> Path:
    snap = read_snapshot(snapshot_path)
    if manifest_path is not None:
        check_hash_consistency(snap, read_manifest(manifest_path))
    return save_figure(phase_space_figure(snap), out_path)


def plot_eps_study(csv_path, out_path, manifest_path=None) -> Path:
    return save_figure(eps_study_figure(_checked_table(csv_path, manifest_path)), out_path)


def plot_stability_map(csv_path, out_path, manifest_path=None) -> Path:
    return save_figure(stability_map_figure(_checked_table(csv_path, manifest_path)), out_path)
