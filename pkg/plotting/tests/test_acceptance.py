"""Acceptance: the two rendering guarantees, on real solver outputs."""

import numpy as np

from vriesz_plots.figures import kg_sweep_figure, norms_figure
from vriesz_plots.io import read_table


def test_secondary_criterion_kg_sweep_and_flat_mass(run_dir, kg_dir):
    fig = kg_sweep_figure(read_table(kg_dir / "kg_sweep.csv"))
    ax = fig.axes[0]
    line_labels = [ln.get_label() for ln in ax.get_lines()]
    assert any(lab.startswith("reference slope alpha/2") for lab in line_labels)
    slope_notes = [t.get_text() for t in ax.texts if t.get_text().startswith("fitted slope")]
    assert slope_notes

    fig = norms_figure(read_table(run_dir / "diagnostics.csv"))
    ax_drift = fig.axes[1]
    mass = next(ln for ln in ax_drift.get_lines() if ln.get_label() == "mass")
    spread = float(np.ptp(mass.get_ydata()))
    lo, hi = ax_drift.get_ylim()
    assert spread / (hi - lo) < 1e-6  # flat at plotted precision

    print("[SECONDARY] criterion PASS — kg sweep renders the alpha/2 reference "
          f"line and annotates {slope_notes[0]!r}; mass drift occupies "
          f"{spread / (hi - lo):.1e} of the drift axis (flat at plotted precision)")
