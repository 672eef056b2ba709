"""Figure rendering for vlasov-riesz output files.

The solver package and this one share no code: everything here reads the
documented on-disk formats (diagnostics/study CSV with ``# key=value``
preamble, JSON manifests, raw float64 snapshots with JSON sidecars) and
renders deterministic SVG figures from them.
"""

from .figures import (eps_study_figure, kg_sweep_figure, norms_figure,
                      phase_space_figure, plot_eps_study, plot_kg_sweep,
                      plot_norms, plot_phase_space, plot_stability_map,
                      stability_map_figure)
from .io import (Snapshot, Table, check_hash_consistency, read_manifest,
                 read_snapshot, read_table)

__all__ = [
    "Table", "Snapshot",
    "read_table", "read_manifest", "read_snapshot", "check_hash_consistency",
    "norms_figure", "kg_sweep_figure", "phase_space_figure",
    "eps_study_figure", "stability_map_figure",
    "plot_norms", "plot_kg_sweep", "plot_phase_space",
    "plot_eps_study", "plot_stability_map",
]
