"""``vrplot`` — render the standard figures from solver output files.

Each subcommand reads one documented file format and writes one SVG.  When
the input sits next to its manifest (``run_manifest.json`` for run outputs,
``<study>_manifest.json`` for study CSVs) the manifest is read automatically
and a ``config_hash`` disagreement aborts the render; ``--manifest`` points
the check somewhere else explicitly.

Exit codes: 0 success; 2 unreadable, inconsistent, or unplottable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import figures

__all__ = ["main"]

_DEFAULT_MANIFEST = {
    "norms": "run_manifest.json",
    "kg-sweep": "kg_sweep_manifest.json",
    "eps-study": "eps_convergence_manifest.json",
    "phase-space": "run_manifest.json",
    "stability-map": None,  # grid dumps carry a parameter hash, no manifest
}


def _manifest_for(command: str, input_path: Path, explicit: str | None) -> Path | None:
    if explicit is not None:
        return Path(explicit)
    default = _DEFAULT_MANIFEST.get(command)
    if default is None:
        return None
    sibling = input_path.parent / default
    return sibling if sibling.exists() else None


def _add_common(p: argparse.ArgumentParser, input_flag: str, input_help: str) -> None:
    p.add_argument(input_flag, required=True, help=input_help, dest="input")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--manifest", default=None,
                   help="manifest JSON to cross-check config_hash against "
                        "(default: the conventional sibling, when present)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vrplot",
        description="Render figures from vlasov-riesz output files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norms", help="norm time series + conserved-quantity drifts")
    _add_common(p, "--csv", "diagnostics.csv from a run")
    p.set_defaults(render=figures.plot_norms)

    p = sub.add_parser("kg-sweep", help="log-log operator-norm scaling with fit")
    _add_common(p, "--csv", "kg_sweep.csv from the sweep command")
    p.set_defaults(render=figures.plot_kg_sweep)

    p = sub.add_parser("phase-space", help="heatmap of a stored snapshot")
    _add_common(p, "--snapshot", "snapshot .f64 file (sidecar read automatically)")
    p.set_defaults(render=figures.plot_phase_space)

    p = sub.add_parser("eps-study", help="screening-convergence error plot")
    _add_common(p, "--csv", "eps_convergence.csv from the study command")
    p.set_defaults(render=figures.plot_eps_study)

    p = sub.add_parser("stability-map", help="|P| heatmap from a penrose grid dump")
    _add_common(p, "--csv", "grid CSV written by penrose --dump-grid")
    p.set_defaults(render=figures.plot_stability_map)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    input_path = Path(args.input)
    manifest = _manifest_for(args.command, input_path, args.manifest)
    try:
        out = args.render(input_path, args.out, manifest_path=manifest)
    except (ValueError, FileNotFoundError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    checked = f" (hash-checked against {manifest.name})" if manifest else ""
    print(f"wrote {out}{checked}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
