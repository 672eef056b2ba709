"""Bit-exact file outputs: diagnostics CSV, study CSV, JSON manifests.

Every file is reproducible byte-for-byte from the same inputs: floats are
printed as shortest round-trip decimals, JSON keys are sorted, and nothing
records wall-clock time.  CSV files start with comment lines carrying the
format version and the configuration hash so downstream tools can refuse
mismatched inputs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

import numpy as np

OUTPUT_FORMAT_VERSION = 1

__all__ = [
    "OUTPUT_FORMAT_VERSION",
    "format_cell",
    "content_address",
    "diagnostics_csv_text",
    "study_csv_text",
    "manifest_text",
    "write_text",
    "read_csv_with_preamble",
]


def format_cell(value) -> str:
    """Shortest round-trip text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def content_address(text: str) -> str:
    """Git-style blob address of a text payload (sha1 over a blob header)."""
    data = text.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _csv_text(preamble: dict, columns: list[str], rows_iter) -> str:
    buf = io.StringIO()
    for key, val in preamble.items():
        buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows_iter:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def diagnostics_csv_text(table: dict, config_hash: str) -> str:
    """Render the integrator's diagnostics table (column -> series) as CSV.

    Column order is the table's own insertion order, which the integrator
    fixes as: t, mass, momentum components, L2, energy_kinetic,
    energy_potential, the requested f-norms, then the density norms.
    """
    columns = list(table.keys())
    n = len(table["t"]) if "t" in table else 0
    rows = ([table[c][i] for c in columns] for i in range(n))
    return _csv_text(
        {"format_version": OUTPUT_FORMAT_VERSION, "config_hash": config_hash},
        columns, rows)


def study_csv_text(kind: str, rows: list[dict], config_hash: str) -> str:
    """Render study rows (list of uniform dicts) as CSV with a preamble."""
    if rows:
        columns = list(rows[0].keys())
    else:
        columns = []
    return _csv_text(
        {"format_version": OUTPUT_FORMAT_VERSION, "config_hash": config_hash,
         "study": kind},
        columns, ([r[c] for c in columns] for r in rows))


def _pyify(obj):
    """Make numpy scalars/containers JSON-serializable, keys stringly."""
    if isinstance(obj, dict):
        return {str(k): _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    return obj


def manifest_text(payload: dict) -> str:
    """Canonical JSON manifest: sorted keys, version field injected."""
    body = {"format_version": OUTPUT_FORMAT_VERSION}
    body.update(_pyify(payload))
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv_with_preamble(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse a CSV written by this module: (preamble dict, header, rows)."""
    preamble: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("# ") and "=" in line:
            key, _, val = line[2:].partition("=")
            preamble[key] = val
            body_start = i + 1
        else:
            break
    reader = csv.reader(lines[body_start:])
    table = [row for row in reader if row]
    if not table:
        raise ValueError(f"{path}: no CSV header found")
    return preamble, table[0], table[1:]
