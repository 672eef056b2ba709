"""Readers for the solver's output files.

This package never recomputes physics: everything it plots comes from the
documented on-disk formats of the solver package —

* diagnostics / study CSV: UTF-8, LF newlines, ``# key=value`` preamble
  lines (``format_version`` and ``config_hash`` at minimum), then one
  standard CSV header row and data rows;
* run / study manifest: canonical JSON with a ``config_hash`` field;
* snapshot: raw little-endian float64 array (x-axes first, then v-axes)
  with a ``<name>.json`` sidecar recording the grid, the time, and,
  when the run wrote one, the owning ``config_hash``.

A ``config_hash`` disagreement between any two files that are supposed to
describe the same run is a hard error — mixing outputs from different
configurations is the failure mode these checks exist to catch.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Table",
    "Snapshot",
    "read_table",
    "read_manifest",
    "read_snapshot",
    "check_hash_consistency",
]


def _cell(text: str):
    """Decode one CSV cell: '' -> None, true/false -> bool, numeric -> float."""
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        return text


@dataclass(frozen=True)
class Table:
    """A parsed CSV file: preamble metadata, column names, column arrays."""

    path: Path
    preamble: dict[str, str]
    columns: tuple[str, ...]
    rows: tuple[dict, ...]

    @property
    def config_hash(self) -> str | None:
        return self.preamble.get("config_hash")

    def column(self, name: str) -> np.ndarray:
        """Return one column as a float array (None cells become NaN)."""
        if name not in self.columns:
            raise KeyError(f"{self.path} has no column {name!r}; columns: {list(self.columns)}")
        return np.array([np.nan if row[name] is None else float(row[name])
                         for row in self.rows], dtype=float)


def read_table(path: str | Path) -> Table:
    path = Path(path)
    preamble: dict[str, str] = {}
    body_lines = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                preamble[key.strip()] = value.strip()
            continue
        body_lines.append(line)
    reader = csv.reader(_io.StringIO("\n".join(body_lines)))
    parsed = [row for row in reader if row]
    if not parsed:
        raise ValueError(f"{path}: no header row found")
    header = tuple(parsed[0])
    rows = []
    for raw in parsed[1:]:
        if len(raw) != len(header):
            raise ValueError(f"{path}: row has {len(raw)} cells, header has {len(header)}")
        rows.append({name: _cell(cell) for name, cell in zip(header, raw)})
    return Table(path=path, preamble=preamble, columns=header, rows=tuple(rows))


def read_manifest(path: str | Path) -> dict:
    path = Path(path)
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(manifest, dict):
        raise ValueError(f"{path}: manifest must be a JSON object")
    return manifest


@dataclass(frozen=True)
class Snapshot:
    """One stored phase-space state plus its sidecar metadata."""

    path: Path
    values: np.ndarray  # shape (Nx,)*d + (Nv,)*d
    d: int
    Nx: int
    Nv: int
    v_max: float
    t: float
    meta: dict = field(repr=False)

    @property
    def config_hash(self) -> str | None:
        return self.meta.get("config_hash")

    @property
    def x(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.Nx) / self.Nx

    @property
    def v(self) -> np.ndarray:
        dv = 2.0 * self.v_max / self.Nv
        return -self.v_max + dv * np.arange(self.Nv)


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    sidecar = Path(str(path) + ".json")
    if not sidecar.exists():
        raise FileNotFoundError(f"snapshot sidecar {sidecar} not found")
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"corrupt snapshot sidecar {sidecar}: {exc}") from None
    for key in ("d", "Nx", "Nv", "v_max", "t"):
        if key not in meta:
            raise ValueError(f"snapshot sidecar {sidecar} lacks required key {key!r}")
    d, Nx, Nv = int(meta["d"]), int(meta["Nx"]), int(meta["Nv"])
    if d not in (1, 2):
        raise ValueError(f"snapshot sidecar {sidecar}: d must be 1 or 2, got {d}")
    shape = (Nx,) * d + (Nv,) * d
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    expected = int(np.prod(shape))
    if raw.size != expected:
        raise ValueError(f"snapshot {path} holds {raw.size} values, sidecar grid wants {expected}")
    values = raw.reshape(shape).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"snapshot {path} contains non-finite values")
    return Snapshot(path=path, values=values, d=d, Nx=Nx, Nv=Nv,
                    v_max=float(meta["v_max"]), t=float(meta["t"]), meta=meta)


def check_hash_consistency(*sources) -> str | None:
    """Verify that every source carries the same ``config_hash``.

    Sources may be :class:`Table`, :class:`Snapshot`, or manifest dicts.
    Sources without a hash are skipped; on disagreement a ``ValueError``
    names the offending files.  Returns the common hash (or ``None`` when
    no source carries one).
    """
    seen: list[tuple[str, str]] = []
    for src in sources:
        if isinstance(src, (Table, Snapshot)):
            h, label = src.config_hash, str(src.path)
        elif isinstance(src, dict):
            h, label = src.get("config_hash"), src.get("csv", "manifest")
        else:
            raise TypeError(f"cannot extract a config hash from {type(src).__name__}")
        if h is not None:
            seen.append((str(h), label))
    if not seen:
        return None
    first_hash, first_label = seen[0]
    for h, label in seen[1:]:
        if h != first_hash:
            raise ValueError(
                f"config_hash mismatch: {first_label} has {first_hash}, "
                f"{label} has {h}; these files come from different runs")
    return first_hash
