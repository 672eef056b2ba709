"""Run configuration: a small sectioned key-value format with strict validation.

The on-disk grammar is INI-like::

    # comment
    [run]
    dt = 0.005
    t_final = 1.0

    [kernel]
    terms = [[1.0, 2.0]]      # JSON list of [coefficient, exponent] pairs
    sign = repulsive

Unknown sections or keys are hard errors carrying line numbers, values are
typed per key, and ``serialize_config(parse_config(text))`` parses back to an
equal configuration.  The canonical serialization is what gets hashed into
output files.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernels import KernelSpec
from . import phase_space as ps
from .phase_space import Distribution, GridGeometry

__all__ = [
    "ConfigError",
    "RunConfig",
    "CONFIG_FORMAT_VERSION",
    "parse_config",
    "parse_config_file",
    "serialize_config",
    "config_hash",
    "build_initial",
]

CONFIG_FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Validation failure with per-line context."""

    def __init__(self, errors: list[tuple[int | None, str]], source: str = "<config>"):
        self.errors = errors
        self.source = source
        lines = []
        for lineno, msg in errors:
            where = f"{source}:{lineno}" if lineno is not None else source
            lines.append(f"{where}: {msg}")
        super().__init__("\n".join(lines))


@dataclass
class RunConfig:
    """Everything a run or study needs, with documented defaults."""

    # [grid]
    d: int = 1
    Nx: int = 256
    Nv: int = 256
    v_max: float = 8.0
    # [kernel]
    kernel_terms: tuple[tuple[float, float], ...] = ((1.0, 2.0),)
    sign: str = "repulsive"
    # [run]
    mode: str = "limit"
    eps: float = 0.0
    dt: float = 0.005
    t_final: float = 1.0
    diagnostic_cadence: int = 1
    snapshot_cadence: int = 0
    seed: int = 0
    output_dir: str = ""
    # [initial]
    family: str = "maxwellian"
    thermal_v: float = 1.0
    amplitude: float = 0.01
    perturbation_mode: int = 1
    separation: float = 2.0
    widths: tuple[float, ...] = (0.5,)
    path: str = ""
    # [diagnostics]
    f_norms: tuple[tuple[int, float], ...] = ()
    rho_norms: tuple[float, ...] = ()
    n_order: tuple[float, float] | None = None
    # [study]
    study_type: str = ""
    eps_list: tuple[float, ...] = ()
    t_list: tuple[float, ...] = ()
    study_m: float = 5.0
    study_weight: float = 6.0

    def geometry(self) -> GridGeometry:
        return GridGeometry(self.d, self.Nx, self.Nv, self.v_max)

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(self.kernel_terms, self.sign)


# schema: section -> key -> (config field, converter name)
_SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "grid": {
        "d": ("d", "int"),
        "nx": ("Nx", "int"),
        "nv": ("Nv", "int"),
        "v_max": ("v_max", "float"),
    },
    "kernel": {
        "terms": ("kernel_terms", "pairs"),
        "sign": ("sign", "str"),
    },
    "run": {
        "mode": ("mode", "str"),
        "eps": ("eps", "float"),
        "dt": ("dt", "float"),
        "t_final": ("t_final", "float"),
        "diagnostic_cadence": ("diagnostic_cadence", "int"),
        "snapshot_cadence": ("snapshot_cadence", "int"),
        "seed": ("seed", "int"),
        "output_dir": ("output_dir", "str"),
    },
    "initial": {
        "family": ("family", "str"),
        "thermal_v": ("thermal_v", "float"),
        "amplitude": ("amplitude", "float"),
        "mode": ("perturbation_mode", "int"),
        "separation": ("separation", "float"),
        "widths": ("widths", "floats"),
        "path": ("path", "str"),
    },
    "diagnostics": {
        "f_norms": ("f_norms", "norm_pairs"),
        "rho_norms": ("rho_norms", "floats"),
        "n_order": ("n_order", "opt_pair"),
    },
    "study": {
        "type": ("study_type", "str"),
        "eps_list": ("eps_list", "floats"),
        "t_list": ("t_list", "floats"),
        "m": ("study_m", "float"),
        "weight": ("study_weight", "float"),
    },
}

_CHOICES = {
    "sign": ("repulsive", "attractive"),
    "mode": ("limit", "regularized"),
    "family": ("maxwellian", "perturbed_maxwellian", "two_bump", "file"),
    "study_type": ("", "eps_convergence", "bootstrap", "growth_probe"),
}


def _convert(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "str":
        return raw
    data = json.loads(raw)
    if kind == "pairs":
        return tuple((float(c), float(a)) for c, a in data)
    if kind == "norm_pairs":
        return tuple((int(k), float(w)) for k, w in data)
    if kind == "floats":
        if np.isscalar(data):
            return (float(data),)
        return tuple(float(x) for x in data)
    if kind == "opt_pair":
        if data is None:
            return None
        m, w = data
        return (float(m), float(w))
    raise AssertionError(kind)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate; raises :class:`ConfigError` with line numbers."""
    values: dict[str, object] = {}
    errors: list[tuple[int | None, str]] = []
    seen: dict[tuple[str, str], int] = {}
    section = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SCHEMA:
                errors.append((lineno, f"unknown section [{section}]"))
                section = None
            continue
        if "=" not in line:
            errors.append((lineno, f"expected 'key = value', got {rawline.strip()!r}"))
            continue
        if section is None:
            errors.append((lineno, "key outside of any known section"))
            continue
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key == "format_version":
            try:
                if int(raw) != CONFIG_FORMAT_VERSION:
                    errors.append((lineno, f"unsupported format_version {raw}"))
            except ValueError:
                errors.append((lineno, f"format_version must be an integer, got {raw!r}"))
            continue
        if key not in _SCHEMA[section]:
            errors.append((lineno, f"unknown key {key!r} in section [{section}]"))
            continue
        if (section, key) in seen:
            errors.append((lineno, f"duplicate key {key!r} in section [{section}] "
                                   f"(first set on line {seen[(section, key)]})"))
            continue
        seen[(section, key)] = lineno
        fieldname, kind = _SCHEMA[section][key]
        try:
            values[fieldname] = _convert(kind, raw)
        except (ValueError, TypeError, json.JSONDecodeError):
            errors.append((lineno, f"cannot parse {key} = {raw!r} as {kind}"))
    if errors:
        raise ConfigError(errors, source)

    cfg = RunConfig(**values)
    _validate(cfg, seen, source)
    return cfg


def _lineno(seen, section, key):
    return seen.get((section, key))


def _validate(cfg: RunConfig, seen: dict, source: str) -> None:
    errors: list[tuple[int | None, str]] = []

    for fieldname, choices in _CHOICES.items():
        if getattr(cfg, fieldname) not in choices:
            sec, key = _field_location(fieldname)
            errors.append((_lineno(seen, sec, key),
                           f"{key} must be one of {choices}, got {getattr(cfg, fieldname)!r}"))
    try:
        cfg.geometry()
    except ValueError as exc:
        errors.append((None, f"[grid]: {exc}"))
    try:
        cfg.kernel_spec()
    except ValueError as exc:
        errors.append((_lineno(seen, "kernel", "terms"), f"[kernel]: {exc}"))
    if cfg.dt <= 0:
        errors.append((_lineno(seen, "run", "dt"), f"dt must be positive, got {cfg.dt}"))
    if cfg.t_final < 0:
        errors.append((_lineno(seen, "run", "t_final"), "t_final must be >= 0"))
    if cfg.eps < 0:
        errors.append((_lineno(seen, "run", "eps"), f"eps must be >= 0, got {cfg.eps}"))
    if cfg.diagnostic_cadence < 1:
        errors.append((_lineno(seen, "run", "diagnostic_cadence"),
                       "diagnostic_cadence must be a positive step count"))
    if cfg.snapshot_cadence < 0:
        errors.append((_lineno(seen, "run", "snapshot_cadence"),
                       "snapshot_cadence must be >= 0 (0 disables snapshots)"))
    if cfg.family == "file" and not cfg.path:
        errors.append((_lineno(seen, "initial", "family"),
                       "family = file needs a path in [initial]"))
    if cfg.family == "two_bump" and len(cfg.widths) not in (1, 2):
        errors.append((_lineno(seen, "initial", "widths"),
                       "widths takes one or two positive values"))
    for k, w in cfg.f_norms:
        if k < 0:
            errors.append((_lineno(seen, "diagnostics", "f_norms"),
                           f"derivative order {k} must be >= 0"))
    if errors:
        raise ConfigError(errors, source)

    # advisory threshold checks (never fatal)
    m0, _, r0 = ps.regularity_thresholds(cfg.d)
    if cfg.n_order is not None:
        m, w = cfg.n_order
        if m <= m0:
            warnings.warn(
                f"tracked norm order m = {m} is at or below the d={cfg.d} "
                f"well-posedness threshold m0 = {m0}", stacklevel=3)
        if w < 2 * r0:
            warnings.warn(
                f"tracked velocity weight {w} is below twice the d={cfg.d} "
                f"threshold r0 = {r0}", stacklevel=3)


def _field_location(fieldname: str) -> tuple[str, str]:
    for sec, keys in _SCHEMA.items():
        for key, (fname, _) in keys.items():
            if fname == fieldname:
                return sec, key
    raise KeyError(fieldname)


def parse_config_file(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def _fmt_value(kind: str, value) -> str:
    if kind == "int":
        return str(value)
    if kind == "float":
        return repr(float(value))
    if kind == "str":
        return str(value)
    if kind in ("pairs", "norm_pairs"):
        return json.dumps([list(p) for p in value])
    if kind == "floats":
        return json.dumps(list(value))
    if kind == "opt_pair":
        return json.dumps(None if value is None else list(value))
    raise AssertionError(kind)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parses back to an equal RunConfig."""
    out = ["# vlasov-riesz run configuration", ""]
    first = True
    for sec, keys in _SCHEMA.items():
        out.append(f"[{sec}]")
        if first:
            out.append(f"format_version = {CONFIG_FORMAT_VERSION}")
            first = False
        for key, (fieldname, kind) in keys.items():
            out.append(f"{key} = {_fmt_value(kind, getattr(cfg, fieldname))}")
        out.append("")
    return "\n".join(out)


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 of the canonical serialization (hex)."""
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()


def build_initial(cfg: RunConfig) -> Distribution:
    """Construct the configured initial distribution."""
    geom = cfg.geometry()
    if cfg.family == "maxwellian":
        return ps.maxwellian(geom, cfg.thermal_v)
    if cfg.family == "perturbed_maxwellian":
        return ps.perturbed_maxwellian(geom, cfg.amplitude, cfg.perturbation_mode,
                                       cfg.thermal_v)
    if cfg.family == "two_bump":
        widths = cfg.widths[0] if len(cfg.widths) == 1 else (cfg.widths[0], cfg.widths[1])
        return ps.two_bump(geom, cfg.separation, widths, cfg.amplitude,
                           cfg.perturbation_mode)
    if cfg.family == "file":
        dist, _ = ps.load_snapshot(cfg.path)
        if dist.geometry != geom:
            raise ValueError(
                f"snapshot grid {dist.geometry} does not match configured grid {geom}"
            )
        return dist
    raise ValueError(f"unknown initial family {cfg.family!r}")
