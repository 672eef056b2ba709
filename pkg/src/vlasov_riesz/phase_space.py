"""Phase-space grids, distributions, and weighted Sobolev diagnostics.

Position lives on the torus [0, 2*pi)^d (uniform, FFT-friendly), velocity on
a truncated box [-v_max, v_max)^d with equal-weight quadrature.  Norms follow
the convention

    ||f||_{k,w}^2 = sum_{|a|+|b| <= k} integral (1+|v|^2)^w |dx^a dv^b f|^2

where ``w`` is the literal velocity-weight exponent (callers that think in
terms of a half-weight r pass w = 2r).  x-derivatives are spectral,
v-derivatives are 6th-order finite differences (one-sided at the box edge).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import lru_cache, cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "GridGeometry",
    "Distribution",
    "NormReport",
    "SNAPSHOT_FORMAT_VERSION",
    "density",
    "mass",
    "momentum",
    "l2_norm",
    "kinetic_energy",
    "weighted_sobolev_norm",
    "x_sobolev_norm",
    "key_quantity",
    "regularity_thresholds",
    "maxwellian",
    "perturbed_maxwellian",
    "two_bump",
    "save_snapshot",
    "load_snapshot",
]

SNAPSHOT_FORMAT_VERSION = 1


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridGeometry:
    """Tensor grid for one phase-space dimension count ``d`` in {1, 2}.

    ``Nx`` points per x-axis on [0, 2*pi), ``Nv`` points per v-axis at
    ``v_j = -v_max + j * dv`` with ``dv = 2 * v_max / Nv`` (the +v_max edge is
    excluded; v = 0 is on the grid for even ``Nv``).
    """

    d: int
    Nx: int
    Nv: int
    v_max: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if not _is_power_of_two(self.Nx) or self.Nx < 8:
            raise ValueError(f"Nx must be a power of two >= 8, got {self.Nx}")
        if self.Nv < 8:
            raise ValueError(f"Nv must be >= 8, got {self.Nv}")
        if not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")

    @property
    def dx(self) -> float:
        return 2.0 * np.pi / self.Nx

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.Nv

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.Nx) * self.dx

    @cached_property
    def v(self) -> np.ndarray:
        return -self.v_max + np.arange(self.Nv) * self.dv

    @cached_property
    def kx(self) -> np.ndarray:
        """Integer wavenumbers per x-axis in FFT layout."""
        return np.fft.fftfreq(self.Nx, d=1.0 / self.Nx).astype(np.int64)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.Nx,) * self.d + (self.Nv,) * self.d

    @property
    def x_axes(self) -> tuple[int, ...]:
        return tuple(range(self.d))

    @property
    def v_axes(self) -> tuple[int, ...]:
        return tuple(range(self.d, 2 * self.d))

    @property
    def cell_volume(self) -> float:
        return self.dx**self.d * self.dv**self.d

    @cached_property
    def v_weight_base(self) -> np.ndarray:
        """(1 + |v|^2) on the v-grid, shaped to broadcast over x-axes."""
        if self.d == 1:
            w = 1.0 + self.v**2
            return w.reshape((1, self.Nv))
        w = 1.0 + self.v[:, None] ** 2 + self.v[None, :] ** 2
        return w.reshape((1, 1, self.Nv, self.Nv))


@dataclass
class Distribution:
    """Gridded phase-space density with its frozen mean density ``rho0``.

    ``rho0`` is the x-average of the initial density,
    ``(2*pi)^{-d} * integral f dv dx``; it is computed once at construction
    and carried through a run unchanged.
    """

    geometry: GridGeometry
    values: np.ndarray
    rho0: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.geometry.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.geometry.shape}"
            )
        if self.rho0 is None:
            g = self.geometry
            self.rho0 = float(self.values.sum() * g.cell_volume / (2.0 * np.pi) ** g.d)

    def copy(self) -> "Distribution":
        return Distribution(self.geometry, self.values.copy(), self.rho0)


# ---------------------------------------------------------------------------
# low-order moments


def density(dist: Distribution) -> np.ndarray:
    """Velocity integral of f (equal-weight quadrature on the v-grid)."""
    g = dist.geometry
    return dist.values.sum(axis=g.v_axes) * g.dv**g.d


def mass(dist: Distribution) -> float:
    g = dist.geometry
    return float(dist.values.sum() * g.cell_volume)


def momentum(dist: Distribution) -> np.ndarray:
    """Vector of momentum components, integral of v_i * f over phase space."""
    g = dist.geometry
    out = np.empty(g.d)
    for i in range(g.d):
        shape = [1] * (2 * g.d)
        shape[g.d + i] = g.Nv
        vi = g.v.reshape(shape)
        out[i] = (dist.values * vi).sum() * g.cell_volume
    return out


def l2_norm(dist: Distribution) -> float:
    g = dist.geometry
    return float(np.sqrt((dist.values**2).sum() * g.cell_volume))


def kinetic_energy(dist: Distribution) -> float:
    """(1/2) * integral |v|^2 f dv dx."""
    g = dist.geometry
    vsq = g.v_weight_base - 1.0  # |v|^2 broadcast over x
    return float(0.5 * (dist.values * vsq).sum() * g.cell_volume)


# ---------------------------------------------------------------------------
# derivatives


def _fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Fornberg weights for the m-th derivative at x0 from nodes x."""
    n = len(x)
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = ((c4 * w[k, j]) - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w[m]


@lru_cache(maxsize=32)
def _v_derivative_matrix(Nv: int, dv: float) -> np.ndarray:
    """Dense first-derivative matrix: 6th order centered, one-sided at edges."""
    if Nv < 7:
        raise ValueError(f"v-grid too small for the 7-point stencil (Nv={Nv})")
    D = np.zeros((Nv, Nv))
    c = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]) / dv
    for i in range(3, Nv - 3):
        D[i, i - 3 : i + 4] = c
    nodes = np.arange(7) * dv
    for i in range(3):
        D[i, :7] = _fd_weights(nodes, i * dv, 1)
        D[Nv - 1 - i, Nv - 7 :] = -_fd_weights(nodes, i * dv, 1)[::-1]
    return D


def v_derivative(values: np.ndarray, geom: GridGeometry, axis: int, order: int = 1) -> np.ndarray:
    """Finite-difference derivative along the given v-axis (0-based among v-axes)."""
    D = _v_derivative_matrix(geom.Nv, geom.dv)
    out = values
    ax = geom.d + axis
    for _ in range(order):
        out = np.moveaxis(np.tensordot(D, np.moveaxis(out, ax, 0), axes=(1, 0)), 0, ax)
    return out


def x_derivative(values: np.ndarray, geom: GridGeometry, axis: int, order: int = 1) -> np.ndarray:
    """Spectral derivative along the given x-axis; Nyquist mode dropped."""
    k = geom.kx.astype(float)
    mult = (1j * k) ** order
    if geom.Nx % 2 == 0:
        mult[geom.Nx // 2] = 0.0
    fh = np.fft.fft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = geom.Nx
    return np.fft.ifft(fh * mult.reshape(shape), axis=axis).real


def _multi_indices(d: int, total: int):
    """All d-tuples of non-negative ints summing to exactly ``total``."""
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _multi_indices(d - 1, total - first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# norms


def weighted_sobolev_norm(dist: Distribution, k: int, weight: float) -> float:
    """Velocity-weighted Sobolev norm of order ``k`` with literal weight exponent.

    Computes ``sqrt( sum_{|a|+|b| <= k} integral (1+|v|^2)^weight
    |dx^a dv^b f|^2 dv dx )``.  ``weight`` is used as given — no doubling.
    """
    g = dist.geometry
    if k < 0 or int(k) != k:
        raise ValueError(f"derivative order k must be a non-negative integer, got {k}")
    k = int(k)
    if k > g.Nv - 7:
        raise ValueError(
            f"order k={k} too large for Nv={g.Nv} (finite-difference stencils exhaust the v-grid)"
        )
    w_arr = g.v_weight_base**weight
    total = 0.0
    for btot in range(k + 1):
        for beta in _multi_indices(g.d, btot):
            gb = dist.values
            for ax, b in enumerate(beta):
                if b:
                    gb = v_derivative(gb, g, ax, b)
            # spectral x-derivatives share one forward transform of gb
            gb_hat = np.fft.fftn(gb, axes=g.x_axes)
            for atot in range(k - btot + 1):
                for alpha in _multi_indices(g.d, atot):
                    mult = np.ones((g.Nx,) * g.d, dtype=complex)
                    kf = g.kx.astype(float)
                    if g.Nx % 2 == 0:
                        kf = kf.copy()
                        kf[g.Nx // 2] = 0.0
                    for ax, a in enumerate(alpha):
                        if a:
                            shape = [1] * g.d
                            shape[ax] = g.Nx
                            mult = mult * (1j * kf).reshape(shape) ** a
                    if atot == 0:
                        term = gb
                    else:
                        mshape = mult.shape + (1,) * g.d
                        term = np.fft.ifftn(
                            gb_hat * mult.reshape(mshape), axes=g.x_axes
                        ).real
                    total += float((w_arr * term**2).sum())
    return float(np.sqrt(total * g.cell_volume))


def x_sobolev_norm(rho: np.ndarray, s: float, d: int | None = None) -> float:
    """Sobolev norm on the torus via the multiplier (1+|k|^2)^(s/2).

    ``rho`` is a real array on the x-grid; fractional orders are allowed.
    Parseval with ``rho = sum rho_hat(k) exp(i k.x)`` gives
    ``norm^2 = (2 pi)^d * sum_k (1+|k|^2)^s |rho_hat(k)|^2``.
    """
    rho = np.asarray(rho, dtype=float)
    if d is None:
        d = rho.ndim
    if rho.ndim != d:
        raise ValueError(f"density array has ndim {rho.ndim}, expected {d}")
    n = rho.shape[0]
    rh = np.fft.fftn(rho) / rho.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    if d == 1:
        k2 = k**2
    else:
        k2 = k[:, None] ** 2 + k[None, :] ** 2
    return float(np.sqrt((2.0 * np.pi) ** d * np.sum((1.0 + k2) ** s * np.abs(rh) ** 2)))


@dataclass
class NormReport:
    """Norm diagnostics at one time.

    ``weighted_sobolev`` maps ``(k, weight)`` to the phase-space norm with the
    literal weight exponent; ``rho_sobolev`` maps ``m`` to the density norm.
    ``rho_fluct_sobolev`` holds the same density orders with the x-mean
    removed (used by growth probes, where the steady background would mask
    the signal).  ``n_value`` is the running sup-plus-time-integral quantity
    when the run was configured to track one.
    """

    t: float
    weighted_sobolev: dict[tuple[int, float], float] = field(default_factory=dict)
    rho_sobolev: dict[float, float] = field(default_factory=dict)
    rho_fluct_sobolev: dict[float, float] = field(default_factory=dict)
    n_value: float | None = None

    def __post_init__(self):
        for (k, w), val in self.weighted_sobolev.items():
            if val < 0:
                raise ValueError("norms must be non-negative")


def key_quantity(history: list[NormReport], m: float, weight: float) -> float:
    """Sup-in-time phase-space norm at order m-1 plus time-L2 density norm at order m.

    Returns ``max_t ||f||_{m-1, weight} + sqrt( integral_0^T ||rho||_{H^m}^2 dt )``
    with a trapezoid rule over the (uniformly spaced) report times.
    """
    if not history:
        raise ValueError("empty norm history")
    ts = np.array([r.t for r in history])
    if len(ts) > 1:
        gaps = np.diff(ts)
        if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("norm history is not uniformly spaced in t")
    korder = int(m) - 1
    try:
        fvals = np.array([r.weighted_sobolev[(korder, weight)] for r in history])
        rvals = np.array([r.rho_sobolev[m] for r in history])
    except KeyError as exc:
        raise KeyError(
            f"norm history lacks order {exc} — configure the run to record it"
        ) from None
    if len(ts) == 1:
        return float(fvals[0])
    return float(fvals.max() + np.sqrt(np.trapezoid(rvals**2, ts)))


def regularity_thresholds(d: int) -> tuple[float, int, float]:
    """Minimal admissible (m, p, r) for the well-posedness machinery in dimension d."""
    if d < 1 or int(d) != d:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    d = int(d)
    p0 = d // 2 + 1
    m0 = 3.0 + d / 2.0 + p0
    r0 = max(float(d), 2.0 + d / 2.0)
    return m0, p0, r0


# ---------------------------------------------------------------------------
# initial-condition families


def _maxwellian_v(geom: GridGeometry, thermal_v: float) -> np.ndarray:
    """Product Maxwellian on the v-grid, unit continuous normalization per x."""
    if thermal_v <= 0:
        raise ValueError("thermal_v must be positive")
    g1 = np.exp(-(geom.v**2) / (2.0 * thermal_v**2)) / np.sqrt(2.0 * np.pi * thermal_v**2)
    if geom.d == 1:
        return g1
    return g1[:, None] * g1[None, :]

def _edge_check(fv: np.ndarray, geom: GridGeometry):
    """Warn when the v-profile is not negligible at the box edge."""
    peak = float(np.abs(fv).max())
    if geom.d == 1:
        edge = max(abs(fv[0]), abs(fv[-1]))
    else:
        edge = max(np.abs(fv[0, :]).max(), np.abs(fv[-1, :]).max(),
                   np.abs(fv[:, 0]).max(), np.abs(fv[:, -1]).max())
    if peak > 0 and edge > 1e-12 * peak:
        warnings.warn(
            f"initial data is {edge / peak:.2e} of its peak at |v| = v_max; "
            "increase v_max to keep the truncation below 1e-12",
            stacklevel=3,
        )


def _x_perturbation(geom: GridGeometry, amplitude: float, mode: int) -> np.ndarray:
    xs = geom.x
    if geom.d == 1:
        pert = 1.0 + amplitude * np.cos(mode * xs)
        return pert.reshape((geom.Nx, 1))
    pert = 1.0 + amplitude * np.cos(mode * xs)[:, None] * np.ones(geom.Nx)[None, :]
    return pert.reshape((geom.Nx, geom.Nx, 1, 1))


def maxwellian(geom: GridGeometry, thermal_v: float = 1.0) -> Distribution:
    """Spatially uniform Maxwellian with the given thermal speed."""
    fv = _maxwellian_v(geom, thermal_v)
    _edge_check(fv, geom)
    values = np.broadcast_to(fv, geom.shape).copy()
    return Distribution(geom, values)


def perturbed_maxwellian(
    geom: GridGeometry, amplitude: float = 0.01, mode: int = 1, thermal_v: float = 1.0
) -> Distribution:
    """Maxwellian times (1 + amplitude * cos(mode * x)) along the first x-axis."""
    fv = _maxwellian_v(geom, thermal_v)
    _edge_check(fv, geom)
    values = _x_perturbation(geom, amplitude, mode) * fv
    return Distribution(geom, np.ascontiguousarray(values))


def two_bump(
    geom: GridGeometry,
    separation: float = 2.0,
    widths: tuple[float, float] | float = 0.5,
    amplitude: float = 0.0,
    mode: int = 1,
) -> Distribution:
    """Two counter-streaming velocity bumps, optionally perturbed in x.

    The bumps sit at v1 = +-separation/2 with the given Gaussian widths; in
    d = 2 the second velocity axis carries a unit-width Maxwellian factor.
    """
    if np.isscalar(widths):
        w1 = w2 = float(widths)
    else:
        w1, w2 = (float(w) for w in widths)
    if w1 <= 0 or w2 <= 0:
        raise ValueError("bump widths must be positive")
    v = geom.v
    c = separation / 2.0
    bump = 0.5 * (
        np.exp(-((v - c) ** 2) / (2 * w1**2)) / np.sqrt(2 * np.pi * w1**2)
        + np.exp(-((v + c) ** 2) / (2 * w2**2)) / np.sqrt(2 * np.pi * w2**2)
    )
    if geom.d == 1:
        fv = bump
    else:
        g1 = np.exp(-(v**2) / 2.0) / np.sqrt(2.0 * np.pi)
        fv = bump[:, None] * g1[None, :]
    _edge_check(fv, geom)
    values = _x_perturbation(geom, amplitude, mode) * fv
    return Distribution(geom, np.ascontiguousarray(values))


# ---------------------------------------------------------------------------
# snapshots


def save_snapshot(
    dist: Distribution, t: float, path: str | Path, config_hash: str | None = None
) -> None:
    """Write raw little-endian float64 values plus a JSON sidecar.

    The array order is row-major with x-axes first, then v-axes.  The sidecar
    ``<path>.json`` records the grid, the time, and the frozen rho0.
    """
    path = Path(path)
    g = dist.geometry
    path.write_bytes(np.ascontiguousarray(dist.values, dtype="<f8").tobytes())
    meta = {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "d": g.d,
        "Nx": g.Nx,
        "Nv": g.Nv,
        "v_max": g.v_max,
        "t": float(t),
        "rho0": float(dist.rho0),
    }
    if config_hash is not None:
        meta["config_hash"] = config_hash
    Path(str(path) + ".json").write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")


def load_snapshot(path: str | Path) -> tuple[Distribution, float]:
    """Read a snapshot written by :func:`save_snapshot`; returns (distribution, t)."""
    path = Path(path)
    sidecar = Path(str(path) + ".json")
    if not sidecar.exists():
        raise FileNotFoundError(f"snapshot sidecar {sidecar} not found")
    try:
        meta = json.loads(sidecar.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"corrupt snapshot sidecar {sidecar}: {exc}") from None
    for key in ("d", "Nx", "Nv", "v_max", "t", "rho0"):
        if key not in meta:
            raise ValueError(f"snapshot sidecar {sidecar} lacks required key {key!r}")
    geom = GridGeometry(int(meta["d"]), int(meta["Nx"]), int(meta["Nv"]), float(meta["v_max"]))
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    expected = int(np.prod(geom.shape))
    if raw.size != expected:
        raise ValueError(
            f"snapshot {path} holds {raw.size} values, grid wants {expected}"
        )
    values = raw.reshape(geom.shape).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"snapshot {path} contains non-finite values")
    return Distribution(geom, values, rho0=float(meta["rho0"])), float(meta["t"])
