"""Semi-Lagrangian time stepping: exact spectral x-shifts, cubic-spline v-kicks.

One Strang step is x(dt/2) -> field solve from the dealiased density ->
v(dt) -> x(dt/2).  The x-advection multiplies each velocity slice by
``exp(-i k . v dt)`` (exact free streaming); the v-advection traces feet
``v - dt E(x)`` and interpolates with an interpolating cubic spline per
x-column, taking the value 0 outside the velocity box.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import solve_banded

from .field import wavenumber_mesh
from .kernels import KernelSpec, multiplier_on_moduli
from . import phase_space as ps
from .phase_space import Distribution, GridGeometry, NormReport

__all__ = [
    "StepperState",
    "Stepper",
    "RunResult",
    "advect_x",
    "advect_v",
    "strang_step",
    "run",
    "BLOW_UP_FACTOR",
]

BLOW_UP_FACTOR = 1e6


# ---------------------------------------------------------------------------
# advection kernels


def _x_phases(geom: GridGeometry, dt: float) -> list[np.ndarray]:
    """Streaming phases exp(-i k v dt), one broadcastable factor per x-axis."""
    k = geom.kx.astype(float)
    v = geom.v
    ph = np.exp(-1j * dt * k[:, None] * v[None, :])
    if geom.d == 1:
        return [ph]
    return [ph.reshape(geom.Nx, 1, geom.Nv, 1), ph.reshape(1, geom.Nx, 1, geom.Nv)]


def advect_x(values: np.ndarray, geom: GridGeometry, dt: float,
             phases: list[np.ndarray] | None = None) -> np.ndarray:
    """Exact free-streaming shift x -> x - v dt via Fourier phase multipliers."""
    if phases is None:
        phases = _x_phases(geom, dt)
    out = values
    for ax in range(geom.d):
        fh = np.fft.fft(out, axis=ax)
        out = np.fft.ifft(fh * phases[ax], axis=ax).real
    return out


def _spline_shift_rows(rows: np.ndarray, shifts_cells: np.ndarray) -> tuple[np.ndarray, bool]:
    """Shift each row of ``rows`` by its entry of ``shifts_cells`` (grid units).

    Interpolating cubic spline (natural ends), value 0 outside the node hull.
    Returns the shifted rows and whether any foot left the box by > 1 cell.
    """
    nrows, n = rows.shape
    # spline coefficients in B-form: c_0 = f_0, c_{n-1} = f_{n-1}, tridiagonal interior
    c = np.empty_like(rows)
    c[:, 0] = rows[:, 0]
    c[:, -1] = rows[:, -1]
    if n > 2:
        rhs = 6.0 * rows[:, 1:-1]
        rhs[:, 0] -= c[:, 0]
        rhs[:, -1] -= c[:, -1]
        ab = np.zeros((3, n - 2))
        ab[0, 1:] = 1.0
        ab[1, :] = 4.0
        ab[2, :-1] = 1.0
        c[:, 1:-1] = solve_banded((1, 1), ab, rhs.T, overwrite_ab=True, overwrite_b=True).T
    ce = np.empty((nrows, n + 2))
    ce[:, 1 : n + 1] = c
    ce[:, 0] = 2.0 * c[:, 0] - c[:, 1]
    ce[:, n + 1] = 2.0 * c[:, -1] - c[:, -2]

    t = np.arange(n)[None, :] - shifts_cells[:, None]
    inside = (t >= 0.0) & (t <= n - 1.0)
    escaped = bool(np.any(t < -1.0) or np.any(t > float(n)))
    cell = np.clip(np.floor(t), 0, n - 2).astype(np.int64)
    u = t - cell
    u2 = u * u
    u3 = u2 * u
    w0 = (1.0 - u) ** 3 / 6.0
    w1 = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0
    w2 = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0
    w3 = u3 / 6.0
    ridx = np.arange(nrows)[:, None]
    out = (
        w0 * ce[ridx, cell]
        + w1 * ce[ridx, cell + 1]
        + w2 * ce[ridx, cell + 2]
        + w3 * ce[ridx, cell + 3]
    )
    out *= inside
    return out, escaped


def advect_v(values: np.ndarray, geom: GridGeometry, efield: np.ndarray, dt: float
             ) -> tuple[np.ndarray, bool]:
    """Velocity kick v -> v - dt E(x), one spline pass per velocity axis.

    ``efield`` has shape (d,) + x-grid shape.  Returns (new values, escaped)
    where ``escaped`` flags feet leaving the box by more than one cell.
    """
    efield = np.asarray(efield, dtype=float)
    if efield.shape != (geom.d,) + (geom.Nx,) * geom.d:
        raise ValueError(f"field shape {efield.shape} does not match the x-grid")
    out = values
    escaped = False
    for ax in range(geom.d):
        target = geom.d + ax
        moved = np.moveaxis(out, target, -1)
        lead_shape = moved.shape[:-1]
        rows = np.ascontiguousarray(moved).reshape(-1, geom.Nv)
        # per-row shift in cells: E component broadcast over the other v-axes
        sh = dt * efield[ax]
        sh = sh.reshape(sh.shape + (1,) * (len(lead_shape) - geom.d))
        shifts = np.broadcast_to(sh, lead_shape).reshape(-1) / geom.dv
        shifted, esc = _spline_shift_rows(rows, np.ascontiguousarray(shifts))
        escaped = escaped or esc
        out = np.moveaxis(shifted.reshape(lead_shape + (geom.Nv,)), -1, target)
    return np.ascontiguousarray(out), escaped


def _dealias_mask(geom: GridGeometry) -> np.ndarray:
    """2/3-rule mask on the x-grid wavenumbers."""
    cut = geom.Nx // 3
    keep1 = np.abs(geom.kx) <= cut
    if geom.d == 1:
        return keep1
    return keep1[:, None] & keep1[None, :]


# ---------------------------------------------------------------------------
# stepper


class Stepper:
    """Precomputed multipliers for repeated Strang steps at fixed dt."""

    def __init__(self, geom: GridGeometry, kernel: KernelSpec, dt: float,
                 eps: float = 0.0, regularized: bool = False):
        if dt <= 0:
            raise ValueError("dt must be positive")
        if eps < 0:
            raise ValueError("eps must be >= 0")
        self.geom = geom
        self.kernel = kernel
        self.dt = dt
        self.eps = float(eps) if regularized else 0.0
        self.regularized = regularized
        self._half_phases = _x_phases(geom, dt / 2.0)
        self._mask = _dealias_mask(geom)
        # field multiplier per component: -i k_j U_hat(k) / (1 + eps^2 |k|^2)
        kcomps, moduli = wavenumber_mesh(geom.d, geom.Nx)
        u_hat = multiplier_on_moduli(kernel, moduli)
        if self.eps != 0.0:
            u_hat = u_hat / (1.0 + self.eps**2 * moduli**2)
        self.u_mult = u_hat
        self._field_mult = []
        for j in range(geom.d):
            kj = kcomps[j].copy()
            kj[np.abs(kj) == geom.Nx // 2] = 0.0
            self._field_mult.append(-1j * kj * u_hat)

    def field_from(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Dealiased density spectrum and the field it generates."""
        g = self.geom
        rho = values.sum(axis=g.v_axes) * g.dv**g.d
        rho_hat = np.fft.fftn(rho) / rho.size
        rho_hat = rho_hat * self._mask
        size = rho_hat.size
        E = np.empty((g.d,) + rho_hat.shape)
        for j in range(g.d):
            E[j] = np.fft.ifftn(self._field_mult[j] * rho_hat * size).real
        return rho_hat, E

    def step(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
        """One Strang step; returns (values, field, escaped)."""
        g = self.geom
        half = advect_x(values, g, self.dt / 2.0, self._half_phases)
        _, E = self.field_from(half)
        kicked, escaped = advect_v(half, g, E, self.dt)
        out = advect_x(kicked, g, self.dt / 2.0, self._half_phases)
        return out, E, escaped


_STEPPER_CACHE: dict[tuple, Stepper] = {}


def _cached_stepper(geom: GridGeometry, kernel: KernelSpec, dt: float,
                    eps: float, regularized: bool) -> Stepper:
    key = (geom, kernel, float(dt), float(eps), bool(regularized))
    st = _STEPPER_CACHE.get(key)
    if st is None:
        if len(_STEPPER_CACHE) > 8:
            _STEPPER_CACHE.clear()
        st = Stepper(geom, kernel, dt, eps=eps, regularized=regularized)
        _STEPPER_CACHE[key] = st
    return st


@dataclass
class StepperState:
    """Mutable state advanced by :func:`strang_step`."""

    dist: Distribution
    t: float
    dt: float
    kernel: KernelSpec
    eps: float = 0.0
    regularized: bool = False
    initial_max: float | None = None
    escaped_warned: bool = False
    events: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.initial_max is None:
            self.initial_max = float(np.abs(self.dist.values).max())


def strang_step(state: StepperState) -> StepperState:
    """Advance the state by one Strang step, aborting on non-finite values."""
    if not np.all(np.isfinite(state.dist.values)):
        state.events.append({"t": state.t, "type": "blow_up",
                             "message": "non-finite values"})
        raise FloatingPointError(f"non-finite distribution values at t={state.t}")
    stepper = _cached_stepper(state.dist.geometry, state.kernel, state.dt,
                              state.eps, state.regularized)
    new_values, _, escaped = stepper.step(state.dist.values)
    if escaped and not state.escaped_warned:
        warnings.warn("characteristic feet left the velocity box by more than one cell")
        state.escaped_warned = True
        state.events.append({"t": state.t, "type": "v_box_exit"})
    if not np.all(np.isfinite(new_values)):
        state.events.append({"t": state.t + state.dt, "type": "blow_up",
                             "message": "non-finite values"})
        raise FloatingPointError(f"non-finite distribution values at t={state.t + state.dt}")
    state.dist = Distribution(state.dist.geometry, new_values, state.dist.rho0)
    state.t += state.dt
    return state


# ---------------------------------------------------------------------------
# full runs


@dataclass
class RunResult:
    """Everything a run produced, ready for serialization.

    ``status`` is ``completed``, ``blow_up`` (non-finite values or amplitude
    growth past :data:`BLOW_UP_FACTOR`), or ``boundary_abort`` (mass reached
    the velocity-box edge, so the truncated dynamics stopped being valid —
    the usual endpoint of attractive runaway).  ``termination_time`` is set
    whenever a detector ended the run early.
    """

    history: list[NormReport]
    final: Distribution
    events: list[dict]
    status: str
    blow_up_time: float | None
    termination_time: float | None
    table: dict  # column name -> list of floats (diagnostics time series)
    snapshots: list[tuple[float, Distribution]]


def _potential_energy(rho_hat: np.ndarray, u_mult: np.ndarray, d: int) -> float:
    """(1/2) integral (U * (rho - rho0)) (rho - rho0) dx, spectral form."""
    return float(0.5 * (2.0 * np.pi) ** d * np.sum(u_mult * np.abs(rho_hat) ** 2))


def _fmt_order(x: float) -> str:
    """Format a norm order for a column label: integers bare, else repr."""
    xf = float(x)
    return str(int(xf)) if xf == int(xf) else repr(xf)


def run(config, initial: Distribution | None = None) -> RunResult:
    """Integrate a configured run and collect diagnostics.

    ``config`` is a :class:`~vlasov_riesz.config.RunConfig`; ``initial``
    overrides the configured initial condition (used by studies that reuse
    distributions).  File output is handled by the callers.
    """
    from .config import build_initial  # deferred: config imports phase_space

    geom = config.geometry()
    kernel = config.kernel_spec()
    dist = initial if initial is not None else build_initial(config)
    if dist.geometry != geom:
        raise ValueError("initial distribution does not match the configured grid")

    nsteps_f = config.t_final / config.dt
    nsteps = int(round(nsteps_f))
    if abs(nsteps_f - nsteps) > 1e-9 or nsteps < 0:
        raise ValueError(f"t_final/dt = {nsteps_f} is not a whole number of steps")
    cadence = config.diagnostic_cadence
    if nsteps % cadence != 0:
        raise ValueError(
            f"step count {nsteps} is not a multiple of diagnostic_cadence={cadence}"
        )

    stepper = Stepper(geom, kernel, config.dt, eps=config.eps,
                      regularized=(config.mode == "regularized"))

    columns: dict[str, list[float]] = {"t": [], "mass": []}
    for j in range(geom.d):
        columns[f"momentum_{j}"] = []
    columns["L2"] = []
    columns["energy_kinetic"] = []
    columns["energy_potential"] = []
    for k, w in config.f_norms:
        columns[f"Hk_r{k},{_fmt_order(w)}"] = []
    for m in config.rho_norms:
        columns[f"rho_Hm{_fmt_order(m)}"] = []

    history: list[NormReport] = []
    events: list[dict] = []
    snapshots: list[tuple[float, Distribution]] = []
    initial_max = float(np.abs(dist.values).max())
    escaped_warned = False
    status = "completed"
    blow_up_time = None

    # running pieces of the tracked sup + time-integral quantity
    n_running_max = 0.0
    n_prev: tuple[float, float] | None = None  # (t, ||rho||^2)
    n_integral = 0.0

    edge = 0.9 * geom.v_max
    if geom.d == 1:
        edge_mask = np.abs(geom.v) >= edge
    else:
        vv = np.sqrt(geom.v[:, None] ** 2 + geom.v[None, :] ** 2)
        edge_mask = vv >= edge

    def record(t: float, values: np.ndarray) -> str | None:
        nonlocal n_running_max, n_prev, n_integral
        snap = Distribution(geom, values, dist.rho0)
        rho = ps.density(snap)
        rho_hat = np.fft.fftn(rho) / rho.size
        columns["t"].append(t)
        columns["mass"].append(ps.mass(snap))
        mom = ps.momentum(snap)
        for j in range(geom.d):
            columns[f"momentum_{j}"].append(float(mom[j]))
        columns["L2"].append(ps.l2_norm(snap))
        columns["energy_kinetic"].append(ps.kinetic_energy(snap))
        columns["energy_potential"].append(_potential_energy(rho_hat, stepper.u_mult, geom.d))

        report = NormReport(t=t)
        for k, w in config.f_norms:
            val = ps.weighted_sobolev_norm(snap, k, w)
            report.weighted_sobolev[(k, w)] = val
            columns[f"Hk_r{k},{_fmt_order(w)}"].append(val)
        fluct = rho - rho.mean()
        for m in config.rho_norms:
            val = ps.x_sobolev_norm(rho, m, geom.d)
            report.rho_sobolev[m] = val
            report.rho_fluct_sobolev[m] = ps.x_sobolev_norm(fluct, m, geom.d)
            columns[f"rho_Hm{_fmt_order(m)}"].append(val)
        if config.n_order is not None:
            m, w = config.n_order
            korder = int(m) - 1
            fval = report.weighted_sobolev.get((korder, w))
            rval = report.rho_sobolev.get(m)
            if fval is None or rval is None:
                raise ValueError(
                    "n_order requires f_norms to include (m-1, w) and rho_norms to include m"
                )
            n_running_max = max(n_running_max, fval)
            if n_prev is not None:
                n_integral += 0.5 * (n_prev[1] + rval**2) * (t - n_prev[0])
            n_prev = (t, rval**2)
            report.n_value = n_running_max + float(np.sqrt(n_integral))
        history.append(report)

        # truncation watchdog: mass parked near the box edge invalidates the run
        boundary_mass = float(values.sum(axis=geom.x_axes)[edge_mask].sum()) * geom.cell_volume
        total = columns["mass"][-1]
        if total > 0 and boundary_mass / total > 1e-8:
            return "boundary_contamination"
        return None

    values = dist.values
    termination_time = None
    if config.snapshot_cadence:
        snapshots.append((0.0, dist.copy()))
    problem = record(0.0, values)
    if problem:
        warnings.warn("initial data already puts mass within 10% of the velocity box edge")
        events.append({"t": 0.0, "type": problem})
        status = "boundary_abort"
        termination_time = 0.0
        nsteps = 0

    for n in range(1, nsteps + 1):
        values, _, escaped = stepper.step(values)
        t = n * config.dt
        if escaped and not escaped_warned:
            warnings.warn("characteristic feet left the velocity box by more than one cell")
            events.append({"t": t, "type": "v_box_exit"})
            escaped_warned = True
        finite = bool(np.all(np.isfinite(values)))
        if not finite or np.abs(values).max() > BLOW_UP_FACTOR * initial_max:
            blow_up_time = t
            termination_time = t
            events.append({
                "t": t, "type": "blow_up",
                "message": "non-finite values" if not finite
                else f"amplitude exceeded {BLOW_UP_FACTOR:g} x initial",
            })
            status = "blow_up"
            break
        if config.snapshot_cadence and n % config.snapshot_cadence == 0:
            snapshots.append((t, Distribution(geom, values.copy(), dist.rho0)))
        if n % cadence == 0:
            problem = record(t, values)
            if problem:
                warnings.warn(
                    f"mass within 10% of the velocity box edge exceeded 1e-8 at t={t}; aborting"
                )
                events.append({"t": t, "type": problem})
                status = "boundary_abort"
                termination_time = t
                break

    final = Distribution(geom, values, dist.rho0)
    events.append({"t": columns["t"][-1] if columns["t"] else 0.0, "type": "finished",
                   "status": status})
    return RunResult(history=history, final=final, events=events, status=status,
                     blow_up_time=blow_up_time, termination_time=termination_time,
                     table=columns, snapshots=snapshots)
