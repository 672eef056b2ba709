"""Headline numerical studies: screening-limit convergence, uniform bounds, growth.

Three orchestrations around :func:`vlasov_riesz.integrator.run`:

* ``epsilon_convergence_study`` — how fast the screened runs approach the
  eps = 0 singular run, in phase-space sup norm and time-L2 density norm.
* ``bootstrap_monitor`` — the tracked quantity N_{m,2r} for a family of
  screenings on one time window, the numerical shadow of the uniform bound.
* ``small_time_growth_probe`` — fitted small-time exponent of N(T) - N(0).

Every study returns a :class:`StudyResult` with plain-dict rows (CSV-ready)
and a summary; nothing here touches the filesystem.  Member runs share the
initial datum, the grid, and dt, so splitting error cancels to leading order
in run differences.  Runs are independent of each other and could execute in
parallel; they are run in sequence for determinism of warning order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import phase_space as ps
from .config import RunConfig, build_initial
from .integrator import RunResult, run
from .phase_space import regularity_thresholds

__all__ = [
    "StudyResult",
    "StudyAborted",
    "epsilon_convergence_study",
    "bootstrap_monitor",
    "small_time_growth_probe",
]


@dataclass
class StudyResult:
    kind: str
    rows: list[dict]
    summary: dict


class StudyAborted(RuntimeError):
    """A member run ended early (blow-up or velocity-box contamination)."""

    def __init__(self, eps: float, result: RunResult):
        self.eps = eps
        self.result = result
        super().__init__(
            f"member run eps={eps} ended with status {result.status!r} "
            f"at t={result.termination_time}"
        )


def _member(config: RunConfig, eps: float, **overrides) -> RunConfig:
    mode = "limit" if eps == 0.0 else "regularized"
    return replace(config, mode=mode, eps=float(eps), **overrides)


def _check_completed(eps: float, result: RunResult) -> RunResult:
    if result.status != "completed":
        raise StudyAborted(eps, result)
    return result


def _l2_phase(diff: np.ndarray, cell_volume: float) -> float:
    return float(np.sqrt(np.sum(diff * diff) * cell_volume))


def _l2_x(rho_diff: np.ndarray, dx: float, d: int) -> float:
    return float(np.sqrt(np.sum(rho_diff * rho_diff) * dx**d))


def _fit_order(eps_vals: list[float], errs: list[float]) -> tuple[float, float] | None:
    """Least-squares slope of log err vs log eps on the last three points."""
    pts = [(e, r) for e, r in zip(eps_vals, errs) if e > 0 and r > 0]
    if len(pts) < 3:
        return None
    pts = pts[-3:]
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    coeffs, res = np.polyfit(x, y, 1, full=True)[:2]
    residual = float(np.sqrt(res[0] / len(pts))) if len(res) else 0.0
    return float(coeffs[0]), residual


def epsilon_convergence_study(config: RunConfig, eps_list) -> StudyResult:
    """Run the screened family and measure distance to the eps = 0 run.

    ``eps_list`` must be strictly decreasing and end at 0 (the reference).
    For each eps the row reports the sup over shared snapshot times of the
    phase-space L2 difference and the time-L2 of the density difference.
    The fitted order in eps is reported in the summary with its residual; the
    limit is proved by compactness, so no rate is ever asserted.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or eps_list[-1] != 0.0:
        raise ValueError("eps_list must end at 0 (the reference run)")
    if any(e < 0 for e in eps_list):
        raise ValueError("eps values must be non-negative")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")

    geom = config.geometry()
    base = build_initial(config)
    cadence = config.diagnostic_cadence
    ref_cfg = _member(config, 0.0, snapshot_cadence=cadence,
                      f_norms=(), rho_norms=(), n_order=None)
    ref = _check_completed(0.0, run(ref_cfg, initial=base.copy()))
    ref_times = [t for t, _ in ref.snapshots]
    ref_rho = [ps.density(s) for _, s in ref.snapshots]

    rows = []
    for eps in eps_list:
        if eps == 0.0:
            res = ref
        else:
            cfg = _member(config, eps, snapshot_cadence=cadence,
                          f_norms=(), rho_norms=(), n_order=None)
            res = _check_completed(eps, run(cfg, initial=base.copy()))
        times = [t for t, _ in res.snapshots]
        if times != ref_times:
            raise RuntimeError("member snapshot times drifted from the reference")
        sup_f = 0.0
        rho_sq = np.zeros(len(times))
        for i, (tref, snap) in enumerate(res.snapshots):
            diff = snap.values - ref.snapshots[i][1].values
            sup_f = max(sup_f, _l2_phase(diff, geom.cell_volume))
            rho_sq[i] = _l2_x(ps.density(snap) - ref_rho[i], geom.dx, geom.d) ** 2
        rho_err = float(np.sqrt(np.trapezoid(rho_sq, np.asarray(times))))
        rows.append({"eps": eps, "sup_f_err": sup_f, "rho_l2t_err": rho_err})

    summary = {
        "eps_list": eps_list,
        "t_final": config.t_final,
        "dt": config.dt,
        "grid": {"d": geom.d, "Nx": geom.Nx, "Nv": geom.Nv, "v_max": geom.v_max},
    }
    for key, label in (("sup_f_err", "f"), ("rho_l2t_err", "rho")):
        fit = _fit_order([r["eps"] for r in rows], [r[key] for r in rows])
        summary[f"order_{label}"] = None if fit is None else fit[0]
        summary[f"order_{label}_residual"] = None if fit is None else fit[1]
    return StudyResult(kind="eps_convergence", rows=rows, summary=summary)


def bootstrap_monitor(config: RunConfig, eps_list, m: float, r: float,
                      r_ceiling: float | None = None) -> StudyResult:
    """Track N_{m,2r} for each screening on a common window.

    ``m`` is the density-norm order (the f part uses order m - 1) and ``r``
    half the velocity weight exponent: the norms receive the literal weight
    exponent w = 2 r, i.e. the factor (1 + |v|^2)^r on the squared integrand.
    Orders below the regularity thresholds only warn — under-threshold runs
    are still meaningful experiments.  ``r_ceiling`` optionally flags any
    member whose N exceeds it before the final time.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list must be non-empty")
    w = 2.0 * r
    m0, _, r0 = regularity_thresholds(config.d)
    if m < m0:
        warnings.warn(f"norm order m={m} is below the guaranteed threshold m0={m0}")
    if w < 2.0 * r0:
        warnings.warn(f"weight exponent 2r={w} is below the guaranteed threshold 2*r0={2.0 * r0}")

    base = build_initial(config)
    korder = int(m) - 1
    rows = []
    finals = {}
    exceeded = []
    for eps in eps_list:
        cfg = _member(config, eps, f_norms=((korder, w),), rho_norms=(float(m),),
                      n_order=(float(m), w), snapshot_cadence=0)
        res = _check_completed(eps, run(cfg, initial=base.copy()))
        crossed = None
        for rep in res.history:
            n_val = rep.n_value
            rows.append({
                "eps": eps,
                "t": rep.t,
                "n_value": n_val,
                "f_weighted": rep.weighted_sobolev[(korder, w)],
                "rho_sobolev": rep.rho_sobolev[float(m)],
            })
            if r_ceiling is not None and crossed is None and n_val > r_ceiling:
                crossed = rep.t
        finals[eps] = res.history[-1].n_value
        if crossed is not None:
            exceeded.append({"eps": eps, "t": crossed})

    summary = {
        "m": float(m),
        "weight_exponent": w,
        "eps_list": eps_list,
        "final_n": finals,
        "max_final_n": max(finals.values()),
        "r_ceiling": r_ceiling,
        "exceeded": exceeded,
    }
    return StudyResult(kind="bootstrap", rows=rows, summary=summary)


def small_time_growth_probe(config: RunConfig, t_list) -> StudyResult:
    """Fit the small-time exponent of the tracked quantity's growth.

    ``t_list`` is a descending list of horizons, each a diagnostic time of a
    single run to max(t_list).  The probe's N uses the *fluctuation* density
    norms (spatial mean removed): a spatially uniform state is steady and
    must report zero growth, which the raw density norm — carrying the
    constant background — cannot do.  If every increment sits below the
    noise floor the probe reports ``indistinguishable from zero`` instead of
    a slope.
    """
    t_list = [float(t) for t in t_list]
    if not t_list or any(t <= 0 for t in t_list):
        raise ValueError("t_list must contain positive horizons")
    if any(b >= a for a, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list must be strictly decreasing")

    m = float(config.study_m)
    w = float(config.study_weight)
    korder = int(m) - 1
    cfg = _member(config, config.eps if config.mode == "regularized" else 0.0,
                  t_final=t_list[0], f_norms=((korder, w),), rho_norms=(m,),
                  n_order=(m, w), snapshot_cadence=0)
    res = _check_completed(cfg.eps, run(cfg))

    times = np.array([rep.t for rep in res.history])
    f_vals = np.array([rep.weighted_sobolev[(korder, w)] for rep in res.history])
    rho_fluct_sq = np.array([rep.rho_fluct_sobolev[m] ** 2 for rep in res.history])

    def n_fluct(upto: float) -> float:
        mask = times <= upto + 1e-12
        return float(f_vals[mask].max()
                     + math.sqrt(np.trapezoid(rho_fluct_sq[mask], times[mask])))

    n0 = float(f_vals[0])
    floor = 1e-9 * max(1.0, n0)
    rows = []
    for T in t_list:
        idx = np.argmin(np.abs(times - T))
        if abs(times[idx] - T) > 1e-9:
            raise ValueError(f"horizon T={T} is not a diagnostic time of the run")
        rows.append({"T": T, "delta_n": n_fluct(T) - n0})
    rows.reverse()  # ascending T for the CSV

    fit_pts = [(r["T"], r["delta_n"]) for r in rows if r["delta_n"] > floor]
    summary: dict = {"n0": n0, "noise_floor": floor, "m": m, "weight_exponent": w,
                     "n_fit_points": len(fit_pts)}
    if len(fit_pts) < 2:
        summary["verdict"] = "indistinguishable from zero"
        summary["slope"] = None
    else:
        x = np.log([p[0] for p in fit_pts])
        y = np.log([p[1] for p in fit_pts])
        slope = float(np.polyfit(x, y, 1)[0])
        summary["verdict"] = "fitted"
        summary["slope"] = slope
    return StudyResult(kind="growth_probe", rows=rows, summary=summary)
