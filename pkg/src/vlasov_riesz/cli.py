"""Command-line front end.

Subcommands map one-to-one onto library operations:

* ``run``             — integrate one configured run, write diagnostics.
* ``study-eps``       — screening-limit convergence study.
* ``study-bootstrap`` — uniform-in-screening bound monitor.
* ``kg-sweep``        — averaging-operator scaling sweep over horizons.
* ``penrose``         — stability-function infimum for a velocity profile.
* ``norms``           — weighted norms of a stored snapshot.

Exit codes: 0 success; 2 configuration or validation error; 3 a run was
terminated by a singularity detector.  Code 3 covers both detector outcomes —
amplitude/finiteness blow-up and velocity-box contamination — because for
this discretization an attractive collapse always manifests first as mass
reaching the velocity-box edge; the termination time is printed on stdout
and recorded in the manifest either way.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .averaging import gaussian_symbol, kg_scaling_sweep
from .config import (ConfigError, config_hash, parse_config_file,
                     serialize_config)
from .experiments import (StudyAborted, bootstrap_monitor,
                          epsilon_convergence_study)
from .integrator import run as run_integration
from .outputs import (content_address, diagnostics_csv_text, manifest_text,
                      study_csv_text, write_text)
from .penrose import (VelocityProfile, maxwellian_profile, penrose_value,
                      stability_infimum)
from . import phase_space as ps

__all__ = ["main"]


def _outdir(args, cfg=None) -> Path:
    out = args.output or (cfg.output_dir if cfg is not None else "") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_study(outdir: Path, name: str, study, cfg) -> None:
    h = config_hash(cfg)
    write_text(outdir / f"{name}.csv", study_csv_text(study.kind, study.rows, h))
    write_text(outdir / f"{name}_manifest.json", manifest_text({
        "kind": study.kind,
        "config_hash": h,
        "config_address": content_address(serialize_config(cfg)),
        "summary": study.summary,
        "rows": len(study.rows),
        "csv": f"{name}.csv",
    }))


def _cmd_run(args) -> int:
    cfg = parse_config_file(args.config)
    outdir = _outdir(args, cfg)
    h = config_hash(cfg)
    result = run_integration(cfg)
    write_text(outdir / "diagnostics.csv", diagnostics_csv_text(result.table, h))
    for i, (t, dist) in enumerate(result.snapshots):
        ps.save_snapshot(dist, t, outdir / f"snapshot_{i:04d}.f64", config_hash=h)
    write_text(outdir / "run_manifest.json", manifest_text({
        "kind": "run",
        "config_hash": h,
        "config_address": content_address(serialize_config(cfg)),
        "status": result.status,
        "blow_up_time": result.blow_up_time,
        "termination_time": result.termination_time,
        "events": result.events,
        "rows": len(result.table["t"]),
        "snapshots": len(result.snapshots),
        "csv": "diagnostics.csv",
    }))
    print(f"status={result.status} rows={len(result.table['t'])} out={outdir}")
    if result.status != "completed":
        print(f"terminated t={result.termination_time}")
        return 3
    return 0


def _cmd_study_eps(args) -> int:
    cfg = parse_config_file(args.config)
    if not cfg.eps_list:
        print(f"{args.config}: [study] eps_list is required for study-eps", file=sys.stderr)
        return 2
    outdir = _outdir(args, cfg)
    study = epsilon_convergence_study(cfg, cfg.eps_list)
    _write_study(outdir, "eps_convergence", study, cfg)
    print(f"eps study rows={len(study.rows)} order_f={study.summary['order_f']} out={outdir}")
    return 0


def _cmd_study_bootstrap(args) -> int:
    cfg = parse_config_file(args.config)
    if not cfg.eps_list:
        print(f"{args.config}: [study] eps_list is required for study-bootstrap",
              file=sys.stderr)
        return 2
    outdir = _outdir(args, cfg)
    study = bootstrap_monitor(cfg, cfg.eps_list, m=cfg.study_m,
                              r=cfg.study_weight / 2.0, r_ceiling=args.ceiling)
    _write_study(outdir, "bootstrap", study, cfg)
    print(f"bootstrap max_final_n={study.summary['max_final_n']!r} out={outdir}")
    if args.ceiling is not None and study.summary["exceeded"]:
        print(f"ceiling {args.ceiling} exceeded: {study.summary['exceeded']}")
    return 0


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"expected a comma-separated float list, got {text!r}")


def _cmd_kg_sweep(args) -> int:
    t_values = _parse_floats(args.Ts)
    if not t_values:
        print("kg-sweep: --Ts must list at least one horizon", file=sys.stderr)
        return 2
    outdir = _outdir(args)
    params = (f"kg-sweep alpha={args.alpha!r} Ts={args.Ts} trials={args.trials} "
              f"seed={args.seed} width={args.width!r} s1={args.s1!r} s2={args.s2!r}")
    rows = kg_scaling_sweep(lambda T: gaussian_symbol(T, width=args.width),
                            t_values, args.alpha, trials=args.trials,
                            rng=args.seed, s1=args.s1, s2=args.s2)
    h = content_address(params)
    write_text(outdir / "kg_sweep.csv", study_csv_text("kg_sweep", rows, h))
    write_text(outdir / "kg_sweep_manifest.json", manifest_text({
        "kind": "kg_sweep",
        "config_hash": h,
        "params": params,
        "rows": len(rows),
        "fitted_C": rows[0]["fitted_C"] if rows else None,
        "csv": "kg_sweep.csv",
    }))
    print(f"kg-sweep rows={len(rows)} fitted_C={rows[0]['fitted_C']!r} out={outdir}")
    return 0


def _make_profile(args) -> VelocityProfile:
    if args.profile == "maxwellian":
        return maxwellian_profile(Nv=args.Nv, v_max=args.v_max,
                                  thermal_v=args.thermal_v)
    if args.profile == "zero":
        return VelocityProfile(np.zeros(args.Nv), args.v_max)
    if args.profile == "two_bump":
        dv = 2.0 * args.v_max / args.Nv
        v = -args.v_max + dv * np.arange(args.Nv)
        s, wdt = args.separation / 2.0, args.thermal_v
        vals = 0.5 * (np.exp(-0.5 * ((v - s) / wdt) ** 2)
                      + np.exp(-0.5 * ((v + s) / wdt) ** 2))
        vals /= np.sqrt(2.0 * np.pi * wdt**2)
        return VelocityProfile(vals, args.v_max)
    raise ValueError(f"unknown profile {args.profile!r}")


def _parse_range(text: str) -> tuple[float, float]:
    vals = _parse_floats(text)
    if len(vals) != 2:
        raise ValueError(f"expected 'lo,hi', got {text!r}")
    return (vals[0], vals[1])


def _cmd_penrose(args) -> int:
    profile = _make_profile(args)
    g_range = _parse_range(args.gamma_range)
    t_range = _parse_range(args.tau_range)
    e_range = _parse_range(args.eta_range)
    inf_abs, arg = stability_infimum(profile, g_range, t_range, e_range,
                                     n_coarse=args.n_coarse,
                                     n_refine=args.n_refine, rounds=args.rounds)
    print(f"inf_abs={inf_abs!r} argmin=(gamma={arg[0]!r}, tau={arg[1]!r}, eta={arg[2]!r})")
    if args.dump_grid:
        params = (f"penrose profile={args.profile} thermal_v={args.thermal_v!r} "
                  f"Nv={args.Nv} v_max={args.v_max!r} gamma={args.gamma_range} "
                  f"tau={args.tau_range} eta={args.eta_range} n={args.n_coarse}")
        rows = []
        for g in np.linspace(*g_range, args.n_coarse):
            for t in np.linspace(*t_range, args.n_coarse):
                for e in np.linspace(*e_range, args.n_coarse):
                    if abs(e) < 1e-12:
                        continue
                    rows.append({"gamma": float(g), "tau": float(t), "eta": float(e),
                                 "abs_P": abs(penrose_value(profile, g, t, e))})
        write_text(Path(args.dump_grid),
                   study_csv_text("penrose_grid", rows, content_address(params)))
        print(f"grid dumped to {args.dump_grid} ({len(rows)} rows)")
    return 0


def _cmd_norms(args) -> int:
    dist, t = ps.load_snapshot(args.snapshot)
    print(f"t={t!r}")
    for spec_txt in (args.f_orders.split(";") if args.f_orders else []):
        if not spec_txt.strip():
            continue
        k_txt, _, w_txt = spec_txt.partition(",")
        k, w = int(k_txt), float(w_txt)
        val = ps.weighted_sobolev_norm(dist, k, w)
        print(f"Hk_r{k},{w!r} = {val!r}")
    rho = ps.density(dist)
    for m_txt in (args.rho_orders.split(",") if args.rho_orders else []):
        if not m_txt.strip():
            continue
        m = float(m_txt)
        val = ps.x_sobolev_norm(rho, m, dist.geometry.d)
        print(f"rho_Hm{m!r} = {val!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vriesz",
        description="Deterministic spectral/semi-Lagrangian lab for singular "
                    "Vlasov systems on the torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one configured run")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None, help="output directory (default: config output_dir)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("study-eps", help="screening-limit convergence study")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_study_eps)

    p = sub.add_parser("study-bootstrap", help="uniform bound monitor across screenings")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--ceiling", type=float, default=None,
                   help="flag members whose tracked N exceeds this value")
    p.set_defaults(func=_cmd_study_bootstrap)

    p = sub.add_parser("kg-sweep", help="averaging-operator scaling sweep")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--Ts", required=True, help="comma-separated horizons")
    p.add_argument("--trials", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--s1", type=float, default=2.0)
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_kg_sweep)

    p = sub.add_parser("penrose", help="stability-function infimum search")
    p.add_argument("--profile", choices=["maxwellian", "zero", "two_bump"],
                   default="maxwellian")
    p.add_argument("--thermal-v", dest="thermal_v", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=2.0)
    p.add_argument("--Nv", type=int, default=256)
    p.add_argument("--v-max", dest="v_max", type=float, default=8.0)
    p.add_argument("--gamma-range", dest="gamma_range", default="0.01,1")
    p.add_argument("--tau-range", dest="tau_range", default="-3,3")
    p.add_argument("--eta-range", dest="eta_range", default="-4,4")
    p.add_argument("--n-coarse", dest="n_coarse", type=int, default=9)
    p.add_argument("--n-refine", dest="n_refine", type=int, default=7)
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--dump-grid", dest="dump_grid", default=None,
                   help="write |P| over the coarse grid to this CSV path")
    p.set_defaults(func=_cmd_penrose)

    p = sub.add_parser("norms", help="weighted norms of a stored snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--f-orders", dest="f_orders", default="",
                   help="semicolon-separated k,w pairs, e.g. '4,6;2,2'")
    p.add_argument("--rho-orders", dest="rho_orders", default="",
                   help="comma-separated density norm orders, e.g. '5,3'")
    p.set_defaults(func=_cmd_norms)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except StudyAborted as exc:
        print(str(exc), file=sys.stderr)
        print(f"terminated t={exc.result.termination_time}")
        return 3
    except (ValueError, NotImplementedError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
