"""Command dispatch: the laboratory's user surface.

Exit codes: 0 success, 1 guard or configuration failure, 2 numerical
invariant failure (energy-ledger closure breach).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .blocks import ResolutionError, mixnorm_slope, run_inviscid_cascade, verify_block_estimates
from .config import ConfigError, ExperimentConfig, parse_config
from .experiments import (
    SWEEP_COLUMNS,
    BracketError,
    CalibrationError,
    find_viscosity_for_dissipation,
    run_forward_scenario,
    run_longtime_scenario,
    run_reversed_scenario,
    sweep,
)
from .fields import block_initial_density, set_fft_workers
from .glue import GlueSchedule
from .io import Manifest, write_csv_rows, write_snapshot
from .solver import LedgerClosureError, run

COMMANDS = ("block-verify", "run", "pair", "sweep", "find-nu",
            "thm1", "thm2", "longtime", "report")
_ALIASES = {"forward": "thm1", "reversed": "thm2"}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="anomalylab",
                                 description="mixing-cascade dissipation laboratory")
    ap.add_argument("command", choices=COMMANDS + tuple(_ALIASES))
    ap.add_argument("--config", type=Path, default=None, help="key-value config file")
    ap.add_argument("--out", type=Path, default=None, help="output directory")
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args(argv)

    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("ANOMALYLAB_THREADS", cfg.threads))
    cfg.threads = max(1, threads)
    set_fft_workers(cfg.threads)
    out_dir = Path(args.out) if args.out else Path(cfg.out_dir)
    command = _ALIASES.get(args.command, args.command)
    try:
        return dispatch(command, cfg, out_dir, quiet=args.quiet)
    except (ResolutionError, BracketError, CalibrationError, ConfigError, ValueError) as exc:
        print(f"guard failure: {exc}", file=sys.stderr)
        return 1
    except LedgerClosureError as exc:
        print(f"numerical invariant failure: {exc}", file=sys.stderr)
        return 2


def dispatch(command: str, cfg: ExperimentConfig, out_dir: Path, quiet: bool = False) -> int:
    if command != "report":
        out_dir.mkdir(parents=True, exist_ok=True)
    say = (lambda *a: None) if quiet else print
    manifest = Manifest(command, cfg.to_dict(), out_dir)

    if command == "block-verify":
        reports = []
        for n in range(cfg.m + 1):
            rep = verify_block_estimates(n, cfg.block_params(), cfg.grid_n)
            path = out_dir / f"block_{n:02d}.json"
            path.write_text(rep.to_json() + "\n")
            manifest.add_output(path)
            reports.append(rep)
            say(f"block {n}: L2 drift {rep.l2_drift:.2e}  pass={rep.passed}")
        _, mixnorms = run_inviscid_cascade(cfg.m, cfg.block_params(), cfg.grid_n)
        slope = mixnorm_slope(mixnorms, cfg.b)
        manifest.diagnostics = {
            "mixnorms": mixnorms,
            "mixnorm_slope": slope,
            "all_pass": all(r.passed for r in reports),
        }
        manifest.write()
        say(f"cascade mix-norm slope: {slope:+.4f}")
        return 0

    if command == "run":
        sched = GlueSchedule(cfg.m, cfg.block_params(), cfg.continuation,
                             tau=cfg.tau if cfg.continuation == "periodized" else None,
                             grid_n=cfg.grid_n)
        nu = cfg.schedule_nu()
        t_end = 2.0 if cfg.continuation != "periodized" else 1.0 + cfg.tau / 2.0
        result = run(sched, block_initial_density(cfg.grid_n), cfg.solver_config(nu), t_end=t_end)
        path = out_dir / "ledger.csv"
        result.ledger.write_csv(path)
        manifest.add_output(path)
        for t, snap in sorted(result.snapshots.items()):
            sp = out_dir / f"snapshot_t{t:.6f}.bin"
            write_snapshot(sp, snap, t)
            manifest.add_output(sp)
        manifest.diagnostics = {
            "nu": nu,
            "closure_max": result.ledger.closure_max(),
            "E_final": result.ledger.E[-1],
            "D_final": result.ledger.D[-1],
        }
        if cfg.record_shells:
            from .diagnostics import fit_localization

            manifest.diagnostics["localization"] = [
                fit_localization(s).to_dict(t)
                for t, s in zip(result.ledger.t, result.ledger.shells)
            ]
        manifest.write()
        say(f"run: E_final={result.ledger.E[-1]:.6f} D_final={result.ledger.D[-1]:.6f}")
        return 0

    if command == "pair":
        from .solver import run_pair

        sched = GlueSchedule(cfg.m, cfg.block_params(), cfg.continuation, grid_n=cfg.grid_n)
        nu = cfg.schedule_nu()
        pr = run_pair(sched, block_initial_density(cfg.grid_n), nu, cfg.solver_config(nu))
        pv, pi = out_dir / "viscous.csv", out_dir / "inviscid.csv"
        pr.viscous.write_csv(pv)
        pr.inviscid.write_csv(pi)
        manifest.add_output(pv)
        manifest.add_output(pi)
        manifest.diagnostics = {
            "nu": nu,
            "sup_diff2": pr.sup_diff2,
            "min_margin": pr.min_margin,
            "bound_ok": bool(pr.min_margin >= -1e-10),
        }
        manifest.write()
        say(f"pair: sup||theta-rho||^2 = {pr.sup_diff2:.3e}, min margin = {pr.min_margin:.3e}")
        return 0

    if command == "sweep":
        cells = [(m, kind) for m in cfg.sweep_m for kind in cfg.sweep_kinds]
        rows = sweep(cells, grid_n=None, params=cfg.block_params(),
                     continuation=cfg.continuation, delta=cfg.delta, threads=cfg.threads)
        path = out_dir / "sweep.csv"
        write_csv_rows(path, SWEEP_COLUMNS, rows)
        manifest.add_output(path)
        manifest.diagnostics = {"cells": len(rows)}
        manifest.write()
        say(f"sweep: {len(rows)} cells -> {path}")
        return 0

    if command == "find-nu":
        results = []
        for e in cfg.findnu_targets:
            res = find_viscosity_for_dissipation(
                cfg.m, e, t_star=cfg.findnu_t_star, tol=cfg.findnu_tol,
                grid_n=cfg.grid_n, params=cfg.block_params(),
            )
            results.append({"target": e, **{k: res[k] for k in
                                            ("nu", "achieved", "iterations", "warnings")}})
            say(f"target D({cfg.findnu_t_star}) = {e}: nu = {res['nu']:.6e} "
                f"achieved {res['achieved']:.4f} in {res['iterations']} iterations")
        path = out_dir / "findnu.json"
        path.write_text(json.dumps(results, indent=2, default=float) + "\n")
        manifest.add_output(path)
        manifest.diagnostics = {"targets": list(cfg.findnu_targets)}
        manifest.write()
        return 0

    if command == "thm1":
        nu = cfg.schedule_nu()
        res = run_forward_scenario(cfg.m, nu, cfg.grid_n, cfg.block_params(),
                                   delta=cfg.delta, kind=cfg.kind,
                                   want_shells=cfg.record_shells)
        path = out_dir / "thm1_ledger.csv"
        res.ledger.write_csv(path)
        manifest.add_output(path)
        manifest.diagnostics = {k: v for k, v in res.row().items()} | {
            "low_mode_norm": res.low_mode_norm,
            "high_mode_norm": res.high_mode_norm,
            "lambda_cut": res.lambda_cut,
            "pass_flags": res.pass_flags,
        }
        manifest.write()
        say(f"thm1 m={cfg.m} nu={nu:.4e}: D(1)={res.D_at_1:.4f} "
            f"D(1+{cfg.delta})={res.D_at_1pdelta:.4f} D(2)={res.D_at_2:.4f}")
        return 0

    if command == "thm2":
        nu = cfg.schedule_nu()
        res = run_reversed_scenario(cfg.m, nu, cfg.grid_n, cfg.block_params(),
                                    delta=cfg.delta, kind=cfg.kind)
        path = out_dir / "thm2_ledger.csv"
        res.ledger.write_csv(path)
        manifest.add_output(path)
        manifest.diagnostics = {k: v for k, v in res.row().items()} | {
            "branch": res.branch,
            "e_min_after_blowup": res.e_min_after_blowup,
            "alpha_window": res.alpha_window,
            "alpha_window_ok": res.alpha_window_ok,
        }
        manifest.write()
        say(f"thm2 m={cfg.m} nu={nu:.4e}: recovery E(2)={res.recovery:.4f} branch={res.branch}")
        return 0

    if command == "longtime":
        report = run_longtime_scenario(
            cfg.m, tau=cfg.tau, u_target=cfg.u_target, c_target=cfg.c_target,
            periods=cfg.periods, grid_n=cfg.grid_n, params=cfg.block_params(),
        )
        path = out_dir / "drag_report.json"
        path.write_text(json.dumps(report.to_dict(), indent=2, default=float) + "\n")
        manifest.add_output(path)
        ppath = out_dir / "period_ledger.csv"
        write_csv_rows(ppath, ["period", "E_drift", "E_theta", "D", "W"], report.period_table)
        manifest.add_output(ppath)
        manifest.diagnostics = report.to_dict()
        manifest.write()
        say(f"longtime m={cfg.m}: drag={report.drag:.4f} (target {cfg.c_target}), "
            f"U={report.U:.4f}, Re={report.Re:.1f}")
        return 0

    if command == "report":
        manifests = sorted(out_dir.glob("*_manifest.json")) if out_dir.exists() else []
        if not manifests:
            print(f"no manifests found in {out_dir}", file=sys.stderr)
            return 1
        for mp in manifests:
            doc = json.loads(mp.read_text())
            say(f"{doc['command']}: outputs={doc['outputs']} "
                f"wall={doc['wall_time_s']:.2f}s")
            for k, v in sorted(doc.get("diagnostics", {}).items()):
                say(f"    {k} = {v}")
        return 0

    raise ValueError(f"unknown command {command!r}")


if __name__ == "__main__":
    sys.exit(main())
