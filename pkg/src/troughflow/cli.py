"""Command-line entry point: ``troughflow {simulate,stationary,verify,check-assumptions}``.

Exit status: 0 success, 1 solver failure, 2 configuration error, 3 failed
assumption check.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from troughflow import kernels
from troughflow.config import (
    PRESETS, PlantDataCheck, ConfigError, RunConfig, load_config, preset_noor_like,
)
from troughflow.diagnostics import distance_to_stationary
from troughflow.io import write_distances, write_outputs
from troughflow.model import Grid, ModelError, validate_admissibility
from troughflow.roots import RootFindingError
from troughflow.stationary import StationaryError, StationaryProblem, solve_stationary
from troughflow.transient import InadmissibleScenario, SolverError, run_transient

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append", metavar="PATH",
                        help="configuration file; repeat to run several")
    common.add_argument("--preset", choices=PRESETS,
                        help="built-in configuration (used when no --config is given)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--cells", type=int, metavar="N", help="number of grid cells")
    common.add_argument("--epsilon", type=float, metavar="X", help="artificial viscosity")
    common.add_argument("--t-end", type=float, metavar="T", help="final time")
    common.add_argument("--sweep", action="store_true",
                        help="run several --config files concurrently")
    common.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker processes for --sweep (default: CPU count)")

    parser = argparse.ArgumentParser(
        prog="troughflow",
        description="Transient and stationary solver for a collector-pipe flow model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run the transient solver")
    sub.add_parser("stationary", parents=[common], help="solve for the stationary profile")
    sub.add_parser("verify", parents=[common],
                   help="transient run, stationary solve and distance curves")
    sub.add_parser("check-assumptions", parents=[common],
                   help="check the source/density bounds and the plant-data inequality")
    return parser


def apply_overrides(cfg: RunConfig, cells=None, epsilon=None, t_end=None, out=None) -> RunConfig:
    """Copy of ``cfg`` with command-line values replacing configured ones."""
    scenario, solver = cfg.scenario, cfg.solver
    try:
        if cells is not None:
            scenario = replace(scenario, grid=Grid(cells))
        if epsilon is not None or t_end is not None:
            solver = replace(
                solver,
                epsilon=solver.epsilon if epsilon is None else epsilon,
                t_end=solver.t_end if t_end is None else t_end,
            )
        return replace(cfg, scenario=scenario, solver=solver,
                       output_path=cfg.output_path if out is None else out)
    except ModelError as exc:
        raise ConfigError(f"invalid command-line override: {exc}") from None


def _load_runs(args) -> list[RunConfig]:
    if args.config:
        cfgs = [load_config(p) for p in args.config]
    else:
        cfgs = [preset_noor_like()[0]]
    runs = []
    for k, cfg in enumerate(cfgs):
        out = args.out
        if len(cfgs) > 1:
            base = Path(args.out or cfg.output_path)
            out = str(base / Path(args.config[k]).stem)
        runs.append(apply_overrides(cfg, args.cells, args.epsilon, args.t_end, out))
    return runs


def _stationary(cfg: RunConfig):
    problem = StationaryProblem.from_scenario(cfg.scenario, cfg.params)
    return solve_stationary(problem, cfg.scenario.grid, cfg.stationary_tol)


def _cmd_simulate(cfg: RunConfig, log):
    t0 = time.perf_counter()
    traj = run_transient(cfg.scenario, cfg.params, cfg.solver)
    files = write_outputs(traj, traj.diagnostics, cfg.output_path, params=cfg.params)
    fin = traj.final
    log(f"simulate: {len(traj.frames)} frames, {fin.step_count} steps to t={fin.t:g} "
        f"in {time.perf_counter() - t0:.2f} s (kernels: {kernels.BACKEND})")
    log(f"  rho range over frames: [{min(d.rho_min for d in traj.diagnostics):.12g}, "
        f"{max(d.rho_max for d in traj.diagnostics):.12g}]")
    for f in files:
        log(f"  wrote {f}")
    return EXIT_OK


def _cmd_stationary(cfg: RunConfig, log):
    prof = _stationary(cfg)
    files = write_outputs(prof, None, cfg.output_path)
    log(f"stationary: j={prof.j!r}, p_diff={prof.p_diff_achieved!r}, "
        f"ode_residual={prof.ode_residual:.3g}, compatible={prof.compatible}")
    for f in files:
        log(f"  wrote {f}")
    return EXIT_OK


def _cmd_verify(cfg: RunConfig, log):
    traj = run_transient(cfg.scenario, cfg.params, cfg.solver)
    prof = _stationary(cfg)
    dists = [distance_to_stationary(fr, prof) for fr in traj.frames]
    files = write_outputs(traj, traj.diagnostics, cfg.output_path, params=cfg.params)
    files += write_outputs(prof, None, cfg.output_path)
    files.append(write_distances(traj.times, dists, cfg.output_path))
    p = cfg.params
    lo = min(d.rho_min for d in traj.diagnostics)
    hi = max(d.rho_max for d in traj.diagnostics)
    bounds_ok = lo >= p.gamma_star - 1e-12 and hi <= p.gamma + 1e-12
    ent = [d.entropy_residual_max for d in traj.diagnostics[1:]]
    log(f"verify: stationary flux j={prof.j!r}")
    log(f"  maximum principle [{lo:.12g}, {hi:.12g}] within "
        f"[{p.gamma_star:g}, {p.gamma:g}]: {'pass' if bounds_ok else 'FAIL'}")
    if ent:
        log(f"  max entropy residual on stored steps: {max(ent):.3e}")
    for t, d in zip(traj.times, dists):
        log(f"  t={t:<10g} L1(rho)={d['rho'][0]:.6e}  L1(u)={d['u'][0]:.6e}  "
            f"L1(p)={d['p'][0]:.6e}")
    for f in files:
        log(f"  wrote {f}")
    return EXIT_OK


def _cmd_check(cfg: RunConfig, log):
    report = validate_admissibility(cfg.scenario, cfg.params)
    plant = PlantDataCheck()
    log("admissibility of the dimensionless scenario:")
    log(report.summary())
    log("plant data (W/m):")
    log(plant.summary())
    ok = report.passed and plant.passed
    log(f"check-assumptions: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_ASSUMPTION


_COMMANDS = {
    "simulate": _cmd_simulate,
    "stationary": _cmd_stationary,
    "verify": _cmd_verify,
    "check-assumptions": _cmd_check,
}


def _stderr(msg):
    print(msg, file=sys.stderr)


def execute(command: str, cfg: RunConfig, log=print, err=_stderr) -> int:
    """Run one command on one configuration and map failures to exit codes."""
    try:
        return _COMMANDS[command](cfg, log)
    except InadmissibleScenario as exc:
        err(f"assumption failure: {exc}")
        return EXIT_ASSUMPTION
    except (SolverError, StationaryError, RootFindingError) as exc:
        err(f"solver failure: {exc}")
        return EXIT_SOLVER
    except (ConfigError, ModelError) as exc:
        err(f"configuration error: {exc}")
        return EXIT_CONFIG


def _sweep_worker(job):
    command, cfg = job
    lines: list[str] = []
    code = execute(command, cfg, log=lines.append, err=lines.append)
    return code, lines


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        runs = _load_runs(args)
    except (ConfigError, ModelError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.sweep and len(runs) > 1:
        workers = args.jobs or min(len(runs), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, [(args.command, r) for r in runs]))
        for cfg, (code, lines) in zip(runs, results):
            print(f"== {cfg.output_path} (exit {code})")
            for line in lines:
                print(line)
        return max(code for code, _ in results)

    codes = []
    for cfg in runs:
        if len(runs) > 1:
            print(f"== {cfg.output_path}")
        codes.append(execute(args.command, cfg))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
