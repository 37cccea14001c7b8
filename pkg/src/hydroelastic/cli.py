"""Command-line entry point: simulate | sweep | probe | report.

Every command reads one INI config (plus repeatable --set overrides), writes
only into its --out directory, and echoes the effective configuration there
so the run is reproducible bit for bit.  Exit status: 0 success, 1 run
failure, 2 configuration problems.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import diagnostics, geometry, stepping, sweep as sweepmod
from .errors import ConfigError, HydroelasticError, InfeasibleFit
from .operators import probe_t_norm

log = logging.getLogger("hydroelastic")


def _build_parser():
    parser = argparse.ArgumentParser(prog="hydroelastic",
                                     description="hydroelastic interfacial-wave laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("simulate", "integrate one run and write trajectory + energy CSV"),
        ("sweep", "run the (sigma, rho0) ladder and write the pair table"),
        ("probe", "estimate the gamma_t operator norm over the parameter list"),
        ("report", "re-derive fits from persisted artifacts without re-running"),
    ):
        p = sub.add_parser(name, help=descr)
        p.add_argument("--config", required=True, help="path to the INI configuration")
        p.add_argument("--out", required=True, help="output directory (all writes go here)")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a configuration value (repeatable)")
        p.add_argument("--threads", type=int, default=1, help="concurrent runs for sweep")
        p.add_argument("--seed", type=int, default=0, help="seed for the probe's random starts")
    return parser


def _prepare(args):
    cfg = cfgmod.load_config(args.config)
    cfgmod.apply_overrides(cfg, args.set)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    echo = cfgmod.render_config(cfg)
    (out / "config.echo.cfg").write_text(echo)
    return cfg, out, stepping.config_content_hash(echo)


def _initial_state(cfg):
    n = cfgmod.grid_n(cfg)
    theta_modes, gamma_modes = cfgmod.build_initial_modes(cfg)
    theta = sweepmod.build_field(theta_modes, n)
    gamma = sweepmod.build_field(gamma_modes, n)
    return geometry.make_state(theta, gamma)


def _cmd_simulate(args):
    cfg, out, chash = _prepare(args)
    params = cfgmod.build_params(cfg)
    policy = cfgmod.build_policy(cfg)
    state = _initial_state(cfg)
    t_end = float(cfg["run"]["t_end"])
    traj = stepping.run(state, params, policy, t_end, probe_seed=args.seed)
    stepping.save_trajectory(traj, out / "trajectory.jsonl", config_hash=chash)
    diagnostics.write_energy_csv(traj.diagnostics, out / "energy.csv")
    summary = {"config_hash": chash, "steps": len(traj.step_records),
               "failure": traj.failure}
    series = [(r.time, r.E_total) for r in traj.diagnostics]
    try:
        c1, c2, c3, violation = diagnostics.fit_log_bound(series)
        summary["energy_fit"] = {"c1": c1, "c2": c2, "c3": c3, "max_violation": violation}
    except (InfeasibleFit, ValueError) as exc:
        summary["energy_fit"] = {"error": str(exc)}
    residuals = [r["solver_residual"] for r in traj.step_records]
    summary["max_solver_residual"] = max(residuals) if residuals else 0.0
    probes = [r["probe_norm"] for r in traj.step_records if "probe_norm" in r]
    summary["max_probe_norm"] = max(probes) if probes else None
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return 1 if traj.failure else 0


def _cmd_sweep(args):
    cfg, out, chash = _prepare(args)
    pairs = cfgmod.parse_pairs(cfg["sweep"]["pairs"])
    if not pairs:
        raise ConfigError("sweep requires a nonempty pair list", key="sweep.pairs")
    theta_modes, gamma_modes = cfgmod.build_initial_modes(cfg)
    sconf = sweepmod.SweepConfig(
        theta_modes=theta_modes,
        gamma_modes=gamma_modes,
        pairs=pairs,
        n=cfgmod.grid_n(cfg),
        t_end=float(cfg["run"]["t_end"]),
        base_params=cfgmod.build_params(cfg),
        policy=cfgmod.build_policy(cfg),
        out_dir=out,
    )
    result = sweepmod.sweep(sconf, threads=max(1, args.threads))
    summary = sweepmod.summary_dict(result)
    summary["config_hash"] = chash
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return 1 if result.failures else 0


def _cmd_probe(args):
    cfg, out, chash = _prepare(args)
    state = _initial_state(cfg)
    base = cfgmod.build_params(cfg)
    pairs = cfgmod.parse_pairs(cfg["sweep"]["pairs"]) or ((base.sigma, base.rho0),)
    trials = int(cfg["probe"]["trials"])
    max_iter = int(cfg["probe"]["max_iterations"])
    rows = []
    for sigma, rho0 in pairs:
        params = base.with_pair(sigma, rho0)
        rep = probe_t_norm(state, params, trials=trials, seed=args.seed,
                           max_iterations=max_iter)
        rows.append({"sigma": sigma, "rho0": rho0,
                     "estimated_norm": rep.estimated_norm,
                     "iterations": rep.iterations, "converged": rep.converged})
    with open(out / "probe.json", "w") as fh:
        json.dump({"config_hash": chash, "results": rows}, fh, indent=2)
    return 0


def _report_single(source, out):
    rows = diagnostics.read_energy_csv(source / "energy.csv")
    series = [(r["time"], r["E_total"]) for r in rows]
    summary = {"source": str(source)}
    try:
        c1, c2, c3, violation = diagnostics.fit_log_bound(series)
        summary["energy_fit"] = {"c1": c1, "c2": c2, "c3": c3, "max_violation": violation}
    except (InfeasibleFit, ValueError) as exc:
        summary["energy_fit"] = {"error": str(exc)}
    with open(out / "report_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return 0


def _report_sweep(source, out):
    """Recompute energies and difference tables from persisted trajectories."""
    run_dirs = sorted((source / "runs").iterdir())
    summary = {"source": str(source), "runs": {}}
    states = {}
    params_by_run = {}
    for run_dir in run_dirs:
        traj = stepping.load_trajectory(run_dir / "trajectory.jsonl")
        params_by_run[run_dir.name] = traj.params
        reports = [diagnostics.energy_report(s, traj.params) for s in traj.snapshots]
        diagnostics.write_energy_csv(reports, out / f"{run_dir.name}_energy_rederived.csv")
        series = [(r.time, r.E_total) for r in reports]
        entry = {}
        try:
            c1, c2, c3, violation = diagnostics.fit_log_bound(series)
            entry["energy_fit"] = {"c1": c1, "c2": c2, "c3": c3, "max_violation": violation}
        except (InfeasibleFit, ValueError) as exc:
            entry["energy_fit"] = {"error": str(exc)}
        summary["runs"][run_dir.name] = entry
        states[run_dir.name] = traj.snapshots
    rows = sweepmod.read_pair_table(source / "pair_table.csv")
    finals = [r for r in rows if r["checkpoint_time"] == max(x["checkpoint_time"] for x in rows)]
    xs, ys = [], []
    for r in finals:
        gap = abs(r["sigma_i"] - r["sigma_j"]) + abs(r["rho0_i"] - r["rho0_j"])
        if np.isfinite(r["difference_norm"]) and r["difference_norm"] > 0 and gap > 0:
            xs.append(np.log(gap))
            ys.append(np.log(r["difference_norm"]))
    if len(xs) >= 3:
        slope, intercept = np.polyfit(xs, ys, 1)
        fitted = slope * np.array(xs) + intercept
        ss_res = float(np.sum((np.array(ys) - fitted) ** 2))
        ss_tot = float(np.sum((np.array(ys) - np.mean(ys)) ** 2))
        summary["cauchy"] = {"slope": float(slope), "intercept": float(intercept),
                             "r_squared": 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot}
    with open(out / "report_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return 0


def _cmd_report(args):
    cfg, out, _ = _prepare(args)
    source = cfg["report"]["source"].strip()
    if not source:
        raise ConfigError("report requires report.source", key="report.source")
    source = Path(source)
    if (source / "pair_table.csv").is_file():
        return _report_sweep(source, out)
    if (source / "energy.csv").is_file():
        return _report_single(source, out)
    raise ConfigError("report source holds neither pair_table.csv nor energy.csv",
                      path=str(source), key="report.source")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "probe": _cmd_probe,
    "report": _cmd_report,
}


def parse_and_dispatch(argv):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (HydroelasticError, OSError) as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))
