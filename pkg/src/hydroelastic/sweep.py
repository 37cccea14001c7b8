"""Parameter-sweep harness for the vanishing-bending, vanishing-mass limit.

One initial condition is integrated for every (sigma_k, rho0_k) pair of a
ladder that includes (0, 0) exactly once, all runs sharing one grid and one
fixed dt (chosen from the stiffest pair and rounded so the checkpoint times
t_end * {1/4, 1/2, 3/4, 1} land on step boundaries).  Outputs: the pairwise
difference table D(j, k) at each checkpoint, the distances d_k to the (0, 0)
run, and a log-log regression of D against |d sigma| + |d rho0| whose slope
realizes the claimed linear Cauchy rate.

The (0, 0) run goes through the identical code path with the mass- and
bending-proportional terms exactly zero; there is no separate implementation
of the limit system.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics, geometry, stepping
from .errors import DuplicateZeroPair, InsufficientData

PAIR_CSV_FORMAT = "hydroelastic-pairs-v1"
PAIR_CSV_COLUMNS = ["checkpoint_time", "i", "j", "sigma_i", "rho0_i",
                    "sigma_j", "rho0_j", "difference_norm"]

CHECKPOINT_FRACTIONS = (0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SweepConfig:
    theta_modes: tuple          # ((kind, k, amplitude), ...) with kind in {sin, cos}
    gamma_modes: tuple
    pairs: tuple                # ((sigma, rho0), ...) containing (0, 0) exactly once
    n: int
    t_end: float
    base_params: geometry.PhysParams
    policy: stepping.StepPolicy
    out_dir: Path | None = None

    def __post_init__(self):
        zero_count = sum(1 for s, r in self.pairs if s == 0.0 and r == 0.0)
        if zero_count != 1:
            raise DuplicateZeroPair(
                f"parameter list must contain (0, 0) exactly once, found {zero_count}"
            )
        if any(s < 0 or r < 0 for s, r in self.pairs):
            raise ValueError("sigma and rho0 must be nonnegative")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")

    @property
    def zero_index(self):
        return next(i for i, (s, r) in enumerate(self.pairs) if s == 0.0 and r == 0.0)


@dataclass
class SweepResult:
    config: SweepConfig
    dt: float
    checkpoint_times: tuple
    tables: dict                 # checkpoint time -> (P, P) array with NaN for failures
    failures: dict               # pair index -> failure record
    run_dirs: dict = field(default_factory=dict)
    trajectories: dict = field(default_factory=dict)
    slope: float | None = None
    r_squared: float | None = None
    intercept: float | None = None

    def limit_distances(self, time=None):
        """d_k = D(k, zero_index) at one checkpoint (default: final time)."""
        time = self.checkpoint_times[-1] if time is None else time
        table = self.tables[time]
        z = self.config.zero_index
        return np.array([table[k, z] for k in range(len(self.config.pairs))])


def build_field(modes, n):
    alpha = 2.0 * np.pi * np.arange(n) / n
    out = np.zeros(n)
    for kind, k, amp in modes:
        if kind == "sin":
            out += amp * np.sin(k * alpha)
        elif kind == "cos":
            out += amp * np.cos(k * alpha)
        else:
            raise ValueError(f"unknown mode kind {kind!r}")
    return out


def initial_state(config):
    theta = build_field(config.theta_modes, config.n)
    gamma = build_field(config.gamma_modes, config.n)
    return geometry.make_state(theta, gamma)


def shared_dt(config, initial):
    """Fixed dt: the auto step of the stiffest pair, shrunk so each checkpoint
    leg is a whole number of steps."""
    dts = []
    for sigma, rho0 in config.pairs:
        p = config.base_params.with_pair(sigma, rho0)
        dts.append(stepping.auto_dt(initial, p, config.policy))
    dt_raw = min(dts) if config.policy.dt is None else config.policy.dt
    leg = config.t_end * CHECKPOINT_FRACTIONS[0]
    steps_per_leg = max(1, math.ceil(leg / dt_raw - 1e-12))
    return leg / steps_per_leg, steps_per_leg


def _run_pair(args):
    index, sigma, rho0, config, initial, dt, steps_per_leg = args
    params = config.base_params.with_pair(sigma, rho0)
    policy = stepping.StepPolicy(
        scheme=config.policy.scheme,
        dt=dt,
        cfl_constant=config.policy.cfl_constant,
        filter_floor=config.policy.filter_floor,
        monitor_cadence=config.policy.monitor_cadence,
        probe_cadence=config.policy.probe_cadence,
    )
    legs = len(CHECKPOINT_FRACTIONS)
    snapshot_steps = {steps_per_leg * (i + 1) for i in range(legs)}
    traj = stepping.run(initial, params, policy, config.t_end, snapshot_steps=snapshot_steps)
    return index, traj


def sweep(config, threads=1):
    """Run every pair, assemble difference tables, persist artifacts."""
    initial = initial_state(config)
    dt, steps_per_leg = shared_dt(config, initial)
    checkpoint_times = tuple(f * config.t_end for f in CHECKPOINT_FRACTIONS)

    jobs = [(i, s, r, config, initial, dt, steps_per_leg)
            for i, (s, r) in enumerate(config.pairs)]
    results = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for index, traj in pool.map(_run_pair, jobs):
                results[index] = traj
    else:
        for job in jobs:
            index, traj = _run_pair(job)
            results[index] = traj

    failures = {i: t.failure for i, t in results.items() if t.failure is not None}
    npairs = len(config.pairs)
    tables = {}
    for tc in checkpoint_times:
        table = np.full((npairs, npairs), np.nan)
        np.fill_diagonal(table, 0.0)
        for i in range(npairs):
            for j in range(i + 1, npairs):
                if i in failures or j in failures:
                    continue
                try:
                    si = results[i].state_at(tc)
                    sj = results[j].state_at(tc)
                except KeyError:
                    continue
                d = diagnostics.difference_norm(si, sj)
                table[i, j] = table[j, i] = d
        tables[tc] = table

    result = SweepResult(config=config, dt=dt, checkpoint_times=checkpoint_times,
                         tables=tables, failures=failures, trajectories=results)
    try:
        result.slope, result.r_squared, result.intercept = cauchy_rate(result)
    except InsufficientData:
        pass

    if config.out_dir is not None:
        persist_sweep(result, results, config.out_dir)
    return result


def cauchy_rate(result):
    """Log-log regression of D(j,k) at t_end against |dsigma| + |drho0|.

    Returns (slope, r_squared, intercept); raises InsufficientData with fewer
    than 3 usable pairs (zero or missing distances are unusable).
    """
    pairs = result.config.pairs
    table = result.tables[result.checkpoint_times[-1]]
    xs, ys = [], []
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            gap = abs(pairs[i][0] - pairs[j][0]) + abs(pairs[i][1] - pairs[j][1])
            d = table[i, j]
            if not np.isfinite(d) or d <= 0.0 or gap <= 0.0:
                continue
            xs.append(math.log(gap))
            ys.append(math.log(d))
    if len(xs) < 3:
        raise InsufficientData(f"only {len(xs)} usable pairs for the rate regression")
    x = np.array(xs)
    y = np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2), float(intercept)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def write_pair_table(result, path):
    with open(path, "w", newline="") as fh:
        fh.write(f"# format={PAIR_CSV_FORMAT}\n")
        writer = csv.writer(fh)
        writer.writerow(PAIR_CSV_COLUMNS)
        pairs = result.config.pairs
        for tc in result.checkpoint_times:
            table = result.tables[tc]
            for i in range(len(pairs)):
                for j in range(i + 1, len(pairs)):
                    d = table[i, j]
                    writer.writerow([repr(float(tc)), i, j,
                                     repr(float(pairs[i][0])), repr(float(pairs[i][1])),
                                     repr(float(pairs[j][0])), repr(float(pairs[j][1])),
                                     "" if not np.isfinite(d) else repr(float(d))])


def read_pair_table(path):
    with open(path) as fh:
        first = fh.readline().strip()
        if first != f"# format={PAIR_CSV_FORMAT}":
            raise ValueError(f"unrecognized pair table format line: {first!r}")
        rows = []
        for row in csv.DictReader(fh):
            rows.append({
                "checkpoint_time": float(row["checkpoint_time"]),
                "i": int(row["i"]), "j": int(row["j"]),
                "sigma_i": float(row["sigma_i"]), "rho0_i": float(row["rho0_i"]),
                "sigma_j": float(row["sigma_j"]), "rho0_j": float(row["rho0_j"]),
                "difference_norm": float(row["difference_norm"]) if row["difference_norm"] else float("nan"),
            })
        return rows


def summary_dict(result):
    z = result.config.zero_index
    d_by_checkpoint = {
        repr(float(tc)): [None if not np.isfinite(v) else float(v) for v in result.limit_distances(tc)]
        for tc in result.checkpoint_times
    }
    return {
        "slope": result.slope,
        "r_squared": result.r_squared,
        "intercept": result.intercept,
        "zero_index": z,
        "pairs": [list(p) for p in result.config.pairs],
        "dt": result.dt,
        "n": result.config.n,
        "t_end": result.config.t_end,
        "checkpoint_times": list(result.checkpoint_times),
        "limit_distances": d_by_checkpoint,
        "failures": {str(k): v for k, v in result.failures.items()},
    }


def persist_sweep(result, trajectories, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs_dir = out_dir / "runs"
    runs_dir.mkdir(exist_ok=True)
    for i, traj in trajectories.items():
        sigma, rho0 = result.config.pairs[i]
        run_dir = runs_dir / f"pair_{i:02d}_sigma_{sigma:g}_rho0_{rho0:g}"
        run_dir.mkdir(exist_ok=True)
        stepping.save_trajectory(traj, run_dir / "trajectory.jsonl")
        diagnostics.write_energy_csv(traj.diagnostics, run_dir / "energy.csv")
        result.run_dirs[i] = run_dir
    write_pair_table(result, out_dir / "pair_table.csv")
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary_dict(result), fh, indent=2)
