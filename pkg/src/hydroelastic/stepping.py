"""Time integration of (theta, gamma, L) with per-step hygiene.

Two schemes: classical RK4 (reference; step size limited by the dispersive
stiffness dt <= cfl / max_k omega(k)) and a first-order IMEX step that treats
the constant-coefficient leading terms of the linearized system implicitly
per Fourier mode (2x2 solve, frozen L within the step) so bending-dominated
runs are not throttled by the k^(5/2) frequency growth.

Krasny filtering is applied to theta and gamma after each full step, never
inside stages.  Monitors (chord-arc scan, length consistency, closure drift)
run at a configurable cadence; failures terminate the run with the partial
trajectory and a machine-readable failure record.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics, evolution, geometry, spectral
from .errors import (ClosureViolated, DegenerateCurve, FixedPointDiverged,
                     StabilityViolated)
from .operators import CurveOps, probe_t_norm

log = logging.getLogger("hydroelastic")

_TWO_PI = 2.0 * np.pi

#: chord-arc monitor floor (admissible-set constant; configuration, not derived)
CHORD_ARC_FLOOR = 0.1

#: post-step norm growth beyond this factor aborts the step
STABILITY_GROWTH_FACTOR = 10.0

CLOSURE_WARN_TOL = 1e-10
LENGTH_DRIFT_WARN_TOL = 1e-8


@dataclass(frozen=True)
class StepPolicy:
    scheme: str = "rk4"
    dt: float | None = None          # None = auto from the stability bound
    cfl_constant: float = 0.5
    filter_floor: float = 1e-13
    monitor_cadence: int = 10
    probe_cadence: int | None = None  # None = monitor cadence; 0 disables

    def __post_init__(self):
        if self.scheme not in ("rk4", "imex"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("fixed dt must be positive")
        if not 0.0 < self.cfl_constant <= 1.0:
            raise ValueError("cfl_constant must lie in (0, 1]")
        if self.filter_floor < 0:
            raise ValueError("filter_floor must be nonnegative")
        if self.monitor_cadence < 1:
            raise ValueError("monitor_cadence must be a positive integer")


@dataclass
class StepInfo:
    solver_iterations: int = 0
    solver_residual: float = 0.0


@dataclass
class Trajectory:
    snapshots: list
    diagnostics: list
    params: geometry.PhysParams
    policy: StepPolicy | None = None
    step_records: list = field(default_factory=list)
    failure: dict | None = None

    @property
    def ok(self):
        return self.failure is None

    def state_at(self, time, tol=1e-9):
        for s in self.snapshots:
            if abs(s.time - time) <= tol:
                return s
        raise KeyError(f"no snapshot at t = {time}")


def auto_dt(state, params, policy):
    """cfl / max_k omega(k), recomputed from the current L."""
    omega_max = evolution.stability_frequency_bound(state.n, state.L, params)
    if omega_max == 0.0:
        return 1.0
    return policy.cfl_constant / omega_max


def _filter_state(state, floor):
    if floor == 0.0:
        return state
    return geometry.InterfaceState(
        theta=spectral.krasny_filter(state.theta, floor),
        gamma=spectral.krasny_filter(state.gamma, floor),
        L=state.L,
        time=state.time,
    )


def _stability_norm(state):
    return spectral.sobolev_norm(state.theta, 2) + spectral.sobolev_norm(state.gamma, 2)


def _check_stability(before, after, dt):
    pre = _stability_norm(before)
    post = _stability_norm(after)
    if post > STABILITY_GROWTH_FACTOR * (pre + 1e-14):
        raise StabilityViolated(
            f"norm grew {pre:.3e} -> {post:.3e} in one step (dt = {dt:.3e})"
        )


def step_rk4(state, params, dt, policy=StepPolicy(), damped=False, ops0=None):
    """Classical four-stage step; filtering afterwards, monitors by caller."""

    def shifted(s, dth, dga, dl, dtime):
        return geometry.InterfaceState(
            theta=s.theta + dth, gamma=s.gamma + dga, L=s.L + dl, time=s.time + dtime
        )

    k1 = evolution.rhs(state, params, damped=damped, ops=ops0)
    k2 = evolution.rhs(
        shifted(state, 0.5 * dt * k1.theta_t, 0.5 * dt * k1.gamma_t, 0.5 * dt * k1.L_t, 0.5 * dt),
        params, damped=damped)
    k3 = evolution.rhs(
        shifted(state, 0.5 * dt * k2.theta_t, 0.5 * dt * k2.gamma_t, 0.5 * dt * k2.L_t, 0.5 * dt),
        params, damped=damped)
    k4 = evolution.rhs(
        shifted(state, dt * k3.theta_t, dt * k3.gamma_t, dt * k3.L_t, dt),
        params, damped=damped)

    theta = state.theta + (dt / 6.0) * (k1.theta_t + 2 * k2.theta_t + 2 * k3.theta_t + k4.theta_t)
    gamma = state.gamma + (dt / 6.0) * (k1.gamma_t + 2 * k2.gamma_t + 2 * k3.gamma_t + k4.gamma_t)
    L = state.L + (dt / 6.0) * (k1.L_t + 2 * k2.L_t + 2 * k3.L_t + k4.L_t)
    new = geometry.InterfaceState(theta=theta, gamma=gamma, L=L, time=state.time + dt)
    new = _filter_state(new, policy.filter_floor)
    _check_stability(state, new, dt)
    stages = (k1, k2, k3, k4)
    info = StepInfo(
        solver_iterations=max(k.solver_iterations for k in stages),
        solver_residual=max(k.solver_residual for k in stages),
    )
    return new, info


def _imex_symbols(n, L, params):
    k = np.abs(spectral.wavenumbers(n)).astype(float)
    k[n // 2] = 0.0
    c = (2.0 * np.pi**2 / L**2) * k
    d = (params.lam(L) * k**2 + params.sigma * params.abar(L) * k**4)
    d2 = 1.0 + (_TWO_PI * params.rho(L) * params.atilde / L) * k
    return c, d / d2


def step_imex(state, params, dt, policy=StepPolicy(), damped=False, ops0=None):
    """First-order semi-implicit step: the linear pair
    theta_t ~ c_k gamma, gamma_t ~ -(d_k/d2_k) theta is advanced by a per-mode
    backward-Euler 2x2 solve; every other term goes in explicitly.
    Unconditionally stable for the linear part.
    """
    deriv = evolution.rhs(state, params, damped=damped, ops=ops0)
    c, d = _imex_symbols(state.n, state.L, params)
    th_hat = np.fft.fft(state.theta)
    ga_hat = np.fft.fft(state.gamma)
    tht_hat = np.fft.fft(deriv.theta_t)
    gat_hat = np.fft.fft(deriv.gamma_t)

    n_th = tht_hat - c * ga_hat
    n_ga = gat_hat + d * th_hat

    det = 1.0 + dt * dt * c * d
    rhs_th = th_hat + dt * n_th
    rhs_ga = ga_hat + dt * n_ga
    th_new = (rhs_th + dt * c * rhs_ga) / det
    ga_new = (rhs_ga - dt * d * rhs_th) / det

    new = geometry.InterfaceState(
        theta=np.fft.ifft(th_new).real,
        gamma=np.fft.ifft(ga_new).real,
        L=state.L + dt * deriv.L_t,
        time=state.time + dt,
    )
    new = _filter_state(new, policy.filter_floor)
    _check_stability(state, new, dt)
    return new, StepInfo(deriv.solver_iterations, deriv.solver_residual)


_STEPPERS = {"rk4": step_rk4, "imex": step_imex}


def run(initial, params, policy, t_end, snapshot_steps=(), energy_s=4, probe_seed=0):
    """Integrate to t_end (or the first monitor failure).

    Snapshots and energy diagnostics are recorded at the monitor cadence, at
    every step index in ``snapshot_steps``, and at both endpoints.  Returns a
    Trajectory; monitor failures are recorded, not raised.
    """
    if initial.n < 16:
        raise ValueError("solver runs need N >= 16")
    drift = abs(initial.L - geometry.length_of(initial.theta)) / initial.L
    if drift > 1e-6:
        raise ValueError(f"initial L inconsistent with length functional (drift {drift:.3e})")

    stepper = _STEPPERS[policy.scheme]
    probe_cadence = policy.monitor_cadence if policy.probe_cadence is None else policy.probe_cadence
    state = initial
    traj = Trajectory(snapshots=[initial], diagnostics=[], params=params, policy=policy)
    traj.diagnostics.append(diagnostics.energy_report(initial, params, s=energy_s))

    damped = False
    if probe_cadence:
        report = probe_t_norm(initial, params, seed=probe_seed)
        damped = report.estimated_norm >= evolution.DAMPING_THRESHOLD
        if damped:
            log.warning("operator-norm probe %.3f >= %.2f: damped iteration engaged",
                        report.estimated_norm, evolution.DAMPING_THRESHOLD)

    snapshot_steps = set(snapshot_steps)
    step_index = 0
    eps = 1e-12 * max(1.0, abs(t_end))
    while state.time < t_end - eps:
        dt = policy.dt if policy.dt is not None else auto_dt(state, params, policy)
        dt = min(dt, t_end - state.time)
        record = {"step": step_index + 1, "time": state.time + dt, "dt": dt}
        try:
            ops0 = None
            if probe_cadence and step_index % probe_cadence == 0:
                ops0 = CurveOps(state)
                report = probe_t_norm(state, params, seed=probe_seed + step_index, ops=ops0)
                record["probe_norm"] = report.estimated_norm
                record["probe_converged"] = report.converged
                if report.estimated_norm >= evolution.DAMPING_THRESHOLD and not damped:
                    damped = True
                    log.warning("probe %.3f at t=%.4f: damping engaged",
                                report.estimated_norm, state.time)
            state, info = stepper(state, params, dt, policy, damped=damped, ops0=ops0)
        except (StabilityViolated, FixedPointDiverged, DegenerateCurve, ClosureViolated) as exc:
            traj.failure = {"error": type(exc).__name__, "message": str(exc),
                            "time": state.time, "step": step_index + 1}
            log.error("run aborted at t=%.6f: %s", state.time, exc)
            break
        step_index += 1
        record["solver_iterations"] = info.solver_iterations
        record["solver_residual"] = info.solver_residual

        at_cadence = step_index % policy.monitor_cadence == 0
        final = state.time >= t_end - eps
        if at_cadence or final or step_index in snapshot_steps:
            rep = diagnostics.energy_report(state, params, s=energy_s)
            record["chord_arc_min"] = rep.chord_arc_min
            record["closure_defect"] = rep.closure_defect
            drift = abs(state.L - geometry.length_of(state.theta)) / state.L
            record["length_drift"] = drift
            if drift > LENGTH_DRIFT_WARN_TOL:
                log.warning("length drift %.3e at t=%.4f", drift, state.time)
            if abs(rep.closure_defect) > CLOSURE_WARN_TOL:
                log.warning("closure defect %.3e at t=%.4f", rep.closure_defect, state.time)
            traj.snapshots.append(state)
            traj.diagnostics.append(rep)
            traj.step_records.append(record)
            if rep.chord_arc_min < CHORD_ARC_FLOOR:
                traj.failure = {"error": "ChordArcFailed",
                                "message": f"chord-arc minimum {rep.chord_arc_min:.3e} < {CHORD_ARC_FLOOR}",
                                "time": state.time, "step": step_index}
                log.error("chord-arc monitor failed at t=%.6f", state.time)
                break
        else:
            traj.step_records.append(record)
    return traj


# ---------------------------------------------------------------------------
# Trajectory persistence: JSONL snapshot stream plus a sidecar metadata record.
# ---------------------------------------------------------------------------

FORMAT_VERSION = 1


def _policy_to_record(policy):
    return {
        "scheme": policy.scheme,
        "dt": None if policy.dt is None else float.hex(policy.dt),
        "cfl_constant": float.hex(policy.cfl_constant),
        "filter_floor": float.hex(policy.filter_floor),
        "monitor_cadence": policy.monitor_cadence,
        "probe_cadence": policy.probe_cadence,
    }


def _policy_from_record(rec):
    return StepPolicy(
        scheme=rec["scheme"],
        dt=None if rec["dt"] is None else float.fromhex(rec["dt"]),
        cfl_constant=float.fromhex(rec["cfl_constant"]),
        filter_floor=float.fromhex(rec["filter_floor"]),
        monitor_cadence=rec["monitor_cadence"],
        probe_cadence=rec["probe_cadence"],
    )


def _params_to_record(params):
    return {k: float.hex(getattr(params, k)) for k in ("rho0", "sigma", "tau", "rho1", "rho2", "g")}


def _params_from_record(rec):
    return geometry.PhysParams(**{k: float.fromhex(v) for k, v in rec.items()})


def save_trajectory(traj, path, config_hash=None):
    with open(path, "w") as fh:
        meta = {
            "kind": "meta",
            "version": FORMAT_VERSION,
            "n": traj.snapshots[0].n,
            "params": _params_to_record(traj.params),
            "policy": None if traj.policy is None else _policy_to_record(traj.policy),
            "config_hash": config_hash,
        }
        fh.write(json.dumps(meta, separators=(",", ":")) + "\n")
        for snap in traj.snapshots:
            rec = geometry.state_to_record(snap)
            rec["kind"] = "snapshot"
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        if traj.failure is not None:
            fh.write(json.dumps({"kind": "failure", **traj.failure}) + "\n")


def load_trajectory(path):
    snapshots, params, policy, failure = [], None, None, None
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            kind = rec.get("kind")
            if kind == "meta":
                params = _params_from_record(rec["params"])
                policy = None if rec["policy"] is None else _policy_from_record(rec["policy"])
            elif kind == "snapshot":
                snapshots.append(geometry.state_from_record(rec))
            elif kind == "failure":
                failure = {k: v for k, v in rec.items() if k != "kind"}
    return Trajectory(snapshots=snapshots, diagnostics=[], params=params,
                      policy=policy, failure=failure)


def config_content_hash(text):
    return hashlib.sha256(text.encode()).hexdigest()
