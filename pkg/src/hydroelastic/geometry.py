"""Curve geometry in the tangent-angle / arclength frame.

The interface is one horizontal period of a curve z(alpha) = x + i y with
x(alpha + 2*pi) = x(alpha) + 2*pi and y periodic.  The evolved unknowns are
the tangent angle theta(alpha), the sheet strength gamma(alpha) and the period
length L; the arclength element is uniform, s_alpha = L/(2*pi).  Everything
else (positions, frames, curvature, the two admissibility monitors) is
reconstructed here.
"""

import json
from dataclasses import dataclass, replace

import numpy as np

from . import spectral
from .errors import ClosureViolated, DegenerateCurve, GridMismatch

_TWO_PI = 2.0 * np.pi

#: mean(cos theta) below this is treated as a degenerate (non-graph-like) curve
DEGENERATE_COS_MEAN = 1e-8

#: |<sin theta>| above this makes the curve non-periodic in y
CLOSURE_TOL = 1e-8


@dataclass(frozen=True)
class PhysParams:
    """Physical constants: sheet mass density rho0, bending modulus sigma,
    surface tension tau, fluid densities rho1 (lower) and rho2 (upper),
    gravity g.  Derived combinations:

        A      = (rho1 - rho2) / (rho1 + rho2)        (Atwood number)
        atilde = 1 / (rho1 + rho2)
        rho(L) = rho0 * 2*pi / L                      (deformed sheet density)
        abar(L) = 8*pi^3 / (L^3 (rho1 + rho2))
        lam(L)  = 4*tau*pi / (L (rho1 + rho2))
    """

    rho0: float
    sigma: float
    tau: float
    rho1: float
    rho2: float
    g: float = 0.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("surface tension tau must be positive")
        if self.rho0 < 0 or self.sigma < 0:
            raise ValueError("rho0 and sigma must be nonnegative")
        if self.rho1 < 0 or self.rho2 < 0 or self.rho1 + self.rho2 <= 0:
            raise ValueError("fluid densities must be nonnegative with rho1 + rho2 > 0")

    @property
    def atwood(self):
        return (self.rho1 - self.rho2) / (self.rho1 + self.rho2)

    @property
    def atilde(self):
        return 1.0 / (self.rho1 + self.rho2)

    def rho(self, L):
        return self.rho0 * _TWO_PI / L

    def abar(self, L):
        return 8.0 * np.pi**3 / (L**3 * (self.rho1 + self.rho2))

    def lam(self, L):
        return 4.0 * self.tau * np.pi / (L * (self.rho1 + self.rho2))

    def with_pair(self, sigma, rho0):
        return replace(self, sigma=float(sigma), rho0=float(rho0))


@dataclass(frozen=True)
class InterfaceState:
    """The evolved unknowns (theta, gamma, L) at one time.

    Arrays are copied and frozen on construction; states are immutable values.
    """

    theta: np.ndarray
    gamma: np.ndarray
    L: float
    time: float = 0.0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        gamma = np.array(self.gamma, dtype=float)
        if theta.ndim != 1 or gamma.ndim != 1 or theta.shape != gamma.shape:
            raise GridMismatch("theta and gamma must be 1-D arrays on one grid")
        if theta.shape[0] % 2 != 0:
            raise ValueError("grid size must be even")
        if not self.L > 0:
            raise ValueError("L must be positive")
        theta.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self):
        return self.theta.shape[0]

    @property
    def s_alpha(self):
        return self.L / _TWO_PI


def make_state(theta, gamma, time=0.0):
    """Build a state with L taken from the length functional of theta."""
    return InterfaceState(theta=theta, gamma=gamma, L=length_of(np.asarray(theta, float)), time=time)


def length_of(theta):
    """Length of one period, L = 4*pi^2 / integral(cos theta) >= 2*pi."""
    c = float(np.mean(np.cos(theta)))
    if c <= DEGENERATE_COS_MEAN:
        raise DegenerateCurve(f"mean(cos theta) = {c:.3e} <= {DEGENERATE_COS_MEAN:.0e}")
    return _TWO_PI / c


def closure_defect(theta):
    """<sin theta>; zero for curves that are periodic in y."""
    return float(np.mean(np.sin(theta)))


def frame(theta):
    """Unit tangent (cos theta, sin theta) and normal (-sin theta, cos theta) as (N,2)."""
    t = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    n = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    return t, n


def curvature(state):
    """kappa = theta_alpha / s_alpha."""
    return spectral.derivative(state.theta, 1) * (_TWO_PI / state.L)


def reconstruct_zd(state, closure_tol=CLOSURE_TOL):
    """Positions z_d(alpha) with z_d(0) = 0, built from (theta, L).

    z_d is the mean-zero antiderivative of (L/2pi)(e^{i theta} - <e^{i theta}>)
    plus the linear part alpha * (L/2pi) <cos theta>, shifted so z_d(0) = 0.
    The imaginary drift <sin theta> must vanish (within closure_tol) or the
    curve is not periodic in y.
    """
    defect = closure_defect(state.theta)
    if abs(defect) > closure_tol:
        raise ClosureViolated(f"|<sin theta>| = {abs(defect):.3e} > {closure_tol:.1e}")
    s_alpha = state.s_alpha
    e = np.exp(1j * state.theta)
    fluct = s_alpha * (e - e.mean())
    periodic_part = spectral.antiderivative(fluct)
    alpha = spectral.nodes(state.n)
    zd = alpha * (s_alpha * float(np.mean(np.cos(state.theta)))) + periodic_part
    return zd - zd[0]


def chord_arc_min(zd):
    """Minimum over distinct node pairs of |z_d(a_j) - z_d(a_m)| / |a_j - a_m|,
    with the parameter distance wrapped to (-pi, pi] and the chord shifted by
    the +-2*pi horizontal period when the wrap crosses the seam.

    Returns 0 for discretely self-intersecting curves.  O(N^2).
    """
    zd = np.asarray(zd)
    n = zd.shape[0]
    alpha = spectral.nodes(n)
    da = alpha[:, None] - alpha[None, :]
    shift = np.round(da / _TWO_PI)
    delta = da - _TWO_PI * shift
    chord = np.abs(zd[:, None] - zd[None, :] - _TWO_PI * shift)
    denom = np.abs(delta)
    np.fill_diagonal(denom, 1.0)
    np.fill_diagonal(chord, np.inf)
    return float(np.min(chord / denom))


def resample_state(state, n_new):
    """Trig-interpolate a state onto another grid (L and time unchanged)."""
    return InterfaceState(
        theta=spectral.resample(state.theta, n_new),
        gamma=spectral.resample(state.gamma, n_new),
        L=state.L,
        time=state.time,
    )


# ---------------------------------------------------------------------------
# Serialization: one JSONL record per state, hex-float encoded for bit-exact
# round trips (restart tests rely on exactness).
# ---------------------------------------------------------------------------

def state_to_record(state):
    return {
        "time": float.hex(float(state.time)),
        "L": float.hex(float(state.L)),
        "theta": [float.hex(float(v)) for v in state.theta],
        "gamma": [float.hex(float(v)) for v in state.gamma],
    }


def state_from_record(rec):
    return InterfaceState(
        theta=np.array([float.fromhex(v) for v in rec["theta"]]),
        gamma=np.array([float.fromhex(v) for v in rec["gamma"]]),
        L=float.fromhex(rec["L"]),
        time=float.fromhex(rec["time"]),
    )


def dump_state(state):
    return json.dumps(state_to_record(state), separators=(",", ":"))


def load_state(line):
    return state_from_record(json.loads(line))
