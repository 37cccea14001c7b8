"""Right-hand-side assembly for the (theta, gamma, L) evolution.

The tangent angle moves by

    theta_t = (2 pi^2/L^2) H(gamma_a) + (2 pi/L) V_W theta_a + (2 pi/L) m.n,

the length by L_t = -int theta_a U da, and the sheet strength solves the
integral equation

    gamma_t = -(2 rho atilde pi / L) H(gamma_at) - T[theta](gamma_t) + F,

i.e. (D2 + T) gamma_t = F with D2 = I + (2 pi rho atilde / L) Lambda diagonal
in Fourier space.  F collects the bending/tension/advection terms plus the
lower-order collections (R1, R3, R5, Rtilde1, Rtilde2, R) assembled from K,
Hilbert commutators and the current-state velocity z_t = C(U n + V t); none
of them involve gamma_t.  The solve is a Picard iteration preconditioned by
D2^{-1}, valid while ||D2^{-1} T|| < 1 (monitored by the operator-norm probe;
a 0.5 damping factor engages when the probe reports >= 0.9).
"""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import FixedPointDiverged
from .operators import CurveOps, d2_solve

_TWO_PI = 2.0 * np.pi

#: probe estimate at or above this engages the damped Picard iteration
DAMPING_THRESHOLD = 0.9

MAX_FIXED_POINT_ITERATIONS = 200


@dataclass(frozen=True)
class RemainderBundle:
    """Lower-order collections entering F; all are independent of gamma_t."""

    m: np.ndarray
    R1: np.ndarray
    R3: np.ndarray
    R5: np.ndarray
    Rt1: np.ndarray
    Rt2: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class StateDerivative:
    theta_t: np.ndarray
    gamma_t: np.ndarray
    L_t: float
    solver_iterations: int = 0
    solver_residual: float = 0.0


class Assembly:
    """One-pass evaluation pipeline for a single state.

    Intermediate quantities are computed once and cached as attributes; the
    module-level operation wrappers below expose the individual pieces.
    """

    def __init__(self, state, params=None, ops=None):
        self.state = state
        self.params = params
        self.ops = CurveOps(state) if ops is None else ops
        ops = self.ops
        L = state.L
        self.L = L
        self.theta_a = ops.theta_a
        self.gamma_a = spectral.derivative(state.gamma, 1)

        # velocities
        self.w = ops.w()
        self.u = np.sum(self.w * ops.normal, axis=1)
        self.w_dot_t = np.sum(self.w * ops.tangent, axis=1)
        self.L_t = -spectral.integral(self.theta_a * self.u)
        self.v = spectral.antiderivative(
            spectral.project_zero_mean(self.theta_a * self.u)
        ) + float(np.mean(self.w_dot_t))

        # remainder building blocks
        self.m_conj = ops.m_conj()
        self.m = np.stack([self.m_conj.real, -self.m_conj.imag], axis=1)
        self.m_dot_n = np.sum(self.m * ops.normal, axis=1)
        self.m_dot_t = np.sum(self.m * ops.tangent, axis=1)
        self.h_gamma_theta_a = spectral.hilbert(state.gamma * self.theta_a)
        self.v_w = spectral.antiderivative(
            (np.pi / L) * self.h_gamma_theta_a - spectral.project_zero_mean(self.m_dot_t)
        )
        self.theta_t = (
            (2.0 * np.pi**2 / L**2) * spectral.hilbert(self.gamma_a)
            + (_TWO_PI / L) * self.v_w * self.theta_a
            + (_TWO_PI / L) * self.m_dot_n
        )
        self.z_t = (self.v + 1j * self.u) * np.exp(1j * state.theta)
        self.z_ta = spectral.derivative(self.z_t, 1)

    # -- gamma_t-side assembly (needs params) --------------------------------

    def remainders(self):
        p = self.params
        ops = self.ops
        st = self.state
        L, gamma = self.L, st.gamma
        zal = ops.zalpha
        g_over_z = gamma / zal
        r = spectral.derivative(g_over_z, 1)          # (gamma/z_alpha)_alpha
        comm = ops.commutator
        D = spectral.derivative

        zt, zta = self.z_t, self.z_ta
        R1 = (
            (zal * zt * ops.k(r)).real
            - (zal * ops.k(zt * r)).real
            - ((zal / 2j) * comm(zt, r / zal)).real
        )

        q = gamma * zta / zal**2
        rr = D(r / zal, 1)
        pref = 1j * zal**2 / ops.s_alpha
        pref2 = zal**2 / (2.0 * ops.s_alpha)
        R3 = (
            (pref * ops.k(D(-q, 1))).real
            + (pref2 * comm(1.0 / zal**2, zal * D(-q, 1))).real
            + (-pref2 * comm(1.0 / zal**2, r * zta) - pref * ops.k(r * zta / zal)).real
            + (pref * zt * ops.k(rr)).real
            - (pref * ops.k(zt * rr)).real
            - (pref2 * comm(zt, rr / zal)).real
        )

        phi5 = (_TWO_PI / L) * (self.v_w * self.theta_a + self.m_dot_n)
        pmt = spectral.project_zero_mean(self.m_dot_t) + self.m_dot_t
        R5 = (
            -(_TWO_PI / L) * comm(phi5, gamma * self.theta_a)
            + (_TWO_PI / L) * self.v_w * D(self.v_w, 1) * self.theta_a
            + (_TWO_PI / L) * self.v_w * D(self.m_dot_n, 1)
            - pmt * phi5
        )

        h_gamma_a = spectral.hilbert(self.gamma_a)
        at = p.atilde
        Rt1 = 2.0 * at * (
            (2.0 * np.pi**3 / L**3) * self.theta_a * gamma * self.gamma_a
            - (4.0 * np.pi**3 / L**2) * comm(h_gamma_a, gamma * self.theta_a)
            - pmt * (2.0 * np.pi**2 / L**2) * h_gamma_a
            - (np.pi * self.L_t / L**2) * h_gamma_a
        )

        k_gamma_zta = (zal * ops.k(gamma * zta / zal)).real
        comm_gamma_zta = ((zal / 2j) * comm(1.0 / zal, gamma * zta / zal)).real
        x_aa = D(ops.s_alpha * np.cos(st.theta), 1)
        y_a = ops.s_alpha * np.sin(st.theta)
        Rt2 = (
            (-4.0 * np.pi * at * self.theta_a / L)
            * (
                (np.pi**2 / L**2) * comm(gamma, h_gamma_a)
                + spectral.hilbert(
                    (np.pi / L) * self.v_w * self.theta_a * gamma + (np.pi / L) * gamma * self.m_dot_n
                )
            )
            + k_gamma_zta
            + comm_gamma_zta
            - R1
            - 2.0 * at * ((self.L_t / L) * self.m_dot_n + (_TWO_PI * p.g / L) * x_aa + R3 + R5)
        )

        A = p.atwood
        R = (_TWO_PI / L) * D(self.v_w, 1) * gamma + 2.0 * A * (
            (np.pi**2 / L**2) * comm(gamma, h_gamma_a)
            + spectral.hilbert((np.pi / L) * gamma * self.m_dot_n)
            + k_gamma_zta
            + (np.pi / L) * comm(self.v_w, self.theta_a * gamma)
            + comm_gamma_zta
            - self.v_w * self.m_dot_t
            + p.g * y_a
            - R1
        )

        return RemainderBundle(m=self.m, R1=R1, R3=R3, R5=R5, Rt1=Rt1, Rt2=Rt2, R=R)

    def forcing(self, bundle=None):
        """F: every gamma_t-free term of the sheet-strength equation."""
        p = self.params
        st = self.state
        L = self.L
        if bundle is None:
            bundle = self.remainders()
        lam = p.lam(L)
        abar = p.abar(L)
        rho = p.rho(L)
        theta_aa = spectral.derivative(st.theta, 2)
        theta_4 = spectral.derivative(st.theta, 4)
        gamma_aa = spectral.derivative(st.gamma, 2)
        F = (
            lam * theta_aa
            - p.sigma * abar * theta_4
            - 1.5 * p.sigma * abar * self.theta_a**2 * theta_aa
            + (4.0 * np.pi * rho * p.atilde / L) * self.v_w**2 * theta_aa
            + ((_TWO_PI * self.v_w / L) - (4.0 * p.atwood * np.pi**2 / L**2) * st.gamma) * self.gamma_a
            - (4.0 * rho * p.atilde * np.pi**2 / L**2) * self.v_w * spectral.hilbert(gamma_aa)
            + rho * bundle.Rt1
            + rho * bundle.Rt2
            + bundle.R
        )
        return F

    def solve_gamma_t(self, F, damped=False, stop_tol=1e-12):
        """Picard iteration gamma^{m+1} = D2^{-1}(F - T gamma^m), started from
        D2^{-1} F; optional 0.5 damping for marginal contraction factors.
        """
        p = self.params
        st = self.state
        if p.atwood == 0.0 and p.rho0 == 0.0:
            # T is identically zero and D2 = I: gamma_t = F after one sweep.
            return np.array(F, copy=True), 1, 0.0
        tol = stop_tol * (1.0 + spectral.sobolev_norm(F, 0))
        d2f = d2_solve(F, p, st.L)
        g = d2f.copy()
        beta = 0.5 if damped else 1.0
        for it in range(1, MAX_FIXED_POINT_ITERATIONS + 1):
            g_new = d2f - d2_solve(self.ops.t(g, p), p, st.L)
            if damped:
                g_new = (1.0 - beta) * g + beta * g_new
            delta = spectral.sobolev_norm(g_new - g, 0)
            g = g_new
            if delta < tol:
                residual = spectral.sobolev_norm(g + d2_solve(self.ops.t(g, p), p, st.L) - d2f, 0)
                if residual > 10.0 * tol:
                    raise FixedPointDiverged(
                        f"gamma_t residual {residual:.3e} above 10x stop tolerance {tol:.3e}"
                    )
                return g, it, residual
        raise FixedPointDiverged(
            f"gamma_t Picard iteration exceeded {MAX_FIXED_POINT_ITERATIONS} iterations "
            f"(last increment {delta:.3e}, tol {tol:.3e})"
        )

    def derivative(self, damped=False):
        bundle = self.remainders()
        F = self.forcing(bundle)
        gamma_t, iters, residual = self.solve_gamma_t(F, damped=damped)
        return StateDerivative(
            theta_t=self.theta_t,
            gamma_t=gamma_t,
            L_t=self.L_t,
            solver_iterations=iters,
            solver_residual=residual,
        )


# ---------------------------------------------------------------------------
# Operation wrappers
# ---------------------------------------------------------------------------

def normal_velocity(state):
    """U = W.n."""
    return Assembly(state).u


def length_rate(state):
    """L_t = -int theta_a U da."""
    return Assembly(state).L_t


def tangential_correction(state):
    """V_W: mean-zero antiderivative of (pi/L) H(gamma theta_a) - P(m.t)."""
    return Assembly(state).v_w


def full_tangential(state):
    """V = antiderivative(P(theta_a U)) + <W.t>."""
    return Assembly(state).v


def theta_rhs(state):
    return Assembly(state).theta_t


def z_time_derivative(state):
    """z_t = C(U n + V t) = (V + iU) e^{i theta}."""
    return Assembly(state).z_t


def assemble_remainders(state, params):
    return Assembly(state, params).remainders()


def assemble_F(state, params):
    return Assembly(state, params).forcing()


def solve_gamma_t(state, params, F, damped=False):
    """Solve (D2 + T) gamma_t = F; returns the solution field only."""
    gamma_t, _, _ = Assembly(state, params).solve_gamma_t(np.asarray(F, float), damped=damped)
    return gamma_t


def rhs(state, params, damped=False, ops=None):
    """StateDerivative (theta_t, gamma_t, L_t) at one state; deterministic."""
    return Assembly(state, params, ops=ops).derivative(damped=damped)


def linear_frequencies(n, L, params):
    """Oscillation frequencies of the flat-state linearization, per mode k.

    omega(k)^2 = (2 pi^2/L^2) k (lam k^2 + sigma abar k^4) / d2(k), with
    d2(k) = 1 + (2 pi rho atilde / L) k the D2 symbol; used as the dispersion
    oracle's building block.
    """
    k = np.arange(n // 2 + 1, dtype=float)
    lam = params.lam(L)
    abar = params.abar(L)
    d2 = 1.0 + (_TWO_PI * params.rho(L) * params.atilde / L) * k
    omega2 = (2.0 * np.pi**2 / L**2) * k * (lam * k**2 + params.sigma * abar * k**4) / d2
    return np.sqrt(omega2)


def stability_frequency_bound(n, L, params):
    """max_k omega(k) with the mass denominator dropped (conservative)."""
    k = np.arange(1, n // 2 + 1, dtype=float)
    lam = params.lam(L)
    abar = params.abar(L)
    omega2 = (2.0 * np.pi**2 / L**2) * k * (lam * k**2 + params.sigma * abar * k**4)
    return float(np.sqrt(np.max(omega2)))
