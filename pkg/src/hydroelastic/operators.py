"""Singular and smoothing integral operators on the interface.

The average-velocity (Birkhoff-Rott) integral

    conj(C(W))(a) = (1/4*pi*i) PV int gamma(a') cot((z(a) - z(a'))/2) da'

is never evaluated as a principal value in production.  It is split into the
periodic Hilbert transform plus a remainder with a smooth kernel,

    conj(C(W)) = K[z_d] gamma + (1/2i) H(gamma / z_alpha),

where K has the kernel cot((z_d(a)-z_d(a'))/2) - cot((a-a')/2)/z_alpha(a') and
a removable singularity on the diagonal with limit -z_aa(a)/z_alpha(a)^2.
Everything downstream (m, J, S, T) is a combination of K, Hilbert commutators
[H, phi]f = H(phi f) - phi H f, and pointwise algebra.

``CurveOps`` precomputes the dense K kernel matrix once per state so a full
right-hand-side assembly costs a handful of matvecs.  All apply methods accept
an (N,) field or an (N, M) batch of columns.

A direct alternating-point principal-value quadrature of the cotangent kernel
(``birkhoff_rott_pv``) is kept as an independent reference evaluator for
verification; production never calls it.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry, spectral
from .errors import DegenerateCurve

_TWO_PI = 2.0 * np.pi


@lru_cache(maxsize=8)
def _identity_transforms_cached(n):
    """Hilbert and derivative of the identity (columns H e_j, D e_j); read-only."""
    eye = np.eye(n)
    hmat = spectral.hilbert(eye)
    dmat = spectral.derivative(eye, 1)
    hmat.setflags(write=False)
    dmat.setflags(write=False)
    return hmat, dmat


def _cot(w):
    return 1.0 / np.tan(w)


def k_kernel_matrix(zd, zalpha, n):
    """Dense matrix realizing f -> K[z_d] f by trapezoid quadrature.

    Entry (j, m) carries the quadrature weight 2*pi/N and the 1/(4*pi*i)
    prefactor; the diagonal holds the removable-singularity limit
    -z_alphaalpha / z_alpha^2 (validated against Richardson extrapolation in
    the tests rather than assumed).
    """
    alpha = spectral.nodes(n)
    dz = zd[:, None] - zd[None, :]
    da = alpha[:, None] - alpha[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = _cot(0.5 * dz) - _cot(0.5 * da) / zalpha[None, :]
    zalpha_a = spectral.derivative(zalpha, 1)
    np.fill_diagonal(kernel, -zalpha_a / zalpha**2)
    if not np.all(np.isfinite(kernel)):
        raise DegenerateCurve("singular K kernel: coincident curve points")
    return kernel / (2j * n)


def hilbert_commutator(phi, f):
    """[H, phi] f = H(phi f) - phi H(f); smoothing for smooth phi."""
    phi = np.asarray(phi)
    f = np.asarray(f)
    pf = phi[:, None] * f if f.ndim == 2 else phi * f
    hf = spectral.hilbert(f)
    phf = phi[:, None] * hf if f.ndim == 2 else phi * hf
    return spectral.hilbert(pf) - phf


class CurveOps:
    """Per-state context bundling the curve quantities and the K matrix."""

    def __init__(self, state, closure_tol=geometry.CLOSURE_TOL):
        self.state = state
        self.n = state.n
        self.L = state.L
        self.s_alpha = state.s_alpha
        self.theta_a = spectral.derivative(state.theta, 1)
        self.zd = geometry.reconstruct_zd(state, closure_tol=closure_tol)
        self.zalpha = self.s_alpha * np.exp(1j * state.theta)
        self.kmat = k_kernel_matrix(self.zd, self.zalpha, self.n)
        self.tangent = np.stack([np.cos(state.theta), np.sin(state.theta)], axis=1)
        self.normal = np.stack([-np.sin(state.theta), np.cos(state.theta)], axis=1)

    def k(self, f):
        return self.kmat @ f

    def commutator(self, phi, f):
        return hilbert_commutator(phi, f)

    def _mul(self, coeff, f):
        return coeff[:, None] * f if np.asarray(f).ndim == 2 else coeff * f

    def w_conj(self, gamma=None):
        """conj(C(W)) through the K + Hilbert decomposition."""
        g = self.state.gamma if gamma is None else gamma
        return self.k(g) + spectral.hilbert(g / self.zalpha) / 2j

    def w(self, gamma=None):
        cw = self.w_conj(gamma)
        return np.stack([cw.real, -cw.imag], axis=1)

    def m_conj(self):
        """conj(C(m)): the smooth remainder in the decomposition of W_alpha."""
        g_a = spectral.derivative(self.state.gamma / self.zalpha, 1)
        term1 = self.zalpha * self.k(g_a)
        term2 = (self.zalpha / 2j) * self.commutator(1.0 / self.zalpha**2, self.zalpha * g_a)
        return term1 + term2

    def m(self):
        cm = self.m_conj()
        return np.stack([cm.real, -cm.imag], axis=1)

    def j(self, f):
        """J[z_d] f = Re{z_alpha K f + (z_alpha/2i) [H, 1/z_alpha] f}."""
        out = self._mul(self.zalpha, self.k(f))
        out = out + self._mul(self.zalpha / 2j, self.commutator(1.0 / self.zalpha, f))
        return out.real

    def s(self, f):
        """S[z_d] f, the smooth gamma_t-side companion of m."""
        g_a = spectral.derivative(self._mul(1.0 / self.zalpha, f), 1)
        out = self._mul(1j * self.zalpha**2 / self.s_alpha, self.k(g_a))
        out = out + self._mul(
            self.zalpha**2 / (2.0 * self.s_alpha),
            self.commutator(1.0 / self.zalpha**2, self._mul(self.zalpha, g_a)),
        )
        return out.real

    def t(self, f, params):
        """T[theta] f = -2A J f + 2 rho (S f - (2 pi atilde theta_a / L) J f)."""
        A = params.atwood
        rho = params.rho(self.L)
        jf = self.j(f)
        out = -2.0 * A * jf
        if rho != 0.0:
            out = out + 2.0 * rho * (self.s(f) - self._mul((_TWO_PI * params.atilde / self.L) * self.theta_a, jf))
        return out

    def _identity_transforms(self):
        return _identity_transforms_cached(self.n)

    def _comm_matrix(self, phi):
        # [H, phi] as a dense matrix: H diag(phi) - diag(phi) H, no matmuls
        hmat, _ = self._identity_transforms()
        return hmat * phi[None, :] - phi[:, None] * hmat

    def j_matrix(self):
        out = self.zalpha[:, None] * self.kmat
        out = out + (self.zalpha / 2j)[:, None] * self._comm_matrix(1.0 / self.zalpha)
        return out.real

    def s_matrix(self):
        _, dmat = self._identity_transforms()
        g_a = dmat * (1.0 / self.zalpha)[None, :]      # columns: d/da (e_j / z_alpha)
        zg = self.zalpha[:, None] * g_a
        comm = spectral.hilbert((1.0 / self.zalpha**2)[:, None] * zg)
        comm -= (1.0 / self.zalpha**2)[:, None] * spectral.hilbert(zg)
        out = (1j * self.zalpha**2 / self.s_alpha)[:, None] * (self.kmat @ g_a)
        out = out + (self.zalpha**2 / (2.0 * self.s_alpha))[:, None] * comm
        return out.real

    def t_matrix(self, params):
        """Dense matrix of T (column j = T applied to the j-th basis vector)."""
        A = params.atwood
        rho = params.rho(self.L)
        jmat = self.j_matrix()
        out = -2.0 * A * jmat
        if rho != 0.0:
            smat = self.s_matrix()
            out = out + 2.0 * rho * (
                smat - ((_TWO_PI * params.atilde / self.L) * self.theta_a)[:, None] * jmat
            )
        return out


# ---------------------------------------------------------------------------
# Module-level operation wrappers (state -> fresh context).  Hot paths build
# one CurveOps and reuse it instead.
# ---------------------------------------------------------------------------

def birkhoff_rott(state):
    """Average-velocity field W = (W1, W2) at the interface nodes."""
    return CurveOps(state).w()


def k_operator(zd, L, f):
    """Apply K[z_d] to f given only the positions z_d and the period length L.

    z_alpha is recovered spectrally from the periodic part of z_d (the curve
    is horizontally 2*pi-periodic, so z_d - alpha is periodic).
    """
    zd = np.asarray(zd, dtype=complex)
    n = zd.shape[0]
    alpha = spectral.nodes(n)
    zalpha = 1.0 + spectral.derivative(zd - alpha, 1)
    return k_kernel_matrix(zd, zalpha, n) @ np.asarray(f)


def m_term(state):
    return CurveOps(state).m()


def j_operator(state, f):
    return CurveOps(state).j(np.asarray(f, dtype=float))


def s_operator(state, f):
    return CurveOps(state).s(np.asarray(f, dtype=float))


def t_operator(state, params, f):
    return CurveOps(state).t(np.asarray(f, dtype=float), params)


def d2_multiplier(n, params, L):
    """Fourier symbol of D2 = I + (2*pi*rho*atilde/L) Lambda (Lambda = H d/da)."""
    k = spectral.wavenumbers(n)
    lam_sym = np.abs(k).astype(float)
    lam_sym[n // 2] = 0.0
    return 1.0 + (_TWO_PI * params.rho(L) * params.atilde / L) * lam_sym


def d2_solve(f, params, L):
    """Apply D2^{-1} (diagonal in Fourier space) along axis 0."""
    f = np.asarray(f)
    mult = 1.0 / d2_multiplier(f.shape[0], params, L)
    spec = np.fft.fft(f, axis=0)
    spec = spec * (mult[:, None] if f.ndim == 2 else mult)
    out = np.fft.ifft(spec, axis=0)
    return out.real if np.isrealobj(f) else out


@dataclass
class OperatorProbeReport:
    """Power-iteration estimate of ||D2^{-1} T|| on the grid (L^2 operator norm)."""

    estimated_norm: float
    iterations: int
    converged: bool


def probe_t_norm(state, params, trials=16, seed=0, max_iterations=200, tol=1e-6, ops=None):
    """Estimate the L^2 operator norm of D2^{-1} T[theta] by power iteration
    on the normal matrix, from ``trials`` random starts.

    The massless, density-matched case (A = 0, rho0 = 0) short-circuits to an
    exact zero: T is identically the zero operator there.
    """
    if params.atwood == 0.0 and params.rho0 == 0.0:
        return OperatorProbeReport(0.0, 0, True)
    if ops is None:
        ops = CurveOps(state)
    tmat = ops.t_matrix(params)
    m = d2_solve(tmat, params, state.L)
    if np.linalg.norm(m) < 1e-300:
        return OperatorProbeReport(0.0, 0, True)
    gram = m.T @ m
    rng = np.random.default_rng(seed)
    best = 0.0
    worst_iters = 0
    all_converged = True
    for _ in range(max(1, trials)):
        v = rng.standard_normal(state.n)
        v /= np.linalg.norm(v)
        est_prev = np.inf
        converged = False
        it = 0
        for it in range(1, max_iterations + 1):
            w = gram @ v
            est = float(np.sqrt(max(v @ w, 0.0)))
            nw = np.linalg.norm(w)
            if nw == 0.0:
                est, converged = 0.0, True
                break
            v = w / nw
            if abs(est - est_prev) < tol:
                converged = True
                est_prev = est
                break
            est_prev = est
        best = max(best, est_prev if np.isfinite(est_prev) else 0.0)
        worst_iters = max(worst_iters, it)
        all_converged = all_converged and converged
    return OperatorProbeReport(best, worst_iters, all_converged)


def birkhoff_rott_pv(state, refine=4):
    """Reference evaluator: alternating-point PV trapezoid quadrature of the
    cotangent kernel on a ``refine`` x finer grid, evaluated at the coarse
    nodes.  Spectrally accurate for analytic states; independent of the
    K + Hilbert production path.
    """
    n = state.n
    nf = refine * n
    theta_f = spectral.resample(state.theta, nf)
    gamma_f = spectral.resample(state.gamma, nf)
    fine = geometry.InterfaceState(theta=theta_f, gamma=gamma_f, L=state.L, time=state.time)
    zd_f = geometry.reconstruct_zd(fine)
    h = _TWO_PI / nf
    odd = np.arange(1, nf, 2)
    coarse_idx = refine * np.arange(n)
    out = np.empty(n, dtype=complex)
    for i, jc in enumerate(coarse_idx):
        dz = zd_f[jc] - zd_f[odd] if jc % 2 == 0 else zd_f[jc] - zd_f[np.arange(0, nf, 2)]
        src = gamma_f[odd] if jc % 2 == 0 else gamma_f[np.arange(0, nf, 2)]
        out[i] = np.sum(src * _cot(0.5 * dz)) * 2.0 * h / (4j * np.pi)
    return np.stack([out.real, -out.imag], axis=1)
