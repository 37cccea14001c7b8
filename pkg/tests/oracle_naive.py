"""Independent re-transcription of the gamma_t-side formulas.

This is a deliberately naive second implementation of the remainder
collections, the forcing F, the operator T and the gamma_t solve, written
term by term in the order the formulas are usually stated and sharing no code
with hydroelastic.evolution.  The dominant implementation risk there is a
sign slip inside a twelve-term expression; agreement between the two
transcriptions (to ~1e-10) is the guard.

The K operator is evaluated with explicit Python loops and cmath, and the
gamma_t equation is solved as a dense linear system instead of by fixed-point
iteration, so the solution path is independent too.
"""

import cmath

import numpy as np

TWO_PI = 2.0 * np.pi


def ddx(f, order=1):
    n = len(f)
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = (1j * k) ** order
    mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * mult)
    return out.real if np.isrealobj(f) else out


def hilb(f):
    n = len(f)
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = -1j * np.sign(k)
    mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * mult)
    return out.real if np.isrealobj(f) else out


def zero_mean(f):
    return f - np.mean(f)


def int_da(f):
    n = len(f)
    k = np.fft.fftfreq(n, d=1.0 / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = 1.0 / (1j * k)
    mult[0] = 0.0
    mult[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f) * mult)
    return out.real if np.isrealobj(f) else out


def cm(phi, f):
    """Commutator [H, phi] f."""
    return hilb(phi * f) - phi * hilb(f)


def k_apply_loops(zd, za, za_a, f):
    n = len(zd)
    alpha = TWO_PI * np.arange(n) / n
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            if i == j:
                ker = -za_a[i] / za[i] ** 2
            else:
                ker = 1.0 / cmath.tan(0.5 * (zd[i] - zd[j])) - (1.0 / za[j]) / cmath.tan(
                    0.5 * (alpha[i] - alpha[j])
                )
            acc += ker * f[j]
        out[i] = acc * (TWO_PI / n) / (4j * np.pi)
    return out


def evaluate(state, params):
    """Everything the gamma_t equation needs, via the naive path.

    Returns a dict with m, R1, R3, R5, Rt1, Rt2, R, F, theta_t, gamma_t.
    """
    n = state.n
    theta, gamma, L = state.theta, state.gamma, state.L
    alpha = TWO_PI * np.arange(n) / n
    s_a = L / TWO_PI
    theta_a = ddx(theta)
    gamma_a = ddx(gamma)

    za = s_a * np.exp(1j * theta)
    za_a = ddx(za)
    e = np.exp(1j * theta)
    zd = alpha * (s_a * np.mean(np.cos(theta))) + int_da(s_a * (e - np.mean(e)))
    zd = zd - zd[0]

    def K(f):
        return k_apply_loops(zd, za, za_a, f)

    # velocity and frame pieces, written componentwise
    wstar = K(gamma) + hilb(gamma / za) / 2j
    w1, w2 = wstar.real, -wstar.imag
    tx, ty = np.cos(theta), np.sin(theta)
    nx, ny = -np.sin(theta), np.cos(theta)
    U = w1 * nx + w2 * ny
    WT = w1 * tx + w2 * ty
    L_t = -TWO_PI * np.mean(theta_a * U)
    V = int_da(zero_mean(theta_a * U)) + np.mean(WT)

    mstar = za * K(ddx(gamma / za)) + (za / 2j) * cm(1.0 / za**2, za * ddx(gamma / za))
    m1, m2 = mstar.real, -mstar.imag
    m_n = m1 * nx + m2 * ny
    m_t = m1 * tx + m2 * ty

    V_W = int_da((np.pi / L) * hilb(gamma * theta_a) - zero_mean(m_t))
    theta_t = (
        (2.0 * np.pi**2 / L**2) * hilb(gamma_a)
        + (TWO_PI / L) * V_W * theta_a
        + (TWO_PI / L) * m_n
    )

    zt = (U * nx + V * tx) + 1j * (U * ny + V * ty)
    z_ta = ddx(zt)

    A = (params.rho1 - params.rho2) / (params.rho1 + params.rho2)
    atil = 1.0 / (params.rho1 + params.rho2)
    rho = params.rho0 * TWO_PI / L
    lam = 4.0 * params.tau * np.pi / (L * (params.rho1 + params.rho2))
    abar = 8.0 * np.pi**3 / (L**3 * (params.rho1 + params.rho2))
    g = params.g

    R1 = (
        (za * zt * K(ddx(gamma / za))).real
        - (za * K(zt * ddx(gamma / za))).real
        - ((za / 2j) * cm(zt, ddx(gamma / za) / za)).real
    )

    R3 = (
        ((1j * za**2 / s_a) * K(ddx(-gamma * z_ta / za**2))).real
        + ((za**2 / (2.0 * s_a)) * cm(1.0 / za**2, za * ddx(-gamma * z_ta / za**2))).real
        + (
            (-(za**2) / (2.0 * s_a)) * cm(1.0 / za**2, ddx(gamma / za) * z_ta)
            - (1j * za**2 / s_a) * K(ddx(gamma / za) * z_ta / za)
        ).real
        + ((1j * za**2 * zt / s_a) * K(ddx(ddx(gamma / za) / za))).real
        - ((1j * za**2 / s_a) * K(zt * ddx(ddx(gamma / za) / za))).real
        - ((za**2 / (2.0 * s_a)) * cm(zt, (1.0 / za) * ddx(ddx(gamma / za) / za))).real
    )

    R5 = (
        -(TWO_PI / L) * cm((TWO_PI / L) * V_W * theta_a + (TWO_PI / L) * m_n, gamma * theta_a)
        + (TWO_PI / L) * V_W * ddx(V_W) * theta_a
        + (TWO_PI * V_W / L) * ddx(m_n)
        - (zero_mean(m_t) + m_t) * ((TWO_PI / L) * V_W * theta_a + (TWO_PI / L) * m_n)
    )

    Rt1 = 2.0 * atil * (
        (2.0 * np.pi**3 / L**3) * theta_a * gamma * gamma_a
        - (4.0 * np.pi**3 / L**2) * cm(hilb(gamma_a), gamma * theta_a)
        - (zero_mean(m_t) + m_t) * (2.0 * np.pi**2 / L**2) * hilb(gamma_a)
        - (np.pi * L_t / L**2) * hilb(gamma_a)
    )

    x_aa = ddx(s_a * np.cos(theta))
    Rt2 = (
        (-4.0 * np.pi * atil * theta_a / L)
        * (
            (np.pi**2 / L**2) * cm(gamma, hilb(gamma_a))
            + hilb((np.pi / L) * V_W * theta_a * gamma + (np.pi / L) * gamma * m_n)
        )
        + (za * K(gamma * z_ta / za)).real
        + ((za / 2j) * cm(1.0 / za, gamma * z_ta / za)).real
        - R1
        - 2.0 * atil * ((L_t / L) * m_n + (TWO_PI * g / L) * x_aa + R3 + R5)
    )

    y_a = s_a * np.sin(theta)
    R = (TWO_PI / L) * ddx(V_W) * gamma + 2.0 * A * (
        (np.pi**2 / L**2) * cm(gamma, hilb(gamma_a))
        + hilb((np.pi / L) * gamma * m_n)
        + (za * K(gamma * z_ta / za)).real
        + (np.pi / L) * cm(V_W, theta_a * gamma)
        + ((za / 2j) * cm(1.0 / za, gamma * z_ta / za)).real
        - V_W * m_t
        + g * y_a
        - R1
    )

    F = (
        lam * ddx(theta, 2)
        - params.sigma * abar * ddx(theta, 4)
        - (3.0 * params.sigma * abar / 2.0) * theta_a**2 * ddx(theta, 2)
        + (4.0 * np.pi * rho * atil / L) * V_W**2 * ddx(theta, 2)
        + ((TWO_PI * V_W / L) - (4.0 * A * np.pi**2 / L**2) * gamma) * gamma_a
        - (4.0 * rho * atil * np.pi**2 / L**2) * V_W * hilb(ddx(gamma, 2))
        + rho * Rt1
        + rho * Rt2
        + R
    )

    # T as a dense matrix, columns T e_j, then the linear solve
    def J(f):
        return (za * K(f) + (za / 2j) * cm(1.0 / za, f)).real

    def S(f):
        return (
            ((1j * za**2 / s_a) * K(ddx(f / za))).real
            + ((za**2 / (2.0 * s_a)) * cm(1.0 / za**2, za * ddx(f / za))).real
        )

    def T(f):
        return -2.0 * A * J(f) + 2.0 * rho * (S(f) - (TWO_PI * atil * theta_a / L) * J(f))

    tmat = np.column_stack([T(col) for col in np.eye(n)])
    k = np.fft.fftfreq(n, d=1.0 / n)
    lam_sym = np.abs(k)
    lam_sym[n // 2] = 0.0
    d2_sym = 1.0 + (TWO_PI * rho * atil / L) * lam_sym
    fmat = np.fft.fft(np.eye(n), axis=0)
    d2mat = (np.fft.ifft(d2_sym[:, None] * fmat, axis=0)).real
    gamma_t = np.linalg.solve(d2mat + tmat, F)

    return {
        "m": np.stack([m1, m2], axis=1),
        "R1": R1, "R3": R3, "R5": R5, "Rt1": Rt1, "Rt2": Rt2, "R": R,
        "F": F, "theta_t": theta_t, "gamma_t": gamma_t,
        "V_W": V_W, "L_t": L_t,
    }
