"""Fourier-side primitives on the uniform 2*pi-periodic grid.

A field is a numpy array of shape (N,) sampled at the nodes alpha_j = 2*pi*j/N
with N even; a shape (N, M) array is treated as M fields side by side (all
operators act along axis 0).  Real fields are float64, complex fields
complex128.  Fourier coefficients follow

    fhat_k = (1/N) * sum_j f(alpha_j) exp(-i k alpha_j),   |k| <= N/2,

so Parseval reads  integral(f^2) = 2*pi * sum_k |fhat_k|^2.

Multiplier conventions: the k = 0 mode is annihilated by ``hilbert`` and by
``fractional_lambda``; the Nyquist mode k = N/2 is zeroed by ``derivative``,
``hilbert``, ``fractional_lambda`` and ``antiderivative`` so results stay real
and symmetric.
"""

import numpy as np

from .errors import NonZeroMean

_TWO_PI = 2.0 * np.pi


def nodes(n):
    """Collocation nodes alpha_j = 2*pi*j/n, j = 0..n-1."""
    _check_even(n)
    return _TWO_PI * np.arange(n) / n


def wavenumbers(n):
    """Integer wavenumbers in FFT ordering: 0, 1, ..., n/2-1, -n/2, ..., -1."""
    _check_even(n)
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


def mean(f):
    """Grid mean, identical to (1/2pi) * integral(f) on the periodic grid."""
    return f.mean(axis=0)


def integral(f):
    """Trapezoid quadrature over [0, 2*pi); exact for band-limited fields."""
    return _TWO_PI * f.mean(axis=0)


def _check_even(n):
    if n % 2 != 0 or n <= 0:
        raise ValueError(f"grid size must be a positive even integer, got {n}")


def _apply_multiplier(f, mult):
    """Apply a Fourier multiplier along axis 0; preserves real inputs."""
    f = np.asarray(f)
    _check_even(f.shape[0])
    spec = np.fft.fft(f, axis=0)
    if f.ndim == 2:
        spec *= mult[:, None]
    else:
        spec *= mult
    out = np.fft.ifft(spec, axis=0)
    if np.isrealobj(f):
        return out.real
    return out


def derivative(f, order=1):
    """Spectral d^order/d alpha^order; Nyquist zeroed, exact on band-limited input."""
    if order < 0:
        raise ValueError("derivative order must be a nonnegative integer")
    if order == 0:
        return np.array(f, copy=True)
    n = np.asarray(f).shape[0]
    k = wavenumbers(n)
    mult = (1j * k) ** order
    mult[n // 2] = 0.0
    return _apply_multiplier(f, mult)


def hilbert(f):
    """Periodic Hilbert transform: multiplier -i*sgn(k), k=0 and Nyquist -> 0."""
    n = np.asarray(f).shape[0]
    k = wavenumbers(n)
    mult = -1j * np.sign(k).astype(complex)
    mult[n // 2] = 0.0
    return _apply_multiplier(f, mult)


def project_zero_mean(f):
    """Remove the mean; idempotent."""
    return f - f.mean(axis=0)


def antiderivative(f, tol=1e-12):
    """Mean-zero antiderivative of a mean-zero periodic field.

    Raises NonZeroMean when |mean(f)| > tol * max(1, max|f|): the caller
    assembled an integrand it forgot to project.
    """
    f = np.asarray(f)
    scale = max(1.0, float(np.max(np.abs(f))) if f.size else 1.0)
    if np.any(np.abs(np.atleast_1d(f.mean(axis=0))) > tol * scale):
        raise NonZeroMean(
            f"antiderivative needs a mean-zero field; |mean| = {np.max(np.abs(f.mean(axis=0))):.3e}"
        )
    n = f.shape[0]
    k = wavenumbers(n).astype(complex)
    k[0] = 1.0  # k=0 handled by zeroing the mult below
    mult = 1.0 / (1j * k)
    mult[0] = 0.0
    mult[n // 2] = 0.0
    return _apply_multiplier(f, mult)


def fractional_lambda(f, s):
    """Fractional smoothing/roughening operator with symbol |k|^s (s >= 0).

    s = 1 coincides with hilbert(derivative(f)); the mean is always removed.
    """
    if s < 0:
        raise ValueError("fractional_lambda requires s >= 0")
    n = np.asarray(f).shape[0]
    k = wavenumbers(n)
    mult = np.abs(k).astype(float) ** s if s > 0 else np.ones(n)
    mult[0] = 0.0
    mult[n // 2] = 0.0
    return _apply_multiplier(f, mult.astype(complex))


def coefficients(f):
    """Fourier coefficients fhat_k = fft(f)/N in FFT ordering."""
    f = np.asarray(f)
    return np.fft.fft(f, axis=0) / f.shape[0]


def sobolev_norm(f, s):
    """H^s norm (sum_k (1+k^2)^s |fhat_k|^2 * 2*pi)^(1/2); s = 0 is the L^2 norm."""
    f = np.asarray(f)
    n = f.shape[0]
    k = wavenumbers(n)
    w = (1.0 + k.astype(float) ** 2) ** s
    spec2 = np.abs(coefficients(f)) ** 2
    if f.ndim == 2:
        w = w[:, None]
    return float(np.sqrt(_TWO_PI * np.sum(w * spec2)))


def krasny_filter(f, floor):
    """Zero every Fourier coefficient with |fhat_k| < floor (absolute threshold)."""
    if floor < 0:
        raise ValueError("filter floor must be nonnegative")
    if floor == 0.0:
        return np.array(f, copy=True)
    f = np.asarray(f)
    spec = coefficients(f)
    spec[np.abs(spec) < floor] = 0.0
    out = np.fft.ifft(spec * f.shape[0], axis=0)
    return out.real if np.isrealobj(f) else out


def resample(f, n_new):
    """Trigonometric interpolation onto an n_new-point grid (pad or truncate).

    The Nyquist mode of the source is dropped on refinement and the target
    Nyquist is zeroed on coarsening, matching the multiplier conventions.
    """
    f = np.asarray(f)
    n = f.shape[0]
    _check_even(n_new)
    spec = coefficients(f)
    out = np.zeros(n_new, dtype=complex) if f.ndim == 1 else np.zeros((n_new, f.shape[1]), complex)
    m = min(n, n_new) // 2
    out[:m] = spec[:m]
    if m > 1:
        out[-(m - 1):] = spec[-(m - 1):]
    vals = np.fft.ifft(out * n_new, axis=0)
    return vals.real if np.isrealobj(f) else vals
