import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydroelastic import spectral
from hydroelastic.errors import NonZeroMean

N = 64
ALPHA = spectral.nodes(N)


def random_trig(rng, n=N, kmax=12, zero_mean=False):
    a = spectral.nodes(n)
    f = np.zeros(n) if zero_mean else rng.normal() * np.ones(n)
    for k in range(1, kmax + 1):
        f += rng.normal() * np.cos(k * a) + rng.normal() * np.sin(k * a)
    return f


def test_derivative_examples():
    assert np.allclose(spectral.derivative(np.cos(ALPHA), 1), -np.sin(ALPHA), atol=1e-13)
    assert np.allclose(spectral.derivative(np.full(N, 3.7), 2), 0.0, atol=1e-13)
    # roundoff seeds ~1e-16 spurious modes that the k^4 multiplier amplifies
    # to ~(N/2)^4 * eps, the intrinsic floor for high-order spectral derivatives
    assert np.allclose(spectral.derivative(np.sin(3 * ALPHA), 4), 81 * np.sin(3 * ALPHA), atol=1e-8)
    assert np.allclose(spectral.derivative(np.sin(ALPHA), 0), np.sin(ALPHA))


def test_derivative_mean_free():
    rng = np.random.default_rng(0)
    f = random_trig(rng)
    for order in (1, 2, 3):
        assert abs(np.mean(spectral.derivative(f, order))) < 1e-13


def test_hilbert_examples():
    for k in (1, 2, 5):
        assert np.allclose(spectral.hilbert(np.cos(k * ALPHA)), np.sin(k * ALPHA), atol=1e-12)
        assert np.allclose(spectral.hilbert(np.sin(k * ALPHA)), -np.cos(k * ALPHA), atol=1e-12)
    assert np.allclose(spectral.hilbert(np.ones(N)), 0.0, atol=1e-14)


def test_project_zero_mean():
    f = 2.0 + np.cos(ALPHA)
    assert np.allclose(spectral.project_zero_mean(f), np.cos(ALPHA), atol=1e-14)
    assert np.allclose(spectral.project_zero_mean(np.cos(ALPHA)), np.cos(ALPHA), atol=1e-14)
    assert np.allclose(spectral.project_zero_mean(np.full(N, 5.0)), 0.0, atol=1e-14)


def test_antiderivative_examples():
    assert np.allclose(spectral.antiderivative(np.cos(ALPHA)), np.sin(ALPHA), atol=1e-13)
    assert np.allclose(spectral.antiderivative(np.sin(2 * ALPHA)), -np.cos(2 * ALPHA) / 2, atol=1e-13)
    with pytest.raises(NonZeroMean):
        spectral.antiderivative(np.ones(N))


def test_fractional_lambda_examples():
    assert np.allclose(spectral.fractional_lambda(np.cos(ALPHA), 1.0), np.cos(ALPHA), atol=1e-13)
    assert np.allclose(
        spectral.fractional_lambda(np.cos(2 * ALPHA), 0.5),
        np.sqrt(2) * np.cos(2 * ALPHA), atol=1e-13,
    )
    assert np.allclose(spectral.fractional_lambda(np.full(N, 4.0), 2.0), 0.0, atol=1e-14)


def test_sobolev_norm_examples():
    assert spectral.sobolev_norm(np.zeros(N), 3.0) == 0.0
    assert np.isclose(spectral.sobolev_norm(np.cos(ALPHA), 0.0), np.sqrt(np.pi), rtol=1e-13)
    # s=1 against direct quadrature of f^2 + f_a^2
    f = np.cos(ALPHA)
    direct = np.sqrt(spectral.integral(f**2 + spectral.derivative(f, 1) ** 2))
    assert np.isclose(spectral.sobolev_norm(f, 1.0), direct, rtol=1e-13)
    assert np.isclose(direct, np.sqrt(2 * np.pi), rtol=1e-13)
    # ||1||_0 = sqrt(2 pi) under this normalization
    assert np.isclose(spectral.sobolev_norm(np.ones(N), 0.0), np.sqrt(2 * np.pi), rtol=1e-14)


def test_sobolev_norm_monotone_in_s():
    rng = np.random.default_rng(1)
    f = random_trig(rng)
    norms = [spectral.sobolev_norm(f, s) for s in (0.0, 0.5, 1.0, 1.5, 2.0, 4.0)]
    assert all(b >= a * (1 - 1e-13) for a, b in zip(norms, norms[1:]))


def test_krasny_filter():
    f = np.cos(ALPHA)
    assert np.allclose(spectral.krasny_filter(f, 1e-13), f, atol=1e-15)
    assert np.allclose(spectral.krasny_filter(np.zeros(N), 1e-13), 0.0)
    noisy = np.cos(ALPHA) + 1e-15 * np.cos(7 * ALPHA)
    cleaned = spectral.krasny_filter(noisy, 1e-13)
    assert np.allclose(cleaned, np.cos(ALPHA), atol=1e-16)
    # mode 7 is zeroed exactly in coefficient space; re-transforming the
    # physical samples only reintroduces transform roundoff
    assert abs(spectral.coefficients(cleaned)[7]) < 1e-17


def test_resample_round_trip():
    rng = np.random.default_rng(2)
    f = random_trig(rng, kmax=10)
    up = spectral.resample(f, 4 * N)
    assert np.allclose(up[:: 4], f, atol=1e-12)
    back = spectral.resample(up, N)
    assert np.allclose(back, f, atol=1e-12)


# -- spec invariants as property tests ---------------------------------------

coeff = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@st.composite
def trig_polys(draw, zero_mean=False):
    n_modes = draw(st.integers(min_value=1, max_value=8))
    f = np.zeros(N) if zero_mean else draw(coeff) * np.ones(N)
    for k in range(1, n_modes + 1):
        f = f + draw(coeff) * np.cos(k * ALPHA) + draw(coeff) * np.sin(k * ALPHA)
    return f


@settings(max_examples=40, deadline=None)
@given(trig_polys())
def test_hilbert_squared_is_minus_projection(f):
    hh = spectral.hilbert(spectral.hilbert(f))
    target = -spectral.project_zero_mean(f)
    scale = 1.0 + np.max(np.abs(target))
    assert np.max(np.abs(hh - target)) / scale < 1e-12


@settings(max_examples=40, deadline=None)
@given(trig_polys(zero_mean=True))
def test_derivative_inverts_antiderivative(f):
    back = spectral.derivative(spectral.antiderivative(f), 1)
    scale = 1.0 + np.max(np.abs(f))
    assert np.max(np.abs(back - f)) / scale < 1e-12


@settings(max_examples=40, deadline=None)
@given(trig_polys())
def test_lambda_is_hilbert_derivative(f):
    lhs = spectral.fractional_lambda(f, 1.0)
    rhs = spectral.hilbert(spectral.derivative(f, 1))
    scale = 1.0 + np.max(np.abs(rhs))
    assert np.max(np.abs(lhs - rhs)) / scale < 1e-12


@settings(max_examples=40, deadline=None)
@given(trig_polys(), trig_polys(), coeff, coeff)
def test_linearity(f, g, a, b):
    for op in (
        lambda x: spectral.derivative(x, 1),
        spectral.hilbert,
        spectral.project_zero_mean,
        lambda x: spectral.fractional_lambda(x, 1.5),
    ):
        lhs = op(a * f + b * g)
        rhs = a * op(f) + b * op(g)
        scale = 1.0 + np.max(np.abs(rhs))
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-12


def test_interpolation_inequality_unit_constant():
    # ||f||_m <= ||f||_s^(m/s) ||f||_0^(1-m/s) holds with C = 1 for the
    # (1+k^2)^(s/2) multiplier (Hoelder on the coefficient sums)
    rng = np.random.default_rng(3)
    for _ in range(50):
        f = spectral.project_zero_mean(random_trig(rng))
        for m, s in ((1.0, 2.0), (2.0, 4.0), (1.5, 3.0)):
            lhs = spectral.sobolev_norm(f, m)
            rhs = spectral.sobolev_norm(f, s) ** (m / s) * spectral.sobolev_norm(f, 0.0) ** (1 - m / s)
            assert lhs <= rhs * (1 + 1e-12)
