import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from maassperiods import specialfn as sf
from maassperiods.acceptance import mellin_quadrature
from maassperiods.errors import GammaPoleError, RangeError

R_EVEN = 13.779751351890738


def k0_series(x, terms=40):
    # K_0(x) = -(ln(x/2) + gamma) I_0(x) + sum (x^2/4)^k / (k!)^2 H_k
    acc = 0.0
    h = 0.0
    t = 1.0
    i0 = 0.0
    for k in range(terms):
        if k:
            h += 1.0 / k
            t *= (x * x / 4) / (k * k)
        i0 += t
        acc += t * h
    return -(math.log(x / 2) + np.euler_gamma) * i0 + acc


def test_k0_power_series_oracle():
    assert abs(k0_series(1.0) - 0.4210244382) < 1e-10
    assert abs(sf.bessel_k_imag(0.0, 1.0) - k0_series(1.0)) < 1e-13


def test_k0_asymptotic():
    x = 20.0
    approx = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
    assert abs(sf.bessel_k_imag(0.0, x) / approx - 1) < 0.01


@pytest.mark.parametrize("R", [0.0, 0.7, 5.0, 9.53, 13.78, 17.74, 30.0, 50.0])
@pytest.mark.parametrize("x", [1e-3, 0.1, 1.0, 7.0, 14.0, 25.0, 80.0])
def test_against_mpmath(R, x):
    with mpmath.workdps(40):
        ref = float(mpmath.exp(mpmath.pi * R / 2) * mpmath.besselk(1j * R, x).real)
    val = sf.bessel_k_imag(R, x)
    assert isinstance(val, float)
    # below the turning point x = R the function oscillates; measure against its O(1) envelope there
    env = max(abs(ref), 0.1 if x < R else 0.0)
    assert abs(val - ref) <= 1e-10 * env


@pytest.mark.parametrize("R", [0.0, 5.0, 13.78])
@pytest.mark.parametrize("x", [0.5, 3.0, 12.0, 30.0])
def test_bessel_ode_residual(R, x):
    h = 1e-3 * x
    f = [sf.bessel_k_imag(R, x + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    res = x * x * d2 + x * d1 - (x * x - R * R) * f[2]
    scale = max(abs(x * x * d2), abs(x * d1), abs((x * x + R * R) * f[2]))
    assert abs(res) <= 1e-6 * scale


@pytest.mark.parametrize("R", [5.0, 13.78])
def test_monotone_beyond_turning_point(R):
    xs = np.linspace(R + 0.5, R + 40, 200)
    v = sf.bessel_k_imag_array(R, xs)
    assert np.all(v > 0) and np.all(np.diff(v) < 0)


def test_array_matches_scalar():
    xs = np.linspace(0.2, 40, 57)
    v = sf.bessel_k_imag_array(R_EVEN, xs)
    assert np.allclose(v, [sf.bessel_k_imag(R_EVEN, x) for x in xs], rtol=0, atol=1e-15)


@pytest.mark.parametrize("R, x", [(60.0, 1.0), (-1.0, 1.0), (5.0, 0.0), (5.0, 1e-5)])
def test_range_errors(R, x):
    with pytest.raises(RangeError):
        sf.bessel_k_imag(R, x)


def test_gamma_values():
    assert abs(sf.gamma_complex(0.5) - math.sqrt(math.pi)) < 1e-14
    assert abs(sf.gamma_complex(-0.5) + 2 * math.sqrt(math.pi)) < 1e-13
    with pytest.raises(GammaPoleError):
        sf.gamma_complex(-3)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=8, allow_nan=False, allow_infinity=False))
def test_gamma_recurrence(z):
    if any(abs(z + n) < 1e-3 for n in range(0, 10)):
        return
    g, g1 = sf.gamma_complex(z), sf.gamma_complex(z + 1)
    assert abs(z * g - g1) <= 1e-12 * max(1.0, abs(g1))


def test_gamma_factor_values():
    assert abs(sf.gamma_factor(0.5) - 1) < 1e-15
    assert abs(sf.gamma_factor(2) + 1 / (2 * math.pi ** 2)) < 1e-14
    assert abs(sf.gamma_factor(2) - (-0.05066059)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 5), st.floats(-6, 6))
def test_gamma_factor_reflection(a, b):
    s = complex(a, b)
    if min(abs(s - k) for k in range(-12, 12)) < 1e-2:
        return
    assert abs(sf.gamma_factor(s) * sf.gamma_factor(1 - s) - 1) < 1e-10


@pytest.mark.parametrize("s", [2.0, 1.3 + 0.4j, 2.5 - 1j])
@pytest.mark.parametrize("R", [5.0, 9.53, 13.78])
def test_mellin_factor_quadrature(s, R):
    ref = mellin_quadrature(s, R)
    assert abs(sf.mellin_factor(s, R) - ref) <= 1e-8 * abs(ref)


def test_mellin_factor_symmetry_and_n_scaling():
    s, R = 1.7 + 0.3j, 13.78
    a = cmath.exp(sf.log_mellin_factor(s, R))
    # Gamma factors symmetric in +-lambda/2
    b = 2 ** (s - 1.5) * (2 * math.pi) ** (-s - 0.5) * sf.gamma_complex((s + 0.5 - 1j * R) / 2) \
        * sf.gamma_complex((s + 0.5 + 1j * R) / 2)
    assert abs(a - b) < 1e-12 * abs(a)
    ref = mellin_quadrature(2.0, R, n=3)
    assert abs(3 ** (-2.5) * sf.mellin_factor(2.0, R) - ref) <= 1e-8 * abs(ref)


def test_mellin_pole():
    with pytest.raises(GammaPoleError):
        sf.mellin_factor(-0.5 + 13.78j, 13.78)


def test_k_lambda_n_examples():
    a = sf.k_lambda_n(R_EVEN, 1, 1.0, "closed_form")
    b = sf.k_lambda_n(R_EVEN, 1, 1.0, "defining_integral")
    assert abs(a - b) <= 1e-7 * abs(b)
    assert abs(abs(sf.k_lambda_n(R_EVEN, 3, 0.7)) - abs(sf.k_lambda_n(R_EVEN, -3, 0.7))) < 1e-15
    # y -> 2y through the closed form: c |n|^-lam sqrt(y) K(2 pi |n| y)
    y, n = 0.4, 2
    ratio = sf.k_lambda_n(R_EVEN, n, 2 * y) / sf.k_lambda_n(R_EVEN, n, y)
    expect = math.sqrt(2) * sf.bessel_k_imag(R_EVEN, 4 * math.pi * n * y) / sf.bessel_k_imag(R_EVEN, 2 * math.pi * n * y)
    assert abs(ratio - expect) < 1e-13 * abs(expect)


def test_c_lambda_modulus():
    # |Gamma((1 - 2iR)/2)|^2 = pi / cosh(pi R)
    R = R_EVEN
    expect = 2 * math.sqrt(math.pi) * math.sqrt(math.cosh(math.pi * R) / math.pi)
    assert abs(abs(sf.c_lambda(R)) - expect) < 1e-12 * expect


def test_spectral_parameter():
    p = sf.SpectralParameter(2.0)
    assert p.lam == 4j and p.mu == 4.25
    with pytest.raises(ValueError):
        sf.SpectralParameter(-1.0)
