"""Special functions: imaginary-order K-Bessel, complex Gamma and the
Gamma-factor ratios that connect periods with Dirichlet series."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import ConvergenceError, GammaPoleError, RangeError

R_MAX = 50.0
X_MIN = 1e-3


@dataclass(frozen=True)
class SpectralParameter:
    """Principal-series parameter: eigenvalue 1/4 + R^2, lambda = 2iR."""

    R: float

    def __post_init__(self):
        if not (self.R >= 0.0):
            raise ValueError("R must be non-negative")

    @property
    def lam(self) -> complex:
        return 2j * self.R

    @property
    def mu(self) -> float:
        return 0.25 + self.R * self.R


def _check_box(R: float, x) -> None:
    if not 0.0 <= R <= R_MAX:
        raise RangeError(f"R={R} outside [0, {R_MAX}]")
    xmin = float(np.min(x))
    if xmin <= 0.0:
        raise RangeError("K-Bessel argument must be positive")
    if xmin < X_MIN:
        raise RangeError(f"x={xmin} below {X_MIN}; accuracy not guaranteed")


def bessel_k_imag(R: float, x: float) -> float:
    """exp(pi R/2) K_{iR}(x), real, relative accuracy about 1e-13 away from zeros."""
    _check_box(R, x)
    return kernels.kbessel_scaled(R, x)


def bessel_k_imag_array(R: float, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    _check_box(R, xs)
    return kernels.kbessel_array(R, xs)


def _is_nonpositive_integer(z: complex, tol: float = 0.0) -> bool:
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    n = round(z.real)
    return n <= 0 and abs(z.real - n) <= tol


def gamma_complex(z: complex) -> complex:
    if _is_nonpositive_integer(z):
        raise GammaPoleError(f"Gamma has a pole at {z}")
    return complex(special.gamma(complex(z)))


def log_gamma(z: complex) -> complex:
    if _is_nonpositive_integer(z):
        raise GammaPoleError(f"Gamma has a pole at {z}")
    return complex(special.loggamma(complex(z)))


def gamma_factor(s: complex) -> complex:
    """pi^{-s/2} Gamma(s/2) / (pi^{-(1-s)/2} Gamma((1-s)/2))."""
    s = complex(s)
    if _is_nonpositive_integer(s / 2):
        raise GammaPoleError(f"Gamma(s/2) has a pole at s={s}")
    if _is_nonpositive_integer((1 - s) / 2):
        return 0j
    return cmath.exp((0.5 - s) * math.log(math.pi) + log_gamma(s / 2) - log_gamma((1 - s) / 2))


def log_mellin_factor(s: complex, R: float) -> complex:
    s = complex(s)
    a = (s + 0.5 + 1j * R) / 2
    b = (s + 0.5 - 1j * R) / 2
    if _is_nonpositive_integer(a, 1e-14) or _is_nonpositive_integer(b, 1e-14):
        raise GammaPoleError(f"mellin factor has a pole at s={s}")
    return ((s - 1.5) * math.log(2.0) - (s + 0.5) * math.log(2 * math.pi)
            + log_gamma(a) + log_gamma(b))


def mellin_factor(s: complex, R: float) -> complex:
    """int_0^inf sqrt(y) K_{iR}(2 pi y) y^{s-1} dy in closed form (unscaled K)."""
    return cmath.exp(log_mellin_factor(s, R))


def log_c_lambda(R: float) -> complex:
    lam = 2j * R
    return math.log(2.0) + (1 - lam) / 2 * math.log(math.pi) - log_gamma((1 - lam) / 2)


def c_lambda(R: float) -> complex:
    """2 pi^{(1-lam)/2} / Gamma((1-lam)/2): matrix-coefficient normalisation of K_{lam,n}."""
    return cmath.exp(log_c_lambda(R))


def k_lambda_n(R: float, n: int, y: float, route: str = "closed_form") -> complex:
    """The matrix-coefficient-normalised Bessel function K_{lam,n}(y), lam = 2iR."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if y <= 0:
        raise ValueError("y must be positive")
    if route == "closed_form":
        x = 2 * math.pi * abs(n) * y
        k = bessel_k_imag(R, x)
        # exp(-pi R/2) undoes the kernel scaling; c(lam) is of size exp(+pi R/2)
        pref = cmath.exp(log_c_lambda(R) - math.pi * R / 2 - 2j * R * math.log(abs(n)))
        return complex(pref * math.sqrt(y) * k)
    if route == "defining_integral":
        return _k_lambda_n_integral(R, n, y)
    raise ValueError(f"unknown route {route!r}")


def _k_lambda_n_integral(R: float, n: int, y: float) -> complex:
    # |n|^{-lam/2} y^{(lam+1)/2} int_R (1+u^2)^{(lam-1)/2} e^{-2 pi i n y u} du,
    # the integrand being even, in working precision covering the e^{-2 pi |n| y}
    # cancellation of the oscillatory tail
    import mpmath

    xi_f = 2 * math.pi * abs(n) * y
    dps = 20 + int(math.ceil(xi_f / math.log(10)))
    with mpmath.workdps(dps):
        lam = 2j * mpmath.mpf(R)
        xi = 2 * mpmath.pi * abs(n) * mpmath.mpf(y)
        f = lambda u: (1 + u * u) ** ((lam - 1) / 2) * mpmath.cos(xi * u)  # noqa: E731
        try:
            J = 2 * mpmath.quadosc(f, [0, mpmath.inf], omega=xi)
        except Exception as exc:  # mpmath raises bare errors on failure
            raise ConvergenceError(f"oscillatory quadrature failed: {exc}") from exc
        val = mpmath.mpf(abs(n)) ** (-lam / 2) * mpmath.mpf(y) ** ((lam + 1) / 2) * J
        return complex(val)
