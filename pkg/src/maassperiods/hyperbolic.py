"""Moebius maps, PSL2(Z) reduction and the geometry of closed and limiting geodesics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import kernels
from .errors import RationalInputError, ReductionError
from .exactfield import QuadNumber, cf_expand, cf_to_hyperbolic

INF = math.inf
MAX_REDUCTION_STEPS = 10_000

Matrix = tuple[tuple[int, int], tuple[int, int]]


def _is_inf(z) -> bool:
    return isinstance(z, float) and math.isinf(z)


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d).

    Entries may be ints, Fractions, QuadNumbers (exact) or floats.
    """

    a: Any
    b: Any
    c: Any
    d: Any

    @classmethod
    def from_matrix(cls, m) -> MoebiusMap:
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    @property
    def exact(self) -> bool:
        return not any(isinstance(e, float) for e in (self.a, self.b, self.c, self.d))

    def det(self):
        return self.a * self.d - self.b * self.c

    def det_sign(self) -> int:
        d = self.det()
        if isinstance(d, QuadNumber):
            return d.sign()
        return (d > 0) - (d < 0)

    def require_orientation_preserving(self) -> None:
        if self.det_sign() <= 0:
            raise ValueError("geometry operations need det > 0")

    def floats(self) -> tuple[float, float, float, float]:
        return tuple(float(e) for e in (self.a, self.b, self.c, self.d))

    def __call__(self, z):
        return moebius_apply(self, z)

    def __matmul__(self, other: MoebiusMap) -> MoebiusMap:
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> MoebiusMap:
        # projective inverse; scaling by det is irrelevant
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def to_json(self) -> list:
        def enc(e):
            if isinstance(e, QuadNumber):
                return e.to_json()
            if isinstance(e, Fraction):
                return f"{e.numerator}/{e.denominator}"
            return e

        return [[enc(self.a), enc(self.b)], [enc(self.c), enc(self.d)]]


def moebius_apply(M: MoebiusMap, z):
    """Fractional-linear action on H and on the boundary (``INF`` is the cusp)."""
    if M.det() == 0:
        raise ValueError("singular Moebius map")
    if isinstance(z, complex) or (isinstance(z, float) and not _is_inf(z)):
        a, b, c, d = M.floats()
        if _is_inf(z):
            return a / c if c else INF
        den = c * z + d
        if den == 0:
            return INF
        return (a * z + b) / den
    if _is_inf(z):
        if M.c == 0:
            return INF
        return QuadNumber.coerce(M.a) / M.c if M.exact else float(M.a) / float(M.c)
    # exact boundary point
    z = QuadNumber.coerce(z)
    den = M.c * z + M.d
    if den == 0:
        return INF
    return (M.a * z + M.b) / den


S_MATRIX: Matrix = ((0, -1), (1, 0))
T_MATRIX: Matrix = ((1, 1), (0, 1))


def _imul(A, B) -> Matrix:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def _iinv(A) -> Matrix:
    return ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))


def reduce_to_fundamental_domain(z: complex, max_steps: int = MAX_REDUCTION_STEPS):
    """Return (z*, M) with z* = M(z) in the standard fundamental domain of PSL2(Z)."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half-plane")
    M: Matrix = ((1, 0), (0, 1))
    x, y = z.real, z.imag
    for _ in range(max_steps):
        n = math.floor(x + 0.5)
        if n:
            x -= n
            M = _imul(((1, -n), (0, 1)), M)
        r = x * x + y * y
        if r >= 1.0 - 1e-14:
            return complex(x, y), M
        x, y = -x / r, y / r
        M = _imul(S_MATRIX, M)
    raise ReductionError(f"no convergence after {max_steps} steps from {z}")


def reduce_many(zs, max_steps: int = MAX_REDUCTION_STEPS) -> np.ndarray:
    """Vectorised reduction (no matrices); raises if any point fails."""
    zs = np.asarray(zs, dtype=complex)
    x, y, ok = kernels.reduce_points(zs.real, zs.imag, max_steps)
    if not np.all(ok):
        raise ReductionError(f"{int((~ok).sum())} points failed to reduce")
    return x + 1j * y


def hyperbolic_distance(z: complex, w: complex) -> float:
    dz = z - w
    return math.acosh(1.0 + (dz.real ** 2 + dz.imag ** 2) / (2.0 * z.imag * w.imag))


# ---------------------------------------------------------------------------
# closed geodesics


@dataclass(frozen=True)
class ClosedGeodesic:
    """Closed geodesic through the quadratic irrational ``alpha``.

    ``alpha`` is the endpoint the limiting geodesic runs into; ``gamma`` has
    ``alpha`` as attracting fixed point and the canonical conjugator ``g``
    sends (alpha, alpha_bar, inf) to (inf, 0, beta_prime) so that
    ``g gamma g^-1`` is w -> q w.
    """

    alpha: QuadNumber
    alpha_bar: QuadNumber
    gamma: Matrix
    q: QuadNumber
    L: float
    g: MoebiusMap
    beta_prime: int
    v0: QuadNumber
    _floats: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def alpha_f(self) -> float:
        return self._cache("alpha", lambda: float(self.alpha))

    @property
    def alpha_bar_f(self) -> float:
        return self._cache("alpha_bar", lambda: float(self.alpha_bar))

    @property
    def q_f(self) -> float:
        return self._cache("q", lambda: float(self.q))

    @property
    def v0_f(self) -> float:
        return self._cache("v0", lambda: float(self.v0))

    def _cache(self, key, fn):
        if key not in self._floats:
            self._floats[key] = fn()
        return self._floats[key]

    def q_power_float(self, m: int) -> float:
        """float(q**-m), exact before rounding."""
        key = ("qpow", m)
        if key not in self._floats:
            self._floats[key] = float(self.q ** (-m))
        return self._floats[key]

    def g_inverse(self, w):
        """Map conjugated coordinates back to H (vectorised, float)."""
        a, b = self.alpha_f, self.alpha_bar_f
        w = np.asarray(w, dtype=complex)
        if self.beta_prime == -1:
            return (a * w + b) / (w + 1.0)
        return (-a * w + b) / (-w + 1.0)

    def g_forward(self, z):
        a, b = self.alpha_f, self.alpha_bar_f
        z = np.asarray(z, dtype=complex)
        if self.beta_prime == -1:
            return (z - b) / (a - z)
        return (z - b) / (z - a)

    def reversed(self) -> ClosedGeodesic:
        """Same closed geodesic, approached through the conjugate endpoint."""
        return build_closed_geodesic(self.alpha_bar)

    def to_record(self) -> dict:
        return {
            "alpha": self.alpha.to_json(),
            "alpha_bar": self.alpha_bar.to_json(),
            "gamma": [list(r) for r in self.gamma],
            "q": self.q.to_json(),
            "q_float": self.q_f,
            "L": self.L,
            "g": self.g.to_json(),
            "beta_prime": self.beta_prime,
            "v0": self.v0.to_json(),
        }


def build_closed_geodesic(alpha) -> ClosedGeodesic:
    alpha = QuadNumber.coerce(alpha)
    if alpha.is_rational:
        raise RationalInputError(f"{alpha} is rational")
    M = cf_to_hyperbolic(cf_expand(alpha))
    if M[0][0] * M[1][1] - M[0][1] * M[1][0] == -1:
        M = _imul(M, M)
    if M[0][0] + M[1][1] < 0:
        M = ((-M[0][0], -M[0][1]), (-M[1][0], -M[1][1]))
    mu = M[1][0] * alpha + M[1][1]
    if abs(float(mu)) < 1.0:
        M = _iinv(M)
        mu = M[1][0] * alpha + M[1][1]
    q = mu * mu
    alpha_bar = alpha.conj()
    if alpha > alpha_bar:
        g = MoebiusMap(QuadNumber(1), -alpha_bar, QuadNumber(-1), alpha)
        beta = -1
    else:
        g = MoebiusMap(QuadNumber(1), -alpha_bar, QuadNumber(1), -alpha)
        beta = 1
    v0 = alpha - alpha_bar if alpha > alpha_bar else alpha_bar - alpha
    return ClosedGeodesic(
        alpha=alpha,
        alpha_bar=alpha_bar,
        gamma=M,
        q=q,
        L=math.log(float(q)),
        g=g,
        beta_prime=beta,
        v0=v0,
    )


# ---------------------------------------------------------------------------
# limiting geodesics


@dataclass(frozen=True)
class GeodesicPoint:
    """A point of L_alpha in gamma-reduced conjugated coordinates.

    The point is w = beta' q^{-m} + i u with u in [v1, q v1); ``x_exact`` is
    beta' q^{-m} as an exact field element.
    """

    t: float
    m: int
    x_exact: QuadNumber
    u: float

    @property
    def w(self) -> complex:
        return complex(float(self.x_exact), self.u)


@dataclass(frozen=True)
class LimitingGeodesic:
    """Vertical geodesic from the cusp down to ``closed.alpha``.

    Unit-speed parameter t with y = exp(-t); t = 0 is the basepoint alpha + i.
    """

    closed: ClosedGeodesic
    v1: float | None = None

    @property
    def v1_value(self) -> float:
        return self.closed.v0_f if self.v1 is None else float(self.v1)

    @property
    def basepoint(self) -> complex:
        return complex(self.closed.alpha_f, 1.0)


def winding_count(lg: LimitingGeodesic, t: float) -> int:
    c = lg.closed
    return math.floor((t + math.log(c.v0_f) - math.log(lg.v1_value)) / c.L)


def geodesic_point(lg: LimitingGeodesic, t: float) -> GeodesicPoint:
    c = lg.closed
    v1 = lg.v1_value
    m = winding_count(lg, t)
    u = math.exp(t + math.log(c.v0_f) - m * c.L)
    # rounding at the bin edges
    if u >= c.q_f * v1:
        m += 1
        u = math.exp(t + math.log(c.v0_f) - m * c.L)
    elif u < v1:
        m -= 1
        u = math.exp(t + math.log(c.v0_f) - m * c.L)
    x = c.beta_prime * (c.q ** (-m))
    return GeodesicPoint(t=t, m=m, x_exact=x, u=u)


def geodesic_points_h(lg: LimitingGeodesic, ts) -> np.ndarray:
    """Points of L_alpha in H for many t, via exact (m, u) reduction for t > 0."""
    ts = np.asarray(ts, dtype=float)
    c = lg.closed
    v1 = lg.v1_value
    out = np.empty(ts.shape, dtype=complex)
    m = np.floor((ts + math.log(c.v0_f) - math.log(v1)) / c.L).astype(np.int64)
    shallow = m <= 0
    out[shallow] = c.alpha_f + 1j * np.exp(-ts[shallow])
    if (~shallow).any():
        md = m[~shallow]
        u = np.exp(ts[~shallow] + math.log(c.v0_f) - md * c.L)
        x = c.beta_prime * np.array([c.q_power_float(int(k)) for k in md])
        out[~shallow] = c.g_inverse(x + 1j * u)
    return out
