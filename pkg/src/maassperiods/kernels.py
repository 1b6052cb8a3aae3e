"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` version and a vectorised numpy
version. The public names at the bottom of the module point at one set,
chosen by :data:`maassperiods._accel.USE_NUMBA`. Both sets stay importable
(``*_nb`` / ``*_np``) so the benchmark and the tests can compare them.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._accel import USE_NUMBA, njit, prange

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# trapezoid tuning for the shifted-line Bessel integral, validated against
# mpmath over 0 <= R <= 50, 1e-3 <= x <= 160
_STEP_DIV = 32.0
_DECAY = 40.0

# K-table layout: Chebyshev panels uniform in log(x)
TABLE_PANEL_WIDTH = 0.05
TABLE_DEGREE = 20


class KTable(NamedTuple):
    """Piecewise Chebyshev table of the scaled K_{iR} on [x_lo, x_hi]."""

    R: float
    log_lo: float
    inv_width: float
    coef: np.ndarray  # (npanel, degree+1)
    x_lo: float
    x_hi: float


# ---------------------------------------------------------------------------
# scaled K_{iR}(x) = exp(pi R / 2) K_{iR}(x)


def _kb_params(R, x):
    d0 = min(HALF_PI, 1.0 / max(R, 1.0))
    beta = math.asin(min(R / x, 1.0)) if R > 0.0 else 0.0
    beta = min(beta, HALF_PI - d0)
    cb = math.cos(beta)
    sb = math.sin(beta)
    xc = x * cb
    h = min((HALF_PI - beta) * math.pi / _STEP_DIV, 0.7 / math.sqrt(xc), 0.25)
    T = math.acosh(1.0 + _DECAY / xc)
    n = int(T / h) + 1
    return beta, sb, xc, h, n


_kb_params_nb = njit(cache=True)(_kb_params)


@njit(cache=True)
def _kbessel_nb(R, x):
    beta, sb, xc, h, n = _kb_params_nb(R, x)
    xs = x * sb
    acc = 0.5
    for k in range(1, n + 1):
        t = k * h
        acc += math.exp(-xc * (math.cosh(t) - 1.0)) * math.cos(R * t - xs * math.sinh(t))
    return h * acc * math.exp(R * (HALF_PI - beta) - xc)


@njit(cache=True, parallel=True)
def kbessel_array_nb(R, xs):
    out = np.empty(xs.shape[0])
    for i in prange(xs.shape[0]):
        out[i] = _kbessel_nb(R, xs[i])
    return out


def kbessel_np(R: float, x: float) -> float:
    beta, sb, xc, h, n = _kb_params(R, x)
    t = h * np.arange(1, n + 1)
    vals = np.exp(-xc * (np.cosh(t) - 1.0)) * np.cos(R * t - x * sb * np.sinh(t))
    return float(h * (0.5 + vals.sum()) * math.exp(R * (HALF_PI - beta) - xc))


def kbessel_array_np(R, xs):
    xs = np.asarray(xs, dtype=float)
    return np.array([kbessel_np(R, float(x)) for x in xs.ravel()]).reshape(xs.shape)


# ---------------------------------------------------------------------------
# Chebyshev table


def build_table(R: float, x_lo: float, x_hi: float) -> KTable:
    """Tabulate the scaled K_{iR} on [x_lo, x_hi] (panels in log x)."""
    log_lo = math.log(x_lo)
    npan = max(1, int(math.ceil((math.log(x_hi) - log_lo) / TABLE_PANEL_WIDTH)))
    deg = TABLE_DEGREE
    nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    centers = log_lo + (np.arange(npan) + 0.5) * TABLE_PANEL_WIDTH
    logx = centers[:, None] + 0.5 * TABLE_PANEL_WIDTH * nodes[None, :]
    vals = kbessel_array(float(R), np.exp(logx).ravel()).reshape(npan, deg + 1)
    # discrete Chebyshev transform on first-kind nodes
    k = np.arange(deg + 1)
    T = np.cos(np.outer(k, np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1)))
    coef = (2.0 / (deg + 1)) * vals @ T.T
    coef[:, 0] *= 0.5
    return KTable(float(R), log_lo, 1.0 / TABLE_PANEL_WIDTH, np.ascontiguousarray(coef),
                  float(x_lo), float(math.exp(log_lo + npan * TABLE_PANEL_WIDTH)))


@njit(cache=True)
def _table_point_nb(x, log_lo, inv_w, coef):
    u = (math.log(x) - log_lo) * inv_w
    j = int(u)
    if j >= coef.shape[0]:
        j = coef.shape[0] - 1
    t = 2.0 * (u - j) - 1.0
    deg = coef.shape[1] - 1
    b1 = 0.0
    b2 = 0.0
    for k in range(deg, 0, -1):
        b0 = coef[j, k] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return coef[j, 0] + t * b1 - b2


def table_eval_np(table: KTable, xs):
    xs = np.asarray(xs, dtype=float)
    u = (np.log(xs) - table.log_lo) * table.inv_width
    j = np.minimum(u.astype(np.int64), table.coef.shape[0] - 1)
    t = 2.0 * (u - j) - 1.0
    c = table.coef[j]
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for k in range(c.shape[-1] - 1, 0, -1):
        b1, b2 = c[..., k] + 2.0 * t * b1 - b2, b1
    return c[..., 0] + t * b1 - b2


@njit(cache=True, parallel=True)
def table_eval_nb(log_lo, inv_w, coef, xs):
    out = np.empty(xs.shape[0])
    for i in prange(xs.shape[0]):
        out[i] = _table_point_nb(xs[i], log_lo, inv_w, coef)
    return out


# ---------------------------------------------------------------------------
# fundamental-domain reduction for PSL2(Z)


@njit(cache=True)
def _reduce_point_nb(x, y, max_steps):
    for _ in range(max_steps):
        x -= math.floor(x + 0.5)
        r = x * x + y * y
        if r >= 1.0 - 1e-14:
            return x, y, True
        x = -x / r
        y = y / r
    return x, y, False


@njit(cache=True, parallel=True)
def reduce_points_nb(xs, ys, max_steps):
    n = xs.shape[0]
    xo = np.empty(n)
    yo = np.empty(n)
    ok = np.empty(n, dtype=np.bool_)
    for i in prange(n):
        a, b, c = _reduce_point_nb(xs[i], ys[i], max_steps)
        xo[i] = a
        yo[i] = b
        ok[i] = c
    return xo, yo, ok


def reduce_points_np(xs, ys, max_steps):
    x = np.array(xs, dtype=float, copy=True)
    y = np.array(ys, dtype=float, copy=True)
    ok = np.zeros(x.shape, dtype=bool)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(max_steps):
        if not active.any():
            break
        xa = x[active]
        ya = y[active]
        xa -= np.floor(xa + 0.5)
        r = xa * xa + ya * ya
        done = r >= 1.0 - 1e-14
        xa = np.where(done, xa, -xa / r)
        ya = np.where(done, ya, ya / r)
        x[active] = xa
        y[active] = ya
        idx = np.flatnonzero(active)
        ok[idx[done]] = True
        active[idx[done]] = False
    return x, y, ok


# ---------------------------------------------------------------------------
# Fourier series of a Maass form: sum_n b_n sqrt(y) Kscaled(2 pi n y) trig(2 pi n x)


@njit(cache=True)
def _series_point_nb(x, y, b, odd, R, log_lo, inv_w, coef, x_lo, x_hi):
    c1 = math.cos(TWO_PI * x)
    s1 = math.sin(TWO_PI * x)
    c = 1.0
    s = 0.0
    total = 0.0
    for n in range(1, b.shape[0] + 1):
        c, s = c * c1 - s * s1, s * c1 + c * s1
        arg = TWO_PI * n * y
        if arg > x_hi:
            break
        if arg >= x_lo:
            k = _table_point_nb(arg, log_lo, inv_w, coef)
        else:
            k = _kbessel_nb(R, arg)
        total += b[n - 1] * k * (s if odd else c)
    return total * math.sqrt(y)


@njit(cache=True, parallel=True)
def series_values_nb(xs, ys, b, odd, R, log_lo, inv_w, coef, x_lo, x_hi, reduce, max_steps):
    n = xs.shape[0]
    out = np.empty(n)
    ok = np.ones(n, dtype=np.bool_)
    for i in prange(n):
        x = xs[i]
        y = ys[i]
        if reduce:
            x, y, good = _reduce_point_nb(x, y, max_steps)
            ok[i] = good
        out[i] = _series_point_nb(x, y, b, odd, R, log_lo, inv_w, coef, x_lo, x_hi)
    return out, ok


def series_values_np(xs, ys, b, odd, R, table: KTable, reduce, max_steps):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if reduce:
        xs, ys, ok = reduce_points_np(xs, ys, max_steps)
    else:
        ok = np.ones(xs.shape, dtype=bool)
    nmax = int(min(len(b), math.floor(table.x_hi / (TWO_PI * max(ys.min(), 1e-300))) + 1)) if xs.size else 0
    out = np.zeros(xs.shape)
    for n in range(1, nmax + 1):
        arg = TWO_PI * n * ys
        live = arg <= table.x_hi
        if not live.any():
            break
        k = np.zeros(xs.shape)
        in_tab = live & (arg >= table.x_lo)
        if in_tab.any():
            k[in_tab] = table_eval_np(table, arg[in_tab])
        low = live & (arg < table.x_lo)
        for i in np.flatnonzero(low):
            k[i] = kbessel_np(R, float(arg[i]))
        trig = np.sin(TWO_PI * n * xs) if odd else np.cos(TWO_PI * n * xs)
        out += b[n - 1] * k * trig
    return out * np.sqrt(ys), ok


# ---------------------------------------------------------------------------
# public dispatch

if USE_NUMBA:

    def kbessel_scaled(R: float, x: float) -> float:
        return float(_kbessel_nb(float(R), float(x)))

    def kbessel_array(R, xs):
        xs = np.ascontiguousarray(xs, dtype=float)
        return kbessel_array_nb(float(R), xs.ravel()).reshape(xs.shape)

    def table_eval(table: KTable, xs):
        xs = np.ascontiguousarray(xs, dtype=float)
        return table_eval_nb(table.log_lo, table.inv_width, table.coef, xs.ravel()).reshape(xs.shape)

    def reduce_points(xs, ys, max_steps=10_000):
        xs = np.ascontiguousarray(xs, dtype=float)
        ys = np.ascontiguousarray(ys, dtype=float)
        xo, yo, ok = reduce_points_nb(xs.ravel(), ys.ravel(), max_steps)
        return xo.reshape(xs.shape), yo.reshape(xs.shape), ok.reshape(xs.shape)

    def series_values(xs, ys, b, odd, table: KTable, reduce=True, max_steps=10_000):
        xs = np.ascontiguousarray(xs, dtype=float)
        ys = np.ascontiguousarray(ys, dtype=float)
        out, ok = series_values_nb(xs.ravel(), ys.ravel(), np.ascontiguousarray(b, dtype=float),
                                   bool(odd), table.R, table.log_lo, table.inv_width, table.coef,
                                   table.x_lo, table.x_hi, bool(reduce), max_steps)
        return out.reshape(xs.shape), ok.reshape(xs.shape)

else:
    kbessel_scaled = kbessel_np
    kbessel_array = kbessel_array_np
    table_eval = table_eval_np
    reduce_points = reduce_points_np

    def series_values(xs, ys, b, odd, table: KTable, reduce=True, max_steps=10_000):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out, ok = series_values_np(xs.ravel(), ys.ravel(), np.asarray(b, dtype=float), bool(odd),
                                   table.R, table, reduce, max_steps)
        return out.reshape(xs.shape), ok.reshape(xs.shape)
