"""Maass cusp forms for PSL2(Z): Hejhal solver, coefficient extension,
evaluation by pullback, coefficient files and axis derivatives."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import optimize

from . import kernels, specialfn
from .errors import (
    ConvergenceError,
    HeckeGateError,
    IllConditionedError,
    NoRootError,
    ReductionError,
    SchemaError,
)
from .hyperbolic import ClosedGeodesic

log = logging.getLogger(__name__)

PARITIES = ("even", "odd")
HECKE_GATE = 1e-4
SQRT3_2 = math.sqrt(3.0) / 2.0
# K-table cut: beyond pi R/2 + this the scaled K is below 1e-17 of its peak
_DECAY_BUDGET = 40.0
CACHE_ENV = "MAASSPERIODS_CACHE"

# reference spectral parameters used by the acceptance suite and the CLI
KNOWN_R = {
    ("odd", 1): 9.53369526135,
    ("odd", 2): 12.17300832468,
    ("even", 1): 13.77975135189,
    ("even", 2): 17.73856338106,
}


def _trig(odd: bool):
    return np.sin if odd else np.cos


@dataclass(frozen=True, eq=False)
class MaassForm:
    """Hecke-normalised cusp form with b_1 = 1.

    phi(x + iy) = sum_n b_n sqrt(y) e^{pi R/2} K_{iR}(2 pi n y) cos(2 pi n x)
    (sin for odd forms).
    """

    R: float
    parity: str
    coeffs: np.ndarray
    provenance: str = "solved"
    hecke_tol: float = HECKE_GATE
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be one of {PARITIES}")
        b = np.ascontiguousarray(self.coeffs, dtype=float)
        b.setflags(write=False)
        object.__setattr__(self, "coeffs", b)

    @property
    def odd(self) -> bool:
        return self.parity == "odd"

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def spec(self) -> specialfn.SpectralParameter:
        return specialfn.SpectralParameter(self.R)

    @cached_property
    def table(self) -> kernels.KTable:
        return kernels.build_table(self.R, 1.0, math.pi * self.R / 2 + _DECAY_BUDGET + 5.0)

    @property
    def whittaker_scale(self) -> complex:
        """kappa with I_s = kappa * mellin_factor(s) * D_{s+1/2, alpha} (full sum over n != 0)."""
        k = 0.5 * math.exp(math.pi * self.R / 2)
        return complex(0, -k) if self.odd else complex(k)

    def b(self, n: int) -> float:
        if n == 0:
            raise ValueError("n must be nonzero")
        if abs(n) > self.M:
            raise ValueError(f"|n| = {abs(n)} exceeds truncation {self.M}")
        v = float(self.coeffs[abs(n) - 1])
        return -v if (n < 0 and self.odd) else v

    def hecke_residuals(self, primes=(2, 3, 5, 7)) -> dict:
        out = {}
        for i, p in enumerate(primes):
            if p * p <= self.M:
                out[f"b{p}^2-b{p * p}-1"] = abs(self.b(p) ** 2 - self.b(p * p) - 1.0)
            for q in primes[i + 1:]:
                if p * q <= self.M:
                    out[f"b{p}b{q}-b{p * q}"] = abs(self.b(p) * self.b(q) - self.b(p * q))
        return out

    def gate_residuals(self) -> dict:
        """The two relations every stored form must satisfy."""
        return {
            "b2b3-b6": abs(self.b(2) * self.b(3) - self.b(6)),
            "b2^2-b4-1": abs(self.b(2) ** 2 - self.b(4) - 1.0),
        }

    def __call__(self, z) -> float:
        return evaluate(self, z)

    def with_coeffs(self, coeffs, **meta) -> MaassForm:
        return MaassForm(self.R, self.parity, coeffs, self.provenance, self.hecke_tol,
                         {**self.meta, **meta})


# ---------------------------------------------------------------------------
# evaluation


def evaluate_many(f: MaassForm, zs, reduce: bool = True) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    if np.any(zs.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    vals, ok = kernels.series_values(zs.real, zs.imag, f.coeffs, f.odd, f.table, reduce=reduce)
    if not np.all(ok):
        raise ReductionError(f"{int((~ok).sum())} points failed to reduce")
    return vals


def evaluate(f: MaassForm, z, reduce: bool = True) -> float:
    """phi(z). With ``reduce=False`` the raw expansion is summed at z itself."""
    return float(evaluate_many(f, np.array([complex(z)]), reduce=reduce)[0])


def pulled_back_values(f: MaassForm, closed: ClosedGeodesic, ws) -> np.ndarray:
    """phi~(w) = phi(g^-1 w) for conjugated coordinates w."""
    return evaluate_many(f, closed.g_inverse(ws))


# ---------------------------------------------------------------------------
# Hejhal's method


def default_M(R: float) -> int:
    """Smallest truncation whose tail is negligible on the domain floor y >= sqrt(3)/2."""
    return int(math.ceil((math.pi * R / 2 + _DECAY_BUDGET) / (2 * math.pi * SQRT3_2))) + 2


def _scaled_k(R: float, args: np.ndarray) -> np.ndarray:
    out = np.zeros(args.shape)
    live = args <= math.pi * R / 2 + _DECAY_BUDGET + 5.0
    if live.any():
        out[live] = kernels.kbessel_array(R, args[live])
    return out


def hejhal_matrix(R: float, parity: str, M: int, Y: float, Q: int) -> np.ndarray:
    """V with V b = 0 for the true coefficient vector b_1..b_M."""
    if Q <= M:
        raise ValueError("need Q > M collocation points")
    odd = parity == "odd"
    cs = _trig(odd)
    xm = (np.arange(1, Q + 1) - 0.5) / (2 * Q)
    xs, ys, ok = kernels.reduce_points(xm, np.full(Q, float(Y)))
    if not np.all(ok):
        raise ReductionError("collocation points failed to reduce")
    n = np.arange(1, M + 1)
    A = cs(2 * math.pi * np.outer(n, xm))  # (M, Q)
    W = np.sqrt(ys)[:, None] * _scaled_k(R, 2 * math.pi * np.outer(ys, n)) * cs(2 * math.pi * np.outer(xs, n))
    V = (2.0 / Q) * (A @ W)
    V[n - 1, n - 1] -= math.sqrt(Y) * kernels.kbessel_array(R, 2 * math.pi * n * Y)
    return V


def hejhal_coefficients(R: float, parity: str, M: int, Y: float, Q: int,
                        cond_max: float = 1e13) -> tuple[np.ndarray, float]:
    V = hejhal_matrix(R, parity, M, Y, Q)
    A = V[1:, 1:]
    rhs = -V[1:, 0]
    # columns decay like K(2 pi n Y); judge conditioning after equilibration
    scale = np.max(np.abs(A), axis=0)
    cond = float(np.linalg.cond(A / scale))
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditionedError(f"collocation system condition {cond:.3g} at R={R}, Y={Y}")
    b = np.empty(M)
    b[0] = 1.0
    b[1:] = np.linalg.solve(A, rhs)
    return b, cond


@dataclass
class _Mismatch:
    parity: str
    M: int
    Y1: float
    Y2: float
    Q: int
    calls: int = 0

    def vector(self, R: float) -> np.ndarray:
        """b_n(Y1) - b_n(Y2) for n = 2..6."""
        self.calls += 1
        b1, _ = hejhal_coefficients(R, self.parity, self.M, self.Y1, self.Q)
        b2, _ = hejhal_coefficients(R, self.parity, self.M, self.Y2, self.Q)
        return b1[1:6] - b2[1:6]


# b_5, b_6 at Y2 ~ 0.85 carry errors ~ eps / |sqrt(Y) K(2 pi n Y)| well above
# 1e-8, so the acceptance gate uses the well-resolved b_2..b_4
GATE_COMPONENTS = 3


def _safe(fn, r):
    try:
        return fn(r)
    except IllConditionedError:
        return np.full(5, np.nan)


def hejhal_solve(parity: str, bracket, M: int | None = None, Y1: float = 0.5, Y2: float = 0.8,
                 Q: int | None = None, tol: float = 1e-8, subdivisions: int = 8) -> MaassForm:
    """Locate the spectral parameter in ``bracket`` and return the form.

    Each of b_2..b_6 computed at Y1 minus the same at Y2 changes sign at an
    eigenvalue (and at poles of the solve). Sign changes on a grid are refined
    with Brent's method and accepted only when the full l2 mismatch is below
    ``tol``.
    """
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}")
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("empty bracket")
    if not (0 < Y1 < Y2 < SQRT3_2):
        raise ValueError("need 0 < Y1 < Y2 < sqrt(3)/2")
    M = M or default_M(hi)
    Q = Q or 2 * M + 8
    mm = _Mismatch(parity, M, Y1, Y2, Q)
    grid = np.linspace(lo, hi, subdivisions + 1)
    F = np.array([_safe(mm.vector, r) for r in grid])
    tried = []
    for comp in range(F.shape[1]):
        for i in range(subdivisions):
            if F[i, comp] * F[i + 1, comp] >= 0:
                continue
            try:
                R = optimize.brentq(lambda r: mm.vector(r)[comp], grid[i], grid[i + 1],
                                    xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
            except IllConditionedError:
                # Brent walked into a singular solve: the sign change is a pole
                tried.append((float("nan"), float("inf")))
                continue
            diff = mm.vector(R)
            mismatch = float(np.linalg.norm(diff[:GATE_COMPONENTS]))
            tried.append((R, mismatch))
            if mismatch < tol:
                b, cond = hejhal_coefficients(R, parity, M, Y1, Q)
                log.info("hejhal: R=%.12f mismatch=%.2e cond=%.2e calls=%d", R, mismatch, cond, mm.calls)
                return MaassForm(R, parity, b, "solved",
                                 meta={"M": M, "Y1": Y1, "Y2": Y2, "Q": Q, "mismatch": mismatch,
                                       "mismatch_b2_b6": float(np.linalg.norm(diff)), "cond": cond})
    if not tried:
        raise NoRootError(f"no sign change of the mismatch in [{lo}, {hi}] ({parity})")
    detail = ", ".join(f"R={r:.6f} mismatch={m:.2e}" for r, m in tried)
    raise NoRootError(f"sign changes in [{lo}, {hi}] are poles, not eigenvalues: {detail}")


def hejhal_scan(parity: str, lo: float, hi: float, width: float = 0.25, **kw) -> list[MaassForm]:
    """Solve on consecutive sub-brackets of [lo, hi]; returns every form found."""
    found = []
    edges = np.arange(lo, hi + 1e-12, width)
    if edges[-1] < hi:
        edges = np.append(edges, hi)
    for a, b in zip(edges[:-1], edges[1:]):
        try:
            f = hejhal_solve(parity, (a, b), **kw)
        except NoRootError:
            continue
        if not any(abs(f.R - g.R) < 1e-6 for g in found):
            found.append(f)
    return found


# ---------------------------------------------------------------------------
# coefficient extension by Fourier inversion at lower heights


def extend_coefficients(f: MaassForm, n_max: int, keep: int = 1,
                        ratio: float = math.sqrt(2.0)) -> MaassForm:
    """Coefficients b_1..b_{n_max} from FFTs of phi along horizontal lines.

    phi is evaluated at x_j + iY (pulled back), so every b_n comes out of the
    automorphic function itself. Each n uses the height where
    |sqrt(Y) K(2 pi n Y)| is largest among alias-free heights. The first
    ``keep`` solved coefficients are retained (default: only b_1 = 1; the
    transform is more accurate than the solve near the truncation).
    """
    R = f.R
    x_cut = math.pi * R / 2 + _DECAY_BUDGET
    x_top = R + 10.0
    y_min = 0.5 * max(R, 1.0) / (2 * math.pi * n_max)
    heights = []
    Y = 0.5
    while True:
        heights.append(Y)
        if Y < y_min:
            break
        Y /= ratio
    n_all = np.arange(1, n_max + 1)
    best_w = np.zeros(n_max)
    best_b = np.zeros(n_max)
    for Y in heights:
        n_serve = min(n_max, int(x_top / (2 * math.pi * Y)) + 1)
        l_max = int(x_cut / (2 * math.pi * Y)) + 1
        P = 1 << int(math.ceil(math.log2(n_serve + l_max + 2)))
        xj = (np.arange(P) + 0.5) / P
        vals = evaluate_many(f, xj + 1j * Y)
        c = np.fft.fft(vals)[1:n_serve + 1] / P
        c *= np.exp(-1j * math.pi * np.arange(1, n_serve + 1) / P)
        proj = -2.0 * c.imag if f.odd else 2.0 * c.real
        nn = n_all[:n_serve]
        w = math.sqrt(Y) * _kernel_values(f, 2 * math.pi * nn * Y)
        better = np.abs(w) > best_w[:n_serve]
        idx = np.flatnonzero(better)
        best_w[idx] = np.abs(w[idx])
        best_b[idx] = proj[idx] / w[idx]
    if np.any(best_w == 0):
        raise ConvergenceError("some coefficients had no usable height")
    k = min(keep, f.M, n_max)
    best_b[:k] = f.coeffs[:k]
    return f.with_coeffs(best_b, extended_to=n_max, extension_heights=len(heights))


def _kernel_values(f: MaassForm, args: np.ndarray) -> np.ndarray:
    out = np.zeros(args.shape)
    tab = (args >= f.table.x_lo) & (args <= f.table.x_hi)
    if tab.any():
        out[tab] = kernels.table_eval(f.table, args[tab])
    low = args < f.table.x_lo
    if low.any():
        out[low] = kernels.kbessel_array(f.R, args[low])
    return out


# ---------------------------------------------------------------------------
# derivatives along the axis of a closed geodesic


@dataclass(frozen=True)
class AxisDerivatives:
    """d^k/dx^k phi~(x + iv) at x = 0, rows k = 0..k_max, columns v."""

    v: np.ndarray
    values: np.ndarray
    errors: np.ndarray


def axis_derivatives_many(f: MaassForm, closed: ClosedGeodesic, vs, k_max: int,
                          rel_h: float = 0.5, degree: int = 40) -> AxisDerivatives:
    if k_max > 8:
        raise ValueError("k_max <= 8")
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    if np.any(vs <= 0):
        raise ValueError("v must be positive")
    coarse = degree - 8
    vals = _cheb_derivs(f, closed, vs, k_max, rel_h, degree)
    alt = _cheb_derivs(f, closed, vs, k_max, rel_h, coarse)
    return AxisDerivatives(vs, vals, np.abs(vals - alt))


def axis_chebyshev(f: MaassForm, closed: ClosedGeodesic, vs, rel_h: float = 0.5,
                   degree: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev coefficients of x -> phi~(x h + iv) on [-1, 1]; returns (coef, h)."""
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    h = rel_h * vs
    w = (h[None, :] * nodes[:, None]) + 1j * vs[None, :]
    samples = pulled_back_values(f, closed, w.ravel()).reshape(w.shape)
    k = np.arange(degree + 1)
    T = np.cos(np.outer(k, np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1)))
    coef = (2.0 / (degree + 1)) * (T @ samples)
    coef[0] *= 0.5
    return coef, h


def chebyshev_derivatives(coef: np.ndarray, h: np.ndarray, k_max: int, xi=0.0) -> np.ndarray:
    """d^k/dx^k at x = xi (absolute offset, same for every column), k = 0..k_max."""
    out = np.empty((k_max + 1, coef.shape[1]))
    cur = coef
    for kk in range(k_max + 1):
        out[kk] = C.chebval(xi / h, cur, tensor=False) / h ** kk
        cur = C.chebder(cur)
    return out


def _cheb_derivs(f, closed, vs, k_max, rel_h, degree):
    coef, h = axis_chebyshev(f, closed, vs, rel_h, degree)
    return chebyshev_derivatives(coef, h, k_max)


def axis_derivatives(f: MaassForm, closed: ClosedGeodesic, v: float, k_max: int,
                     rel_h: float = 0.5, degree: int = 40, tol: float | None = None) -> np.ndarray:
    """[d^k phi~(iv)/dx^k for k = 0..k_max]; raises if the estimate exceeds ``tol``."""
    res = axis_derivatives_many(f, closed, [v], k_max, rel_h, degree)
    if tol is not None and np.any(res.errors[:, 0] > tol):
        raise ConvergenceError(f"derivative estimate above {tol}: {res.errors[:, 0]}")
    return res.values[:, 0]


# ---------------------------------------------------------------------------
# coefficient conversion


def coeff_convert(f: MaassForm, n: int, target: str = "paper_a") -> complex:
    """b_n (``hecke_b``) or a_n = b_n |n|^lam / c(lam) (``paper_a``), lam = 2iR."""
    b = f.b(n)
    if target == "hecke_b":
        return complex(b)
    if target == "paper_a":
        lam = 2j * f.R
        return b * np.exp(lam * math.log(abs(n)) - specialfn.log_c_lambda(f.R))
    raise ValueError(f"unknown target {target!r}")


# ---------------------------------------------------------------------------
# coefficient files


def _check_hecke(f: MaassForm, tol: float) -> None:
    if f.M < 6:
        raise SchemaError("need at least b_1..b_6")
    res = f.gate_residuals()
    bad = {k: v for k, v in res.items() if not v <= tol}
    if bad:
        raise HeckeGateError(f"Hecke residuals above {tol}: {bad}", residuals=res)


def form_to_record(f: MaassForm) -> dict:
    return {
        "group": "PSL2Z",
        "R": f.R,
        "parity": f.parity,
        "normalization": "hecke",
        "coefficients": [[i + 1, float(v)] for i, v in enumerate(f.coeffs)],
        "provenance": f.provenance,
        "meta": {k: v for k, v in f.meta.items() if isinstance(v, (int, float, str))},
    }


def form_from_record(rec: dict, gate: float = HECKE_GATE) -> MaassForm:
    if not isinstance(rec, dict):
        raise SchemaError("coefficient file must hold a JSON object")
    for key in ("group", "R", "parity", "normalization", "coefficients"):
        if key not in rec:
            raise SchemaError(f"missing field {key!r}")
    if rec["group"] != "PSL2Z":
        raise SchemaError(f"unsupported group {rec['group']!r}")
    if rec["normalization"] != "hecke":
        raise SchemaError(f"unsupported normalization {rec['normalization']!r}")
    if rec["parity"] not in PARITIES:
        raise SchemaError(f"parity must be one of {PARITIES}")
    try:
        R = float(rec["R"])
        pairs = sorted((int(n), float(v)) for n, v in rec["coefficients"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed coefficients: {exc}") from exc
    ns = [n for n, _ in pairs]
    if ns != list(range(1, len(ns) + 1)):
        raise SchemaError("coefficients must list n = 1..M without gaps")
    b = np.array([v for _, v in pairs])
    if abs(b[0] - 1.0) > 1e-12:
        raise SchemaError("coefficients must be Hecke-normalised (b_1 = 1)")
    meta = rec.get("meta", {})
    f = MaassForm(R, rec["parity"], b, rec.get("provenance", "imported"), gate,
                  meta if isinstance(meta, dict) else {})
    _check_hecke(f, gate)
    return f


def export_form(f: MaassForm, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(form_to_record(f), indent=1)
    # atomic replace so concurrent readers never see a partial file
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def import_form(path, gate: float = HECKE_GATE) -> MaassForm:
    try:
        rec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    f = form_from_record(rec, gate)
    return MaassForm(f.R, f.parity, f.coeffs, "imported", gate, f.meta)


def coeff_io(path, direction: str, form: MaassForm | None = None):
    if direction == "import":
        return import_form(path)
    if direction == "export":
        if form is None:
            raise ValueError("export needs a form")
        return export_form(form, path)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# persistence cache


def cache_root(explicit=None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "maassperiods"


def cache_key(parity: str, R: float, M: int) -> str:
    return f"{parity}_R{round(R, 10):.10f}_M{M}.json"


def cache_lookup(root, parity: str, R: float, M: int) -> MaassForm | None:
    p = Path(root) / cache_key(parity, R, M)
    if not p.exists():
        return None
    f = import_form(p)
    return MaassForm(f.R, f.parity, f.coeffs, "solved", f.hecke_tol, f.meta)


def cache_store(root, f: MaassForm, M: int | None = None) -> Path:
    return export_form(f, Path(root) / cache_key(f.parity, f.R, M or int(f.meta.get("M", f.M))))


def solve_cached(parity: str, bracket, cache_dir=None, n_extend: int | None = None, **kw) -> MaassForm:
    """hejhal_solve (+ extension) with the on-disk cache keyed by (parity, bracket, M)."""
    root = cache_root(cache_dir)
    lo, hi = map(float, bracket)
    M = kw.get("M") or default_M(hi)
    index = root / "index.json"
    tag = f"{parity}:{lo:.10f}:{hi:.10f}:{M}:{kw.get('Y1', 0.5)}:{kw.get('Y2', 0.8)}:{n_extend}"
    try:
        idx = json.loads(index.read_text()) if index.exists() else {}
    except json.JSONDecodeError:
        idx = {}
    if tag in idx and (root / idx[tag]).exists():
        f = import_form(root / idx[tag])
        return MaassForm(f.R, f.parity, f.coeffs, "solved", f.hecke_tol, f.meta)
    f = hejhal_solve(parity, bracket, **kw)
    if n_extend:
        f = extend_coefficients(f, n_extend)
    name = cache_key(parity, f.R, f.M)
    export_form(f, root / name)
    idx[tag] = name
    root.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=root, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        json.dump(idx, fh, indent=1, sort_keys=True)
    os.replace(tmp, index)
    return f
