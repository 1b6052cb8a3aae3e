"""Twisted Dirichlet series D_{s,alpha} and their link to limiting periods.

With Hecke coefficients (b_{-n} = b_n for even forms, -b_n for odd ones)

    D_{s,alpha} = sum_{n != 0} b_n |n|^{-s} e(n alpha),

and the Mellin transform of sqrt(y) K_{iR}(2 pi y) gives
I_s = kappa * mellin_factor(s, R) * D_{s+1/2, alpha}, kappa = whittaker_scale.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import periods, specialfn
from .errors import DomainError, GammaPoleError, HeckeGateError, PoleError
from .exactfield import QuadNumber
from .hyperbolic import LimitingGeodesic, build_closed_geodesic
from .maass import MaassForm

VARIANTS = ("full", "signed", "positive")
NORMALIZATIONS = ("hecke_b", "paper_a")
DIRECT_SIGMA_MIN = 1.25


@dataclass(frozen=True, eq=False)
class SeriesSpec:
    form: MaassForm
    alpha: QuadNumber
    variant: str = "full"
    normalization: str = "hecke_b"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        a = QuadNumber.coerce(self.alpha)
        if a.is_rational:
            raise ValueError("alpha must be irrational")
        object.__setattr__(self, "alpha", a)


def _frac_phases(alpha: QuadNumber, n: np.ndarray) -> np.ndarray:
    # n * alpha mod 1, splitting alpha into integer and fractional parts first
    frac = float(alpha - alpha.floor())
    return np.mod(n * frac, 1.0)


def _sums(f: MaassForm, alpha: QuadNumber, s: complex, n_max: int) -> tuple[complex, complex]:
    """(sum b_n n^-s cos(2 pi n alpha), sum b_n n^-s sin(2 pi n alpha)), n <= n_max."""
    n = np.arange(1, n_max + 1, dtype=float)
    w = f.coeffs[:n_max] * np.exp(-s * np.log(n))
    ph = 2 * math.pi * _frac_phases(alpha, n)
    # ascending n; pairwise summation in numpy keeps the rounding small
    return complex(np.sum(w * np.cos(ph))), complex(np.sum(w * np.sin(ph)))


def _hecke_value(f: MaassForm, alpha, s, n_max, variant) -> complex:
    c, si = _sums(f, alpha, s, n_max)
    # full: sum_{n != 0}; signed: sum sign(n) ...; b_{-n} = +-b_n by parity
    if f.odd:
        full, signed = 2j * si, 2 * c
    else:
        full, signed = 2 * c, 2j * si
    if variant == "full":
        return full
    if variant == "signed":
        return signed
    return 0.5 * (full + signed)


def tail_bound(f: MaassForm, sigma: float, n_max: int) -> float:
    """Bound on the omitted |n| > n_max terms from sum_{n <= x} b_n^2 ~ C x."""
    if sigma <= 1.0:
        return math.inf
    C = float(np.mean(f.coeffs[:n_max] ** 2))
    return 2.0 * sigma * math.sqrt(C) * n_max ** (1.0 - sigma) / (sigma - 1.0)


def dirichlet_eval(spec: SeriesSpec, s, n_max: int | None = None) -> periods.EvalReport:
    s = complex(s)
    f = spec.form
    n_max = f.M if n_max is None else int(n_max)
    if n_max > f.M:
        raise ValueError(f"n_max = {n_max} exceeds the coefficient truncation {f.M}")
    if spec.normalization == "paper_a":
        lam = 2j * f.R
        s_b = s - lam
        scale = np.exp(-specialfn.log_c_lambda(f.R))
    else:
        s_b, scale = s, 1.0
    if s_b.real < DIRECT_SIGMA_MIN:
        raise DomainError(f"direct summation needs Re s >= {DIRECT_SIGMA_MIN}; use series_via_period")
    val = _hecke_value(f, spec.alpha, s_b, n_max, spec.variant)
    bound = tail_bound(f, s_b.real, n_max)
    if spec.variant == "positive":
        bound *= 0.5
    return periods.EvalReport(s, complex(scale * val), float(abs(scale) * bound), "dirichlet",
                              meta={"n_max": n_max, "variant": spec.variant,
                                    "normalization": spec.normalization})


# ---------------------------------------------------------------------------
# through the period engine

_MODELS: dict = {}


def model_for(f: MaassForm, alpha: QuadNumber, N: int = 6, M0: int | None = None,
              v1: float | None = None) -> periods.ContinuationModel:
    key = (id(f), alpha, N, M0, v1)
    if key not in _MODELS:
        lg = LimitingGeodesic(build_closed_geodesic(alpha))
        _MODELS[key] = (f, periods.continuation_build(f, lg, N=N, M0=M0, v1=v1))
    return _MODELS[key][1]


def period_factor(f: MaassForm, s: complex) -> complex:
    """kappa * mellin_factor(s): I_s = period_factor(s) * D_{s+1/2}."""
    return f.whittaker_scale * specialfn.mellin_factor(s, f.R)


def series_via_period(spec: SeriesSpec, sigma, model: periods.ContinuationModel | None = None) -> periods.EvalReport:
    if spec.variant != "full":
        raise DomainError("only the full series continues through the period route")
    f = spec.form
    sigma = complex(sigma)
    if spec.normalization == "paper_a":
        sigma_b = sigma - 2j * f.R
        conv = np.exp(-specialfn.log_c_lambda(f.R))
    else:
        sigma_b, conv = sigma, 1.0
    s = sigma_b - 0.5
    model = model or model_for(f, spec.alpha)
    try:
        G = period_factor(f, s)
    except GammaPoleError:
        # I is finite there while the Gamma factor blows up: D has a forced zero
        return periods.EvalReport(sigma, 0j, 0.0, "period", meta={"forced_zero": True})
    try:
        rep = periods.continuation_eval(model, s)
    except PoleError as exc:
        p = exc.pole
        res = complex(conv * p.residue / G)
        datum = periods.PoleDatum(p.s + 0.5 + (sigma - sigma_b), p.k, p.j, res, p.removable,
                                  p.error / abs(G), p.scale / abs(G))
        raise PoleError(f"D has a pole at sigma = {datum.s} (residue {res:.6g})", pole=datum) from None
    val = conv * rep.value / G
    poles = [periods.PoleDatum(p.s + 0.5, p.k, p.j, conv * p.residue / G, p.removable) for p in rep.poles]
    return periods.EvalReport(sigma, complex(val), float(abs(conv) * rep.error / abs(G)), "period",
                              poles=poles, meta={"I": rep.value, **rep.meta})


def route_identity(f: MaassForm, alpha: QuadNumber, s, n_max: int | None = None,
                   method: str = "direct") -> dict:
    """|I_s - kappa G(s) D_{s+1/2}| / |I_s| with I_s from the direct or continuation route."""
    s = complex(s)
    lg = LimitingGeodesic(build_closed_geodesic(alpha))
    if method == "direct":
        I = periods.limit_period_direct(f, lg, s)
    else:
        I = periods.continuation_eval(model_for(f, alpha), s)
    D = dirichlet_eval(SeriesSpec(f, alpha), s + 0.5, n_max)
    rhs = period_factor(f, s) * D.value
    return {"s": s, "I": I.value, "GD": rhs, "rel": abs(I.value - rhs) / abs(I.value),
            "I_err": I.error, "D_err": D.error}


# ---------------------------------------------------------------------------
# Remark-1 style cancellation


@dataclass
class HolomorphyReport:
    chi: int
    passed: bool
    rows: list  # (j, k, sigma, res_alpha, res_alpha_bar, mismatch, scale)
    worst: float

    def csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["j", "k", "sigma_re", "sigma_im", "res_a_re", "res_a_im",
                     "res_abar_re", "res_abar_im", "mismatch", "scale"])
        for j, k, sg, ra, rb, mm, sc in self.rows:
            wr.writerow([j, k, f"{sg.real:.15g}", f"{sg.imag:.15g}", f"{ra.real:.15g}", f"{ra.imag:.15g}",
                         f"{rb.real:.15g}", f"{rb.imag:.15g}", f"{mm:.3e}", f"{sc:.3e}"])
        return buf.getvalue()


def holomorphy_check(f: MaassForm, alpha: QuadNumber, j_max: int = 3, k_max: int = 2,
                     N: int = 6, tol: float = 1e-6) -> HolomorphyReport:
    """Residues of D_{s,alpha} and D_{s,alpha-bar} on the shared lattice; fit one global sign."""
    alpha = QuadNumber.coerce(alpha)
    ma = model_for(f, alpha, N=N)
    mb = model_for(f, alpha.conj(), N=N)
    if abs(ma.L - mb.L) > 1e-12:
        raise ValueError("conjugate endpoints must give the same closed geodesic length")
    pairs = []
    for k in range(k_max + 1):
        for j in range(-j_max, j_max + 1):
            pa = periods.residue_at(ma, j, k)
            pb = periods.residue_at(mb, j, k)
            G = period_factor(f, pa.s)
            scale = max(pa.scale, pb.scale) / abs(G)
            pairs.append((j, k, pa.s + 0.5, pa.residue / G, pb.residue / G, scale))
    best = None
    for chi in (1, -1):
        rows = [(j, k, sg, ra, rb, abs(ra - chi * rb) / sc, sc) for j, k, sg, ra, rb, sc in pairs]
        worst = max(r[5] for r in rows)
        if best is None or worst < best.worst:
            best = HolomorphyReport(chi, worst <= tol, rows, worst)
    return best


def series_csv(reports, normalization: str = "hecke_b") -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["sigma_re", "sigma_im", "D_re", "D_im", "err", "route", "normalization"])
    for r in reports:
        wr.writerow([f"{r.s.real:.15g}", f"{r.s.imag:.15g}", f"{r.value.real:.15g}", f"{r.value.imag:.15g}",
                     f"{r.error:.3e}", r.route, normalization])
    return buf.getvalue()


__all__ = [
    "SeriesSpec", "dirichlet_eval", "series_via_period", "holomorphy_check", "route_identity",
    "tail_bound", "period_factor", "HolomorphyReport", "HeckeGateError",
]
