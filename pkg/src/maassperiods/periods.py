"""Limiting-geodesic periods, twisted closed periods and the continuation engine.

Convention: I_s = int_0^inf phi(alpha + iy) y^{s-1} dy, unit-speed t = -ln y,
basepoint alpha + i. In conjugated coordinates w = g(z) the geodesic is the
line w = beta' + i v0/y, and gamma acts as w -> q w. Splitting at v = v1 and
folding the head with w -> w / q^m gives

    I_s = Tail(s) + v0^s [ sum_{m<M0} q^{-ms} E_m(s)
                           + sum_{k<N} beta'^k/k! A_k(s) q^{-M0(s+k)} / (1 - q^{-(s+k)}) ]

plus a Taylor remainder. Tail, E_m and A_k are entire; the geometric factor
carries every pole, at s = 2 pi i j / L - k.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import maass
from .errors import ConvergenceError, DomainError, PoleError
from .hyperbolic import ClosedGeodesic, LimitingGeodesic, geodesic_points_h
from .maass import MaassForm

DIRECT_SIGMA_MIN = 0.25
PANEL = 0.25
FINE_NODES = 16
COARSE_NODES = 12
POLE_DISTANCE = 1e-6
REMOVABLE_REL = 1e-9
B_N_SAFETY = 2.0
V1_SCALE = 40.0

SHIFT_NOTE = ("convention: I_s = int_0^inf phi(alpha+iy) y^(s-1) dy; "
              "first pole line Re s = 0 (the e^(st) / |l|^s normalisation puts it at s = 1)")


@dataclass(frozen=True)
class PoleDatum:
    s: complex
    k: int
    j: int
    residue: complex
    removable: bool
    error: float = 0.0
    scale: float = 0.0


@dataclass
class EvalReport:
    s: complex
    value: complex
    error: float
    route: str
    poles: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def row(self) -> list:
        return [self.s.real, self.s.imag, self.value.real, self.value.imag, self.error, self.route]


# ---------------------------------------------------------------------------
# quadrature helpers


def composite_gl(a: float, b: float, n: int, width: float = PANEL) -> tuple[np.ndarray, np.ndarray]:
    npan = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, npan + 1)
    x, w = leggauss(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _cusp_height(f: MaassForm) -> float:
    # sqrt(y) K(2 pi y) e^{pi R/2} is below e^-45 of its peak beyond this
    return (math.pi * f.R / 2 + 45.0) / (2 * math.pi) + 1.0


def _phi_on_geodesic(f: MaassForm, lg: LimitingGeodesic, ts) -> np.ndarray:
    return maass.evaluate_many(f, geodesic_points_h(lg, ts))


# ---------------------------------------------------------------------------
# direct route


@dataclass
class _DirectNodes:
    t: list
    w: list
    phi: list
    trunc: float
    cusp: float
    t_max: float


def _direct_nodes(f, lg, sigma_min, tol):
    t_lo = -math.log(_cusp_height(f))
    # sup |phi| along the geodesic: the shallow part plus one full winding
    probe_t = np.linspace(t_lo, max(0.0, math.log(lg.closed.v0_f)) + 2 * lg.closed.L + 2.0, 400)
    sup = 1.25 * float(np.max(np.abs(_phi_on_geodesic(f, lg, probe_t))))
    t_max = max(1.0, math.log(sup / (sigma_min * tol)) / sigma_min)
    out = _DirectNodes([], [], [], sup * math.exp(-sigma_min * t_max) / sigma_min, 0.0, t_max)
    for n in (FINE_NODES, COARSE_NODES):
        t, w = composite_gl(t_lo, t_max, n)
        out.t.append(t)
        out.w.append(w)
        out.phi.append(_phi_on_geodesic(f, lg, t))
    out.cusp = _cusp_tip(f, lg.closed)
    return out


def _cusp_tip(f, closed) -> float:
    return abs(maass.evaluate(f, complex(closed.alpha_f, _cusp_height(f))))


def _cusp_bound(f, tip, sigma) -> float:
    # phi decays like e^{-2 pi y} past the cusp height; factor 2 for safety
    y = _cusp_height(f)
    return 2.0 * tip * y ** (sigma - 1.0) / (2 * math.pi)


def limit_period_direct_many(f: MaassForm, lg: LimitingGeodesic, ss, tol: float = 1e-12) -> list:
    ss = [complex(s) for s in ss]
    for s in ss:
        if s.real < DIRECT_SIGMA_MIN:
            raise DomainError(f"direct quadrature needs Re s >= {DIRECT_SIGMA_MIN}; "
                              f"use the continuation route for s = {s}")
    sigma_min = min(s.real for s in ss)
    nd = _direct_nodes(f, lg, sigma_min, tol)
    reports = []
    for s in ss:
        fine = np.sum(nd.w[0] * nd.phi[0] * np.exp(-s * nd.t[0]))
        coarse = np.sum(nd.w[1] * nd.phi[1] * np.exp(-s * nd.t[1]))
        trunc = nd.trunc * math.exp(-(s.real - sigma_min) * nd.t_max)
        err = abs(fine - coarse) + trunc + _cusp_bound(f, nd.cusp, s.real)
        reports.append(EvalReport(s, complex(fine), float(err), "direct",
                                  meta={"t_max": nd.t_max, "truncation": trunc}))
    return reports


def limit_period_direct(f: MaassForm, lg: LimitingGeodesic, s, tol: float = 1e-12) -> EvalReport:
    """I_s by quadrature along L_alpha in t = -ln y (Re s >= DIRECT_SIGMA_MIN)."""
    return limit_period_direct_many(f, lg, [s], tol)[0]


# ---------------------------------------------------------------------------
# closed periods


def pole_lattice_point(closed: ClosedGeodesic, j: int, k: int = 0) -> complex:
    return complex(-k, 2 * math.pi * j / closed.L)


def closed_period_twisted(f: MaassForm, closed: ClosedGeodesic, j: int, orientation: str = "+",
                          v1: float | None = None, n: int = 256) -> complex:
    """rho_j = int_{v1}^{q v1} phi~(iv) v^{-s_j} dv / v (periodic trapezoid rule)."""
    return closed_period_report(f, closed, j, orientation, v1, n).value


def closed_period_report(f, closed, j, orientation="+", v1=None, n=256) -> EvalReport:
    if orientation not in ("+", "-"):
        raise ValueError("orientation must be '+' or '-'")
    v1 = closed.v0_f if v1 is None else float(v1)
    L = closed.L
    sign = 1 if orientation == "+" else -1

    def trap(npts):
        tau = np.arange(npts) * (L / npts)
        vals = maass.pulled_back_values(f, closed, 1j * v1 * np.exp(tau))
        sj = 2j * math.pi * j / L
        # reversed traversal: arclength runs the other way, v^{-s_j} -> v^{+s_j}
        ph = np.exp(-sign * sj * (math.log(v1) + tau))
        return complex(np.sum(vals * ph) * (L / npts))

    fine = trap(n)
    half = trap(n // 2)
    return EvalReport(complex(2j * math.pi * j / L), fine, abs(fine - half), "closed-period",
                      meta={"j": j, "orientation": orientation, "v1": v1})


# ---------------------------------------------------------------------------
# continuation model


def default_M0(closed: ClosedGeodesic, offset: float = 0.1) -> int:
    m = 0
    while closed.q_power_float(m) > offset:
        m += 1
    return m


def default_v1(f: MaassForm, closed: ClosedGeodesic, M0: int) -> float:
    """v1 large enough that the Taylor offset q^-M0 is small on the scale v / R."""
    return max(closed.v0_f, V1_SCALE * math.sqrt(0.25 + f.R ** 2) * closed.q_power_float(M0))


@dataclass
class _Rule:
    tau: np.ndarray
    w: np.ndarray


@dataclass(eq=False)
class ContinuationModel:
    form: MaassForm
    lg: LimitingGeodesic
    N: int
    M0: int
    v1: float
    J: int
    delta: float
    beta: int
    q: float
    L: float
    # bins and Taylor data on u = v1 e^tau, tau in [0, L): fine and coarse rules
    rules: tuple
    E: tuple          # per rule, (M0, n) samples of phi~(beta q^-m + iu)
    H: tuple          # per rule, (N, n) samples of d^k phi~(iu)
    H_err: np.ndarray  # (N, n_fine) derivative error estimates on the fine rule
    tail_rules: tuple
    tail_phi: tuple
    B_N: float
    meta: dict = field(default_factory=dict)

    @property
    def closed(self) -> ClosedGeodesic:
        return self.lg.closed

    # -- entire pieces -------------------------------------------------------
    def tail(self, s: complex, rule: int = 0) -> complex:
        r = self.tail_rules[rule]
        return complex(np.sum(r.w * self.tail_phi[rule] * np.exp(-s * r.tau)))

    def _mellin(self, samples, s, rule):
        r = self.rules[rule]
        ker = r.w * np.exp(-s * (math.log(self.v1) + r.tau))
        return samples @ ker

    def E_m(self, s: complex, rule: int = 0) -> np.ndarray:
        return self._mellin(self.E[rule], s, rule)

    def A_k(self, s: complex, rule: int = 0) -> np.ndarray:
        return self._mellin(self.H[rule], s, rule)

    def A_k_derivative(self, s: complex) -> np.ndarray:
        r = self.rules[0]
        lu = math.log(self.v1) + r.tau
        return self.H[0] @ (-lu * r.w * np.exp(-s * lu))

    def A_k_error(self, sigma: float) -> np.ndarray:
        r = self.rules[0]
        return self.H_err @ (r.w * np.exp(-sigma * (math.log(self.v1) + r.tau)))

    def weight_integral(self, sigma: float) -> float:
        """int_{v1}^{q v1} u^{-sigma-1} du."""
        if abs(sigma) < 1e-14:
            return self.L
        return (self.v1 ** -sigma) * (1.0 - self.q ** -sigma) / sigma

    def remainder_bound(self, sigma: float) -> float:
        x = sigma + self.N
        if x <= 0:
            return math.inf
        qm = self.closed.q_power_float(self.M0)
        return (self.delta ** sigma * self.B_N / math.factorial(self.N)
                * self.weight_integral(sigma) * qm ** x / (1.0 - self.q ** -x))


def continuation_build(f: MaassForm, lg: LimitingGeodesic, N: int = 6, M0: int | None = None,
                       v1: float | None = None, J: int = FINE_NODES,
                       tol: float | None = None) -> ContinuationModel:
    """Sample every entire piece once; evaluation is then a handful of dot products."""
    if not 1 <= N <= 8:
        raise ValueError("N must lie in 1..8")
    if J < 16:
        raise ValueError("J >= 16")
    closed = lg.closed
    M0 = default_M0(closed) if M0 is None else int(M0)
    if closed.q_power_float(M0) > 0.1:
        raise ValueError(f"M0 = {M0} leaves offset q^-M0 = {closed.q_power_float(M0):.3g} > 0.1")
    v1 = default_v1(f, closed, M0) if v1 is None else float(v1)
    L, beta = closed.L, closed.beta_prime
    rules, E, H = [], [], []
    H_err = None
    for n in (J, COARSE_NODES):
        tau, w = composite_gl(0.0, L, n)
        rules.append(_Rule(tau, w))
        u = v1 * np.exp(tau)
        E.append(np.array([maass.pulled_back_values(f, closed, beta * closed.q_power_float(m) + 1j * u)
                           for m in range(M0)]).reshape(M0, len(u)))
        ax = maass.axis_derivatives_many(f, closed, u, max(N - 1, 0))
        H.append(ax.values[:N])
        if H_err is None:
            H_err = ax.errors[:N]
    # tail: y from the cusp height down to v0 / v1, original coordinates
    t1 = math.log(v1 / closed.v0_f)
    t_lo = -math.log(_cusp_height(f))
    tail_rules, tail_phi = [], []
    for n in (J, COARSE_NODES):
        t, w = composite_gl(t_lo, t1, n)
        tail_rules.append(_Rule(t, w))
        tail_phi.append(maass.evaluate_many(f, closed.alpha_f + 1j * np.exp(-t)))
    B_N = _estimate_B_N(f, closed, v1, M0, N)
    model = ContinuationModel(f, LimitingGeodesic(closed, v1), N, M0, v1, J, closed.v0_f, beta,
                              closed.q_f, L, tuple(rules), tuple(E), tuple(H), H_err,
                              tuple(tail_rules), tuple(tail_phi), B_N,
                              meta={"B_N_heuristic": True, "v1_over_v0": v1 / closed.v0_f})
    if tol is not None:
        worst = max(model.remainder_bound(s) for s in (0.5, 1.0, 2.0))
        if worst > tol:
            raise ConvergenceError(f"remainder bound {worst:.3g} exceeds {tol}; increase N or M0")
    return model


def _estimate_B_N(f, closed, v1, M0, N, n_u=8, n_x=8) -> float:
    """Sampled sup of |d^N phi~| over |x| <= q^-M0, u in [v1, q v1] (8 x 8 points)."""
    u = v1 * np.exp(np.linspace(0.0, closed.L, n_u, endpoint=False))
    coef, h = maass.axis_chebyshev(f, closed, u)
    off = closed.q_power_float(M0)
    sup = 0.0
    for xi in np.linspace(-off, off, n_x):
        d = maass.chebyshev_derivatives(coef, h, N, xi)[N]
        sup = max(sup, float(np.max(np.abs(d))))
    return B_N_SAFETY * sup


def _geometric(model: ContinuationModel, s: complex, k: int) -> complex:
    x = s + k
    return complex(np.exp(-model.M0 * model.L * x) / (1.0 - np.exp(-model.L * x)))


def nearest_lattice_point(model: ContinuationModel, s: complex) -> tuple[int, int, complex]:
    k = int(round(-s.real))
    j = int(round(s.imag * model.L / (2 * math.pi)))
    return j, k, pole_lattice_point(model.closed, j, k)


def residue_at(model: ContinuationModel, j: int, k: int) -> PoleDatum:
    if not 0 <= k < model.N:
        raise ValueError(f"k = {k} outside the model's Taylor range 0..{model.N - 1}")
    sp = pole_lattice_point(model.closed, j, k)
    A = model.A_k(sp)[k]
    coarse = model.A_k(sp, rule=1)[k]
    pref = model.delta ** sp * model.beta ** k / math.factorial(k) / model.L
    res = complex(pref * A)
    err = abs(pref) * (abs(A - coarse) + model.A_k_error(sp.real)[k])
    scale = abs(pref) * float(np.abs(model.H[0][k]) @ (
        model.rules[0].w * np.exp(-sp.real * (math.log(model.v1) + model.rules[0].tau))))
    removable = abs(res) < REMOVABLE_REL * scale
    return PoleDatum(sp, k, j, res, bool(removable), float(err), scale)


def continuation_eval(model: ContinuationModel, s) -> EvalReport:
    s = complex(s)
    if s.real <= -model.N + 0.5:
        raise DomainError(f"Re s = {s.real} outside the validity strip Re s > {-model.N + 0.5}")
    j, k, sp = nearest_lattice_point(model, s)
    near = 0 <= k < model.N and abs(s - sp) < POLE_DISTANCE
    pole = residue_at(model, j, k) if near else None
    if pole is not None and not pole.removable:
        raise PoleError(f"s = {s} is the pole s_{j} - {k}", pole=pole)
    vals = []
    for rule in (0, 1):
        A = model.A_k(s, rule)
        E = model.E_m(s, rule)
        head = sum(np.exp(-m * model.L * s) * E[m] for m in range(model.M0))
        for kk in range(model.N):
            c = model.beta ** kk / math.factorial(kk)
            if pole is not None and kk == k:
                # removable: A_k vanishes at the pole, use the derivative limit
                head += c * model.A_k_derivative(sp)[kk] * np.exp(-model.M0 * model.L * (sp + kk)) / model.L
            else:
                head += c * A[kk] * _geometric(model, s, kk)
        vals.append(model.tail(s, rule) + model.delta ** s * head)
    value, coarse = complex(vals[0]), complex(vals[1])
    rem = model.remainder_bound(s.real)
    deriv_err = sum(model.A_k_error(s.real)[kk] / math.factorial(kk) * abs(_geometric(model, s, kk))
                    for kk in range(model.N) if not (pole is not None and kk == k))
    quad = abs(value - coarse) + model.delta ** s.real * deriv_err
    return EvalReport(s, value, float(quad + rem), "continuation",
                      poles=[pole] if pole is not None else [],
                      meta={"remainder": rem, "quadrature": quad, "N": model.N, "M0": model.M0})


def poles_and_residues(model: ContinuationModel, box) -> list[PoleDatum]:
    """Every lattice point s_j - k inside box = (re_lo, re_hi, im_lo, im_hi)."""
    re_lo, re_hi, im_lo, im_hi = map(float, box)
    if re_lo > re_hi or im_lo > im_hi:
        return []
    step = 2 * math.pi / model.L
    out = []
    for k in range(model.N):
        if not re_lo <= -k <= re_hi or -k <= -model.N + 0.5:
            continue
        for j in range(int(math.ceil(im_lo / step - 1e-12)), int(math.floor(im_hi / step + 1e-12)) + 1):
            out.append(residue_at(model, j, k))
    return out


# ---------------------------------------------------------------------------
# mean values along the limiting geodesic


@dataclass
class MeanValueRow:
    T: float
    mean: float
    limit: float
    error: float


def mean_value_experiment(f: MaassForm, lg: LimitingGeodesic, T_list, panel: float = PANEL) -> list[MeanValueRow]:
    """Running means (1/T) int_0^T phi(L(t)) dt against rho_0 / L."""
    T_list = sorted(float(T) for T in T_list)
    if T_list and T_list[-1] > 500:
        raise ValueError("T <= 500")
    limit = closed_period_twisted(f, lg.closed, 0).real / lg.closed.L
    rows = []
    acc, prev = 0.0, 0.0
    for T in T_list:
        t, w = composite_gl(prev, T, FINE_NODES, panel)
        acc += float(np.sum(w * _phi_on_geodesic(f, lg, t)))
        prev = T
        rows.append(MeanValueRow(T, acc / T, limit, abs(acc / T - limit)))
    return rows


# ---------------------------------------------------------------------------
# CSV output


def reports_csv(reports) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["s_re", "s_im", "value_re", "value_im", "err_bound", "route"])
    for r in reports:
        wr.writerow([f"{x:.15g}" if isinstance(x, float) else x for x in r.row()])
    return buf.getvalue()


def poles_csv(poles) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["j", "k", "s_re", "s_im", "res_re", "res_im", "removable"])
    for p in poles:
        wr.writerow([p.j, p.k, f"{p.s.real:.15g}", f"{p.s.imag:.15g}", f"{p.residue.real:.15g}",
                     f"{p.residue.imag:.15g}", int(p.removable)])
    return buf.getvalue()
