"""The acceptance suite: one function per criterion, each returning a Result.

``run_all`` prints one pass/fail line per criterion; the CLI ``verify``
command and ``tests/test_acceptance.py`` both go through it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import maass, periods, series, specialfn
from .errors import HeckeGateError, NoRootError, PoleError
from .exactfield import QuadNumber, cf_expand, cf_to_hyperbolic, parse_quadratic
from .hyperbolic import (
    LimitingGeodesic,
    MoebiusMap,
    build_closed_geodesic,
    geodesic_point,
    hyperbolic_distance,
    reduce_to_fundamental_domain,
)

N_DIRICHLET = 32768
BRACKETS = {
    ("odd", 1): (9.4, 9.6),
    ("even", 1): (13.6, 13.9),
    ("even", 2): (17.6, 17.9),
}


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        t = f"{self.seconds:.1f}s" + (f"/{self.budget:.0f}s" if self.budget else "")
        return f"[{tag}] {self.number}. {self.name} ({t}): {self.detail}"


@dataclass
class Context:
    """Forms and models shared across criteria, built lazily once."""

    profile: str = "strict"
    forms: dict = field(default_factory=dict)
    extended: dict = field(default_factory=dict)
    solve_times: dict = field(default_factory=dict)
    scan: list | None = None
    form_override: maass.MaassForm | None = None

    @property
    def strict(self) -> bool:
        return self.profile == "strict"

    def form(self, parity: str, index: int = 1) -> maass.MaassForm:
        key = (parity, index)
        if key not in self.forms:
            t = time.perf_counter()
            self.forms[key] = maass.hejhal_solve(parity, BRACKETS[key])
            self.solve_times[key] = time.perf_counter() - t
        return self.forms[key]

    def ext(self, parity: str, index: int = 1, n: int = N_DIRICHLET) -> maass.MaassForm:
        key = (parity, index, n)
        if key not in self.extended:
            # an imported form replaces the solved first even form everywhere
            if self.form_override is not None and (parity, index) == (self.form_override.parity, 1):
                base = self.form_override
                self.extended[key] = base if base.M >= n else maass.extend_coefficients(base, n, keep=base.M)
            else:
                self.extended[key] = maass.extend_coefficients(self.form(parity, index), n)
        return self.extended[key]


def _timed(number, name, budget):
    def deco(fn):
        def run(ctx: Context) -> Result:
            t = time.perf_counter()
            try:
                ok, detail = fn(ctx)
            except Exception as exc:  # a crash is a failure with its message
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            dt = time.perf_counter() - t
            if budget is not None and dt > budget:
                ok, detail = False, detail + f"; runtime {dt:.1f}s over {budget}s"
            return Result(number, name, bool(ok), detail, dt, budget)

        run.number = number
        run.title = name
        return run

    return deco


# ---------------------------------------------------------------------------


@_timed(1, "solver fixed points", 180)
def criterion_solver(ctx: Context):
    parts, ok = [], True
    for parity in ("odd", "even"):
        t = time.perf_counter()
        f = ctx.form(parity)
        g = maass.hejhal_solve(parity, BRACKETS[(parity, 1)], M=f.meta["M"] + 8)
        h = maass.hejhal_solve(parity, BRACKETS[(parity, 1)], Y1=0.45, Y2=0.85)
        dt = time.perf_counter() - t + ctx.solve_times.get((parity, 1), 0.0)
        dR = max(abs(g.R - f.R), abs(h.R - f.R))
        res = max(f.gate_residuals().values())
        good = dR <= 1e-8 and res <= 1e-6 and dt <= 60.0
        ok &= good
        parts.append(f"{parity} R={f.R:.10f} dR={dR:.1e} hecke={res:.1e} t={dt:.1f}s")
    return ok, "; ".join(parts)


@_timed(2, "Bessel normalisation identity", 30)
def criterion_bessel(ctx: Context):
    R = maass.KNOWN_R[("even", 1)]
    worst = 0.0
    for n in (1, 2, 5):
        for y in (0.5, 1.0, 3.0):
            a = specialfn.k_lambda_n(R, n, y, "closed_form")
            b = specialfn.k_lambda_n(R, n, y, "defining_integral")
            worst = max(worst, abs(a - b) / abs(b))
    return worst <= 1e-7, f"max rel diff {worst:.2e} on 3x3 (n, y) grid"


@_timed(3, "period / Dirichlet route identity", 60)
def criterion_route(ctx: Context):
    f = ctx.ext("even")
    alpha = parse_quadratic("golden")
    worst = 0.0
    for s in (2.0, 1.5 + 3j, 1.25 - 2j):
        worst = max(worst, series.route_identity(f, alpha, s, N_DIRICHLET)["rel"])
    return worst <= 1e-5, f"max |I - kappa G D| / |I| = {worst:.2e} (n_max={N_DIRICHLET})"


@_timed(4, "continuation vs direct quadrature", 120)
def criterion_continuation(ctx: Context):
    f = ctx.ext("even")
    lg = LimitingGeodesic(build_closed_geodesic(parse_quadratic("golden")))
    m6 = periods.continuation_build(f, lg, N=6)
    m4 = periods.continuation_build(f, lg, N=4)
    pts = [2.0, 1.5 + 3j, 0.7, 1.0 - 2j, 2.5 + 5j]
    direct = periods.limit_period_direct_many(f, lg, pts)
    rel = max(abs(periods.continuation_eval(m6, d.s).value - d.value) / abs(d.value) for d in direct)
    consistent = True
    gaps = []
    for s in (-0.5, -1.5):
        a, b = periods.continuation_eval(m6, s), periods.continuation_eval(m4, s)
        gap = abs(a.value - b.value)
        consistent &= gap <= a.error + b.error
        gaps.append(f"s={s}: |N6-N4|={gap:.1e} <= {a.error + b.error:.1e}")
    return rel <= 1e-6 and consistent, f"overlap rel {rel:.1e}; " + "; ".join(gaps)


def scan_pairs(ctx: Context):
    """rho_0 / L for {golden, sqrt2, sqrt3} x {first even, second even}."""
    if ctx.scan is None:
        rows = []
        for an in ("golden", "sqrt2", "sqrt3"):
            closed = build_closed_geodesic(parse_quadratic(an))
            for idx in (1, 2):
                f = ctx.ext("even", idx, 64)
                rho = periods.closed_period_twisted(f, closed, 0)
                rows.append((an, idx, rho.real / closed.L))
        ctx.scan = rows
    return ctx.scan


def chosen_pair(ctx: Context):
    rows = [r for r in scan_pairs(ctx) if abs(r[2]) > 1e-3]
    return max(rows, key=lambda r: abs(r[2]))


def _contour_residue(model, center, half_re, half_im, n=48):
    """(1/2 pi i) closed integral of I(s) and s I(s) around a rectangle."""
    x, w = np.polynomial.legendre.leggauss(n)
    total = 0j
    moment = 0j
    corners = [center + complex(-half_re, -half_im), center + complex(half_re, -half_im),
               center + complex(half_re, half_im), center + complex(-half_re, half_im)]
    for a, b in zip(corners, corners[1:] + corners[:1]):
        mid, half = (a + b) / 2, (b - a) / 2
        for xi, wi in zip(x, w):
            s = mid + half * xi
            v = periods.continuation_eval(model, s).value
            total += wi * half * v
            moment += wi * half * s * v
    return total / (2j * math.pi), moment / (2j * math.pi)


@_timed(5, "pole lattice and residues", 120)
def criterion_poles(ctx: Context):
    an, idx, limit = chosen_pair(ctx)
    f = ctx.ext("even", idx, 64)
    closed = build_closed_geodesic(parse_quadratic(an))
    model = periods.continuation_build(f, LimitingGeodesic(closed), N=6)
    poles = periods.poles_and_residues(model, (-2.5, 0.5, -8.0, 8.0))
    step = 2 * math.pi / closed.L
    worst_loc, worst_res = 0.0, 0.0
    for p in poles:
        assert abs(p.s.imag / step - p.j) <= 1e-10 and abs(p.s.real + p.k) <= 1e-10
        # independent detection: contour integral over the lattice cell
        r, m = _contour_residue(model, p.s, 0.5, step / 2)
        worst_res = max(worst_res, abs(r - p.residue) / max(p.scale, 1e-300))
        if not p.removable and abs(r) > 1e-6 * p.scale:
            worst_loc = max(worst_loc, abs(m / r - p.s))
    rho = periods.closed_period_twisted(f, closed, 0)
    res0 = next(p for p in poles if p.j == 0 and p.k == 0)
    rel0 = abs(res0.residue - rho / closed.L) / abs(rho / closed.L)
    ok = worst_loc <= 1e-6 and worst_res <= 1e-6 and rel0 <= 1e-5 and abs(limit) > 1e-3
    return ok, (f"pair ({an}, even #{idx}) rho0/L={limit:.4f}; {len(poles)} lattice points "
                f"({sum(p.removable for p in poles)} removable); "
                f"located within {worst_loc:.1e}; contour vs closed-form residue {worst_res:.1e}; "
                f"Res_0 vs rho0/L rel {rel0:.1e}")


@_timed(6, "conjugate-endpoint residue cancellation", 120)
def criterion_holomorphy(ctx: Context):
    f = ctx.ext("even", 1, 64)
    rep = series.holomorphy_check(f, parse_quadratic("golden"), j_max=3, k_max=2)
    return rep.passed, f"chi={rep.chi:+d}, worst mismatch {rep.worst:.1e} of residue scale over {len(rep.rows)} poles"


@_timed(7, "mean value along the limiting geodesic", 120)
def criterion_mean_value(ctx: Context):
    an, idx, _ = chosen_pair(ctx)
    f = ctx.ext("even", idx, 64)
    closed = build_closed_geodesic(parse_quadratic(an))
    lg = LimitingGeodesic(closed)
    rows = {r.T: r for r in periods.mean_value_experiment(f, lg, [100, 200])}
    e100, e200 = rows[100.0].error, rows[200.0].error
    rel = e200 / abs(rows[200.0].limit)
    ident = deep_point_identity(closed, 200.0)
    ok = rel <= 0.05 and e200 <= 0.6 * e100 and ident <= 1e-12
    return ok, (f"pair ({an}, even #{idx}): err(100)={e100:.2e} err(200)={e200:.2e} "
                f"ratio {e200 / e100:.2f}; rel {rel:.1e}; deep-point identity {ident:.1e}")


def deep_point_identity(closed, t: float) -> float:
    """Reduced coordinates at depth t against a 300-digit evaluation of g(alpha + i e^-t) / q^m."""
    import mpmath

    p = geodesic_point(LimitingGeodesic(closed), t)
    with mpmath.workdps(300):
        def mp(x: QuadNumber):
            return mpmath.mpf(x.a.numerator) / x.a.denominator + \
                mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.D)

        a, ab, q = mp(closed.alpha), mp(closed.alpha_bar), mp(closed.q)
        z = a + 1j * mpmath.exp(-mpmath.mpf(t))
        g = closed.g
        w = (mp(g.a) * z + mp(g.b)) / (mp(g.c) * z + mp(g.d))
        w = w / q ** p.m
        err = max(abs(float(w.real) - float(p.x_exact)) / abs(float(w.real)),
                  abs(float(w.imag) - p.u) / abs(float(w.imag)))
    return err


@_timed(8, "odd-form vanishing on a symmetric geodesic", None)
def criterion_odd(ctx: Context):
    f = ctx.ext("odd", 1, 64)
    # the axis of sqrt2 is centred at 0, so x -> -x maps it to itself
    closed = build_closed_geodesic(parse_quadratic("sqrt2"))
    rho0 = periods.closed_period_twisted(f, closed, 0)
    model = periods.continuation_build(f, LimitingGeodesic(closed), N=6)
    p0 = periods.residue_at(model, 0, 0)
    return abs(rho0) <= 1e-8 and p0.removable, f"|rho0|={abs(rho0):.1e}, s=0 removable={p0.removable}"


@_timed(9, "module invariant suites", 900)
def criterion_invariants(ctx: Context):
    failures = []
    for name, check in INVARIANTS:
        try:
            ok, why = check(ctx)
        except Exception as exc:
            ok, why = False, f"{type(exc).__name__}: {exc}"
        if not ok:
            failures.append(f"{name} ({why})")
    if failures:
        return False, "failed: " + "; ".join(failures)
    return True, f"{len(INVARIANTS)} invariant checks passed ({ctx.profile} profile)"


CRITERIA = [criterion_solver, criterion_bessel, criterion_route, criterion_continuation,
            criterion_poles, criterion_holomorphy, criterion_mean_value, criterion_odd,
            criterion_invariants]


# ---------------------------------------------------------------------------
# invariant battery used by criterion 9 (the pytest suite covers the same ground)


def _rng(seed=1234):
    return np.random.default_rng(seed)


def inv_field(ctx):
    rng = _rng()
    count = 100 if ctx.strict else 20
    for _ in range(count):
        D = int(rng.choice([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29, 30, 31, 33,
                            34, 35, 37, 38, 39, 41, 42, 43, 46, 47]))
        a = Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9)))
        b = Fraction(int(rng.integers(1, 15)) * int(rng.choice([-1, 1])), int(rng.integers(1, 9)))
        x = QuadNumber(a, b, D)
        if cf_expand(x).value() != x:
            return False, f"round trip {x}"
        M = cf_to_hyperbolic(cf_expand(x))
        if (M[0][0] * x + M[0][1]) / (M[1][0] * x + M[1][1]) != x:
            return False, f"fixed point {x}"
        y = QuadNumber(Fraction(int(rng.integers(1, 9))), Fraction(int(rng.integers(-5, 6))), D)
        if (x * y) * y.inv() != x or (x * y).conj() != x.conj() * y.conj():
            return False, f"field ops {x}, {y}"
    return True, ""


def inv_geometry(ctx):
    rng = _rng(7)
    for an in ("golden", "sqrt2", "sqrt3"):
        c = build_closed_geodesic(parse_quadratic(an))
        v = rng.uniform(0.1, 10.0, 100)
        z = c.g_inverse(1j * v)
        a, b, cc, d = (float(e) for row in c.gamma for e in row)
        gz = (a * z + b) / (cc * z + d)
        w = c.g_forward(gz)
        if np.max(np.abs(w - 1j * c.q_f * v) / (c.q_f * v)) > 1e-12:
            return False, f"conjugation identity {an}"
    gens = [((1, 1), (0, 1)), ((1, -1), (0, 1)), ((0, -1), (1, 0))]
    for _ in range(50 if ctx.strict else 10):
        M = MoebiusMap(1, 0, 0, 1)
        for _ in range(int(rng.integers(1, 21))):
            M = M @ MoebiusMap.from_matrix(gens[int(rng.integers(0, 3))])
        z = complex(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        w = complex(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        d0 = hyperbolic_distance(z, w)
        d1 = hyperbolic_distance(M(z), M(w))
        if abs(d0 - d1) > 1e-12 * max(1.0, d0) * 10 ** (0 if d0 < 5 else 2):
            return False, f"isometry {d0} vs {d1}"
        zs, _ = reduce_to_fundamental_domain(z)
        zs2, M2 = reduce_to_fundamental_domain(zs)
        if M2 != ((1, 0), (0, 1)) or zs2 != zs:
            return False, "reduction idempotence"
    c = build_closed_geodesic(parse_quadratic("golden"))
    lg = LimitingGeodesic(c)
    for t in np.linspace(0.0, 40.0, 30):
        p0, p1 = geodesic_point(lg, t), geodesic_point(lg, t + c.L)
        if not (abs(float(p1.x_exact)) / p1.u < abs(float(p0.x_exact)) / p0.u):
            return False, "axis distance does not decay"
    return True, ""


def inv_specialfn(ctx):
    for R in (0.0, 5.0, 13.78):
        for x in (0.5, 3.0, 12.0, 30.0):
            h = 1e-3 * x
            f = [specialfn.bessel_k_imag(R, x + k * h) for k in (-2, -1, 0, 1, 2)]
            d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
            res = x * x * d2 + x * d1 - (x * x - R * R) * f[2]
            scale = max(abs(x * x * d2), abs(x * d1), abs((x * x + R * R) * f[2]))
            if abs(res) > 1e-6 * scale:
                return False, f"Bessel ODE residual at R={R}, x={x}"
    for s, R in ((2.0, 13.78), (1.3 + 0.4j, 9.53), (0.8 - 1j, 5.0)):
        ref = mellin_quadrature(s, R)
        if abs(ref - specialfn.mellin_factor(s, R)) > 1e-8 * abs(ref):
            return False, f"mellin factor at s={s}, R={R}"
    return True, ""


def mellin_quadrature(s, R, n=1, y0=1e-3):
    """int_0^inf sqrt(y) K_{iR}(2 pi n y) y^{s-1} dy by adaptive quadrature above y0 / n.

    Below y0 / n the two leading orders of the small-argument series of K are
    integrated exactly.
    """
    import warnings

    from scipy import integrate

    lo = y0 / n
    head = 0j
    for nu in (1j * R, -1j * R):
        g = specialfn.gamma_complex(nu)
        for p, c in ((0, 1.0), (2, (math.pi * n) ** 2 / (1 - nu))):
            e = s + 0.5 - nu + p
            head += 0.5 * g * (math.pi * n) ** (-nu) * c * lo ** e / e

    scale = math.exp(-math.pi * R / 2)

    def part(y, which):
        z = math.sqrt(y) * specialfn.bessel_k_imag(R, 2 * math.pi * n * y) * scale * y ** (s - 1)
        return z.real if which == 0 else z.imag

    pts = [lo] + [p / n for p in (0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 14.0)]
    tot = head
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(pts[:-1], pts[1:]):
            re = integrate.quad(part, a, b, args=(0,), epsabs=0, epsrel=1e-12, limit=400)[0]
            im = integrate.quad(part, a, b, args=(1,), epsabs=0, epsrel=1e-12, limit=400)[0]
            tot += complex(re, im)
    return tot


def inv_maass(ctx):
    rng = _rng(99)
    for parity in ("odd", "even"):
        f = ctx.ext(parity, 1, 64)
        for p in (2, 3, 5, 7):
            for q in (2, 3, 5, 7):
                if p < q and abs(f.b(p) * f.b(q) - f.b(p * q)) > 1e-6:
                    return False, f"Hecke b{p}b{q}"
            if abs(f.b(p * p) - (f.b(p) ** 2 - 1)) > 1e-6:
                return False, f"Hecke b{p}^2"
        g = ctx.ext(parity, 1)
        growth = float(np.mean(g.coeffs ** 2))
        if not 0.1 <= growth <= 10:
            return False, f"Rankin-Selberg mean {growth}"
        zs = rng.uniform(-0.5, 0.5, 50) + 1j * rng.uniform(0.5, 1.5, 50)
        zs = zs[np.abs(zs) >= 1.0 / 1.5]
        z = zs[np.abs(zs) > 0]
        inv = -1.0 / z
        raw = maass.evaluate_many(f, z, reduce=False)
        raw_inv = maass.evaluate_many(f, inv[inv.imag >= 0.5], reduce=False)
        keep = inv.imag >= 0.5
        sup = float(np.max(np.abs(maass.evaluate_many(f, 0.3 + 1j * np.linspace(0.6, 2, 40)))))
        if np.max(np.abs(raw[keep] - raw_inv)) > 1e-7 * sup:
            return False, f"automorphy {parity}"
        mu = 0.25 + f.R ** 2
        h = 1e-3
        for z0 in rng.uniform(-0.4, 0.4, 10) + 1j * rng.uniform(1.0, 1.6, 10):
            v = maass.evaluate(f, z0)
            if abs(v) < 1e-2:
                continue
            pts = [z0 + k * h for k in (-2, -1, 1, 2)] + [z0 + 1j * k * h for k in (-2, -1, 1, 2)]
            fv = maass.evaluate_many(f, np.array(pts))
            fxx = (-fv[0] + 16 * fv[1] - 30 * v + 16 * fv[2] - fv[3]) / (12 * h * h)
            fyy = (-fv[4] + 16 * fv[5] - 30 * v + 16 * fv[6] - fv[7]) / (12 * h * h)
            lap = -(z0.imag ** 2) * (fxx + fyy)
            if abs(lap - mu * v) > 1e-4 * abs(v) * mu:
                return False, f"Laplacian at {z0}"
    return True, ""


def inv_periods(ctx):
    f = ctx.ext("even", 1, 64)
    closed = build_closed_geodesic(parse_quadratic("golden"))
    lg = LimitingGeodesic(closed)
    for j in range(3):
        a = periods.closed_period_twisted(f, closed, j, v1=1.3)
        b = periods.closed_period_twisted(f, closed, j, v1=1.3 * closed.q_f)
        if abs(a - b) > 1e-10:
            return False, "closed period depends on v1"
        if abs(periods.closed_period_twisted(f, closed, -j) - a.conjugate()) > 1e-10:
            return False, "rho_-j != conj rho_j"
        if abs(periods.closed_period_twisted(f, closed, j, "-") - periods.closed_period_twisted(f, closed, -j)) > 1e-10:
            return False, "orientation reversal"
    m6 = periods.continuation_build(f, lg, N=6)
    m8 = periods.continuation_build(f, lg, N=8)
    m4 = periods.continuation_build(f, lg, N=4)
    mv = periods.continuation_build(f, lg, N=6, v1=m6.v1 * closed.q_f ** (1 / 3))
    pts = [1.25, 1.5 + 2j, 2.0, 2.5 - 3j, 3.0 + 1j]
    for d in periods.limit_period_direct_many(f, lg, pts):
        c = periods.continuation_eval(m6, d.s)
        dv = series.dirichlet_eval(series.SeriesSpec(ctx.ext("even"), parse_quadratic("golden")), d.s + 0.5)
        sv = series.period_factor(f, d.s) * dv.value
        if abs(c.value - d.value) > 1e-5 * abs(d.value) or abs(sv - d.value) > 1e-5 * abs(d.value):
            return False, f"three-way route equivalence at {d.s}"
    for s in (0.6, -0.5 + 1j, -1.2, -2.3 - 4j, 1.7 + 6j):
        a, b = periods.continuation_eval(m6, s), periods.continuation_eval(mv, s)
        if abs(a.value - b.value) > a.error + b.error:
            return False, f"v1 dependence at {s}"
        for lo, hi in ((m4, m6), (m6, m8)):
            x, y = periods.continuation_eval(lo, s), periods.continuation_eval(hi, s)
            if abs(x.value - y.value) > x.meta["remainder"] + x.meta["quadrature"] + y.error:
                return False, f"remainder honesty N={lo.N} at {s}"
    for p in periods.poles_and_residues(m6, (-3, 0.5, -10, 10)):
        step = 2 * math.pi / closed.L
        if abs(p.s.imag / step - p.j) > 1e-10 or abs(p.s.real + p.k) > 1e-10:
            return False, "lattice exactness"
        if abs(np.exp(-m6.M0 * closed.L * (p.s + p.k)) - 1) > 1e-12:
            return False, "q-power identity"
    try:
        periods.limit_period_direct(f, lg, 0.2)
        return False, "s = 0.2 accepted by the direct route"
    except Exception:
        pass
    return True, ""


def inv_series(ctx):
    f = ctx.ext("even")
    alpha = parse_quadratic("golden")
    spec = series.SeriesSpec(f, alpha)
    a = series.dirichlet_eval(spec, 2.0, N_DIRICHLET // 2)
    b = series.dirichlet_eval(spec, 2.0, N_DIRICHLET)
    if abs(a.value - b.value) > a.error:
        return False, "doubling n_max beyond tail bound"
    for s in (1.5 + 2j, 2.2 - 1j):
        x = series.dirichlet_eval(spec, s).value
        y = series.dirichlet_eval(spec, s.conjugate()).value
        if abs(x - y.conjugate()) > 1e-12 * abs(x):
            return False, "conjugation symmetry"
        full = series.dirichlet_eval(spec, s).value
        signed = series.dirichlet_eval(series.SeriesSpec(f, alpha, "signed"), s).value
        pos = series.dirichlet_eval(series.SeriesSpec(f, alpha, "positive"), s).value
        if abs(pos - 0.5 * (full + signed)) > 1e-13 * max(1.0, abs(pos)):
            return False, "positive = (full + signed) / 2"
    for sig in (1.5, 2.0 + 1j, 2.5 - 2j, 3.0, 1.75 + 4j):
        d = series.dirichlet_eval(spec, sig)
        p = series.series_via_period(spec, sig)
        if abs(d.value - p.value) > d.error + p.error:
            return False, f"route equivalence at {sig}"
    return True, ""


def inv_cli(ctx):
    from .cli import main

    import tempfile
    import pathlib

    with tempfile.TemporaryDirectory() as tmp:
        out1 = pathlib.Path(tmp) / "a.csv"
        out2 = pathlib.Path(tmp) / "b.csv"
        for out in (out1, out2):
            code = main(["geodesic", "--alpha", "sqrt2", "--out", str(out), "--cache-dir", tmp])
            if code != 0:
                return False, f"geodesic exit {code}"
        if out1.read_bytes() != out2.read_bytes():
            return False, "non-reproducible output"
        if "17+12*sqrt(2)" not in out1.read_text():
            return False, "geodesic table"
        if main(["poles", "--box", "0", "-1", "0", "0", "--out", str(out1), "--cache-dir", tmp,
                 "--coeffs", _export_tmp(ctx, tmp)]) != 0:
            return False, "empty pole box"
    return True, ""


def _export_tmp(ctx, tmp):
    import pathlib

    p = pathlib.Path(tmp) / "form.json"
    maass.export_form(ctx.ext("even", 1, 64), p)
    return str(p)


def inv_gates(ctx):
    f = ctx.ext("even", 1, 64)
    bad = f.with_coeffs(np.where(np.arange(1, f.M + 1) == 4, f.coeffs + 1e-3, f.coeffs))
    try:
        maass.form_from_record(maass.form_to_record(bad))
        return False, "Hecke gate accepted tampered b_4"
    except HeckeGateError:
        pass
    try:
        maass.hejhal_solve("odd", (5.0, 5.2))
        return False, "found a root below the first eigenvalue"
    except NoRootError:
        pass
    model = periods.continuation_build(f, LimitingGeodesic(build_closed_geodesic(parse_quadratic("golden"))))
    try:
        periods.continuation_eval(model, periods.pole_lattice_point(model.closed, 2, 0))
        return False, "no pole error on the lattice"
    except PoleError as exc:
        if exc.pole is None:
            return False, "pole error without datum"
    return True, ""


INVARIANTS = [
    ("exactfield", inv_field),
    ("hyperbolic", inv_geometry),
    ("specialfn", inv_specialfn),
    ("maass", inv_maass),
    ("periods", inv_periods),
    ("series", inv_series),
    ("gates", inv_gates),
    ("cli", inv_cli),
]


def run_all(ctx: Context | None = None, only=None, echo=print) -> list[Result]:
    ctx = ctx or Context()
    t0 = time.perf_counter()
    results = []
    for crit in CRITERIA:
        if only and crit.number not in only:
            continue
        r = crit(ctx)
        results.append(r)
        if echo:
            echo(r.line())
    total = time.perf_counter() - t0
    if echo:
        echo(f"total wall time {total:.1f}s (budget 900s); "
             f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if total > 900 and results:
        results[-1].passed = False
        results[-1].detail += f"; suite wall time {total:.0f}s over 900s"
    return results
