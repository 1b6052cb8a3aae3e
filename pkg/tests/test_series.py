import cmath
import math

import numpy as np
import pytest

from maassperiods import periods, series, specialfn
from maassperiods.errors import DomainError, PoleError
from maassperiods.exactfield import parse_quadratic

GOLDEN = parse_quadratic("golden")


@pytest.fixture(scope="module")
def spec(even_long):
    return series.SeriesSpec(even_long, GOLDEN)


def test_tail_certificate(spec):
    a = series.dirichlet_eval(spec, 2.0, 16384)
    b = series.dirichlet_eval(spec, 2.0, 32768)
    assert abs(a.value - b.value) <= a.error


def test_conjugation_symmetry(spec):
    for s in (1.5 + 2j, 2.2 - 1j, 3.0 + 7j):
        x = series.dirichlet_eval(spec, s).value
        y = series.dirichlet_eval(spec, s.conjugate()).value
        assert abs(x - y.conjugate()) <= 1e-12 * abs(x)


def test_negated_alpha(even_long):
    a = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN), 2.0).value
    b = series.dirichlet_eval(series.SeriesSpec(even_long, -GOLDEN), 2.0).value
    assert abs(a - b.conjugate()) <= 1e-13 * abs(a)


def test_variants(even_long):
    s = 1.8 + 0.5j
    full = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN, "full"), s).value
    signed = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN, "signed"), s).value
    pos = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN, "positive"), s).value
    assert abs(pos - 0.5 * (full + signed)) <= 1e-14 * max(1, abs(pos))
    n = np.arange(1, even_long.M + 1)
    direct = 2j * np.sum(even_long.coeffs * n ** (-s) * np.sin(2 * math.pi * n * float(GOLDEN)))
    assert abs(signed - direct) <= 1e-9 * abs(direct)


def test_a_normalisation_shift(even_long):
    R = even_long.R
    s = 2.0 + 2j * R
    a = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN, normalization="paper_a"), s).value
    b = series.dirichlet_eval(series.SeriesSpec(even_long, GOLDEN), s - 2j * R).value
    assert abs(a - b / specialfn.c_lambda(R)) <= 1e-13 * abs(a)


def test_direct_domain(spec):
    with pytest.raises(DomainError):
        series.dirichlet_eval(spec, 1.1)
    with pytest.raises(ValueError):
        series.dirichlet_eval(spec, 2.0, 10 ** 6)


def test_route_equivalence(spec):
    for sig in (1.5, 2.0 + 1j, 2.5 - 2j, 3.0, 1.75 + 4j):
        d = series.dirichlet_eval(spec, sig)
        p = series.series_via_period(spec, sig)
        assert abs(d.value - p.value) <= d.error + p.error
        if sig == 2.0 + 1j or sig == 3.0:
            assert abs(d.value - p.value) <= 1e-5 * abs(d.value)


def test_route_identity(even_long):
    for s in (2.0, 1.5 + 3j):
        assert series.route_identity(even_long, GOLDEN, s, 32768)["rel"] <= 1e-5


def test_odd_route_identity(odd_form):
    from maassperiods import maass

    f = maass.extend_coefficients(odd_form, 32768)
    r = series.route_identity(f, GOLDEN, 2.0, 32768)
    assert r["rel"] <= 1e-5


def test_pole_on_first_line(spec):
    L = 2 * math.acosh(1.5)
    sigma = 4j * math.pi / L + 0.5
    with pytest.raises(PoleError) as exc:
        series.series_via_period(spec, sigma)
    p = exc.value.pole
    assert abs(p.s - sigma) < 1e-12
    f = spec.form.with_coeffs(spec.form.coeffs[:64])
    from maassperiods.hyperbolic import build_closed_geodesic

    c = build_closed_geodesic(GOLDEN)
    rho2 = periods.closed_period_twisted(f, c, 2)
    expect = c.v0_f ** (sigma - 0.5) * rho2 / L / series.period_factor(f, sigma - 0.5)
    assert abs(p.residue - expect) <= 1e-5 * abs(expect)


def test_forced_zero_at_gamma_pole(spec):
    # Gamma((s + 1/2 + iR)/2) blows up at s = -1/2 - iR; I is finite there
    s = -0.5 - 1j * spec.form.R
    r = series.series_via_period(spec, s + 0.5)
    assert r.value == 0 and r.meta.get("forced_zero")


def test_only_full_variant_continues(even_long):
    with pytest.raises(DomainError):
        series.series_via_period(series.SeriesSpec(even_long, GOLDEN, "signed"), 0.3)


def test_holomorphy_golden(even64):
    rep = series.holomorphy_check(even64, GOLDEN, j_max=2, k_max=2)
    assert rep.passed and rep.chi in (1, -1)
    j0 = [r for r in rep.rows if r[0] == 0 and r[1] == 0][0]
    assert abs(j0[3] - j0[4]) <= 1e-6 * j0[6]
    assert rep.csv().count("\n") == 1 + len(rep.rows)


def test_holomorphy_odd_zero_residue(odd64):
    rep = series.holomorphy_check(odd64, parse_quadratic("sqrt2"), j_max=1, k_max=1)
    j0 = [r for r in rep.rows if r[0] == 0 and r[1] == 0][0]
    assert abs(j0[3]) <= 1e-8 * j0[6] and abs(j0[4]) <= 1e-8 * j0[6]


def test_spec_validation(even64):
    with pytest.raises(ValueError):
        series.SeriesSpec(even64, parse_quadratic("3"))
    with pytest.raises(ValueError):
        series.SeriesSpec(even64, GOLDEN, variant="half")


def test_series_csv(spec):
    text = series.series_csv([series.dirichlet_eval(spec, 2.0)])
    assert text.splitlines()[1].endswith("dirichlet,hecke_b")
    assert cmath.isfinite(complex(float(text.splitlines()[1].split(",")[2]), 0))
