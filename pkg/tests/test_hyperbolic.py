import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maassperiods.errors import RationalInputError
from maassperiods.exactfield import QuadNumber, parse_quadratic
from maassperiods.hyperbolic import (
    INF,
    LimitingGeodesic,
    MoebiusMap,
    build_closed_geodesic,
    geodesic_point,
    geodesic_points_h,
    hyperbolic_distance,
    reduce_many,
    reduce_to_fundamental_domain,
    winding_count,
)

S = MoebiusMap(0, -1, 1, 0)
T = MoebiusMap(1, 1, 0, 1)
T_INV = MoebiusMap(1, -1, 0, 1)

upper = st.builds(complex, st.floats(-3, 3), st.floats(0.05, 4))


def test_basic_actions():
    assert abs(S(1j) - 1j) < 1e-15
    assert T(0.5 + 2j) == 1.5 + 2j
    assert S(INF) == 0
    assert T(INF) == INF


def test_reduction_examples():
    z, M = reduce_to_fundamental_domain(0.3 + 0.4j)
    assert abs(z - (-0.2 + 1.6j)) < 1e-14
    assert M in (((1, -1), (1, 0)), ((-1, 1), (-1, 0)))
    z, M = reduce_to_fundamental_domain(0.1 + 5j)
    assert z == 0.1 + 5j and M == ((1, 0), (0, 1))


@settings(max_examples=100, deadline=None)
@given(upper)
def test_reduction_lands_in_domain(z):
    zs, M = reduce_to_fundamental_domain(z)
    assert abs(zs.real) <= 0.5 + 1e-12 and abs(zs) >= 1 - 1e-12
    (a, b), (c, d) = M
    assert a * d - b * c == 1
    assert abs((a * z + b) / (c * z + d) - zs) <= 1e-9 * max(1.0, abs(zs))
    zz, MM = reduce_to_fundamental_domain(zs)
    assert zz == zs and MM == ((1, 0), (0, 1))
    z1, _ = reduce_to_fundamental_domain(z + 1)
    assert abs(z1 - zs) < 1e-9 or abs(abs(z1.real) - 0.5) < 1e-9 or abs(abs(z1) - 1) < 1e-9


def test_reduce_many_matches_scalar():
    rng = np.random.default_rng(3)
    zs = rng.uniform(-2, 2, 200) + 1j * rng.uniform(0.01, 2, 200)
    vec = reduce_many(zs)
    ref = np.array([reduce_to_fundamental_domain(z)[0] for z in zs])
    assert np.max(np.abs(vec - ref)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([S, T, T_INV]), min_size=1, max_size=20), upper, upper)
def test_isometry(word, z, w):
    M = MoebiusMap(1, 0, 0, 1)
    for g in word:
        M = M @ g
    d0 = hyperbolic_distance(z, w)
    d1 = hyperbolic_distance(M(z), M(w))
    assert abs(d0 - d1) <= 1e-12 * max(1.0, d0)


@pytest.mark.parametrize("name, gamma, q, L", [
    ("golden", ((2, 1), (1, 1)), QuadNumber(Fraction(7, 2), Fraction(3, 2), 5), 1.924847300),
    ("sqrt2", ((3, 4), (2, 3)), QuadNumber(17, 12, 2), 3.525494348),
])
def test_closed_geodesic_examples(name, gamma, q, L):
    c = build_closed_geodesic(parse_quadratic(name))
    assert c.gamma == gamma
    assert c.q == q
    assert abs(c.L - L) < 1e-9
    assert c.beta_prime == -1
    assert c.v0 == c.alpha - c.alpha_bar
    # canonical conjugator: alpha -> inf, alpha_bar -> 0, inf -> -1
    assert c.g(c.alpha) == INF
    assert c.g(c.alpha_bar) == 0
    assert c.g(INF) == -1


def test_golden_length_closed_form():
    c = build_closed_geodesic(parse_quadratic("golden"))
    assert abs(c.L - 2 * math.acosh(1.5)) < 1e-14


def test_sqrt3_and_conjugate_endpoint():
    c = build_closed_geodesic(parse_quadratic("sqrt3"))
    (a, b), (cc, d) = c.gamma
    assert a * d - b * cc == 1 and a + d > 2
    r = build_closed_geodesic(parse_quadratic("golden")).reversed()
    assert r.beta_prime == 1
    assert r.g(r.alpha) == INF and r.g(r.alpha_bar) == 0 and r.g(INF) == 1
    assert abs(r.L - 2 * math.acosh(1.5)) < 1e-14


def test_rational_alpha_rejected():
    with pytest.raises(RationalInputError):
        build_closed_geodesic(QuadNumber(3))


@pytest.mark.parametrize("name", ["golden", "sqrt2", "sqrt3", "2+3*sqrt(7)", "-1/3+1/2*sqrt(13)"])
def test_conjugation_identity(name):
    c = build_closed_geodesic(parse_quadratic(name))
    v = np.random.default_rng(5).uniform(0.1, 10.0, 100)
    z = c.g_inverse(1j * v)
    (a, b), (cc, d) = c.gamma
    gz = (a * z + b) / (cc * z + d)
    w = c.g_forward(gz)
    # gz sits ~|z - alpha|/q from alpha, so rounding of gz alone costs ~q eps
    assert np.max(np.abs(w - 1j * c.q_f * v) / (c.q_f * v)) < 1e-12 + 1e-14 * c.q_f


def test_basepoint_and_windings(golden_lg, golden):
    p = geodesic_point(golden_lg, 0.0)
    assert p.m == 0 and p.x_exact == -1
    assert abs(p.u - golden.v0_f) < 1e-15
    for t in (0.3, 5.0, 17.7, 60.0):
        a, b = geodesic_point(golden_lg, t), geodesic_point(golden_lg, t + golden.L)
        assert b.m == a.m + 1
        assert abs(b.u - a.u) < 1e-12 * a.u


def test_deep_point_exact(golden_lg, golden):
    t = 200.0
    p = geodesic_point(golden_lg, t)
    v1 = golden_lg.v1_value
    assert p.m == math.floor((t + math.log(golden.v0_f) - math.log(v1)) / golden.L)
    assert p.m == winding_count(golden_lg, t)
    assert v1 <= p.u < golden.q_f * v1
    with mpmath.workdps(300):
        s5 = mpmath.sqrt(5)
        a, ab = (1 + s5) / 2, (1 - s5) / 2
        z = a + 1j * mpmath.exp(-mpmath.mpf(t))
        w = (z - ab) / (a - z) / ((7 + 3 * s5) / 2) ** p.m
        assert abs(float(w.real) - float(p.x_exact)) <= 1e-12 * abs(float(w.real))
        assert abs(float(w.imag) - p.u) <= 1e-12 * p.u


def test_axis_distance_decays(golden_lg, golden):
    for t in np.linspace(0, 30, 16):
        p0, p1 = geodesic_point(golden_lg, t), geodesic_point(golden_lg, t + golden.L)
        assert abs(float(p1.x_exact)) / p1.u < abs(float(p0.x_exact)) / p0.u


def test_points_in_h_shallow_and_deep(golden_lg, golden):
    ts = np.array([-1.0, 0.0, 0.5, 3.0, 8.0])
    z = geodesic_points_h(golden_lg, ts)
    naive = golden.alpha_f + 1j * np.exp(-ts)
    shallow = ts <= 0.5
    assert np.allclose(z[shallow], naive[shallow], rtol=1e-14)
    # deep points are moved by powers of gamma; compare modulo the group
    for a, b in zip(z[~shallow], naive[~shallow]):
        za, zb = reduce_to_fundamental_domain(a)[0], reduce_to_fundamental_domain(b)[0]
        assert abs(za - zb) < 1e-11
    lg2 = LimitingGeodesic(golden, v1=3.0)
    assert np.allclose(geodesic_points_h(lg2, ts), z, atol=1e-12)
