from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maassperiods.errors import FieldMismatchError, RationalInputError
from maassperiods.exactfield import (
    ContinuedFraction,
    QuadNumber,
    cf_expand,
    cf_to_hyperbolic,
    parse_quadratic,
)

PHI = QuadNumber(Fraction(1, 2), Fraction(1, 2), 5)
SQRT2 = QuadNumber.sqrt(2)

squarefree = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29, 30,
                              31, 33, 34, 35, 37, 38, 39, 41, 42, 43, 46, 47])
rationals = st.fractions(min_value=-30, max_value=30, max_denominator=12)
nonzero = rationals.filter(lambda x: x != 0)


@st.composite
def irrationals(draw):
    return QuadNumber(draw(rationals), draw(nonzero), draw(squarefree))


# the period length grows like sqrt(disc), so keep discriminants modest here
small = st.fractions(min_value=-10, max_value=10, max_denominator=6)


@st.composite
def cf_irrationals(draw):
    return QuadNumber(draw(small), draw(small.filter(lambda x: x != 0)), draw(squarefree))


@st.composite
def same_field_pair(draw):
    D = draw(squarefree)
    x = QuadNumber(draw(rationals), draw(rationals), D)
    y = QuadNumber(draw(rationals), draw(rationals), D)
    return x, y


def test_golden_times_conjugate_inverse():
    assert PHI * QuadNumber(Fraction(-1, 2), Fraction(1, 2), 5) == 1


def test_unit_inverse():
    assert QuadNumber(3, 2, 2).inv() == QuadNumber(3, -2, 2)


def test_conj_golden():
    assert PHI.conj() == QuadNumber(Fraction(1, 2), Fraction(-1, 2), 5)


def test_square_factors_move_into_b():
    x = QuadNumber(1, 1, 8)
    assert x.D == 2 and x.b == 2
    assert x == QuadNumber(1, 2, 2)


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatchError):
        SQRT2 + QuadNumber.sqrt(3)


def test_rationals_mix_with_any_field():
    assert (SQRT2 + Fraction(1, 3)) - Fraction(1, 3) == SQRT2
    assert QuadNumber(5) * SQRT2 == QuadNumber(0, 5, 2)


def test_deep_powers_exact():
    q = QuadNumber(17, 12, 2)
    qm = q ** -100
    assert qm * q ** 100 == 1
    assert (q ** 100).norm() == 1


@pytest.mark.parametrize("alpha, pre, per", [
    (PHI, (), (1,)),
    (SQRT2, (1,), (2,)),
    (QuadNumber.sqrt(3), (1,), (1, 2)),
])
def test_known_expansions(alpha, pre, per):
    cf = cf_expand(alpha)
    assert (cf.preperiod, cf.period) == (pre, per)
    assert cf.value() == alpha


def test_hyperbolic_matrices():
    assert cf_to_hyperbolic(cf_expand(SQRT2)) == ((1, 2), (1, 1))
    assert cf_to_hyperbolic(cf_expand(PHI)) == ((1, 1), (1, 0))
    assert cf_to_hyperbolic(ContinuedFraction((), (2,))) == ((2, 1), (1, 0))
    assert ContinuedFraction((), (2,)).value() == QuadNumber(1, 1, 2)


def test_negative_and_preperiodic():
    x = QuadNumber(Fraction(-7, 3), Fraction(2, 5), 11)
    cf = cf_expand(x)
    assert cf.preperiod[0] == x.floor()
    assert cf.value() == x


def test_rational_rejected():
    with pytest.raises(RationalInputError):
        cf_expand(QuadNumber(Fraction(3, 7)))


@pytest.mark.parametrize("text, value", [
    ("golden", PHI),
    ("sqrt2", SQRT2),
    ("sqrt(3)", QuadNumber.sqrt(3)),
    ("1/2+1/2*sqrt(5)", PHI),
    ("-1-sqrt(7)", QuadNumber(-1, -1, 7)),
    ("5:1/2:1/2", PHI),
])
def test_parse(text, value):
    assert parse_quadratic(text) == value


@settings(max_examples=100, deadline=None)
@given(cf_irrationals())
def test_cf_round_trip(x):
    assert cf_expand(x).value() == x


@settings(max_examples=100, deadline=None)
@given(cf_irrationals())
def test_hyperbolic_fixes_value(x):
    (a, b), (c, d) = cf_to_hyperbolic(cf_expand(x))
    assert abs(a * d - b * c) == 1
    assert (a * x + b) / (c * x + d) == x


@settings(max_examples=100, deadline=None)
@given(same_field_pair())
def test_field_axioms(pair):
    x, y = pair
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()
    assert x * (y + 1) == x * y + x
    if y != 0:
        assert (x * y) * y.inv() == x
        assert (x / y) * y == x


@settings(max_examples=100, deadline=None)
@given(irrationals())
def test_float_and_floor_consistent(x):
    f = float(x)
    assert x.floor() <= f < x.floor() + 1 or abs(f - round(f)) < 1e-9
    assert x.sign() == (1 if f > 0 else -1)
