import pytest

from maassperiods import maass
from maassperiods.exactfield import parse_quadratic
from maassperiods.hyperbolic import LimitingGeodesic, build_closed_geodesic

ODD_BRACKET = (9.4, 9.6)
EVEN_BRACKET = (13.6, 13.9)


@pytest.fixture(scope="session")
def odd_form():
    return maass.hejhal_solve("odd", ODD_BRACKET)


@pytest.fixture(scope="session")
def even_form():
    return maass.hejhal_solve("even", EVEN_BRACKET)


@pytest.fixture(scope="session")
def even64(even_form):
    return maass.extend_coefficients(even_form, 64)


@pytest.fixture(scope="session")
def odd64(odd_form):
    return maass.extend_coefficients(odd_form, 64)


@pytest.fixture(scope="session")
def even_long(even_form):
    return maass.extend_coefficients(even_form, 32768)


@pytest.fixture(scope="session")
def golden():
    return build_closed_geodesic(parse_quadratic("golden"))


@pytest.fixture(scope="session")
def golden_lg(golden):
    return LimitingGeodesic(golden)


@pytest.fixture(scope="session")
def golden_model(even64, golden_lg):
    from maassperiods import periods

    return periods.continuation_build(even64, golden_lg, N=6)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in RESULTS:
            terminalreporter.write_line(r.line())
