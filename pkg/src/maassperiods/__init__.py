"""Limiting-geodesic periods and twisted Dirichlet series of Maass cusp forms for PSL2(Z)."""

from .errors import (
    ConvergenceError,
    DomainError,
    HeckeGateError,
    IllConditionedError,
    MaassPeriodsError,
    NoRootError,
    PoleError,
    SchemaError,
)
from .exactfield import QuadNumber, cf_expand, cf_to_hyperbolic, parse_quadratic
from .hyperbolic import LimitingGeodesic, build_closed_geodesic, reduce_to_fundamental_domain
from .maass import MaassForm, evaluate, extend_coefficients, hejhal_solve, import_form, export_form
from .periods import continuation_build, continuation_eval, limit_period_direct, poles_and_residues
from .series import SeriesSpec, dirichlet_eval, series_via_period

__version__ = "0.1.0"
