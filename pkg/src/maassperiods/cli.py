"""Command line front end.

Every command writes a CSV whose leading ``#`` lines record the package
version, the s-convention note and every resolved parameter, so identical
configs give byte-identical files. ``solve`` writes plain JSON instead, with the
same information under a ``run`` key, so its output is a valid ``--coeffs`` file.

Exit codes: 0 ok, 1 configuration error, 2 numerical failure,
3 verification failure (including a failed Hecke gate).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

from . import __version__, acceptance, maass, periods, series
from ._accel import set_threads
from .errors import FieldMismatchError, HeckeGateError, MaassPeriodsError, RationalInputError, SchemaError
from .exactfield import parse_quadratic
from .hyperbolic import LimitingGeodesic, build_closed_geodesic

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3

COMMANDS = ("solve", "import", "eval-form", "geodesic", "period-closed", "period-limit",
            "series", "continue", "poles", "mean-value", "verify")

DEFAULT_BRACKETS = {"odd": (9.4, 9.6), "even": (13.6, 13.9)}

# resolved after the config file; None in argparse means "not given"
DEFAULTS = {
    "parity": "even",
    "bracket": None,
    "M": None,
    "Y1": 0.5,
    "Y2": 0.8,
    "Q": None,
    "n_coeffs": 64,
    "alpha": "golden",
    "s": ["2"],
    "j": [0, 1, 2],
    "T": [100.0, 200.0],
    "box": [-2.5, 0.5, -8.0, 8.0],
    "N": 6,
    "M0": None,
    "v1_factor": 1.0,
    "J": periods.FINE_NODES,
    "variant": "full",
    "normalization": "hecke_b",
    "route": "direct",
    "n_max": None,
    "z": ["0.1+1.2j"],
    "threads": None,
    "tolerance_profile": "strict",
    "only": None,
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as -0.3+0.9j through as arguments rather than flags
        self._negative_number_matcher = re.compile(r"^-[\d.][\d.eE+\-jJi]*$")

    def error(self, message):
        raise ConfigError(message)


def _complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("job")
    g.add_argument("--config", help="JSON file with any of the long options (dashes as underscores)")
    g.add_argument("--cache-dir", help=f"cache root (default ${maass.CACHE_ENV} or ~/.cache/maassperiods)")
    g.add_argument("--threads", type=int)
    g.add_argument("--tolerance-profile", choices=("fast", "strict"))
    g.add_argument("--out", help="output file (default stdout)")
    f = common.add_argument_group("form source")
    f.add_argument("--coeffs", help="import a coefficient file instead of solving")
    f.add_argument("--parity", choices=maass.PARITIES)
    f.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    f.add_argument("--M", type=int)
    f.add_argument("--Y1", type=float)
    f.add_argument("--Y2", type=float)
    f.add_argument("--Q", type=int)
    f.add_argument("--n-coeffs", type=int, help="coefficients to extend to before use")
    p = common.add_argument_group("problem")
    p.add_argument("--alpha", help="quadratic irrational: golden, sqrt2, a+b*sqrt(D), D:a:b")
    p.add_argument("--s", nargs="+", help="complex evaluation points, e.g. 1.5+3j")
    p.add_argument("--z", nargs="+", help="points of the upper half-plane for eval-form")
    p.add_argument("--j", type=int, nargs="+", help="twist indices for period-closed")
    p.add_argument("--T", type=float, nargs="+", help="horizons for mean-value")
    p.add_argument("--box", type=float, nargs=4, metavar=("RE_LO", "RE_HI", "IM_LO", "IM_HI"))
    p.add_argument("--N", type=int)
    p.add_argument("--M0", type=int)
    p.add_argument("--v1-factor", type=float, help="v1 as a multiple of the default")
    p.add_argument("--J", type=int)
    p.add_argument("--variant", choices=series.VARIANTS)
    p.add_argument("--normalization", choices=series.NORMALIZATIONS)
    p.add_argument("--route", choices=("direct", "period"))
    p.add_argument("--n-max", type=int)
    p.add_argument("--only", type=int, nargs="+", help="verify: run only these criteria")

    parser = _Parser(prog="maassperiods", description="Periods of Maass forms along limiting geodesics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve(argv) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if not hasattr(args, key) or key in ("command", "config"):
                raise ConfigError(f"unknown config key {key!r}")
            if getattr(args, key) is None:
                setattr(args, key, val)
    for key, val in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    if args.bracket is None:
        args.bracket = list(DEFAULT_BRACKETS[args.parity])
    return args


# ---------------------------------------------------------------------------


def _params(args, extra: dict | None = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("config", "out", "cache_dir", "threads") and v is not None}
    if extra:
        params.update(extra)
    return params


def _header(args, extra: dict | None = None) -> str:
    params = _params(args, extra)
    lines = [f"# maassperiods {__version__} {args.command}",
             f"# {periods.SHIFT_NOTE}",
             "# params " + json.dumps(params, sort_keys=True, default=str)]
    return "\n".join(lines) + "\n"


def _emit(args, body: str, extra: dict | None = None, header: bool = True) -> None:
    text = (_header(args, extra) if header else "") + body
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _form(args, n: int | None = None) -> maass.MaassForm:
    n = args.n_coeffs if n is None else n
    if args.coeffs:
        f = maass.import_form(args.coeffs)
        return f if f.M >= n else maass.extend_coefficients(f, n, keep=f.M)
    kw = {k: getattr(args, k) for k in ("M", "Y1", "Y2", "Q") if getattr(args, k) is not None}
    return maass.solve_cached(args.parity, tuple(args.bracket), args.cache_dir, n_extend=n, **kw)


def _model(args, f, alpha):
    closed = build_closed_geodesic(alpha)
    M0 = args.M0 if args.M0 is not None else periods.default_M0(closed)
    v1 = args.v1_factor * periods.default_v1(f, closed, M0)
    return periods.continuation_build(f, LimitingGeodesic(closed), N=args.N, M0=M0, v1=v1, J=args.J)


def _csv(rows, head) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(head)
    wr.writerows(rows)
    return buf.getvalue()


def _g(x: float) -> str:
    return f"{x:.15g}"


def cmd_solve(args):
    f = _form(args, args.n_coeffs)
    res = f.gate_residuals()
    rec = maass.form_to_record(f)
    rec["gate_residuals"] = res
    # pure JSON so the file can be passed straight back as --coeffs
    rec["run"] = {"version": __version__, "command": "solve", "convention": periods.SHIFT_NOTE,
                  "params": json.loads(json.dumps(_params(args), default=str))}
    _emit(args, json.dumps(rec, indent=1) + "\n", header=False)
    return EXIT_OK


def cmd_import(args):
    if not args.coeffs:
        raise ConfigError("import needs --coeffs")
    f = maass.import_form(args.coeffs)
    path = maass.cache_store(maass.cache_root(args.cache_dir), f)
    _emit(args, _csv([[f.parity, _g(f.R), f.M, str(path)]], ["parity", "R", "M", "cached_as"]))
    return EXIT_OK


def cmd_eval_form(args):
    f = _form(args)
    zs = [_complex(z) for z in args.z]
    if any(z.imag <= 0 for z in zs):
        raise ConfigError("points must lie in the upper half-plane")
    vals = maass.evaluate_many(f, zs)
    return _table(args, [[_g(z.real), _g(z.imag), _g(v)] for z, v in zip(zs, vals)], ["x", "y", "phi"])


def cmd_geodesic(args):
    c = build_closed_geodesic(parse_quadratic(args.alpha))
    row = [str(c.alpha), str(c.alpha_bar), json.dumps([list(r) for r in c.gamma]), str(c.q),
           _g(c.L), c.beta_prime, str(c.v0)]
    return _table(args, [row], ["alpha", "alpha_bar", "gamma", "q", "L", "beta_prime", "v0"])


def cmd_period_closed(args):
    f = _form(args)
    c = build_closed_geodesic(parse_quadratic(args.alpha))
    rows = []
    for j in args.j:
        r = periods.closed_period_report(f, c, j)
        rows.append([j, _g(r.s.imag), _g(r.value.real), _g(r.value.imag), f"{r.error:.3e}"])
    return _table(args, rows, ["j", "s_j_im", "rho_re", "rho_im", "err"])


def cmd_period_limit(args):
    f = _form(args)
    lg = LimitingGeodesic(build_closed_geodesic(parse_quadratic(args.alpha)))
    reps = periods.limit_period_direct_many(f, lg, [_complex(s) for s in args.s])
    return _text(args, periods.reports_csv(reps))


def cmd_continue(args):
    f = _form(args)
    model = _model(args, f, parse_quadratic(args.alpha))
    reps = [periods.continuation_eval(model, _complex(s)) for s in args.s]
    return _text(args, periods.reports_csv(reps), {"M0_used": model.M0, "v1_used": model.v1, "B_N": model.B_N})


def cmd_poles(args):
    f = _form(args)
    model = _model(args, f, parse_quadratic(args.alpha))
    return _text(args, periods.poles_csv(periods.poles_and_residues(model, args.box)),
                 {"M0_used": model.M0, "v1_used": model.v1})


def cmd_series(args):
    alpha = parse_quadratic(args.alpha)
    ss = [_complex(s) for s in args.s]
    if args.route == "direct":
        n_max = args.n_max or acceptance.N_DIRICHLET
        f = _form(args, max(n_max, args.n_coeffs))
        spec = series.SeriesSpec(f, alpha, args.variant, args.normalization)
        reps = [series.dirichlet_eval(spec, s, n_max) for s in ss]
    else:
        f = _form(args)
        spec = series.SeriesSpec(f, alpha, args.variant, args.normalization)
        model = _model(args, f, alpha)
        reps = [series.series_via_period(spec, s, model) for s in ss]
    return _text(args, series.series_csv(reps, args.normalization))


def cmd_mean_value(args):
    f = _form(args)
    lg = LimitingGeodesic(build_closed_geodesic(parse_quadratic(args.alpha)))
    rows = [[_g(r.T), _g(r.mean), _g(r.limit), f"{r.error:.6e}"]
            for r in periods.mean_value_experiment(f, lg, args.T)]
    return _table(args, rows, ["T", "running_mean", "rho0_over_L", "abs_error"])


def cmd_verify(args):
    ctx = acceptance.Context(profile=args.tolerance_profile)
    if args.coeffs:
        try:
            ctx.form_override = maass.import_form(args.coeffs)
        except HeckeGateError as exc:
            print(f"[FAIL] Hecke gate: {exc}")
            return EXIT_VERIFY
    results = acceptance.run_all(ctx, only=args.only)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _table(args, rows, head, extra=None):
    return _text(args, _csv(rows, head), extra)


def _text(args, body, extra=None):
    _emit(args, body, extra)
    return EXIT_OK


HANDLERS = {
    "solve": cmd_solve, "import": cmd_import, "eval-form": cmd_eval_form, "geodesic": cmd_geodesic,
    "period-closed": cmd_period_closed, "period-limit": cmd_period_limit, "series": cmd_series,
    "continue": cmd_continue, "poles": cmd_poles, "mean-value": cmd_mean_value, "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = resolve(argv)
        if args.threads:
            set_threads(int(args.threads))
        return HANDLERS[args.command](args)
    except HeckeGateError as exc:
        print(f"error: Hecke gate failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConfigError, SchemaError, RationalInputError, FieldMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MaassPeriodsError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
