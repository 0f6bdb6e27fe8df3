"""Command-line interface: ``quasisquare <command> [options]``.

Every report embeds the run configuration.  Failures print one line
``error: CODE: message`` on stderr and exit nonzero.  Defaults for the
global flags may be supplied in a JSON file named by ``QUASISQUARE_CONFIG``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .blaschke import BlaschkeProduct, RationalFn
from .embedding import (
    DiskMeasure,
    check_solid,
    default_support,
    differentiation_operator,
    embedding_norm,
    identity_operator,
    lp_counterexample_sweep,
    maximal_operator_spec,
    stolz_regions,
)
from .endpoint import default_sweep_points, endpoint_blowup_sweep
from .fourier import AnalyticPoly, CircleGrid, GridTooSmallError, TrigCoeffs, b_constant, pichorides_A
from .quasi_square import verify_theorem31
from .real_parts import check_real_part
from .suite import SIZES, SUITE_NAMES, run_suites

CONFIG_ENV = "QUASISQUARE_CONFIG"

EXIT_CODES = {
    "CHECK_FAILED": 1,
    "USAGE": 2,
    "BAD_INPUT": 3,
    "GRID_TOO_SMALL": 4,
    "BAD_EXPONENT": 5,
    "PRECONDITION": 6,
    "INTERNAL": 70,
}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    grid: int = 4096
    tol: float = 1e-8
    seed: int = 0
    out: str | None = None
    format: str = "json"


# ---------------------------------------------------------------- serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, level)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, level)
    return json.dumps(str(obj))


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j"
    return str(v)


def _table_csv(header, rows, config: RunConfig) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(asdict(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def emit(report: dict, config: RunConfig, table=None) -> None:
    """Write ``report`` (and ``table = (header, rows)`` if given) in the configured format."""
    if config.format == "csv":
        if table is not None:
            text = _table_csv(table[0], table[1], config)
        else:
            flat = [(k, json.dumps(v) if isinstance(v, list) else v) for k, v in _flatten(report)]
            text = _table_csv(["key", "value"], flat, config)
    else:
        body = {"config": asdict(config), **report}
        if table is not None:
            body["table"] = {"columns": list(table[0]), "rows": [list(r) for r in table[1]]}
        text = dumps(body) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- inputs


def _load_json(arg: str):
    """Parse ``arg`` as a JSON file path, or as inline JSON if no such file exists."""
    try:
        if os.path.exists(arg):
            with open(arg, encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("BAD_INPUT", f"cannot parse {arg!r}: {exc}") from None


def _complex_list(values) -> list[complex]:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise CliError("BAD_INPUT", "complex numbers are [re, im] pairs")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v)))
    return out


def load_function(arg: str):
    data = _load_json(arg)
    try:
        if isinstance(data, list):
            return AnalyticPoly(_complex_list(data))
        if "coeffs" in data:
            return AnalyticPoly(_complex_list(data["coeffs"]))
        if "numerator" in data:
            return RationalFn(_complex_list(data["numerator"]), _complex_list(data.get("denominator", [1.0])))
    except CliError:
        raise
    except (TypeError, ValueError) as exc:
        raise CliError("BAD_INPUT", f"invalid function: {exc}") from None
    raise CliError("BAD_INPUT", "function JSON needs 'coeffs' or 'numerator'")


def load_theta(arg: str) -> BlaschkeProduct:
    data = _load_json(arg)
    try:
        if isinstance(data, int):
            return BlaschkeProduct.monomial(data)
        if isinstance(data, dict) and "monomial" in data:
            return BlaschkeProduct.monomial(int(data["monomial"]))
        if isinstance(data, dict) and "zeros" in data:
            c = _complex_list([data.get("constant", 1.0)])[0]
            return BlaschkeProduct(tuple(_complex_list(data["zeros"])), c)
    except CliError:
        raise
    except (TypeError, ValueError) as exc:
        raise CliError("BAD_INPUT", f"invalid inner function: {exc}") from None
    raise CliError("BAD_INPUT", "inner function JSON needs 'zeros' or 'monomial'")


def load_measure(arg: str) -> DiskMeasure:
    data = _load_json(arg)
    try:
        return DiskMeasure.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("BAD_INPUT", f"invalid measure: {exc}") from None


def load_trig(arg: str) -> TrigCoeffs:
    data = _load_json(arg)
    try:
        if isinstance(data, dict) and "band" in data:
            return TrigCoeffs.from_json(data)
        if isinstance(data, dict):
            return TrigCoeffs.from_dict({int(k): _complex_list([v])[0] for k, v in data.items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("BAD_INPUT", f"invalid trigonometric polynomial: {exc}") from None
    raise CliError("BAD_INPUT", "expected {'band': M, 'coeffs': [...]} or {k: c_k}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError("BAD_INPUT", f"expected comma-separated numbers, got {text!r}") from None


def _exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise CliError("BAD_EXPONENT", f"invalid exponent {text!r}") from None


# ---------------------------------------------------------------- commands


def cmd_qsq(args, config: RunConfig) -> int:
    f = load_function(args.function)
    theta = load_theta(args.theta) if args.theta else None
    p = _exponent(args.p)
    if p == 2:
        raise CliError("BAD_EXPONENT", "p = 2 has no bounded superquadratic map; see `quasisquare endpoint-sweep`")
    if not 2 < p < math.inf:
        raise CliError("BAD_EXPONENT", f"p must lie in (2, inf), got {p}")
    if isinstance(f, AnalyticPoly):
        CircleGrid(config.grid).require_band(2 * f.degree + 2)
        grid = CircleGrid(config.grid)
    else:
        grid = None
    try:
        rep = verify_theorem31(f, p, theta, grid=grid)
    except ValueError as exc:
        raise CliError("PRECONDITION", str(exc)) from None
    out = rep.to_json()
    emit({"command": "qsq", "report": out}, config)
    return 0 if rep.passed else EXIT_CODES["CHECK_FAILED"]


def cmd_suite(args, config: RunConfig) -> int:
    if config.grid < 16:
        CircleGrid(config.grid).require_band(64)
    only = args.only.split(",") if args.only else None
    if only:
        bad = [n for n in only if n not in SUITE_NAMES]
        if bad:
            raise CliError("USAGE", f"unknown suite(s): {','.join(bad)}")
    results = run_suites(config.seed, args.sizes, config.grid, config.tol, only)
    if args.timing:
        for r in results:
            print(f"{r.name}: {r.seconds:.3f}s", file=sys.stderr)
    passed = all(r.passed for r in results)
    report = {"command": "suite", "sizes": args.sizes, "passed": passed,
              "suites": [r.to_json() for r in results]}
    table = (["suite", "passed", "cases"], [[r.name, r.passed, r.cases] for r in results])
    emit(report, config, table if config.format == "csv" else None)
    return 0 if passed else EXIT_CODES["CHECK_FAILED"]


def cmd_constants(args, config: RunConfig) -> int:
    rows = []
    for p in _float_list(args.p):
        if not p > 1:
            raise CliError("BAD_EXPONENT", f"p must exceed 1, got {p}")
        half = pichorides_A(p / 2) if p > 2 else None
        rows.append([p, pichorides_A(p), half, b_constant(p) if p > 2 else None])
    header = ["p", "A_p", "A_p/2", "B_p"]
    emit({"command": "constants", "rows": [dict(zip(header, r)) for r in rows]}, config,
         (header, [["" if v is None else v for v in r] for r in rows]) if config.format == "csv" else None)
    return 0


def cmd_endpoint_sweep(args, config: RunConfig) -> int:
    pts = _float_list(args.a) if args.a else default_sweep_points()
    try:
        table = endpoint_blowup_sweep(pts, strict=False)
    except ValueError as exc:
        raise CliError("PRECONDITION", str(exc)) from None
    header = ["a", "r(a)", "|lambda_a+mu_a|", "|mu_a|", "hardy_bound", "N_used"]
    rows = [[abs(s.a), s.ratio, s.lam_plus_mu, abs(s.mu_a), s.hardy_bound, s.grid_size] for s in table.samples]
    emit({"command": "endpoint-sweep", "increasing": table.increasing}, config, (header, rows))
    return 0 if table.increasing else EXIT_CODES["CHECK_FAILED"]


def cmd_embed(args, config: RunConfig) -> int:
    theta = load_theta(args.theta)
    mu = load_measure(args.mu)
    p, q = _exponent(args.p), _exponent(args.q)
    try:
        res = embedding_norm(theta, p, q, mu, starts=args.starts, seed=config.seed, tol=config.tol)
    except ValueError as exc:
        raise CliError("PRECONDITION", str(exc)) from None
    emit({"command": "embed", "p": p, "q": q, "result": res.to_json()}, config)
    return 0


def cmd_lp_counterexample(args, config: RunConfig) -> int:
    pts = _float_list(args.a) if args.a else [0.9, 0.95, 0.99]
    try:
        sweep = lp_counterexample_sweep(pts)
    except ValueError as exc:
        raise CliError("PRECONDITION", str(exc)) from None
    header = ["a", "norm3_cubed", "energy3", "R(a)", "R(a)*(1-a)", "N_used"]
    rows = [[r.a, r.norm3_cubed, r.energy3, r.R, r.scaled, r.N_used] for r in sweep.rows]
    emit({"command": "lp-counterexample", "band_stable": sweep.band_stable,
          "consecutive_ratios": sweep.consecutive_ratios}, config, (header, rows))
    return 0


def cmd_check_solid(args, config: RunConfig) -> int:
    theta = load_theta(args.theta) if args.theta else BlaschkeProduct((0.5, -0.3j))
    rng = np.random.default_rng(config.seed)
    if args.op == "identity":
        op = identity_operator(default_support(rng))
    elif args.op == "maximal":
        op = maximal_operator_spec(stolz_regions(CircleGrid(64)))
    else:
        op = differentiation_operator(default_support(rng))
    rep = check_solid(op, theta, args.trials, config.seed)
    emit({"command": "check-solid", "report": rep.to_json()}, config)
    return 0


def cmd_real_part(args, config: RunConfig) -> int:
    u = load_trig(args.u)
    theta = load_theta(args.theta)
    try:
        w = check_real_part(u, theta, config.tol)
    except ValueError as exc:
        raise CliError("PRECONDITION", str(exc)) from None
    emit({"command": "real-part", "witness": w.to_json()}, config)
    return 0


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("USAGE", message)


def _defaults_from_env() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    data = _load_json(path)
    if not isinstance(data, dict):
        raise CliError("BAD_INPUT", f"{CONFIG_ENV} must name a JSON object")
    unknown = set(data) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise CliError("BAD_INPUT", f"unknown config keys: {sorted(unknown)}")
    return data


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid", type=int, default=None, help="circle grid size N (power of two)")
    common.add_argument("--tol", type=float, default=None, help="tolerance")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    parser = _Parser(prog="quasisquare", description="Quasi-square operators on model spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("qsq", parents=[common], help="quasi-square of a function with norm-bound margins")
    p.add_argument("function", help="JSON file or inline JSON: [c0, c1, ...], {'coeffs'}, or {'numerator','denominator'}")
    p.add_argument("--theta", help="inner function: {'zeros': [...], 'constant': [re, im]} or {'monomial': n}")
    p.add_argument("--p", required=True, help="exponent in (2, inf)")
    p.set_defaults(func=cmd_qsq)

    p = sub.add_parser("suite", parents=[common], help="run every property suite")
    p.add_argument("--sizes", choices=sorted(SIZES), default="quick")
    p.add_argument("--only", help="comma-separated suite names")
    p.add_argument("--timing", action="store_true", help="print per-suite timings on stderr")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("constants", parents=[common], help="A_p, A_{p/2} and B_p")
    p.add_argument("--p", required=True, help="comma-separated exponents")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("endpoint-sweep", parents=[common], help="p = 2 blow-up table")
    p.add_argument("--a", help="comma-separated points with 1/2 <= a < 1 (default 1-2^-k, k=2..10)")
    p.set_defaults(func=cmd_endpoint_sweep, table=True)

    p = sub.add_parser("embed", parents=[common], help="embedding norm of K_theta into L^q(mu)")
    p.add_argument("--theta", required=True)
    p.add_argument("--mu", required=True, help="{'atoms': [{'z': [re, im], 'w': weight}, ...]}")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--starts", type=int, default=32)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("lp-counterexample", parents=[common], help="Littlewood-Paley cubic ratio sweep")
    p.add_argument("--a", help="comma-separated points in (0, 1)")
    p.set_defaults(func=cmd_lp_counterexample, table=True)

    p = sub.add_parser("check-solid", parents=[common], help="falsification suite for solid sublinear operators")
    p.add_argument("--op", choices=("identity", "maximal", "differentiation"), default="identity")
    p.add_argument("--theta")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_check_solid)

    p = sub.add_parser("real-part", parents=[common], help="is u the real part of a model-space function?")
    p.add_argument("u", help="{'band': M, 'coeffs': [[re, im], ...]} or {k: c_k}")
    p.add_argument("--theta", required=True)
    p.set_defaults(func=cmd_real_part)
    return parser


def _config(args) -> RunConfig:
    base = asdict(RunConfig())
    base.update(_defaults_from_env())
    if getattr(args, "table", False) and "format" not in _defaults_from_env():
        base["format"] = "csv"
    for key in base:
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    cfg = RunConfig(**base)
    if cfg.format not in ("json", "csv"):
        raise CliError("USAGE", f"unknown format {cfg.format!r}")
    if cfg.grid < 4 or cfg.grid & (cfg.grid - 1):
        raise CliError("GRID_TOO_SMALL" if cfg.grid < 4 else "USAGE", f"grid size must be a power of two >= 4, got {cfg.grid}")
    return cfg


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliError("USAGE", "a command is required (try --help)")
        config = _config(args)
        return args.func(args, config)
    except CliError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_CODES[exc.code]
    except GridTooSmallError as exc:
        print(f"error: GRID_TOO_SMALL: {exc}", file=sys.stderr)
        return EXIT_CODES["GRID_TOO_SMALL"]
    except (ValueError, TypeError) as exc:
        print(f"error: BAD_INPUT: {exc}", file=sys.stderr)
        return EXIT_CODES["BAD_INPUT"]
    except Exception as exc:  # noqa: BLE001 - last-resort single-line report
        print(f"error: INTERNAL: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES["INTERNAL"]


if __name__ == "__main__":
    sys.exit(main())
