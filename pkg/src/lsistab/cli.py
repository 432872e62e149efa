"""Command-line front end.

Usage:
    lsistab deficit --field "gauss(a=1)" --dim 1
    lsistab project --field "hermite(k=2,eps=0.05)" --restarts 8
    lsistab reduce --field "shifted(base=gauss(a=0.5),x0=0.2,a=-0.3,s=1.5)" --check
    lsistab sharpness --a-min 0.01 --a-max 0.2 --steps 5 --dim 1
    lsistab transport --density "mix(eps=1e-2,b=4)"
    lsistab scan-blowup --eps-list 1e-3,1e-2,0.1 --b-list 1,2,4
    lsistab suite

Field grammar: ``family(key=number, ...)`` with families gauss(a), tilt(c,a),
hermite(k,eps), mix(eps,b) and shifted(base=<field>,x0,a,s). Scalars broadcast
across dimensions. Data goes to stdout (or ``--out``), diagnostics to stderr.

Exit codes: 0 success, 1 a checked inequality failed, 2 usage or parse error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from . import acceptance
from .errors import FieldSpecError, NumericalError, ParameterError
from .fields import exp_tilt, gamma_mixture, gaussian_trial, hermite_perturb, shift_tilt
from .functionals import DEFAULT_KAPPA, DEFAULT_TOL, InequalityReport, deficit_gamma, deficit_star
from .measures import build_rule, u_to_gamma_density
from .project import DEFAULT_RESTARTS, DEFAULT_SEED, MIN_RESIDUAL, project_to_extremals
from .reduce import reduce_to_normalized, verify_reduction_identities
from .scalar import ScalarField
from .sharpness import ratio_scan
from .transport1d import DEFAULT_GRID, BlowupRow, blowup_scan, transport_defect

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

FAMILIES: Dict[str, tuple] = {
    "gauss": ("a",),
    "tilt": ("c", "a"),
    "hermite": ("k", "eps"),
    "mix": ("eps", "b"),
    "shifted": ("base", "x0", "a", "s"),
}
ONE_DIMENSIONAL = ("hermite", "mix")
MIN_QUAD_ORDER = 8


@dataclass(frozen=True)
class FieldSpec:
    family: str
    params: Dict[str, Union[float, "FieldSpec"]] = field(hash=False)
    dim: int = 1

    def __str__(self) -> str:
        return format_field_spec(self)


@dataclass(frozen=True)
class RunConfig:
    quad_order: Optional[int] = None
    tol: float = DEFAULT_TOL
    kappa: float = DEFAULT_KAPPA
    seed: int = DEFAULT_SEED
    out_format: Optional[str] = None
    out_path: Optional[str] = None

    def __post_init__(self):
        if self.quad_order is not None and self.quad_order < MIN_QUAD_ORDER:
            raise ParameterError(f"--order must be >= {MIN_QUAD_ORDER}, got {self.quad_order}")
        if not self.tol > 0:
            raise ParameterError(f"--tol must be positive, got {self.tol}")
        if not self.kappa > 0:
            raise ParameterError(f"--kappa must be positive, got {self.kappa}")
        if self.out_format not in (None, "csv", "json"):
            raise ParameterError(f"--format must be csv or json, got {self.out_format}")


# -- field specification grammar ----------------------------------------------

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Parser:
    # self.i is a 0-based cursor; errors report self.i + 1
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def fail(self, message: str, at: Optional[int] = None):
        raise FieldSpecError(message, (self.i if at is None else at) + 1)

    def skip(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def expect(self, ch: str):
        self.skip()
        if self.i >= len(self.s):
            self.fail(f"expected '{ch}' but the input ended")
        if self.s[self.i] != ch:
            self.fail(f"expected '{ch}', found '{self.s[self.i]}'")
        self.i += 1

    def ident(self, what: str) -> tuple:
        self.skip()
        m = _IDENT.match(self.s, self.i)
        if not m:
            self.fail(f"expected {what}")
        self.i = m.end()
        return m.group(), m.start()

    def number(self) -> float:
        self.skip()
        m = _NUMBER.match(self.s, self.i)
        if not m:
            self.fail("expected a number")
        self.i = m.end()
        return float(m.group())

    def spec(self, dim: int) -> FieldSpec:
        family, at = self.ident("a family name")
        if family not in FAMILIES:
            self.fail(f"unknown family '{family}' (known: {', '.join(FAMILIES)})", at)
        allowed = FAMILIES[family]
        self.expect("(")
        params: Dict[str, Union[float, FieldSpec]] = {}
        while True:
            key, at = self.ident("a parameter name")
            if key not in allowed:
                self.fail(f"unknown parameter '{key}' for {family}", at)
            if key in params:
                self.fail(f"duplicate parameter '{key}'", at)
            self.expect("=")
            params[key] = self.spec(dim) if key == "base" else self.number()
            self.skip()
            if self.i < len(self.s) and self.s[self.i] == ",":
                self.i += 1
                continue
            self.expect(")")
            break
        missing = [k for k in allowed if k not in params]
        if missing:
            self.fail(f"{family} is missing {', '.join(missing)}")
        return FieldSpec(family, params, dim)


def _check_semantics(spec: FieldSpec):
    p = spec.params
    if spec.family in ONE_DIMENSIONAL and spec.dim != 1:
        raise ParameterError(f"{spec.family} fields are one-dimensional, got dim={spec.dim}")
    if spec.family == "gauss" and not p["a"] > 0:
        raise ParameterError(f"gauss needs a > 0, got a={p['a']}")
    if spec.family == "hermite" and (p["k"] != int(p["k"]) or p["k"] < 1):
        raise ParameterError(f"hermite needs an integer k >= 1, got k={p['k']}")
    if spec.family == "mix" and not 0 < p["eps"] < 1:
        raise ParameterError(f"mix needs 0 < eps < 1, got eps={p['eps']}")
    if spec.family == "shifted":
        if not p["s"] > 0:
            raise ParameterError(f"shifted needs s > 0, got s={p['s']}")
        if p["base"].family == "mix":
            raise ParameterError("shifted cannot wrap a mix density")
        _check_semantics(p["base"])


def parse_field_spec(s: str, dim: int = 1) -> FieldSpec:
    """Parse ``family(key=number, ...)``; errors carry a 1-based position."""
    if not 1 <= dim <= 3:
        raise ParameterError(f"dimension must lie in 1..3, got {dim}")
    p = _Parser(s)
    spec = p.spec(dim)
    p.skip()
    if p.i != len(s):
        p.fail(f"unexpected trailing text '{s[p.i:]}'")
    _check_semantics(spec)
    return spec


def format_field_spec(spec: FieldSpec) -> str:
    parts = []
    for key in FAMILIES[spec.family]:
        v = spec.params[key]
        parts.append(f"{key}={format_field_spec(v) if key == 'base' else repr(float(v))}")
    return f"{spec.family}({','.join(parts)})"


def build_field(spec: FieldSpec, order: Optional[int] = None) -> ScalarField:
    p = spec.params
    if spec.family == "gauss":
        return gaussian_trial(p["a"], spec.dim)
    if spec.family == "tilt":
        return exp_tilt(p["c"], p["a"], spec.dim)
    if spec.family == "hermite":
        k = int(p["k"])
        # positivity is only a meaningful requirement for even degrees
        return hermite_perturb(k, p["eps"], order, check_positive=(k % 2 == 0))
    if spec.family == "mix":
        return gamma_mixture(p["eps"], p["b"])
    if spec.family == "shifted":
        return shift_tilt(build_field(p["base"], order), p["x0"], p["a"], p["s"])
    raise ParameterError(f"unknown family {spec.family}")


# -- output -------------------------------------------------------------------

def _flatten(rec: dict) -> dict:
    out = {}
    for k, v in rec.items():
        if isinstance(v, (list, tuple, np.ndarray)) and all(np.isscalar(t) for t in v):
            for i, t in enumerate(v):
                out[f"{k}_{i}"] = t
        elif isinstance(v, dict):
            for kk, vv in _flatten(v).items():
                out[f"{k}.{kk}"] = vv
        else:
            out[k] = v
    return out


def _cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(records: List[dict], fmt: str, columns: Optional[List[str]] = None) -> str:
    if fmt == "json":
        body = records[0] if len(records) == 1 and columns is None else records
        return json.dumps(body, indent=2) + "\n"
    flat = [_flatten(r) for r in records]
    cols = columns or (list(flat[0]) if flat else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in flat:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig):
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finite(x: float):
    return x if math.isfinite(x) else None


# -- subcommands --------------------------------------------------------------

def cmd_deficit(args, cfg: RunConfig) -> int:
    spec = parse_field_spec(args.field, args.dim)
    u = build_field(spec, cfg.quad_order)
    if spec.family == "mix":
        rep = deficit_gamma(u, cfg.quad_order)
    else:
        rep = deficit_star(u, cfg.quad_order)
    rec = {"field": format_field_spec(spec), "dim": spec.dim, **rep.to_dict()}
    _emit(render([rec], cfg.out_format or "json"), cfg)
    return EXIT_OK


def cmd_project(args, cfg: RunConfig) -> int:
    spec = parse_field_spec(args.field, args.dim)
    if spec.family == "mix":
        raise ParameterError("project acts on mu-side fields; mix is a gamma density")
    u = build_field(spec, cfg.quad_order)
    proj = project_to_extremals(u, args.restarts, cfg.seed, cfg.quad_order)
    pd = math.pi * deficit_star(u, cfg.quad_order).deficit
    ratio = pd / proj.residual_sq if proj.residual_sq > MIN_RESIDUAL else math.inf
    check = InequalityReport.of(cfg.kappa * proj.residual_sq, pd, cfg.tol, "kappa*residual<=pi_deficit")
    rec = {"field": format_field_spec(spec), **proj.to_dict(), "pi_deficit": pd,
           "ratio": _finite(ratio), "kappa": cfg.kappa, "check": check.to_dict()}
    _emit(render([rec], cfg.out_format or "json"), cfg)
    return EXIT_OK if check.holds else EXIT_CHECK_FAILED


def cmd_reduce(args, cfg: RunConfig) -> int:
    spec = parse_field_spec(args.field, args.dim)
    if spec.family == "mix":
        raise ParameterError("reduce acts on mu-side fields; mix is a gamma density")
    u = build_field(spec, cfg.quad_order)
    if not args.check:
        red = reduce_to_normalized(u, cfg.quad_order)
        rec = {"field": format_field_spec(spec), **red.to_dict(),
               "deficit_w": deficit_star(red.w, cfg.quad_order).deficit}
        _emit(render([rec], cfg.out_format or "json"), cfg)
        return EXIT_OK
    reps = verify_reduction_identities(u, cfg.quad_order)
    _emit(render([r.to_dict() for r in reps], cfg.out_format or "csv",
                 ["name", "lhs", "rhs", "abs_err"]), cfg)
    return EXIT_OK if all(r.abs_err <= cfg.tol for r in reps) else EXIT_CHECK_FAILED


def cmd_sharpness(args, cfg: RunConfig) -> int:
    if not 0 < args.a_min <= args.a_max:
        raise ParameterError(f"need 0 < a-min <= a-max, got {args.a_min}, {args.a_max}")
    if args.steps < 1:
        raise ParameterError(f"--steps must be >= 1, got {args.steps}")
    grid = np.geomspace(args.a_max, args.a_min, args.steps) if args.steps > 1 else [args.a_max]
    rows = ratio_scan([float(a) for a in grid], args.dim)
    _emit(render([r.to_dict() for r in rows], cfg.out_format or "csv",
                 ["a", "n", "pi_deficit", "dist_sq", "ratio", "branch"]), cfg)
    return EXIT_OK


def _density(spec: FieldSpec, order) -> ScalarField:
    if spec.dim != 1:
        raise ParameterError("transport is one-dimensional")
    f = build_field(spec, order)
    return f if spec.family == "mix" else u_to_gamma_density(f)


def cmd_transport(args, cfg: RunConfig) -> int:
    spec = parse_field_spec(args.density, 1)
    rep = transport_defect(_density(spec, cfg.quad_order), args.grid)
    rec = {"density": format_field_spec(spec), **rep.to_dict()}
    ok = all(b.holds for b in rep.bounds)
    if (cfg.out_format or "json") == "csv":
        rec.pop("bounds")
        rec.update({f"holds.{b.name}": b.holds for b in rep.bounds})
    _emit(render([rec], cfg.out_format or "json"), cfg)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _float_list(text: str) -> List[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ParameterError(f"expected a comma-separated list of numbers, got '{text}'") from exc
    if not vals:
        raise ParameterError("empty list")
    return vals


def cmd_scan_blowup(args, cfg: RunConfig) -> int:
    rows = blowup_scan(_float_list(args.eps_list), _float_list(args.b_list), args.grid)
    _emit(render([r.to_dict() for r in rows], cfg.out_format or "csv", list(BlowupRow.FIELDS)), cfg)
    return EXIT_OK if all(r.holds for r in rows) else EXIT_CHECK_FAILED


def cmd_suite(args, cfg: RunConfig) -> int:
    results = []
    for crit in acceptance.criteria(cfg.kappa, cfg.seed):
        res = crit()
        print(res.line(), file=sys.stderr, flush=True)
        results.append(res)
    recs = [{"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
            for r in results]
    _emit(render(recs, cfg.out_format or "csv", list(recs[0])), cfg)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


# -- argument parsing ---------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--order", type=int, default=d(None),
                        help="quadrature points per axis (default: per-dimension)")
    parser.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="check tolerance")
    parser.add_argument("--kappa", type=float, default=d(DEFAULT_KAPPA),
                        help="stability constant used by checks (default 2*pi)")
    parser.add_argument("--seed", type=int, default=d(DEFAULT_SEED), help="multistart seed")
    parser.add_argument("--format", dest="out_format", choices=("csv", "json"), default=d(None),
                        help="output format (default depends on the subcommand)")
    parser.add_argument("--out", dest="out_path", default=d(None), help="write data to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsistab",
                                     description="Numerical checks for Gaussian log-Sobolev stability.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deficit", parents=[common], help="deficit of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(func=cmd_deficit)

    p = sub.add_parser("project", parents=[common], help="distance to the extremal family")
    p.add_argument("--field", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("reduce", parents=[common], help="normalize and center a field")
    p.add_argument("--field", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--check", action="store_true", help="report both sides of each identity")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sharpness", parents=[common], help="trial-family ratio scan")
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("transport", parents=[common], help="1-D transport defects")
    p.add_argument("--density", required=True,
                   help="mix(...) is a gamma density; other families are mapped from the mu side")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("scan-blowup", parents=[common], help="mixture scan")
    p.add_argument("--eps-list", required=True)
    p.add_argument("--b-list", required=True)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.set_defaults(func=cmd_scan_blowup)

    p = sub.add_parser("suite", parents=[common], help="run every acceptance criterion")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.order, args.tol, args.kappa, args.seed, args.out_format, args.out_path)
        if cfg.quad_order is not None:
            build_rule(1, cfg.quad_order)
        return args.func(args, cfg)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
