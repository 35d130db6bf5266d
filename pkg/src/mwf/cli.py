"""Command-line front end.

Jobs come either from flags (``mwf sweep --curve "-2 0" --point "-1 1" ...``)
or from a config file (``mwf --config job.conf``) in key=value or JSON form.
Each ``--point`` belongs to the most recent ``--curve``.  Exit status is 0 on
success, 2 when a comparison produced witnesses, 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import _kernels
from .ec_fp import DEFAULT_CLOSURE_CAP
from .ec_q import CurveQ, RationalPoint, parse_rational, torsion_order
from .errors import MWFError, ParseError, PointNotOnCurve
from .fingerprint import (
    DensityQuery,
    compare,
    epsilon_distribution,
    estimate_density,
    product_sweep,
    sweep,
    theorem_demo,
)
from .fp import is_prime
from .heights import DEFAULT_K_MAX, DEFAULT_REG_TOL, DEFAULT_TOL, canonical_height, is_almost_free, regulator_with_error
from .isogeny import dual_check, pushforward, velu_2isogeny, velu_odd_isogeny
from .report import (
    decimal,
    density_to_dict,
    point_text,
    report_to_csv,
    report_to_json,
    verdict_to_dict,
    witnesses_to_csv,
)

log = logging.getLogger("mwf")

COMMANDS = ("sweep", "product-sweep", "compare", "density", "isogeny", "heights", "demo")
KEYS = {"command", "curve", "point", "ell", "primes", "out", "format", "threads", "closure_cap", "reg_tol",
        "height_tol", "height_method", "condition", "m", "kernel"}


@dataclass
class JobConfig:
    command: str
    curves: list[CurveQ] = field(default_factory=list)
    points: list[list[RationalPoint]] = field(default_factory=list)
    tuples: list[tuple[RationalPoint, ...]] = field(default_factory=list)
    ell: int | None = None
    lo: int = 5
    hi: int = 10**4
    out: str | None = None
    fmt: str = "csv"
    threads: int = 1
    closure_cap: int = DEFAULT_CLOSURE_CAP
    reg_tol: float = DEFAULT_REG_TOL
    height_tol: float = DEFAULT_TOL
    height_method: str = "series"
    conditions: tuple[int, ...] = (2, 3, 4)
    ms: tuple[int, ...] = ()
    kernel: str | None = None


# ---------------------------------------------------------------- parsing


def _rational(text: str, where) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", *where) from None


def _curve(text: str, where) -> CurveQ:
    parts = text.split()
    if len(parts) != 2:
        raise ParseError(f"curve must be 'a b', got {text!r}", *where)
    try:
        return CurveQ(int(parts[0]), int(parts[1]))
    except ValueError:
        raise ParseError(f"curve coefficients must be integers: {text!r}", *where) from None


def _point(E: CurveQ, text: str, where) -> RationalPoint:
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return E.infinity
    parts = text.split()
    if len(parts) != 2:
        raise ParseError(f"point must be 'x y' or 'inf', got {text!r}", *where)
    x, y = (_rational(t, where) for t in parts)
    r = E.residual(x, y)
    if r != 0:
        raise PointNotOnCurve(f"({x}, {y}) is not on {E.equation}: residual {r}", r)
    return E.point(x, y)


def _int(text, where, lo=None) -> int:
    try:
        v = int(str(text).strip())
    except ValueError:
        raise ParseError(f"not an integer: {text!r}", *where) from None
    if lo is not None and v < lo:
        raise ParseError(f"must be >= {lo}, got {v}", *where)
    return v


def _float(text, where) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", *where) from None
    if not v > 0:
        raise ParseError(f"must be positive, got {text!r}", *where)
    return v


def _primes(text: str, where) -> tuple[int, int]:
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ParseError(f"prime range must be LO:HI, got {text!r}", *where)
    lo, hi = (_int(t, where, 0) for t in parts)
    if lo > hi:
        raise ParseError(f"empty prime range {text!r}", *where)
    return max(lo, 5), hi


def build_config(items: list[tuple[str, str, int | None]]) -> JobConfig:
    """Validate ``(key, value, line)`` items into a :class:`JobConfig`."""
    scalars: dict[str, tuple[str, int | None]] = {}
    entries: list[tuple[str, int | None, list[tuple[str, int | None]]]] = []
    ms: list[int] = []
    for key, value, line in items:
        where = (line, key)
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", *where)
        if key == "curve":
            entries.append((value, line, []))
        elif key == "point":
            if not entries:
                raise ParseError("point given before any curve", *where)
            entries[-1][2].append((value, line))
        elif key == "m":
            ms.extend(_int(v, where, 0) for v in str(value).split(","))
        else:
            scalars[key] = (value, line)

    def where(key):
        return (scalars[key][1], key)

    if "command" not in scalars:
        raise ParseError("no command given", None, "command")
    cmd = str(scalars["command"][0]).strip()
    if cmd not in COMMANDS:
        raise ParseError(f"unknown command {cmd!r}", *where("command"))
    cfg = JobConfig(cmd, ms=tuple(ms))
    for text, line, pts in entries:
        cfg.curves.append(_curve(text, (line, "curve")))
    if cmd == "product-sweep":
        for _, _, pts in entries:
            for text, line in pts:
                comps = text.split(";")
                if len(comps) != len(cfg.curves):
                    raise ParseError(f"product point needs {len(cfg.curves)} ';'-separated components",
                                     line, "point")
                cfg.tuples.append(tuple(_point(E, c, (line, "point")) for E, c in zip(cfg.curves, comps)))
    else:
        for E, (_, _, pts) in zip(cfg.curves, entries):
            cfg.points.append([_point(E, text, (line, "point")) for text, line in pts])
    if "ell" in scalars:
        cfg.ell = _int(scalars["ell"][0], where("ell"), 2)
        if not is_prime(cfg.ell):
            raise ParseError(f"ell must be prime, got {cfg.ell}", *where("ell"))
    if "primes" in scalars:
        cfg.lo, cfg.hi = _primes(scalars["primes"][0], where("primes"))
    if "out" in scalars:
        cfg.out = str(scalars["out"][0])
    if "format" in scalars:
        cfg.fmt = str(scalars["format"][0]).strip()
        if cfg.fmt not in ("csv", "json"):
            raise ParseError(f"format must be csv or json, got {cfg.fmt!r}", *where("format"))
    if "threads" in scalars:
        cfg.threads = _int(scalars["threads"][0], where("threads"), 1)
    if "closure_cap" in scalars:
        cfg.closure_cap = _int(scalars["closure_cap"][0], where("closure_cap"), 1)
    if "reg_tol" in scalars:
        cfg.reg_tol = _float(scalars["reg_tol"][0], where("reg_tol"))
    if "height_tol" in scalars:
        cfg.height_tol = _float(scalars["height_tol"][0], where("height_tol"))
    if "height_method" in scalars:
        cfg.height_method = str(scalars["height_method"][0]).strip()
        if cfg.height_method not in ("series", "doubling"):
            raise ParseError(f"unknown height method {cfg.height_method!r}", *where("height_method"))
    if "condition" in scalars:
        text = str(scalars["condition"][0]).strip()
        if text != "all":
            c = _int(text, where("condition"))
            if c not in (2, 3, 4):
                raise ParseError(f"condition must be 2, 3, 4 or all, got {text!r}", *where("condition"))
            cfg.conditions = (c,)
    if "kernel" in scalars:
        cfg.kernel = str(scalars["kernel"][0])
    _check_shape(cfg)
    return cfg


def _check_shape(cfg: JobConfig) -> None:
    need_curves = {"sweep": 1, "product-sweep": 1, "compare": 2, "demo": 2, "isogeny": 1, "heights": 1,
                   "density": 1}[cfg.command]
    if len(cfg.curves) < need_curves:
        raise ParseError(f"{cfg.command} needs {need_curves} curve(s)", None, "curve")
    if cfg.command in ("sweep", "product-sweep", "compare", "demo", "density") and cfg.ell is None:
        raise ParseError(f"{cfg.command} needs ell", None, "ell")
    if cfg.command == "isogeny" and cfg.kernel is None:
        raise ParseError("isogeny needs a kernel ('x0' or 'x y')", None, "kernel")
    if cfg.command == "density" and not any(cfg.points):
        raise ParseError("density needs at least one point", None, "point")


def parse_config(text: str) -> JobConfig:
    """Parse a job in JSON or in ``key = value`` lines (``#`` starts a comment)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno) from None
        items = []
        for key, value in doc.items():
            key = key.replace("-", "_")
            if key == "curves":
                for c in value:
                    items.append(("curve", str(c["curve"]), None))
                    items += [("point", str(p), None) for p in c.get("points", [])]
            elif isinstance(value, list):
                items += [(key, str(v), None) for v in value]
            else:
                items.append((key, str(value), None))
        return build_config(items)
    items = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {raw!r}", n)
        key, value = (s.strip() for s in line.split("=", 1))
        items.append((key.replace("-", "_"), value, n))
    return build_config(items)


# ---------------------------------------------------------------- running


def _emit(cfg: JobConfig, text: str) -> None:
    if cfg.out and cfg.out != "-":
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _run_sweep(cfg):
    if cfg.command == "sweep":
        rep = sweep(cfg.curves[0], cfg.points[0], cfg.ell, cfg.lo, cfg.hi, cfg.closure_cap)
    else:
        rep = product_sweep(cfg.curves, cfg.tuples, cfg.ell, cfg.lo, cfg.hi, cfg.closure_cap)
    _emit(cfg, report_to_csv(rep) if cfg.fmt == "csv" else report_to_json(rep))
    if rep.flags:
        log.warning("%d rows flagged", len(rep.flags))
    return 0


def _run_compare(cfg):
    (E1, E2), (g1, g2) = cfg.curves[:2], cfg.points[:2]
    A = sweep(E1, g1, cfg.ell, cfg.lo, cfg.hi, cfg.closure_cap, also_good_for=[E2])
    B = sweep(E2, g2, cfg.ell, cfg.lo, cfg.hi, cfg.closure_cap, also_good_for=[E1])
    verdicts = [compare(A, B, c) for c in cfg.conditions]
    if cfg.fmt == "csv":
        _emit(cfg, witnesses_to_csv(verdicts))
    else:
        _emit(cfg, _json({"ell": cfg.ell, "range": [cfg.lo, cfg.hi],
                          "verdicts": [verdict_to_dict(v) for v in verdicts]}))
    for v in verdicts:
        log.info("%s: forward %d, reverse %d witnesses over %d primes",
                 v.name, v.n_witnesses, v.n_reverse, v.primes_compared)
    return 2 if any(v.n_witnesses or v.n_reverse for v in verdicts) else 0


def _run_density(cfg):
    pts = [P for group in cfg.points for P in group]
    if cfg.ms:
        P, avoid = pts[0], pts[1:]
        ests = {m: estimate_density(DensityQuery.avoiding(P, avoid, cfg.ell, m, cfg.hi, cfg.lo)) for m in cfg.ms}
    else:
        ests = epsilon_distribution(pts[0], cfg.ell, cfg.hi, cfg.lo)
    if cfg.fmt == "csv":
        lines = ["m,hits,total,fraction,wilson_lo,wilson_hi"]
        for m, d in sorted(ests.items()):
            lines.append(f"{m},{d.hits},{d.total},{decimal(d.fraction)},"
                         f"{decimal(d.wilson95[0])},{decimal(d.wilson95[1])}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json({"ell": cfg.ell, "points": [point_text(P) for P in pts],
                          "estimates": {str(m): density_to_dict(d) for m, d in sorted(ests.items())}}))
    return 0


def _run_isogeny(cfg):
    E = cfg.curves[0]
    parts = cfg.kernel.split()
    if len(parts) == 1:
        phi = velu_2isogeny(E, _rational(parts[0], (None, "kernel")))
    else:
        phi = velu_odd_isogeny(E, _point(E, cfg.kernel, (None, "kernel")))
    pts = cfg.points[0] if cfg.points else []
    doc = {
        "domain": str(phi.domain),
        "codomain": str(phi.codomain),
        "degree": phi.degree,
        "kernel_x": [str(x) for x in phi.kernel_x],
        "images": {point_text(P): point_text(pushforward(phi, P)) for P in pts},
    }
    samples = [P for P in pts if torsion_order(P) is None]
    if phi.degree == 2 and samples:
        doc["dual_check"] = dual_check(phi, samples)
    _emit(cfg, _json(doc))
    return 0


def _run_heights(cfg):
    pts = cfg.points[0] if cfg.points else []
    rows = []
    for P in pts:
        h = canonical_height(P, cfg.height_method, cfg.height_tol, DEFAULT_K_MAX)
        rows.append({"point": point_text(P), "hhat": decimal(h.hhat), "err_bound": decimal(h.err_bound),
                     "method": h.method, "converged": h.converged, "torsion_order": torsion_order(P)})
    reg, err = regulator_with_error(pts)
    try:
        free = is_almost_free(pts, cfg.reg_tol)
    except MWFError as exc:
        free = exc.code
    _emit(cfg, _json({"curve": str(cfg.curves[0]), "heights": rows, "regulator": decimal(reg),
                      "regulator_err": decimal(err), "almost_free": free}))
    return 0


def _run_demo(cfg):
    (E1, E2), (g1, g2) = cfg.curves[:2], cfg.points[:2]
    rep = theorem_demo(E1, g1, E2, g2, cfg.ell, cfg.lo, cfg.hi, cfg.ms or (1, 2), cfg.closure_cap)
    _emit(cfg, _json({"ell": rep.ell, "range": list(rep.window), "primes_compared": rep.primes_compared,
                      "almost_free": list(rep.almost_free),
                      "qualifying": {str(m): list(ps) for m, ps in rep.qualifying.items()}}))
    return 0


RUNNERS = {
    "sweep": _run_sweep,
    "product-sweep": _run_sweep,
    "compare": _run_compare,
    "density": _run_density,
    "isogeny": _run_isogeny,
    "heights": _run_heights,
    "demo": _run_demo,
}


def run(cfg: JobConfig) -> int:
    _kernels.set_threads(cfg.threads)
    return RUNNERS[cfg.command](cfg)


# ---------------------------------------------------------------- argparse


def _tagged(key):
    return lambda s: (key, s)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for "witnesses found"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--curve", dest="items", action="append", type=_tagged("curve"), metavar='"A B"',
                        help="curve y^2 = x^3 + Ax + B (repeatable)")
    common.add_argument("--point", dest="items", action="append", type=_tagged("point"), metavar='"X Y"',
                        help="point on the most recent --curve; rationals as n/d, or 'inf'; "
                             "product-sweep takes ';'-separated components")
    common.add_argument("--ell", help="prime ell")
    common.add_argument("--primes", metavar="LO:HI", help="prime window (default 5:10000)")
    common.add_argument("--out", help="output file (default or '-': stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", help="worker threads for batch kernels")
    common.add_argument("--closure-cap", help="largest subgroup table per prime")
    common.add_argument("--reg-tol", help="regulator threshold for almost-freeness")
    common.add_argument("--height-tol", help="convergence tolerance of the doubling height")
    common.add_argument("--height-method", choices=("series", "doubling"))
    common.add_argument("--condition", help="2 (order), 3 (exponent), 4 (radical) or all")
    common.add_argument("--m", dest="items", action="append", type=_tagged("m"),
                        help="target eps value(s), comma separated")
    common.add_argument("--kernel", help="isogeny kernel: x0 of a 2-torsion point, or 'x y' of odd order")

    ap = _Parser(prog="mwf", description="ell-adic statistics of reduced Mordell-Weil subgroups")
    ap.add_argument("--config", help="read the job from a key=value or JSON file")
    sub = ap.add_subparsers(dest="command")
    helps = {
        "sweep": "per-prime (nu, eps, rho) of a subgroup of one curve",
        "product-sweep": "per-prime stats of a subgroup of a product of curves",
        "compare": "compare two curves' statistics prime by prime",
        "density": "fraction of primes with prescribed eps values",
        "isogeny": "build a Vélu isogeny and push points forward",
        "heights": "canonical heights, regulator and almost-freeness",
        "demo": "primes where eps of the first subgroup is >= m and of the second is 0",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return ap


_FLAG_KEYS = ("ell", "primes", "out", "format", "threads", "closure_cap", "reg_tol", "height_tol",
              "height_method", "condition", "kernel")


def config_from_args(args: argparse.Namespace) -> JobConfig:
    items = [("command", args.command, None)]
    items += [(k, v, None) for k, v in (args.items or [])]
    for key in _FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            items.append((key, v, None))
    return build_config(items)


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("MWF_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        elif args.command:
            cfg = config_from_args(args)
        else:
            ap.print_usage(sys.stderr)
            return 1
        return run(cfg)
    except MWFError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
