"""CSV and JSON serialization of sweep reports, verdicts and estimates."""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .ec_q import RationalPoint
from .fingerprint import ComparisonVerdict, DensityEstimate, SweepReport

CSV_COLUMNS = ("p", "nu", "eps", "rad")
WITNESS_COLUMNS = ("condition", "direction", "p", "lhs", "rhs")


def decimal(x: float) -> str:
    return format(x, ".12g")


def point_text(P: RationalPoint) -> str:
    if P.x is None:
        return "inf"
    return f"{P.x} {P.y}"


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_to_csv(report: SweepReport) -> str:
    rows = []
    for r in report.rows:
        if r.stats is None:
            rows.append((r.p, "", "", ""))
        else:
            rows.append((r.p, r.stats.nu, r.stats.eps, r.stats.rad))
    return _write_csv(CSV_COLUMNS, rows)


def report_to_dict(report: SweepReport) -> dict:
    curves = [str(E) for E in report.curves]
    gens = [[point_text(P) for P in g] for g in report.generators]
    if len(curves) == 1:
        curves = curves[0]
        gens = [g[0] for g in gens]
    rows = [
        {"p": r.p, "nu": r.stats.nu, "eps": r.stats.eps, "rad": r.stats.rad}
        if r.stats is not None else {"p": r.p, "nu": None, "eps": None, "rad": None}
        for r in report.rows
    ]
    return {
        "curve": curves,
        "generators": gens,
        "ell": report.ell,
        "range": list(report.prime_range),
        "rows": rows,
        "flags": [{"p": p, "error": code} for p, code in report.flags],
    }


def report_to_json(report: SweepReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def read_rows_csv(text: str) -> list[tuple[int, int | None, int | None, int | None]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for rec in reader:
        p, *rest = rec
        out.append((int(p), *(int(v) if v != "" else None for v in rest)))
    return out


def read_rows_json(text: str) -> list[tuple[int, int | None, int | None, int | None]]:
    return [(r["p"], r["nu"], r["eps"], r["rad"]) for r in json.loads(text)["rows"]]


def witnesses_to_csv(verdicts: Iterable[ComparisonVerdict]) -> str:
    rows = []
    for v in verdicts:
        rows += [(v.name, "forward", p, x, y) for p, x, y in v.witnesses]
        rows += [(v.name, "reverse", p, x, y) for p, x, y in v.reverse_witnesses]
    return _write_csv(WITNESS_COLUMNS, rows)


def verdict_to_dict(v: ComparisonVerdict) -> dict:
    return {
        "condition": v.name,
        "holds_on_window": v.holds_on_window,
        "primes_compared": v.primes_compared,
        "excluded": v.excluded,
        "witness_total": v.n_witnesses,
        "reverse_witness_total": v.n_reverse,
        "witnesses": [list(w) for w in v.witnesses],
        "reverse_witnesses": [list(w) for w in v.reverse_witnesses],
    }


def density_to_dict(d: DensityEstimate) -> dict:
    return {
        "hits": d.hits,
        "total": d.total,
        "fraction": decimal(d.fraction),
        "wilson95": [decimal(d.wilson95[0]), decimal(d.wilson95[1])],
        "window": list(d.window),
    }
