"""Reports and their CSV/JSON serialization.

Machine-readable outputs never contain floats for exact quantities:
Fractions are written as decimal numerator/denominator strings.  Reports
carry no timings or worker counts so that reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cyclotomic import CyclotomicInt
from .rvmodel import Histogram

FRACTION_TAG = "__fraction__"


@dataclass
class Report:
    mode: str
    config: dict
    results: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    complete: bool = True
    version: str = ""

    @property
    def passed(self) -> bool:
        return self.complete and all(r.get("pass", True) for r in self.results)

    def add(self, statement: str, **values) -> dict:
        entry = {"statement": statement, **values}
        self.results.append(entry)
        return entry

    def failures(self) -> list:
        return [r for r in self.results if not r.get("pass", True)]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "version": self.version,
            "config": self.config,
            "complete": self.complete,
            "passed": self.passed,
            "results": self.results,
            "tables": self.tables,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        return cls(
            mode=data["mode"],
            config=data["config"],
            results=data["results"],
            tables=data["tables"],
            complete=data["complete"],
            version=data["version"],
        )


def _encode(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return {FRACTION_TAG: [str(obj.numerator), str(obj.denominator)]}
    if isinstance(obj, CyclotomicInt):
        return {"__cyclotomic__": [obj.p, [_encode(Fraction(c)) for c in obj.coeffs]]}
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports; use Fraction or a summary string")
    return obj


def _decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {FRACTION_TAG}:
            n, d = obj[FRACTION_TAG]
            return Fraction(int(n), int(d))
        if set(obj) == {"__cyclotomic__"}:
            p, coeffs = obj["__cyclotomic__"]
            vals = [_decode(c) for c in coeffs]
            vals = [int(v) if v.denominator == 1 else v for v in vals]
            return CyclotomicInt(p, vals)
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


def to_json(report: Report) -> str:
    return json.dumps(_encode(report.to_dict()), indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> Report:
    return Report.from_dict(_decode(json.loads(text)))


def normalize(report: Report) -> Report:
    """The report as it reads back after a JSON round trip."""
    return from_json(to_json(report))


# -- CSV tables ----------------------------------------------------------------


def histogram_rows(hist: Histogram, p: int) -> list:
    """Rows c0..c_{p-2}, mass_numerator, mass_denominator in coordinate order."""
    rows = []
    for s, m in hist.items():
        m = Fraction(m)
        rows.append([*s.coeffs, m.numerator, m.denominator])
    return rows


def histogram_header(p: int) -> list:
    return [f"c{i}" for i in range(max(p - 1, 1))] + ["mass_numerator", "mass_denominator"]


MOMENT_HEADER = [
    "j", "k", "sqrt_n_divisor", "empirical_num", "empirical_den",
    "empirical_zeta_num", "empirical_zeta_den", "predicted_num", "predicted_den", "gaussian_ref", "summary",
]


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def read_csv(text: str) -> tuple[list, list]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def emit(report: Report, out_dir, fmt: str = "json") -> list[Path]:
    """Write the report (JSON) or its tables (CSV) under ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    if fmt == "json":
        path = out / f"{report.mode}.json"
        path.write_text(to_json(report))
        written.append(path)
    elif fmt == "csv":
        for name, table in sorted(report.tables.items()):
            path = out / f"{report.mode}_{name}.csv"
            path.write_text(write_csv(table["header"], table["rows"]))
            written.append(path)
        path = out / f"{report.mode}_results.csv"
        keys = sorted({k for r in report.results for k in r})
        rows = [[_cell(r.get(k, "")) for k in keys] for r in report.results]
        path.write_text(write_csv(keys, rows))
        written.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return written


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)
