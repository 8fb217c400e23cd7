"""Experiment reports and their emission formats.

A report is a flat list of rows sharing one scenario id.  Estimate rows
carry a revenue estimate; ratio rows carry a ratio with its propagated
uncertainty; any row may additionally carry the bound it was tested
against and a pass/fail verdict.  The CSV column set is fixed:

    scenario_id, mechanism, mean, std_err, n_samples, method,
    bound_tested, verdict

json-lines uses the same keys, one object per row, and round-trips through
its own parser byte-for-byte.  Wall-clock runtime lives on the report
object only, never in emitted rows, so emission is reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import IOFailure

__all__ = [
    "ReportRow",
    "ExperimentReport",
    "emit_report",
    "parse_report_jsonl",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "scenario_id",
    "mechanism",
    "mean",
    "std_err",
    "n_samples",
    "method",
    "bound_tested",
    "verdict",
)


@dataclass(frozen=True)
class ReportRow:
    mechanism: str
    mean: float | None
    std_err: float | None
    n_samples: int
    method: str  # "mc" | "exact" | "quadrature" | "ratio"
    bound_tested: str = ""
    verdict: str = ""  # "pass" | "fail" | ""


@dataclass(frozen=True)
class ExperimentReport:
    scenario_id: str
    rows: tuple
    seed: int
    runtime_seconds: float = 0.0

    @property
    def estimates(self):
        return [r for r in self.rows if r.method in ("mc", "exact", "quadrature")]

    @property
    def ratios(self):
        return [r for r in self.rows if r.method == "ratio"]

    @property
    def verdicts(self):
        return [(r.mechanism, r.bound_tested, r.verdict) for r in self.rows if r.verdict]

    @property
    def passed(self) -> bool:
        return all(r.verdict != "fail" for r in self.rows)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_dict(report: ExperimentReport, row: ReportRow) -> dict:
    return {
        "scenario_id": report.scenario_id,
        "mechanism": row.mechanism,
        "mean": row.mean,
        "std_err": row.std_err,
        "n_samples": row.n_samples,
        "method": row.method,
        "bound_tested": row.bound_tested,
        "verdict": row.verdict,
    }


def emit_report(report: ExperimentReport, format: str = "csv") -> bytes:
    """Serialize a report; stable row ordering, fixed columns."""
    if format == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for row in report.rows:
            d = _row_dict(report, row)
            lines.append(",".join(_cell(d[c]) for c in CSV_COLUMNS))
        return ("\n".join(lines) + "\n").encode()
    if format == "json-lines":
        lines = [
            json.dumps(_row_dict(report, row), sort_keys=False) for row in report.rows
        ]
        return ("\n".join(lines) + ("\n" if lines else "")).encode()
    if format == "text-table":
        header = list(CSV_COLUMNS)
        table = [header]
        for row in report.rows:
            d = _row_dict(report, row)
            table.append([_cell(d[c]) for c in CSV_COLUMNS])
        widths = [max(len(r[j]) for r in table) for j in range(len(header))]
        lines = [
            "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
            for r in table
        ]
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {format!r}")


def parse_report_jsonl(data: bytes) -> ExperimentReport:
    """Rebuild a report from its json-lines emission."""
    rows = []
    scenario_id = ""
    for line in data.decode().splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        scenario_id = d["scenario_id"]
        rows.append(
            ReportRow(
                mechanism=d["mechanism"],
                mean=d["mean"],
                std_err=d["std_err"],
                n_samples=d["n_samples"],
                method=d["method"],
                bound_tested=d["bound_tested"],
                verdict=d["verdict"],
            )
        )
    return ExperimentReport(scenario_id=scenario_id, rows=tuple(rows), seed=0)


def write_report(report: ExperimentReport, format: str, path: str | None) -> bytes:
    """Emit and optionally write to a file; returns the bytes either way."""
    data = emit_report(report, format)
    if path is not None:
        try:
            with open(path, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc}") from exc
    return data
