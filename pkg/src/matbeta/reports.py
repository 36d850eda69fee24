"""Residual reports: the one record type every identity check emits.

A report is strict (residual gates pass/fail) or report-only (both sides
recorded, nothing gated -- used where a claimed relation does not hold in
general and the point is to surface the measurement).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

__all__ = ["ResidualReport", "make_report", "report_line", "summarize"]


@dataclass(frozen=True)
class ResidualReport:
    name: str
    residual: float
    tolerance: float
    passed: bool
    mode: str
    notes: str = ""


def make_report(name: str, residual, tolerance, mode: str = "strict",
                notes: str = "") -> ResidualReport:
    """Build a report; strict mode derives ``passed`` from the residual."""
    if mode not in ("strict", "report-only"):
        raise ValueError(f"mode must be 'strict' or 'report-only', got {mode!r}")
    residual = float(residual)
    passed = bool(residual <= tolerance) if mode == "strict" else True
    return ResidualReport(name=name, residual=residual, tolerance=float(tolerance),
                          passed=passed, mode=mode, notes=notes)


def report_line(report: ResidualReport) -> str:
    """One JSON line per report, fields in declaration order."""
    return json.dumps(asdict(report))


def summarize(reports) -> dict:
    """Aggregate counts; ``ok`` is true iff every strict check passed."""
    reports = list(reports)
    strict = [r for r in reports if r.mode == "strict"]
    failed = [r for r in strict if not r.passed]
    return {
        "total": len(reports),
        "strict": len(strict),
        "strict_failed": len(failed),
        "ok": not failed,
    }
