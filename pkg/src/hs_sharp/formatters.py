"""Shared formatting functions for CLI output.

Numbers are written in shortest round-trip form (``repr``), so CSV and JSON
carry identical values and CSV tables parse back to the same records.
"""
import csv
import io
import json
from typing import Any, Iterable, Optional, Sequence

from .models import Method
from .schemas import ConstantResult, InequalityScanReport, ReportRecord, SharpnessReport

CONSTANTS_HEADER = ("n", "p", "method", "value", "abs_err", "argmax_beta", "closed_form", "rel_gap")
PROFILE_HEADER = ("n", "p", "beta", "value", "abs_err", "method")
SHARPNESS_HEADER = (
    "n", "p", "sample", "seed", "ratio", "bound", "gap", "quadrature_err",
    "directional_ratio", "direction_bound", "extrapolated_ratio", "truncation_radius",
)


def format_number(value: Optional[float]) -> str:
    """Shortest round-trip text for a float; empty for None."""
    if value is None:
        return ""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Method):
        return value.value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return format_number(value)
    return str(value)


def _csv_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _json(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False)


# ============================================================================
# Constants table
# ============================================================================

def format_csv(records: Sequence[ReportRecord]) -> str:
    """CSV with header n,p,method,value,abs_err,argmax_beta,closed_form,rel_gap."""
    return _csv_table(
        CONSTANTS_HEADER,
        (
            (r.n, r.p, r.method, r.value, r.abs_err, r.argmax_beta, r.closed_form, r.rel_gap)
            for r in records
        ),
    )


def format_json(records: Sequence[ReportRecord]) -> str:
    """JSON array of records with the same keys as the CSV columns plus seed."""
    return _json([r.model_dump(mode="json", exclude_none=False) for r in records])


def _optional_float(text: str) -> Optional[float]:
    return float(text) if text != "" else None


def parse_report_csv(text: str) -> list[ReportRecord]:
    """
    Parse a table written by format_csv back into records.

    Raises:
        ValueError: If the header does not match
        pydantic.ValidationError: If a row is not a valid record
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CONSTANTS_HEADER:
        raise ValueError(f"unexpected header {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        n, p, method, value, abs_err, argmax_beta, closed_form, rel_gap = row
        records.append(
            ReportRecord(
                n=int(n),
                p=p,
                method=Method(method),
                value=float(value),
                abs_err=float(abs_err),
                argmax_beta=_optional_float(argmax_beta),
                closed_form=_optional_float(closed_form),
                rel_gap=_optional_float(rel_gap),
            )
        )
    return records


# ============================================================================
# Profiles, sharpness and scans
# ============================================================================

def format_profile_csv(n: int, p: str, results: Sequence[ConstantResult]) -> str:
    """One row per beta, increasing."""
    return _csv_table(
        PROFILE_HEADER,
        ((n, p, r.argmax_beta, r.value, r.abs_err, r.method) for r in results),
    )


def format_profile_json(n: int, p: str, results: Sequence[ConstantResult]) -> str:
    return _json(
        [
            {"n": n, "p": p, "beta": r.argmax_beta, "value": r.value, "abs_err": r.abs_err, "method": r.method.value}
            for r in results
        ]
    )


def _sharpness_row(r: SharpnessReport) -> tuple:
    return (
        r.n, r.p, r.sample, r.seed, r.ratio, r.bound, r.gap, r.quadrature_err,
        r.directional_ratio, r.direction_bound, r.extrapolated_ratio, r.truncation_radius,
    )


def format_sharpness_csv(reports: Sequence[SharpnessReport]) -> str:
    return _csv_table(SHARPNESS_HEADER, (_sharpness_row(r) for r in reports))


def format_summary(max_ratio_over_bound: float) -> str:
    return f"max_ratio_over_bound={format_number(max_ratio_over_bound)}"


def format_scan_text(report: InequalityScanReport) -> str:
    """Key=value lines for one scan."""
    equalities = "; ".join(case.describe() for case in report.equality_cases) or "none"
    return "\n".join(
        [
            f"inequality={report.inequality}",
            f"points={report.points}",
            f"max_gap={format_number(report.max_gap)}",
            f"max_rel_gap={format_number(report.max_rel_gap)}",
            f"argmax=({format_number(report.argmax_x)},{format_number(report.argmax_second)})",
            f"violations={report.violations}",
            f"equality_cases={equalities}",
            f"unexplained_equalities={report.unexplained_equalities}",
        ]
    )


def format_scan_json(reports: Sequence[InequalityScanReport]) -> str:
    return _json([r.model_dump(mode="json") for r in reports])


def format_verify_json(reports: Sequence[SharpnessReport], max_ratio_over_bound: float) -> str:
    return _json(
        {
            "reports": [dict(zip(SHARPNESS_HEADER, _sharpness_row(r))) for r in reports],
            "max_ratio_over_bound": max_ratio_over_bound,
        }
    )
