"""Report emission: one structured JSON document or one CSV row per case."""
from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from ..exceptions import ReportIOError
from ..models.results import ReportRecord
from .channel_store import atomic_write_text

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("structured", "tabular")
TABULAR_COLUMNS = ("suite", "case_id", "eta_inputs", "measured", "bound", "passed")


def _number(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def render_structured(record: ReportRecord) -> str:
    return record.model_dump_json(indent=2) + "\n"


def render_tabular(record: ReportRecord) -> str:
    """CSV with a fixed header; etas are ``name=value`` pairs joined by ``;``.

    No timestamp is written, so equal runs give byte-identical files.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABULAR_COLUMNS)
    for case in record.cases:
        etas = ";".join(f"{name}={value!r}" for name, value in sorted(case.eta_inputs.items()))
        writer.writerow(
            [record.suite, case.case_id, etas, _number(case.measured), _number(case.bound),
             "true" if case.passed else "false"]
        )
    return buf.getvalue()


def render_report(record: ReportRecord, fmt: str = "structured") -> str:
    if fmt == "structured":
        return render_structured(record)
    if fmt == "tabular":
        return render_tabular(record)
    raise ReportIOError(f"unknown report format {fmt!r}; choose from {REPORT_FORMATS}")


def emit_report(record: ReportRecord, fmt: str, path: Union[str, Path]) -> Path:
    written = atomic_write_text(path, render_report(record, fmt))
    logger.info(
        "Wrote %s report for %s to %s (%d/%d passed)",
        fmt, record.suite, written, record.summary.passed, record.summary.total,
    )
    return written


def load_report(path: Union[str, Path]) -> ReportRecord:
    """Read back a structured report."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"could not read {path}: {e}") from e
    try:
        return ReportRecord.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ReportIOError(f"{path} is not a structured report: {e}") from e


__all__ = [
    "REPORT_FORMATS",
    "TABULAR_COLUMNS",
    "render_report",
    "emit_report",
    "load_report",
]
