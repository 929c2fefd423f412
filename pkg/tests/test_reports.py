import csv
import io
from datetime import datetime, timezone

import pytest

from qftverify.config import parse_config
from qftverify.exceptions import ReportIOError
from qftverify.models import CaseResult, ReportRecord, Summary
from qftverify.services.reports import (
    TABULAR_COLUMNS,
    emit_report,
    load_report,
    render_report,
)
from qftverify.services.suites import run_suite


def _record(cases):
    passed = sum(case.passed for case in cases)
    return ReportRecord(
        suite="closeness_audit",
        timestamp=datetime(2024, 1, 1, tzinfo=timezone.utc),
        config_hash="0" * 64,
        cases=cases,
        summary=Summary(total=len(cases), passed=passed, failed=len(cases) - passed),
    )


def test_empty_record_is_header_only():
    text = render_report(_record([]), "tabular")
    assert text == ",".join(TABULAR_COLUMNS) + "\n"


def test_tabular_rows():
    cases = [
        CaseResult(case_id="a", measured=0.5, bound=0.75, eta_inputs={"eta_s2": 0.25, "eta_s1": 0.1}, passed=True),
        CaseResult(case_id="b", description="error: boom", passed=False),
    ]
    rows = list(csv.DictReader(io.StringIO(render_report(_record(cases), "tabular"))))
    assert len(rows) == 2
    assert rows[0]["eta_inputs"] == "eta_s1=0.1;eta_s2=0.25"
    assert rows[0]["passed"] == "true"
    assert rows[1]["measured"] == ""
    assert rows[1]["passed"] == "false"


def test_all_passed_is_serialized():
    record = _record([CaseResult(case_id="x", passed=False)])
    assert '"all_passed": false' in render_report(record)


def test_tabular_is_reproducible(demo_config):
    cfg = parse_config(demo_config)
    first = render_report(run_suite(cfg), "tabular")
    second = render_report(run_suite(cfg, workers=2), "tabular")
    assert first == second
    assert first.count("\n") == 1 + 5


def test_structured_round_trip(tmp_path, demo_config):
    record = run_suite(parse_config(demo_config))
    path = emit_report(record, "structured", tmp_path / "nested" / "demo.json")
    assert load_report(path) == record


def test_report_errors(tmp_path):
    with pytest.raises(ReportIOError):
        render_report(_record([]), "xml")
    garbage = tmp_path / "garbage.json"
    garbage.write_text("not json")
    with pytest.raises(ReportIOError):
        load_report(garbage)
    with pytest.raises(ReportIOError):
        load_report(tmp_path / "missing.json")
