"""Tests for experiment report serialization."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from accomplice_da.experiments import ExperimentReport, MetricRow, SampleRow
from accomplice_da.report_io import (
    METRIC_HEADER,
    ReportFormat,
    ReportFormatError,
    ReportWriteError,
    emit_report,
    format_value,
    parse_report_json,
    write_report,
)


def _report() -> ExperimentReport:
    return ExperimentReport(
        experiment="RankImprovement",
        config={"experiment": "rank-improvement", "n_values": [4], "trials": 2, "seed": 0},
        rows=(
            MetricRow(experiment="RankImprovement", n=4, metric="accomplice_count", value=1),
            MetricRow(experiment="RankImprovement", n=4, metric="accomplice_mean", value=0.25),
        ),
        samples=(
            SampleRow(
                experiment="RankImprovement", n=4, sample_kind="accomplice_improvement", value=2
            ),
        ),
        notes=("fixed woman = w1",),
        wall_time_seconds=1.5,
    )


def test_format_value() -> None:
    """Counts print bare and fractions with six decimals."""
    assert format_value(3) == "3"
    assert format_value(1 / 3) == "0.333333"


def test_csv_layout() -> None:
    """Metric rows come first, samples follow after a blank line."""
    text = emit_report(_report(), ReportFormat.CSV)

    assert text.splitlines() == [
        ",".join(METRIC_HEADER),
        "RankImprovement,4,accomplice_count,1",
        "RankImprovement,4,accomplice_mean,0.250000",
        "",
        "experiment,n,sample_kind,value",
        "RankImprovement,4,accomplice_improvement,2",
    ]


def test_csv_without_samples_has_no_sample_section() -> None:
    """Reports without samples are a single table."""
    report = ExperimentReport(
        experiment="FractionWomen",
        config={},
        rows=(MetricRow(experiment="FractionWomen", n=3, metric="self_fraction", value=0.5),),
        samples=(),
    )

    assert emit_report(report, ReportFormat.CSV) == (
        "experiment,n,metric,value\nFractionWomen,3,self_fraction,0.500000\n"
    )


def test_json_round_trip_and_timing() -> None:
    """JSON output parses back to the same report and only carries timing on request."""
    report = _report()

    plain = emit_report(report, ReportFormat.JSON)
    timed = emit_report(report, ReportFormat.JSON, include_timing=True)

    assert "wall_time_seconds" not in json.loads(plain)
    assert json.loads(timed)["wall_time_seconds"] == 1.5
    assert parse_report_json(plain) == report
    assert parse_report_json(timed).wall_time_seconds == 1.5


@pytest.mark.parametrize(
    ("original", "replacement", "location"),
    [
        ('"rng"', '"random"', "<root>"),
        ('"value": 0.25', '"value": "high"', "rows/1/value"),
        ('"n": 4,\n      "sample_kind"', '"n": 0,\n      "sample_kind"', "samples/0/n"),
    ],
    ids=["renamed-rng", "string-value", "zero-n"],
)
def test_schema_violations(original: str, replacement: str, location: str) -> None:
    """Reports that break the schema are rejected with the failing location."""
    text = emit_report(_report(), ReportFormat.JSON)
    assert original in text

    with pytest.raises(ReportFormatError, match=location):
        parse_report_json(text.replace(original, replacement))


def test_invalid_json() -> None:
    """Text that is not JSON is a format error."""
    with pytest.raises(ReportFormatError):
        parse_report_json("experiment,n,metric,value\n")


def test_write_report(tmp_path: Path) -> None:
    """Reports are written as UTF-8 text and missing directories are reported."""
    path = tmp_path / "report.csv"

    write_report("experiment,n,metric,value\n", path)

    assert path.read_text(encoding="utf-8") == "experiment,n,metric,value\n"
    with pytest.raises(ReportWriteError):
        write_report("x", tmp_path / "missing" / "report.csv")
