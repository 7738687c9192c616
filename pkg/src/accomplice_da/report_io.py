"""CSV and JSON rendering of experiment reports."""

from __future__ import annotations

import csv
import io
import json
from enum import StrEnum
from pathlib import Path

from jsonschema.exceptions import best_match
from jsonschema.validators import validator_for

from .experiments import ExperimentReport, MetricRow, MetricValue, SampleRow
from .json_types import JSONObject, JSONValue, MutableJSONObject

METRIC_HEADER = ("experiment", "n", "metric", "value")
SAMPLE_HEADER = ("experiment", "n", "sample_kind", "value")

_ROW_SCHEMA: JSONObject = {
    "type": "object",
    "required": list(METRIC_HEADER),
    "additionalProperties": False,
    "properties": {
        "experiment": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "metric": {"type": "string"},
        "value": {"type": "number"},
    },
}

_SAMPLE_SCHEMA: JSONObject = {
    "type": "object",
    "required": list(SAMPLE_HEADER),
    "additionalProperties": False,
    "properties": {
        "experiment": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "sample_kind": {"type": "string"},
        "value": {"type": "integer"},
    },
}

REPORT_SCHEMA: JSONObject = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["experiment", "rng", "notes", "config", "rows", "samples"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"type": "string"},
        "rng": {"type": "string"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "config": {"type": "object"},
        "rows": {"type": "array", "items": _ROW_SCHEMA},
        "samples": {"type": "array", "items": _SAMPLE_SCHEMA},
        "wall_time_seconds": {"type": "number", "minimum": 0},
    },
}


class ReportFormat(StrEnum):
    """Serialization formats for experiment reports."""

    CSV = "csv"
    JSON = "json"


class ReportFormatError(RuntimeError):
    """Raised when a serialized report does not match the report format."""


class ReportWriteError(RuntimeError):
    """Raised when a report cannot be written."""


def format_value(value: MetricValue) -> str:
    """Render a metric value for CSV output.

    Args:
        value (MetricValue): Count or fraction.

    Returns:
        str: Integers as-is, floats with six decimals.
    """
    if isinstance(value, int):
        return str(value)
    return f"{value:.6f}"


def emit_report(
    report: ExperimentReport, fmt: ReportFormat, *, include_timing: bool = False
) -> str:
    """Serialize a report.

    CSV output has the metric rows first, then a blank line and the raw samples under
    their own header when there are any.

    Args:
        report (ExperimentReport): Report to render.
        fmt (ReportFormat): Output format.
        include_timing (bool): Include wall-clock time; off by default so output is
            reproducible.

    Returns:
        str: Serialized report ending in a newline.
    """
    if fmt is ReportFormat.JSON:
        return json.dumps(_report_payload(report, include_timing=include_timing), indent=2) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(METRIC_HEADER)
    for row in report.rows:
        writer.writerow((row.experiment, row.n, row.metric, format_value(row.value)))
    if report.samples:
        buffer.write("\n")
        writer.writerow(SAMPLE_HEADER)
        for sample in report.samples:
            writer.writerow((sample.experiment, sample.n, sample.sample_kind, sample.value))
    return buffer.getvalue()


def _report_payload(report: ExperimentReport, *, include_timing: bool) -> MutableJSONObject:
    payload: MutableJSONObject = {
        "experiment": report.experiment,
        "rng": report.rng,
        "notes": list(report.notes),
        "config": report.config,
        "rows": [
            {
                "experiment": row.experiment,
                "n": row.n,
                "metric": row.metric,
                "value": row.value if isinstance(row.value, int) else round(row.value, 6),
            }
            for row in report.rows
        ],
        "samples": [
            {
                "experiment": sample.experiment,
                "n": sample.n,
                "sample_kind": sample.sample_kind,
                "value": sample.value,
            }
            for sample in report.samples
        ],
    }
    if include_timing and report.wall_time_seconds is not None:
        payload["wall_time_seconds"] = round(report.wall_time_seconds, 3)
    return payload


def parse_report_json(text: str) -> ExperimentReport:
    """Parse and validate a JSON report.

    Args:
        text (str): Output of :func:`emit_report` in JSON format.

    Returns:
        ExperimentReport: Decoded report.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"Report is not valid JSON: {exc}") from exc

    payload_value: JSONValue = payload
    validator_cls = validator_for(REPORT_SCHEMA)
    validator_cls.check_schema(REPORT_SCHEMA)
    error = best_match(validator_cls(REPORT_SCHEMA).iter_errors(payload_value))
    if error is not None:
        location = "/".join(str(part) for part in error.absolute_path) or "<root>"
        raise ReportFormatError(
            f"Report does not match the report schema at {location}: {error.message}"
        )

    wall_time = payload.get("wall_time_seconds")
    return ExperimentReport(
        experiment=payload["experiment"],
        config=payload["config"],
        rows=tuple(
            MetricRow(
                experiment=row["experiment"], n=row["n"], metric=row["metric"], value=row["value"]
            )
            for row in payload["rows"]
        ),
        samples=tuple(
            SampleRow(
                experiment=sample["experiment"],
                n=sample["n"],
                sample_kind=sample["sample_kind"],
                value=sample["value"],
            )
            for sample in payload["samples"]
        ),
        rng=payload["rng"],
        notes=tuple(payload["notes"]),
        wall_time_seconds=None if wall_time is None else float(wall_time),
    )


def write_report(text: str, path: Path) -> None:
    """Write serialized report text to ``path``.

    Args:
        text (str): Serialized report.
        path (Path): Destination file.
    """
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(f"Failed to write report {path}: {exc}") from exc
