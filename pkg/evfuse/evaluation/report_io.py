"""Ground-truth JSON and report serialization."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any

from evfuse.detect import CLASS_NAMES
from evfuse.errors import FormatError
from evfuse.json_utils import read_json

from .ground_truth import GroundTruth
from .report import EvalReport, percent

CSV_COLUMNS = [
    "scope",
    "class",
    "tp",
    "fp",
    "fn",
    "precision_pct",
    "recall_pct",
    "f1_pct",
]


def read_ground_truth(path: Path) -> list[GroundTruth]:
    """Read a ground-truth JSON array of ``{"box": [...], "class": id}``.

    Throws:
        FormatError: If the document is not an array.
    """

    data = read_json(path)
    if not isinstance(data, list):
        raise FormatError(f"{path.name}: expected a JSON array")
    return [GroundTruth.from_dict(item) for item in data]


def report_rows(reports: dict[str, EvalReport]) -> list[dict[str, Any]]:
    """Flatten reports into table rows, one per scope and class.

    Args:
        reports: Reports keyed by scope name, e.g. a frame name or
            ``"total"``.

    Returns:
        Rows with the :data:`CSV_COLUMNS` keys; the ``all`` row of a scope
        precedes its per-class rows.
    """

    # Aggregate row of each scope first, then one row per class.
    rows = []
    for scope, report in reports.items():
        entries = [("all", report)] + [
            (CLASS_NAMES.get(c, str(c)), sub)
            for c, sub in sorted(report.per_class.items())
        ]
        for name, entry in entries:
            rows.append(
                {
                    "scope": scope,
                    "class": name,
                    "tp": entry.tp,
                    "fp": entry.fp,
                    "fn": entry.fn,
                    "precision_pct": percent(entry.precision),
                    "recall_pct": percent(entry.recall),
                    "f1_pct": percent(entry.f1),
                }
            )
    return rows


def format_report_csv(reports: dict[str, EvalReport]) -> str:
    """Render reports as CSV text with LF line endings."""
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer, fieldnames=CSV_COLUMNS, lineterminator="\n"
    )
    writer.writeheader()
    writer.writerows(report_rows(reports))
    return buffer.getvalue()


def write_report_csv(path: Path, reports: dict[str, EvalReport]) -> None:
    """Write reports as a plot ready CSV table."""
    path.write_text(format_report_csv(reports), encoding="utf-8")
