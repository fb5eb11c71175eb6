"""Export of evaluation reports to Excel workbooks."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List

from openpyxl import Workbook  # type: ignore[import-untyped]
from openpyxl.utils import get_column_letter  # type: ignore[import-untyped]
from openpyxl.worksheet.table import (  # type: ignore[import-untyped]
    Table,
    TableStyleInfo,
)

from evfuse.evaluation import CSV_COLUMNS, EvalReport, report_rows

Sheets = Dict[str, List[Dict[str, Any]]]


def _sheets(reports: dict[str, EvalReport]) -> Sheets:
    """Split report rows into an overall sheet and a per-class sheet.

    Args:
        reports: Reports keyed by scope name.

    Returns:
        Mapping of sheet names to row dictionaries.
    """

    rows = report_rows(reports)
    sheets: Sheets = {
        "Overall": [r for r in rows if r["class"] == "all"],
        "PerClass": [r for r in rows if r["class"] != "all"],
    }

    # Drop sheets for which no data was recorded.
    return {name: data for name, data in sheets.items() if data}


def write_report_workbook(reports: dict[str, EvalReport], path: Path) -> None:
    """Write evaluation reports into an Excel workbook.

    Every sheet holds one styled table with the columns of the CSV export.

    Args:
        reports: Reports keyed by scope name, e.g. frame names and
            ``"total"``.
        path: Destination file path for the workbook.
    """

    data = _sheets(reports)

    workbook = Workbook()

    # Remove the default sheet created by openpyxl when present.
    default_sheet = workbook.active
    if default_sheet is not None:
        workbook.remove(default_sheet)

    for sheet_name, rows in data.items():
        ws = workbook.create_sheet(title=sheet_name)
        ws.append(CSV_COLUMNS)
        for row in rows:
            ws.append([row[column] for column in CSV_COLUMNS])

        # Scope names can be long frame names; counts stay narrow.
        for idx in range(len(CSV_COLUMNS)):
            letter = get_column_letter(idx + 1)
            ws.column_dimensions[letter].width = 24 if idx < 2 else 14

        end_column = get_column_letter(len(CSV_COLUMNS))
        table = Table(
            displayName=sheet_name, ref=f"A1:{end_column}{len(rows) + 1}"
        )

        # Apply a simple table style with row stripes for readability.
        table.tableStyleInfo = TableStyleInfo(
            name="TableStyleMedium9", showRowStripes=True
        )
        ws.add_table(table)

    workbook.save(path)
