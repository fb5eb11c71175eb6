"""Tests for the Excel report export."""

from pathlib import Path

from openpyxl import load_workbook  # type: ignore[import-untyped]

from evfuse.evaluation import CSV_COLUMNS, EvalReport, compute_prf
from evfuse.xlsx import write_report_workbook


def _report() -> EvalReport:
    return EvalReport(
        tp=7,
        fp=4,
        fn=8,
        per_class={1: compute_prf(5, 1, 2), 2: compute_prf(2, 3, 6)},
    )


def test_workbook_sheets_and_tables(tmp_path: Path) -> None:
    """Ensure the workbook holds styled Overall and PerClass tables."""

    path = tmp_path / "report.xlsx"
    write_report_workbook({"frame000": _report(), "total": _report()}, path)

    workbook = load_workbook(path)
    assert workbook.sheetnames == ["Overall", "PerClass"]

    overall = workbook["Overall"]
    rows = list(overall.iter_rows(values_only=True))
    assert list(rows[0]) == CSV_COLUMNS
    assert [r[0] for r in rows[1:]] == ["frame000", "total"]
    assert rows[2][2:5] == (7, 4, 8)
    assert rows[2][5] == 63.64
    assert rows[2][6] == 46.67
    assert "Overall" in overall.tables
    assert overall.tables["Overall"].ref == "A1:H3"

    per_class = workbook["PerClass"]
    assert per_class.max_row == 5
    assert per_class.tables["PerClass"].tableStyleInfo.showRowStripes


def test_workbook_without_per_class_rows(tmp_path: Path) -> None:
    """Ensure a sheet without rows is left out."""

    path = tmp_path / "report.xlsx"
    write_report_workbook({"total": EvalReport(0, 0, 0)}, path)

    workbook = load_workbook(path)
    assert workbook.sheetnames == ["Overall"]
    row = next(workbook["Overall"].iter_rows(min_row=2, values_only=True))
    assert row == ("total", "all", 0, 0, 0, 0.0, 0.0, 0.0)
