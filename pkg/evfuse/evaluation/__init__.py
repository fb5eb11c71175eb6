"""Matching of detections against ground truth and P/R/F1 reporting."""

from .ground_truth import GroundTruth
from .matching import MatchResult, match_detections
from .report import EvalReport, compute_prf, evaluate, merge_reports, percent
from .report_io import (
    CSV_COLUMNS,
    format_report_csv,
    read_ground_truth,
    report_rows,
    write_report_csv,
)

__all__ = [
    "CSV_COLUMNS",
    "EvalReport",
    "GroundTruth",
    "MatchResult",
    "compute_prf",
    "evaluate",
    "format_report_csv",
    "match_detections",
    "merge_reports",
    "percent",
    "read_ground_truth",
    "report_rows",
    "write_report_csv",
]
