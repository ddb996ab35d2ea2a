"""Scoring of pipeline results and table-shaped reports."""

from .report import (
    FORMATS,
    EvalReport,
    ReportRow,
    aggregate,
    emit_report,
    histogram_to_csv,
    report_from_csv,
    report_from_json,
    report_to_csv,
    report_to_json,
    report_to_markdown,
)
from .verdicts import (
    ContentVerdict,
    EvalError,
    KitchenErrorCategory,
    ScenarioScore,
    SyntaxVerdict,
    check_content,
    check_syntax,
    classify_kitchen_errors,
    score,
)

__all__ = [
    "FORMATS",
    "ContentVerdict",
    "EvalError",
    "EvalReport",
    "KitchenErrorCategory",
    "ReportRow",
    "ScenarioScore",
    "SyntaxVerdict",
    "aggregate",
    "check_content",
    "check_syntax",
    "classify_kitchen_errors",
    "emit_report",
    "histogram_to_csv",
    "report_from_csv",
    "report_from_json",
    "report_to_csv",
    "report_to_json",
    "report_to_markdown",
    "score",
]
