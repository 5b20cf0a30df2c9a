"""Report files and the audit trail."""

from .audit import AuditLogger
from .reports import (
    read_model_file,
    read_report_rows,
    report_rows,
    write_model_file,
    write_predictions_csv,
    write_reports,
)

__all__ = [
    "AuditLogger",
    "read_model_file",
    "read_report_rows",
    "report_rows",
    "write_model_file",
    "write_predictions_csv",
    "write_reports",
]
