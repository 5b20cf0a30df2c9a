"""JSON-lines audit trail for experiment runs"""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from btcgp.models import FoldRecord


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class AuditLogger:
    """Append-only JSONL audit logger for experiment runs"""

    def __init__(self, audit_dir: Optional[Path] = None):
        """Initialize audit logger

        Args:
            audit_dir: Directory to store audit logs
        """
        self.audit_dir = Path(audit_dir) if audit_dir else Path("./audit_logs")
        self.audit_dir.mkdir(parents=True, exist_ok=True)

        date_str = _utcnow().strftime("%Y%m%d")
        self.current_file = self.audit_dir / f"audit_{date_str}.jsonl"

    def log_event(self, event_type: str, data: Dict[str, Any],
                  level: str = "INFO") -> None:
        """Log an audit event

        Args:
            event_type: Type of event (e.g., 'run_started', 'fold_completed')
            data: Event data
            level: Log level (INFO, WARNING, ERROR)
        """
        event = {
            "timestamp": _utcnow().isoformat(),
            "event_type": event_type,
            "level": level,
            "data": data,
        }

        with open(self.current_file, 'a', encoding="utf-8") as f:
            f.write(json.dumps(event, default=str) + '\n')

    def log_run_started(self, name: str, n_tasks: int, config: Dict[str, Any]) -> None:
        """Log experiment start with the resolved configuration echo"""
        self.log_event("run_started", {
            "name": name,
            "n_tasks": n_tasks,
            "config": config,
        })

    def log_fold_completed(self, record: FoldRecord) -> None:
        level = "INFO" if record.pd_valid else "WARNING"
        self.log_event("fold_completed", record.model_dump(mode="json"), level=level)

    def log_pd_violation(self, method: str, fold: int, count: int,
                         fatal: bool) -> None:
        """Log rejected trial points, or a fold lost to positive-definiteness failure"""
        self.log_event("pd_violation", {
            "method": method,
            "fold": fold,
            "count": count,
            "fatal": fatal,
        }, level="WARNING")

    def log_run_completed(self, name: str, n_reports: int, n_valid_folds: int,
                          outputs: Dict[str, str]) -> None:
        self.log_event("run_completed", {
            "name": name,
            "n_reports": n_reports,
            "n_valid_folds": n_valid_folds,
            "outputs": outputs,
        })

    def log_error(self, error_type: str, error_message: str,
                  context: Optional[Dict[str, Any]] = None) -> None:
        """Log error event

        Args:
            error_type: Exception class name
            error_message: Error message
            context: Additional context
        """
        self.log_event("error", {
            "error_type": error_type,
            "error_message": error_message,
            "context": context or {},
        }, level="ERROR")

    def read_audit_log(self, date: Optional[datetime] = None) -> List[Dict[str, Any]]:
        """Read audit log for a specific date

        Args:
            date: Date to read (default: today)

        Returns:
            List of audit events
        """
        if date is None:
            date = _utcnow()

        log_file = self.audit_dir / f"audit_{date.strftime('%Y%m%d')}.jsonl"
        if not log_file.exists():
            return []

        events = []
        with open(log_file, 'r', encoding="utf-8") as f:
            for line in f:
                try:
                    events.append(json.loads(line.strip()))
                except json.JSONDecodeError:
                    continue

        return events

    def summarise(self, date: Optional[datetime] = None) -> Dict[str, Any]:
        """Counts of runs, folds, PD violations and errors for one day"""
        stats: Dict[str, Any] = {
            "total_runs": 0,
            "total_folds": 0,
            "invalid_folds": 0,
            "pd_violations": 0,
            "total_errors": 0,
            "event_counts": {},
        }

        for event in self.read_audit_log(date):
            event_type = event.get("event_type")
            stats["event_counts"][event_type] = stats["event_counts"].get(event_type, 0) + 1

            if event_type == "run_completed":
                stats["total_runs"] += 1
            elif event_type == "fold_completed":
                stats["total_folds"] += 1
                if not event["data"].get("pd_valid", False):
                    stats["invalid_folds"] += 1
            elif event_type == "pd_violation":
                stats["pd_violations"] += event["data"].get("count", 0)
            elif event_type == "error":
                stats["total_errors"] += 1

        return stats
