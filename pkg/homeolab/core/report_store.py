"""
Persistence of experiment reports for homeolab.

This module handles:
- Writing JSON summary reports
- Writing per-trial CSV logs through pandas
- Reading stored reports back
"""

import json
import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from homeolab.config import REPORT_SCHEMA_VERSION, REPORTS_PATH, TRIAL_LOGS_PATH
from homeolab.core.random_lab import ExperimentReport

TRIAL_COLUMNS = ["schema_version", "trial", "parameter", "verdict", "label", "certificate_id"]


def trials_frame(report: ExperimentReport) -> pd.DataFrame:
    """
    Per-trial log as a DataFrame with the versioned CSV columns.

    Args:
        report (ExperimentReport): Report carrying its trial records

    Returns:
        pd.DataFrame: One row per trial, in trial order
    """
    rows = [{"schema_version": REPORT_SCHEMA_VERSION, **record.model_dump()} for record in report.records]
    frame = pd.DataFrame(rows, columns=TRIAL_COLUMNS)
    frame["certificate_id"] = frame["certificate_id"].fillna("")
    return frame


def report_json(report: ExperimentReport) -> str:
    """Canonical JSON text of a report; identical inputs give identical bytes."""
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True)


def report_stem(report: ExperimentReport) -> str:
    return f"{report.experiment}_seed{report.config.seed}_n{report.trials}"


class ReportStore:
    """Stores experiment summaries as JSON and trial logs as CSV."""

    def __init__(self, reports_dir: Path = REPORTS_PATH, trials_dir: Path = TRIAL_LOGS_PATH):
        self.reports_dir = Path(reports_dir)
        self.trials_dir = Path(trials_dir)

        self.logger = logging.getLogger(__name__)

    def save_report(self, report: ExperimentReport, stem: Optional[str] = None) -> Optional[Path]:
        """
        Save a report summary to ``<reports_dir>/<stem>.json``.

        Returns:
            Optional[Path]: Written path, or None if saving failed
        """
        path = self.reports_dir / f"{stem or report_stem(report)}.json"
        try:
            self.reports_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(report_json(report), encoding="utf-8")
            self.logger.info(f"Saved report to {path}")
            return path
        except OSError as e:
            self.logger.error(f"Error saving report: {e}")
            return None

    def save_trials(self, report: ExperimentReport, stem: Optional[str] = None) -> Optional[Path]:
        """Save the per-trial CSV log; None if saving failed."""
        path = self.trials_dir / f"{stem or report_stem(report)}.csv"
        try:
            self.trials_dir.mkdir(parents=True, exist_ok=True)
            trials_frame(report).to_csv(path, index=False)
            self.logger.info(f"Saved {len(report.records)} trial rows to {path}")
            return path
        except OSError as e:
            self.logger.error(f"Error saving trial log: {e}")
            return None

    def save(self, report: ExperimentReport, stem: Optional[str] = None) -> bool:
        """Save both files; True only if both were written."""
        return self.save_report(report, stem) is not None and self.save_trials(report, stem) is not None

    def load_report(self, path: Path) -> Optional[ExperimentReport]:
        """
        Load a stored summary (trial records are not part of it).

        Returns:
            Optional[ExperimentReport]: The report, or None if it cannot be read
        """
        try:
            return ExperimentReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            self.logger.error(f"Error loading report {path}: {e}")
            return None
