"""Cross-check report storage and the run log behind ``nwn report list``."""

import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging


logger = logging.getLogger(__name__)

MAX_RUNS = 200


class ReportError(Exception):
    """Raised when a report or the run log cannot be read or written."""
    pass


def write_json(path: Path, payload: Dict[str, Any], indent: int = 2):
    """Write ``payload`` with sorted keys so identical runs give identical files."""
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=indent, sort_keys=True)
            f.write("\n")
    except Exception as e:
        raise ReportError(f"Failed to write report {path}: {e}")


class ReportStore:
    """Keeps a log of cross-check runs next to the configuration file."""

    def __init__(self, config_dir: Path):
        self.config_dir = Path(config_dir)
        self.log_file = self.config_dir / "runs.json"
        self._ensure_log_exists()

    def _ensure_log_exists(self):
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            if not self.log_file.exists():
                self._save_log([])
        except ReportError:
            raise
        except Exception as e:
            raise ReportError(f"Failed to create run log: {e}")

    def _load_log(self) -> List[Dict[str, Any]]:
        try:
            if not self.log_file.exists():
                return []
            with open(self.log_file, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            logger.warning(f"Invalid JSON in run log, resetting: {e}")
            return []
        except Exception as e:
            raise ReportError(f"Failed to load run log: {e}")

    def _save_log(self, runs: List[Dict[str, Any]]):
        try:
            with open(self.log_file, 'w', encoding='utf-8') as f:
                json.dump(runs, f, indent=2)
        except Exception as e:
            raise ReportError(f"Failed to save run log: {e}")

    def record(self, report: Dict[str, Any], path: Optional[Path] = None) -> Dict[str, Any]:
        """Append a summary of ``report`` to the run log.

        Logging failures never abort the run that produced the report.
        """
        runs = self._load_log()
        entry = {
            "id": (runs[-1]["id"] + 1) if runs else 1,
            "timestamp": datetime.now().isoformat(),
            "kind": report.get("kind"),
            "seed": report.get("seed"),
            "checks": len(report.get("verdicts", [])),
            "mismatches": len(report.get("mismatches", [])),
            "inconclusive": len(report.get("inconclusive", [])),
            "path": str(path) if path else None,
        }
        runs.append(entry)
        if len(runs) > MAX_RUNS:
            runs = runs[-MAX_RUNS:]
        try:
            self._save_log(runs)
            logger.info(f"Recorded run {entry['id']} ({entry['kind']})")
        except ReportError as e:
            logger.error(f"Failed to record run: {e}")
        return entry

    def list_runs(self, limit: Optional[int] = None) -> List[Dict[str, Any]]:
        runs = self._load_log()
        if limit:
            return runs[-limit:]
        return runs

    def clear(self):
        self._save_log([])
        logger.info("Cleared run log")
