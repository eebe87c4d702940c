"""Tests for report files and the run log."""

import json
from unittest.mock import patch

import pytest

from nwn.report import MAX_RUNS, ReportError, ReportStore, write_json


def sample_report(kind="closure", mismatches=0):
    return {
        "kind": kind,
        "seed": 7,
        "verdicts": [{"outcome": "covered"}] * 3,
        "mismatches": [{"issue": "verdict"}] * mismatches,
        "inconclusive": [],
    }


class TestWriteJson:
    """Report files."""

    def test_sorted_and_newline_terminated(self, tmp_path):
        path = tmp_path / "out" / "report.json"
        write_json(path, {"b": 1, "a": 2})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")

    def test_identical_payloads_give_identical_files(self, tmp_path):
        write_json(tmp_path / "one.json", {"x": [1, 2], "y": {"z": 0}})
        write_json(tmp_path / "two.json", {"y": {"z": 0}, "x": [1, 2]})
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()

    def test_failure(self, tmp_path):
        with patch('builtins.open', side_effect=OSError("disk full")):
            with pytest.raises(ReportError):
                write_json(tmp_path / "r.json", {})


class TestReportStore:
    """The run log."""

    def setup_method(self):
        self.report = sample_report()

    def test_record_summarizes(self, tmp_path):
        store = ReportStore(tmp_path)
        entry = store.record(self.report, tmp_path / "r.json")
        assert entry["id"] == 1
        assert entry["checks"] == 3
        assert entry["mismatches"] == 0
        assert entry["path"].endswith("r.json")
        assert store.list_runs() == [entry]

    def test_ids_increase(self, tmp_path):
        store = ReportStore(tmp_path)
        store.record(self.report)
        second = store.record(sample_report("normalize", mismatches=2))
        assert second["id"] == 2
        assert second["mismatches"] == 2
        assert [run["kind"] for run in store.list_runs(limit=1)] == ["normalize"]

    def test_log_is_capped(self, tmp_path):
        store = ReportStore(tmp_path)
        for _ in range(MAX_RUNS + 5):
            store.record(self.report)
        runs = store.list_runs()
        assert len(runs) == MAX_RUNS
        assert runs[-1]["id"] == MAX_RUNS + 5

    def test_clear(self, tmp_path):
        store = ReportStore(tmp_path)
        store.record(self.report)
        store.clear()
        assert store.list_runs() == []

    def test_corrupt_log_resets(self, tmp_path):
        store = ReportStore(tmp_path)
        store.log_file.write_text("{not json")
        assert store.list_runs() == []
        assert store.record(self.report)["id"] == 1
        assert json.loads(store.log_file.read_text())[0]["kind"] == "closure"

    def test_save_failure_does_not_abort(self, tmp_path):
        store = ReportStore(tmp_path)
        with patch.object(ReportStore, '_save_log', side_effect=ReportError("read-only")):
            entry = store.record(self.report)
        assert entry["id"] == 1
        assert store.list_runs() == []
