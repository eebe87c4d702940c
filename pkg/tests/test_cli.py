"""Tests for the nwn command line."""

import json

from click.testing import CliRunner

from nwn.cli import EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main, run_cli
from nwn.config import get_config_manager
from nwn.format import load_doc
from nwn.report import ReportStore


class CliTest:
    """Shared runner and sample paths."""

    def setup_method(self):
        self.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(main, [str(a) for a in args])


class TestValidate(CliTest):

    def test_valid_document(self, samples_dir, tmp_path):
        out = tmp_path / "summary.json"
        result = self.invoke("validate", samples_dir / "nupn_step.nwn", "--json", out)
        assert result.exit_code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["valid"] is True
        assert payload["kind"] == "nupn"

    def test_destroying_transitions_reported(self, samples_dir, tmp_path):
        out = tmp_path / "summary.json"
        result = self.invoke("validate", samples_dir / "lossy.nwn", "--json", out)
        assert result.exit_code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["conservative"] is False
        assert payload["destroying"] == ["t"]

    def test_broken_document(self, tmp_path):
        path = tmp_path / "broken.nwn"
        path.write_text("NET pn 1 x\nPLACES p\nTRANS t\nARCS\np -> u : 1\n")
        result = self.invoke("validate", path)
        assert result.exit_code == EXIT_NEGATIVE
        assert "Invalid document" in result.output

    def test_dot_export(self, samples_dir, tmp_path):
        dot = tmp_path / "net.dot"
        assert self.invoke("validate", samples_dir / "sync.nwn", "--dot", dot).exit_code == EXIT_OK
        assert dot.read_text().startswith("digraph")

    def test_missing_file_is_usage(self, tmp_path):
        assert self.invoke("validate", tmp_path / "absent.nwn").exit_code == EXIT_USAGE


class TestSimulate(CliTest):

    def test_scripted_trace(self, samples_dir, tmp_path):
        out = tmp_path / "run.json"
        result = self.invoke("simulate", samples_dir / "nupn_step.nwn", samples_dir / "nupn_step.trace", "--json", out)
        assert result.exit_code == EXIT_OK
        steps = json.loads(out.read_text())["steps"]
        assert [s["step"] for s in steps] == [None, "t#0"]

    def test_step_not_enabled(self, samples_dir, tmp_path):
        trace = tmp_path / "bad.trace"
        trace.write_text("t#0\nt#0\nt#0\nt#0\n")
        result = self.invoke("simulate", samples_dir / "pn_step.nwn", trace)
        assert result.exit_code == EXIT_NEGATIVE
        assert "Step 1 ('t#0') is not enabled" in result.output

    def test_malformed_label(self, samples_dir, tmp_path):
        trace = tmp_path / "bad.trace"
        trace.write_text("t\n")
        assert self.invoke("simulate", samples_dir / "pn_step.nwn", trace).exit_code == EXIT_NEGATIVE

    def test_staged_channel_step(self, samples_dir, tmp_path):
        trace = tmp_path / "one.trace"
        trace.write_text("t#0\n")
        out = tmp_path / "run.json"
        result = self.invoke("simulate", samples_dir / "channels.nwn", trace, "--staged", "--json", out)
        assert result.exit_code == EXIT_OK
        assert len(json.loads(out.read_text())["steps"][1]["stages"]) == 3

    def test_staged_needs_channels(self, samples_dir):
        result = self.invoke("simulate", samples_dir / "pn_step.nwn", samples_dir / "nupn_step.trace", "--staged")
        assert result.exit_code == EXIT_USAGE


class TestTranslate(CliTest):

    def test_prints_target_document(self, samples_dir):
        result = self.invoke("translate", samples_dir / "nupn_step.nwn", "-k", "nupn2ceos")
        assert result.exit_code == EXIT_OK
        assert result.output.startswith("NET eos 1 nupn_step.ceos")

    def test_writes_target_file(self, samples_dir, tmp_path):
        out = tmp_path / "merge.cnupn.nwn"
        result = self.invoke("translate", samples_dir / "merge.nwn", "-k", "ceos2cnupn", "-o", out, "--provenance")
        assert result.exit_code == EXIT_OK
        assert "#@ provenance " in out.read_text()
        doc = load_doc(out)
        assert doc.kind in ("cnupn", "rnupn")
        assert doc.init is not None

    def test_unfit_source(self, samples_dir):
        result = self.invoke("translate", samples_dir / "lossy.nwn", "-k", "ceos2cnupn")
        assert result.exit_code == EXIT_NEGATIVE
        assert "Translation failed" in result.output

    def test_unknown_kind(self, samples_dir):
        assert self.invoke("translate", samples_dir / "nupn_step.nwn", "-k", "pn2eos").exit_code == EXIT_USAGE


class TestCover(CliTest):

    def test_lossy_witness(self, samples_dir, tmp_path):
        trace = tmp_path / "witness.trace"
        result = self.invoke("cover", samples_dir / "lossy.nwn", "--lossy", "--trace", trace)
        assert result.exit_code == EXIT_OK
        labels = trace.read_text().splitlines()
        assert len(labels) == 4
        assert labels[-1] == "0:t#0"

    def test_perfect_search_exhausts(self, samples_dir, tmp_path):
        out = tmp_path / "verdict.json"
        result = self.invoke("cover", samples_dir / "lossy.nwn", "--json", out)
        assert result.exit_code == EXIT_NEGATIVE
        verdict = json.loads(out.read_text())
        assert verdict["exhausted"] is True
        assert "millis" not in verdict

    def test_target_file(self, samples_dir):
        target = samples_dir / "lossy_target.nwn"
        assert self.invoke("cover", samples_dir / "lossy.nwn", "-t", target, "--lossy").exit_code == EXIT_OK
        assert self.invoke("cover", samples_dir / "lossy.nwn", "-t", target).exit_code == EXIT_NEGATIVE

    def test_bounded_search_is_inconclusive(self, tmp_path):
        path = tmp_path / "grow.nwn"
        path.write_text("NET pn 1 grow\nPLACES p q\nTRANS t\nARCS\np -> t : 1\nt -> p : 2\n"
                        "INIT\np\nTARGET\nq\n")
        result = self.invoke("cover", path, "--max-depth", 3)
        assert result.exit_code == EXIT_INCONCLUSIVE

    def test_missing_target(self, samples_dir):
        assert self.invoke("cover", samples_dir / "nupn_step.nwn").exit_code == EXIT_USAGE

    def test_non_positive_limit(self, samples_dir):
        assert self.invoke("cover", samples_dir / "lossy.nwn", "--max-depth", 0).exit_code == EXIT_USAGE


class TestGen(CliTest):

    def test_same_seed_same_output(self):
        first = self.invoke("gen", "-k", "nupn", "-s", 4)
        second = self.invoke("gen", "-k", "nupn", "-s", 4)
        assert first.exit_code == EXIT_OK
        assert first.output == second.output
        assert first.output.startswith("NET nupn 1 random")

    def test_writes_file(self, tmp_path):
        out = tmp_path / "random.nwn"
        assert self.invoke("gen", "-k", "eos", "--conservative", "-o", out).exit_code == EXIT_OK
        assert load_doc(out).kind == "eos"

    def test_unknown_formalism(self):
        assert self.invoke("gen", "-k", "tpn").exit_code == EXIT_USAGE


class TestCrosscheck(CliTest):

    def test_document_run_is_logged(self, samples_dir, tmp_path):
        out = tmp_path / "report.json"
        result = self.invoke("crosscheck", samples_dir / "pn_step.nwn", "-k", "pn2cnupn", "--json", out)
        assert result.exit_code == EXIT_OK
        assert json.loads(out.read_text())["mismatches"] == []
        runs = ReportStore(get_config_manager().config_dir).list_runs()
        assert [run["kind"] for run in runs] == ["pn2cnupn"]
        assert runs[0]["path"] == str(out)

    def test_report_list_and_clear(self, samples_dir):
        self.invoke("crosscheck", samples_dir / "pn_step.nwn", "-k", "pn2cnupn")
        assert self.invoke("report", "list").exit_code == EXIT_OK
        assert self.invoke("report", "clear").exit_code == EXIT_OK
        result = self.invoke("report", "list")
        assert "No cross-check runs recorded" in result.output

    def test_unfit_document(self, samples_dir):
        result = self.invoke("crosscheck", samples_dir / "channels.nwn", "-k", "rnupn2ceos")
        assert result.exit_code == EXIT_NEGATIVE


class TestRunCli:
    """In-process entry point."""

    def test_exit_codes(self, samples_dir):
        assert run_cli(["validate", str(samples_dir / "pn_step.nwn")]) == EXIT_OK
        assert run_cli(["cover", str(samples_dir / "lossy.nwn")]) == EXIT_NEGATIVE
        assert run_cli(["bogus"]) == EXIT_USAGE

    def test_version(self):
        assert run_cli(["--version"]) == EXIT_OK
