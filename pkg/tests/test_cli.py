"""Tests for the command line."""

import json
import re

import pytest
from click.testing import CliRunner

from gmt_lab import cli
from gmt_lab.document import build_fragment, corpus_names, load_document
from gmt_lab.errors import LawViolationError
from gmt_lab.finset import FinFun, obj
from gmt_lab.fragment import Measurement, replace_entry
from gmt_lab.linear import dump_certificate
from gmt_lab.states import find_probabilistic_state


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    """A local configuration so runs never read the user's own file."""
    path = tmp_path / "config.yaml"
    path.write_text("gmt_lab:\n  report:\n    max_witness_items: 5\n", encoding="utf-8")
    return path


class TestRun:
    """Test `gmt-lab run`."""

    def test_report_file(self, runner, tmp_path, config_file):
        out = tmp_path / "report.json"
        result = runner.invoke(
            cli.main,
            ["run", "corpus:classical_s2", "-a", "validate,binarizable", "--report", str(out), "-c", str(config_file)],
        )
        assert result.exit_code == cli.EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert [s["name"] for s in report["sections"]] == ["validate", "binarizable"]
        assert all(s["verdict"] is True for s in report["sections"])

    def test_bound_override(self, runner, tmp_path, config_file):
        out = tmp_path / "report.json"
        args = ["run", "corpus:classical_s2", "-a", "validate", "-b", "2", "--report", str(out)]
        result = runner.invoke(cli.main, args + ["-c", str(config_file)])
        assert result.exit_code == cli.EXIT_OK
        assert json.loads(out.read_text(encoding="utf-8"))["fragment"]["bound"] == 2

    def test_text(self, runner, config_file):
        result = runner.invoke(cli.main, ["run", "corpus:weird", "-a", "binarizable", "--text", "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_OK
        assert "Document: weird" in result.output
        assert "== binarizable: no" in result.output

    def test_invalid_json(self, runner, tmp_path, config_file):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        result = runner.invoke(cli.main, ["run", str(path), "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_SCHEMA
        assert "Schema error" in result.output

    def test_unknown_analysis(self, runner, config_file):
        result = runner.invoke(cli.main, ["run", "corpus:weird", "-a", "guess", "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_SCHEMA
        assert "--analyses" in result.output

    def test_bad_bound(self, runner, config_file):
        result = runner.invoke(cli.main, ["run", "corpus:weird", "-b", "0", "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_SCHEMA
        assert "--bound" in result.output

    def test_missing_document(self, runner, config_file):
        result = runner.invoke(cli.main, ["run", "corpus:nothing", "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_SCHEMA

    def test_law_violation(self, runner, tmp_path, config_file, monkeypatch):
        def broken_fragment(doc, bound=None, config=None):
            frag = build_fragment(doc, 2)
            alpha = Measurement(obj(2), (0, 1))
            return replace_entry(frag, FinFun.identity(obj(2)), alpha, Measurement(obj(2), (1, 0)))

        monkeypatch.setattr(cli, "build_fragment", broken_fragment)
        out = tmp_path / "report.json"
        result = runner.invoke(cli.main, ["run", "corpus:classical_s2", "--report", str(out), "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_LAW_VIOLATION
        assert json.loads(out.read_text(encoding="utf-8"))["law_violation"] is True

    def test_violations_are_listed(self, runner, config_file, monkeypatch):
        def failing(frag, doc, config, names):
            raise LawViolationError("Deterministic state fails its re-check", violations=["naturality along [0, 0]"])

        monkeypatch.setattr(cli, "run_analyses", failing)
        result = runner.invoke(cli.main, ["run", "corpus:classical_s1", "-c", str(config_file)])
        assert result.exit_code == cli.EXIT_LAW_VIOLATION
        assert "naturality along [0, 0]" in result.output

    def test_bound_from_configuration(self, runner, tmp_path):
        doc = tmp_path / "unbounded.json"
        unbounded = {"name": "unbounded", "family": {"kind": "classical", "states": 1}}
        doc.write_text(json.dumps(unbounded), encoding="utf-8")
        config = tmp_path / "config.yaml"
        config.write_text("gmt_lab:\n  fragment:\n    default_bound: 2\n", encoding="utf-8")
        out = tmp_path / "report.json"
        result = runner.invoke(cli.main, ["run", str(doc), "--report", str(out), "-c", str(config)])
        assert result.exit_code == cli.EXIT_OK
        assert json.loads(out.read_text(encoding="utf-8"))["fragment"]["bound"] == 2

    def test_repeated_runs_are_identical(self, runner, tmp_path, config_file):
        """Reports match byte for byte once timings are masked."""
        reports = []
        for i in range(2):
            out = tmp_path / f"report{i}.json"
            args = ["run", "corpus:classical_s2", "-a", "all", "--report", str(out), "-c", str(config_file)]
            assert runner.invoke(cli.main, args).exit_code == cli.EXIT_OK
            reports.append(re.sub(r'"elapsed_seconds": ?[-0-9.eE+]+', "", out.read_text(encoding="utf-8")))
        assert reports[0] == reports[1]


class TestOtherCommands:
    """Test schema, corpus and verify-cert."""

    def test_schema(self, runner):
        result = runner.invoke(cli.main, ["schema"])
        assert result.exit_code == 0
        assert "family" in json.loads(result.output)["properties"]

    def test_corpus(self, runner):
        result = runner.invoke(cli.main, ["corpus"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert len(lines) == len(corpus_names())
        assert any(line.startswith("weird: ") for line in lines)

    @pytest.fixture
    def certificate(self, tmp_path):
        frag = build_fragment(load_document("corpus:weird"))
        outcome = find_probabilistic_state(frag)
        path = tmp_path / "weird.cert"
        path.write_text(dump_certificate(outcome.certificate, outcome.system), encoding="utf-8")
        return path

    def test_verify_certificate(self, runner, certificate):
        result = runner.invoke(cli.main, ["verify-cert", "corpus:weird", str(certificate)])
        assert result.exit_code == 0
        assert "certificate valid" in result.output

    def test_tampered_certificate(self, runner, certificate):
        # dropping every multiplier leaves a combination that proves nothing
        lines = certificate.read_text(encoding="utf-8").splitlines()
        kept = [line for line in lines if not line.startswith(("eq ", "nonneg "))]
        certificate.write_text("\n".join(kept) + "\n", encoding="utf-8")
        result = runner.invoke(cli.main, ["verify-cert", "corpus:weird", str(certificate)])
        assert result.exit_code == 1
        assert "certificate INVALID" in result.output

    def test_certificate_for_another_document(self, runner, certificate):
        result = runner.invoke(cli.main, ["verify-cert", "corpus:classical_s2", str(certificate)])
        assert result.exit_code == 1
