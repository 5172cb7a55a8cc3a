import csv
import json
import os

import pytest
from click.testing import CliRunner

from aegisshield.cli import main
from conftest import fixture_path


@pytest.fixture()
def runner():
    return CliRunner()


def kb_dir():
    return fixture_path("kb")


def profile_path():
    return fixture_path("profiles", "daas.json")


def mock_dir_path():
    return fixture_path("mock-provider")


class TestRunVerb:
    def test_run_writes_file(self, runner, tmp_path):
        out = tmp_path / "run.json"
        result = runner.invoke(main, [
            "run", "--profile", profile_path(), "--out", str(out),
            "--kb-dir", kb_dir(), "--mock-provider", mock_dir_path(),
        ])
        assert result.exit_code == 0, result.output
        assert out.exists()
        doc = json.loads(out.read_text())
        assert len(doc["run"]["threat_model"]) == 18

    def test_unknown_flag_exit_2(self, runner):
        result = runner.invoke(main, ["run", "--bogus"])
        assert result.exit_code == 2

    def test_missing_required_exit_2(self, runner):
        result = runner.invoke(main, ["run"])
        assert result.exit_code == 2

    def test_bad_profile_exit_1(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"description": "", "app_type": "x",
                                   "industry_sector": "y"}))
        result = runner.invoke(main, [
            "run", "--profile", str(bad), "--out", str(tmp_path / "o.json"),
            "--kb-dir", kb_dir(), "--mock-provider", mock_dir_path(),
        ])
        assert result.exit_code == 1


class TestBatchVerb:
    def test_batch_three(self, runner, tmp_path):
        result = runner.invoke(main, [
            "batch", "--profile", profile_path(), "--n", "3",
            "--out-dir", str(tmp_path), "--case-id", "cli",
            "--kb-dir", kb_dir(), "--mock-provider", mock_dir_path(),
        ])
        assert result.exit_code == 0, result.output
        assert "3/3 runs succeeded" in result.output
        assert (tmp_path / "case-cli" / "manifest.json").exists()


@pytest.fixture()
def batch_dir(runner, tmp_path_factory):
    directory = tmp_path_factory.mktemp("batch")
    result = runner.invoke(main, [
        "batch", "--profile", profile_path(), "--n", "2",
        "--out-dir", str(directory),
        "--kb-dir", kb_dir(), "--mock-provider", mock_dir_path(),
    ])
    assert result.exit_code == 0, result.output
    return directory


class TestReportVerb:
    def test_markdown_and_pdf(self, runner, batch_dir, tmp_path):
        run_file = str(batch_dir / "batch-1.json")
        md_out = tmp_path / "report.md"
        result = runner.invoke(main, ["report", "--run", run_file, "--out", str(md_out)])
        assert result.exit_code == 0, result.output
        assert "## STRIDE Threat Model" in md_out.read_text()

        pdf_out = tmp_path / "report.pdf"
        result = runner.invoke(main, ["report", "--run", run_file, "--out", str(pdf_out)])
        assert result.exit_code == 0
        assert pdf_out.read_bytes().startswith(b"%PDF-")


class TestEvalVerbs:
    def test_mapping_summary(self, runner, batch_dir):
        result = runner.invoke(main, ["eval", "mapping", "--runs", str(batch_dir)])
        assert result.exit_code == 0, result.output
        assert "mapped" in result.output
        assert "%" in result.output

    def test_readability_summary(self, runner, batch_dir, tmp_path):
        csv_out = tmp_path / "grades.csv"
        result = runner.invoke(main, [
            "eval", "readability", "--runs", str(batch_dir), "--csv-out", str(csv_out),
        ])
        assert result.exit_code == 0, result.output
        assert "mean=" in result.output
        rows = list(csv.reader(csv_out.open()))
        assert rows[0] == ["grade"]
        assert len(rows) == 1 + 36  # 2 runs x 18 threats

    def test_similarity_with_mock_embedder(self, runner, batch_dir, tmp_path):
        records_out = tmp_path / "records.csv"
        summary_out = tmp_path / "summary.json"
        result = runner.invoke(main, [
            "eval", "similarity", "--runs", str(batch_dir),
            "--expert", fixture_path("eval", "expert_threats.json"),
            "--case-id", "daas-demo", "--mock-embedder",
            "--records-out", str(records_out),
            "--summary-out", str(summary_out),
        ])
        assert result.exit_code == 0, result.output
        assert "batches" in result.output
        rows = list(csv.DictReader(records_out.open()))
        assert rows
        assert {"case_id", "batch_index", "category", "score"} <= set(rows[0])
        summary = json.loads(summary_out.read_text())
        assert summary["case"]["total_batches"] == 2
        assert len(summary["batches"]) == 2
        assert {"p_value", "sample_p", "passes"} <= set(summary["case"])

    def test_mapping_summary_file(self, runner, batch_dir, tmp_path):
        summary_out = tmp_path / "mapping.json"
        result = runner.invoke(main, [
            "eval", "mapping", "--runs", str(batch_dir),
            "--summary-out", str(summary_out),
        ])
        assert result.exit_code == 0, result.output
        summary = json.loads(summary_out.read_text())
        assert summary["total"] == 36
        assert summary["mapped"] + summary["hallucination_count"] <= summary["total"]
        assert "Spoofing" in summary["per_category"]

    def test_correlate(self, runner, tmp_path):
        similarity_csv = tmp_path / "sim.csv"
        with similarity_csv.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["case_id", "score"])
            for case, scores in [("daas-demo", (0.7, 0.8)), ("harbor-iot", (0.4, 0.5)),
                                 ("med-portal", (0.6, 0.9)), ("fleet-telemetry", (0.2, 0.3))]:
                for score in scores:
                    writer.writerow([case, score])
        result = runner.invoke(main, [
            "eval", "correlate", "--similarity-csv", str(similarity_csv),
            "--rubric", fixture_path("eval", "rubric.csv"),
        ])
        assert result.exit_code == 0, result.output
        assert "crit1" in result.output
        assert "threat_count" in result.output


class TestKbFetchVerb:
    def test_fetch_records_versions(self, runner, tmp_path, monkeypatch):
        bundle = {"type": "bundle", "objects": [
            {"type": "x-mitre-collection", "x_mitre_version": "17.1"},
        ]}

        class FakeClient:
            @staticmethod
            def get(url, timeout=None, follow_redirects=None):
                class Response:
                    status_code = 200

                    @staticmethod
                    def json():
                        return bundle

                return Response()

        import aegisshield.cli as cli_module

        monkeypatch.setattr(cli_module, "fetch_bundles",
                            lambda dest, **kw: __import__("aegisshield.attack_kb", fromlist=["x"])
                            .fetch_bundles(dest, client=FakeClient(), **kw))
        result = runner.invoke(main, ["kb", "fetch", "--dest", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "17.1" in result.output
        assert (tmp_path / "manifest.json").exists()
