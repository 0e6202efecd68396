import json

import pandas as pd
import pytest
from click.testing import CliRunner

from citenet.cli.main import cli, main
from citenet.config.settings import settings

CORPUS = settings.REFERENCE_CORPUS
SCREEN = settings.SCREENING_PATH


@pytest.fixture
def runner():
    return CliRunner()


def test_run_writes_artifacts(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", "--corpus", CORPUS, "--screen", SCREEN, "--out", str(out)])

    assert result.exit_code == 0, result.output
    assert "Screening kept 48 of 49 judgments" in result.stdout
    report = json.loads((out / "screening_report.json").read_text())
    assert report["duplicates_removed"] == 1
    assert report["removed_ids"] == [["BJ-049", "duplicate"]]


def test_run_with_outlier_exclusion(runner, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", "--corpus", CORPUS, "--screen", SCREEN, "--out", str(out),
                                 "--exclude-outliers"])
    assert result.exit_code == 0, result.output
    edges = pd.read_csv(out / "excluded" / "network_edges.csv")
    assert set(edges["source"]) | set(edges["target"]) == set("ACGELNRIBOPFJK")


def test_missing_ruleset_is_an_input_error(runner, tmp_path):
    result = runner.invoke(cli, ["run", "--corpus", CORPUS, "--rules", str(tmp_path / "nope.json"),
                                 "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert "ruleset stage failed" in result.output


def test_missing_corpus_is_an_input_error(runner, tmp_path):
    result = runner.invoke(cli, ["run", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert "ingest" in result.output


def test_out_of_range_threshold(runner, tmp_path):
    result = runner.invoke(cli, ["run", "--corpus", CORPUS, "--threshold", "1.5", "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert not (tmp_path / "out").exists()


def test_invalid_corpus_leaves_no_output(runner, tmp_path):
    corpus = tmp_path / "bad.jsonl"
    corpus.write_text("not json\n")
    result = runner.invoke(cli, ["run", "--corpus", str(corpus), "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    assert "line 1" in result.output
    assert not (tmp_path / "out").exists()


def test_empty_corpus(runner, tmp_path):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    out = tmp_path / "out"
    result = runner.invoke(cli, ["run", "--corpus", str(corpus), "--out", str(out)])

    assert result.exit_code == 0, result.output
    assert json.loads((out / "screening_report.json").read_text())["final_count"] == 0
    assert not (out / "network_edges.csv").exists()


def test_ingest_emits_one_record_per_judgment(runner):
    result = runner.invoke(cli, ["ingest", "--corpus", CORPUS])
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert len(records) == 49
    assert records[0]["doc_id"] == "BJ-001"
    assert "raw_text" not in records[0]


def test_screen_prints_the_report(runner):
    result = runner.invoke(cli, ["screen", "--corpus", CORPUS, "--screen", SCREEN])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["final_count"] == 48


def test_build_writes_network_files(runner, tmp_path):
    out = tmp_path / "net"
    result = runner.invoke(cli, ["build", "--corpus", CORPUS, "--out", str(out), "--format", "edge_csv"])
    assert result.exit_code == 0, result.output
    assert "18 provisions, 46 ties" in result.stdout
    assert sorted(p.name for p in out.iterdir()) == ["affiliation_matrix.csv", "network_edges.csv"]
    assert (out / "network_edges.csv").read_bytes() == open(settings.REFERENCE_NETWORK, "rb").read()


def test_metrics_from_an_edge_list(runner, tmp_path):
    out = tmp_path / "metrics"
    result = runner.invoke(cli, ["metrics", "--edges", settings.REFERENCE_NETWORK, "--out", str(out)])
    assert result.exit_code == 0, result.output

    nodes = pd.read_csv(out / "node_metrics.csv")
    overall = dict(pd.read_csv(out / "network_metrics.csv", dtype=str).itertuples(index=False))
    assert nodes["degree"].sum() == 92
    assert overall["Number of Edges"] == "92"
    assert overall["Density"] == "0.301"


def test_metrics_needs_exactly_one_source(runner):
    result = runner.invoke(cli, ["metrics"])
    assert result.exit_code == 1
    assert "exactly one" in result.output


def test_components(runner):
    result = runner.invoke(cli, ["components", "--corpus", CORPUS, "--screen", SCREEN])
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert [r["size"] for r in records] == [14, 4]
    assert records[1]["contributing_judgments"] == ["BJ-026"]


def test_cluster(runner):
    result = runner.invoke(cli, ["cluster", "--corpus", CORPUS, "--screen", SCREEN])
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert len(records) == 7
    assert records[0]["kind"] == "batch"
    assert records[0]["representative_citations"] == ["A", "C", "G"]


def test_cluster_rejects_batch_min_below_two(runner):
    result = runner.invoke(cli, ["cluster", "--corpus", CORPUS, "--batch-min", "1"])
    assert result.exit_code == 1


def test_retrieve(runner):
    result = runner.invoke(cli, ["retrieve", "--corpus", CORPUS, "--query", "BJ-001", "-k", "3"])
    assert result.exit_code == 0, result.output
    assert result.stdout == "doc_id,score\nBJ-005,1\nBJ-010,1\nBJ-017,1\n"


def test_retrieve_unknown_query(runner):
    result = runner.invoke(cli, ["retrieve", "--corpus", CORPUS, "--query", "BJ-999"])
    assert result.exit_code == 1
    assert "BJ-999" in result.output


def test_alerts(runner):
    result = runner.invoke(cli, ["alerts", "--corpus", CORPUS, "--screen", SCREEN])
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in result.stdout.splitlines()]
    assert [r["doc_id"] for r in records] == ["BJ-007", "BJ-008", "BJ-014", "BJ-019", "BJ-022",
                                              "BJ-032", "BJ-034", "BJ-040", "BJ-045"]
    assert {r["severity"] for r in records} == {"0.667"}


def test_export_dot(runner):
    result = runner.invoke(cli, ["export", "--edges", settings.REFERENCE_NETWORK, "--format", "dot"])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("graph cocitation {\n")
    assert '"C" -- "G" [weight=39, label="39"];' in result.stdout


def test_export_unknown_format(runner):
    result = runner.invoke(cli, ["export", "--edges", settings.REFERENCE_NETWORK, "--format", "gexf"])
    assert result.exit_code == 1


def test_malformed_edge_list(runner, tmp_path):
    edges = tmp_path / "edges.csv"
    edges.write_text("source,target,weight\nA,B,1\nB,A,1\n")
    result = runner.invoke(cli, ["metrics", "--edges", str(edges)])
    assert result.exit_code == 1
    assert "line 3" in result.output


def test_exclusion_feeds_back_into_screening(runner, tmp_path):
    ledger = str(tmp_path / "exclusions.db")
    recorded = runner.invoke(cli, ["exclude", "BJ-026", "--ledger", ledger, "--reason", "outlier component",
                                   "--component", "Q,M,D,H"])
    assert recorded.exit_code == 0, recorded.output

    screened = runner.invoke(cli, ["screen", "--corpus", CORPUS, "--screen", SCREEN, "--ledger", ledger])
    report = json.loads(screened.stdout)
    assert report["manually_excluded"] == 1
    assert report["final_count"] == 47

    listed = runner.invoke(cli, ["exclude", "--list", "--ledger", ledger])
    data = json.loads(listed.stdout)
    assert data["stats"]["active"] == 1
    assert data["history"][0]["component"] == ["Q", "M", "D", "H"]

    revoked = runner.invoke(cli, ["exclude", "BJ-026", "--ledger", ledger, "--revoke"])
    assert "Revoked 1 decision(s)" in revoked.stdout


def test_exclusion_needs_a_reason(runner, tmp_path):
    result = runner.invoke(cli, ["exclude", "BJ-026", "--ledger", str(tmp_path / "exclusions.db")])
    assert result.exit_code == 1
    assert "reason" in result.output


def test_main_entry_point(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["retrieve", "--corpus", CORPUS, "--query", "BJ-001", "-k", "1"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out == "doc_id,score\nBJ-005,1\n"
