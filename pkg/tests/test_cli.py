from __future__ import annotations

import json
from pathlib import Path

import pytest

from netcycle.cli import main

from test_pipeline import INTRO_CSV, OVERLAP_CSV, strip_timings


@pytest.fixture
def overlap_csv(tmp_path) -> Path:
    path = tmp_path / "invoices.csv"
    path.write_text(OVERLAP_CSV, encoding="utf-8")
    return path


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "netcycle" in capsys.readouterr().out


def test_run_reports_grand_total(tmp_path, overlap_csv, capsys):
    code = main(["run", "--input", str(overlap_csv), "--out-dir", str(tmp_path / "out")])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["grand_total"] == 29_000


def test_stage_by_stage_matches_run(tmp_path, overlap_csv):
    out = tmp_path / "stages"
    out.mkdir()
    assert main(["ingest", "--input", str(overlap_csv), "--out", str(out / "graph.json")]) == 0
    assert main(["scc", "--graph", str(out / "graph.json"), "--out", str(out / "scc_sizes.csv")]) == 0
    assert main([
        "circuits", "--graph", str(out / "graph.json"),
        "--out", str(out / "circuits.txt"), "--json", str(out / "circuits.json"),
    ]) == 0
    assert main([
        "plan", "--graph", str(out / "graph.json"),
        "--circuits", str(out / "circuits.json"), "--out", str(out / "plans.json"),
    ]) == 0

    assert main(["run", "--input", str(overlap_csv), "--out-dir", str(tmp_path / "full")]) == 0
    full = strip_timings(tmp_path / "full")
    for name in ("graph.json", "scc_sizes.csv", "circuits.txt", "circuits.json", "plans.json"):
        assert (out / name).read_bytes() == full[name]


def test_plan_accepts_plain_circuit_lines(tmp_path, overlap_csv):
    out = tmp_path / "txt"
    out.mkdir()
    main(["ingest", "--input", str(overlap_csv), "--out", str(out / "graph.json")])
    main(["circuits", "--graph", str(out / "graph.json"), "--out", str(out / "circuits.txt")])
    assert main([
        "plan", "--graph", str(out / "graph.json"),
        "--circuits", str(out / "circuits.txt"), "--out", str(out / "plans.json"),
    ]) == 0
    payload = json.loads((out / "plans.json").read_text())
    assert payload["grand_total"] == 29_000


def test_gen_then_run(tmp_path, capsys):
    csv_path = tmp_path / "gen.csv"
    assert main(["gen", "--companies", "60", "--edges", "200", "--seed", "5",
                 "--out", str(csv_path)]) == 0
    assert main(["run", "--input", str(csv_path), "--out-dir", str(tmp_path / "out"),
                 "--max-len", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["company_count"] == 60
    assert report["edge_count"] == 200


def test_gen_infeasible_is_input_error(tmp_path):
    assert main(["gen", "--companies", "3", "--edges", "99", "--out", str(tmp_path / "x.csv")]) == 2


def test_missing_input_file(tmp_path):
    assert main(["run", "--input", str(tmp_path / "nope.csv"), "--out-dir", str(tmp_path / "o")]) == 2


def test_bad_record_strict_vs_lenient(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(INTRO_CSV + "I9,D,D,5,2019-01-01\n", encoding="utf-8")
    assert main(["run", "--input", str(bad), "--out-dir", str(tmp_path / "s")]) == 2
    assert main(["run", "--input", str(bad), "--out-dir", str(tmp_path / "l"), "--lenient"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["rejected_records"] == 1
    assert report["grand_total"] == 3 * 2_300_000


def test_truncation_exit_code_and_no_partial_plans(tmp_path, overlap_csv):
    out = tmp_path / "out"
    code = main(["run", "--input", str(overlap_csv), "--out-dir", str(out),
                 "--max-circuits", "1"])
    assert code == 3
    assert not (out / "plans.json").exists()
    lenient = main(["run", "--input", str(overlap_csv), "--out-dir", str(out),
                    "--max-circuits", "1", "--lenient"])
    assert lenient == 0
    assert (out / "plans.json").exists()


def test_env_var_overrides_flag(tmp_path, overlap_csv, capsys, monkeypatch):
    monkeypatch.setenv("NETCYCLE_RUN_MAX_LEN", "3")
    assert main(["run", "--input", str(overlap_csv), "--out-dir", str(tmp_path / "out")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert list(report["circuits_by_length"]) == ["2", "3"]


def test_report_subcommand(tmp_path, overlap_csv, capsys):
    out = tmp_path / "out"
    main(["run", "--input", str(overlap_csv), "--out-dir", str(out)])
    capsys.readouterr()
    assert main(["report", "--report", str(out / "report.json")]) == 0
    text = capsys.readouterr().out
    assert text == (out / "report.csv").read_text()


def test_scc_output(tmp_path, overlap_csv, capsys):
    main(["ingest", "--input", str(overlap_csv), "--out", str(tmp_path / "g.json")])
    assert main(["scc", "--graph", str(tmp_path / "g.json")]) == 0
    assert capsys.readouterr().out == "component,size\n0,8\n"


def test_circuits_stdout_lines(tmp_path, overlap_csv, capsys):
    main(["ingest", "--input", str(overlap_csv), "--out", str(tmp_path / "g.json")])
    assert main(["circuits", "--graph", str(tmp_path / "g.json")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "A,B,D,E,F" in lines
    assert len(lines) == 5


def test_bench_smoke(capsys):
    assert main(["bench", "--companies", "30", "--edges", "90", "--seed", "1",
                 "--max-len", "5"]) == 0
    out = capsys.readouterr().out
    assert "circuits" in out
