"""CLI: subcommands, exit codes, and byte-identical scenario reruns."""

import json

from twoweightlab.cli import main, run_scenario


def test_construct_writes_json(tmp_path, capsys):
    rc = main(["construct", "--k", "2", "--depth", "1", "--out", str(tmp_path)])
    assert rc == 0
    path = tmp_path / "construction.json"
    payload = json.loads(path.read_text())
    assert payload["params"]["k"] == 2
    assert payload["support"][0]["w_value"] == "9/4"


def test_averages_with_interval(tmp_path):
    rc = main(["averages", "--k", "2", "--depth", "1", "--interval", "0,1/2",
               "--out", str(tmp_path)])
    assert rc == 0
    body = (tmp_path / "averages.csv").read_text()
    assert "9/4" in body


def test_scenario_runs_and_exit_code_matches_summary(tmp_path):
    rc = main(["scenario", "--name", "entropy", "--out", str(tmp_path)])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert rc == (0 if summary["passed"] else 1)
    assert summary["criteria"][0]["id"] == "C12"


def test_scenario_reruns_are_byte_identical(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    cfg = {"scenario": "packing"}
    run_scenario(cfg, out1)
    run_scenario(cfg, out2)
    files1 = sorted(p.name for p in out1.iterdir())
    files2 = sorted(p.name for p in out2.iterdir())
    assert files1 == files2 and files1
    for name in files1:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_scenario_empty_criteria_list_is_success(tmp_path):
    summary = run_scenario({"scenario": "all", "criteria_list": []}, tmp_path)
    assert summary["passed"] and summary["criteria"] == []


def test_unknown_scenario_is_usage_error(capsys):
    assert main(["scenario", "--name", "bogus"]) == 2


def test_malformed_config_is_usage_error(tmp_path):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert main(["scenario", "--config", str(bad)]) == 2


def test_missing_scenario_name_is_usage_error():
    assert main(["scenario"]) == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2


def test_sparse_test_command(tmp_path):
    rc = main(["sparse-test", "--k", "3", "--eps", "1/3", "--families", "3",
               "--seed", "5", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "sparse-test.csv").exists()


def test_lorentz_command(tmp_path):
    rc = main(["lorentz", "--k", "2", "--depth", "1", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "lorentz.csv").exists()


def test_bumps_command(tmp_path):
    rc = main(["bumps", "--k-min", "6", "--k-max", "8", "--out", str(tmp_path),
               "--format", "json"])
    assert rc == 0
    rows = json.loads((tmp_path / "bumps.json").read_text())["rows"]
    assert [r["k"] for r in rows] == [6, 7, 8]


def test_criteria_overrides_flow_through(tmp_path):
    cfg = {"scenario": "blowup", "criteria": {"C13": {"ks": [6, 7, 8]}}}
    summary = run_scenario(cfg, tmp_path)
    body = (tmp_path / "C13.csv").read_text()
    assert body.count("\n") == 4  # header + three rows
