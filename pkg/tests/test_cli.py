import os

import pytest

from gastrans import cli

from conftest import SCENARIO_DIR

SINGLE = os.path.join(SCENARIO_DIR, "single_pipeline.toml")
SIX = os.path.join(SCENARIO_DIR, "six_node.toml")


def test_validate_ok(capsys):
    assert cli.main(["validate", "--scenario", SINGLE]) == 0
    out = capsys.readouterr().out
    assert out.startswith("OK:")
    assert "2 nodes, 1 pipelines" in out


def test_validate_rejects_bad_document(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[gas]\nv = -1.0\np_b = 1e6\nq_b = 2e3\n")
    assert cli.main(["validate", "--scenario", str(bad)]) == 1
    assert capsys.readouterr().out.startswith("INVALID:")


def test_missing_file_is_input_error(capsys):
    assert cli.main(["validate", "--scenario", "/no/such/file.toml"]) == 1


def test_usage_error_exit_code():
    assert cli.main(["frobnicate"]) == 3


def test_steady_output(tmp_path):
    out = tmp_path / "steady.csv"
    assert cli.main(["steady", "--scenario", SIX, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "entity,kind,value_si"
    rows = dict((ln.split(",")[0], ln.split(",")) for ln in lines[1:])
    assert rows["e1"][1] == "flow_kg_s"
    assert float(rows["e1"][2]) == pytest.approx(350.0)
    assert float(rows["n3"][2]) == pytest.approx(6752035.46396136, abs=1e-5)


def test_run_writes_series(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = cli.main(["run", "--scenario", SINGLE, "--dT", "1.0",
                     "--method", "sas2", "--out", str(out)])
    assert code == 0
    assert "200 steps" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0] == "t_s,pipeline,x_m,p_pa,q_kg_s"
    assert len(lines) == 1 + 200 * 6  # 6 borders per step


def test_run_rejects_bad_override(capsys):
    assert cli.main(["run", "--scenario", SINGLE, "--dT", "3.0"]) == 1


def test_compare_reports_error_metric(capsys):
    code = cli.main(["compare", "--scenario", SINGLE, "--method", "sas2",
                     "--dT", "1.0", "--probe", "p1:inlet:q",
                     "--ref-dT", "0.5", "--ref-refine", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "ERR=" in out and "log10=" in out


def test_compare_rejects_bad_probe(capsys):
    assert cli.main(["compare", "--scenario", SINGLE, "--probe", "bogus"]) == 1


def test_solver_failure_exit_code(capsys):
    code = cli.main(["run", "--scenario", SINGLE, "--method", "sas1",
                     "--M", "3", "--Mx", "1"])
    assert code == 2
    assert "solver failure" in capsys.readouterr().err


def test_sweep_command(tmp_path, capsys):
    scenario = tmp_path / "short.toml"
    with open(SINGLE, "r", encoding="utf-8") as fh:
        text = fh.read()
    scenario.write_text(text.replace("duration = 200.0", "duration = 20.0"))
    sweep = tmp_path / "grid.sweep"
    sweep.write_text(
        'scenario = "short.toml"\n'
        'probe = "p1:inlet:q"\n'
        "[reference]\n"
        'method = "fdm"\n'
        "dT = 0.5\n"
        "refine = 2\n"
        "[[entry]]\n"
        'method = "sas2"\n'
        "M = 2\n"
        "Mx = 1\n"
        "dT = [1.0, 2.0]\n"
    )
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--sweep", str(sweep), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("method,M,Mx,dT_s")
    assert len(lines) == 3
    printed = capsys.readouterr().out
    assert "sas2 M=2 Mx=1 dT=1.0" in printed


def test_shipped_sweep_files_parse():
    sweep_dir = os.path.join(SCENARIO_DIR, "sweeps")
    names = sorted(os.listdir(sweep_dir))
    assert names, "no sweep fixtures shipped"
    for name in names:
        cfg = cli.driver_load_sweep(os.path.join(sweep_dir, name))
        assert os.path.exists(cfg["scenario"])
        assert cfg["entries"]
