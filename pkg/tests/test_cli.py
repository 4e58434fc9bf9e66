import json
import subprocess
import sys

import pytest

from monocorr import cli


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def families(tmp_path):
    return write_json(tmp_path / "families.json", [
        {"kind": "majority", "n": 5},
        {"kind": "dictator", "n": 5, "i": 0},
        {"kind": "tribes", "n": 6, "r": 3},
        {"kind": "threshold", "n": 6, "k": 2},
    ])


def test_cube_audit_writes_pair_rows(tmp_path, families):
    out = tmp_path / "report.csv"
    assert cli.execute(["cube-audit", "--families", families, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "label,n,inequality,cov_num,cov_den,rhs_core,ratio"
    pair_rows = [ln for ln in lines if ",talagrand," in ln or ",kkm," in ln]
    # 3 unordered pairs (self pairs included) per dimension, two inequalities each
    assert len(pair_rows) == 2 * (3 + 3)
    assert any(ln.startswith("majority(n=5),5,theorem1,") for ln in lines)


def test_bad_descriptor_exit_2(tmp_path, capsys):
    bad = write_json(tmp_path / "bad.json", [{"kind": "tribes", "n": 5, "r": 2}])
    assert cli.execute(["cube-audit", "--families", bad, "--out", str(tmp_path / "x.csv")]) == 2
    assert "tribes(n=5, r=2)" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        [],
        ["gamma-min", "--t-range", "0:1", "--s-range", "0:1:2", "--rho-range", "0.5:1:2", "--out", "x.json"],
        ["gamma-min", "--t-range", "0:1:2", "--s-range", "0:1:2", "--rho-range", "-0.5:1:2", "--out", "x.json"],
        ["theorem3-audit", "--random", "0", "--out", "x.csv"],
        ["cube-audit", "--families", "/nonexistent.json", "--out", "x.csv"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.execute(argv) == 2


def test_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("[{")
    assert cli.execute(["cube-audit", "--families", str(bad), "--out", str(tmp_path / "x.csv")]) == 2


def test_unwritable_output_exit_2(tmp_path, families):
    assert cli.execute(["cube-audit", "--families", families, "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_bad_thread_cap_exit_2(tmp_path, families, monkeypatch):
    monkeypatch.setenv("MONOCORR_THREADS", "many")
    assert cli.execute(["cube-audit", "--families", families, "--out", str(tmp_path / "x.csv")]) == 2


def test_gamma_min_with_negative_ranges(tmp_path):
    out = tmp_path / "gmin.json"
    argv = ["gamma-min", "--t-range", "-1:1:3", "--s-range", "-1:1:3", "--rho-range", "0.5:1:2", "--out", str(out)]
    assert cli.execute(argv) == 0
    data = json.loads(out.read_text())
    assert data["argmin"] == {"t": 0.0, "s": 0.0, "rho": 0.5}
    assert data["points"] == 18
    assert data["min"] > 0


def test_pin_mode_then_assert(tmp_path):
    pins = tmp_path / "pins.json"
    argv = ["gauss-grid", "--t-range", "-2:2:3", "--s-range", "-2:2:3", "--rho-range", "0.5:1:2",
            "--out", str(tmp_path / "grid.csv"), "--pins", str(pins)]
    assert cli.execute(argv) == 0
    stored = json.loads(pins.read_text())
    assert set(stored) == {"gauss-grid[-2:2:3,-2:2:3,0.5:1:2]/gamma", "gauss-grid[-2:2:3,-2:2:3,0.5:1:2]/ltf_pair"}
    assert cli.execute(argv) == 0
    assert (tmp_path / "grid.csv").read_text().splitlines()[0].endswith(",pass")


def test_failing_pin_exit_1_and_report_written(tmp_path):
    pins = tmp_path / "pins.json"
    pins.write_text(json.dumps({"gamma-min[-1:1:3,-1:1:3,0.5:1:2]/gamma": 100.0}))
    out = tmp_path / "gmin.json"
    argv = ["gamma-min", "--t-range", "-1:1:3", "--s-range", "-1:1:3", "--rho-range", "0.5:1:2",
            "--out", str(out), "--pins", str(pins)]
    assert cli.execute(argv) == 1
    assert json.loads(out.read_text())["pass"] is False
    # existing pins are never rewritten
    assert json.loads(pins.read_text()) == {"gamma-min[-1:1:3,-1:1:3,0.5:1:2]/gamma": 100.0}


def test_cube_violation_exit_1(tmp_path):
    pins = tmp_path / "pins.json"
    pins.write_text(json.dumps({"cube-audit[f.json]/talagrand": 1e9}))
    fams = write_json(tmp_path / "f.json", [{"kind": "majority", "n": 3}])
    out = tmp_path / "r.csv"
    assert cli.execute(["cube-audit", "--families", fams, "--out", str(out), "--pins", str(pins)]) == 1
    assert ",fail" in out.read_text()


def test_theorem3_instances_file(tmp_path):
    inst = write_json(tmp_path / "inst.json", [{
        "label": "two-step",
        "f": {"base": 0.0, "atoms": [[-1.0, 0.5], [1.0, 0.5]]},
        "g": {"base": 0.0, "atoms": [[-1.0, 0.5], [1.0, 0.5]]},
        "w": [1.0, 0.0],
        "v": [0.5, 0.75 ** 0.5],
    }])
    out = tmp_path / "t3.csv"
    assert cli.execute(["theorem3-audit", "--instances", inst, "--out", str(out)]) == 0
    header, row = out.read_text().splitlines()
    assert header == "label,n,inequality,cov_num,cov_den,rhs_core,ratio,a_f,a_g,rho"
    assert row.startswith("two-step,2,theorem3,0.02936589631840")


def test_theorem3_bad_step_exit_2(tmp_path):
    inst = write_json(tmp_path / "inst.json", [{
        "f": {"atoms": [[0.0, 0.8], [1.0, 0.8]]}, "g": {"atoms": [[0.0, 0.5]]}, "w": [1.0], "v": [1.0],
    }])
    assert cli.execute(["theorem3-audit", "--instances", inst, "--out", str(tmp_path / "t.csv")]) == 2


def test_mc_calibrate(tmp_path):
    out = tmp_path / "mc.json"
    assert cli.execute(["mc-calibrate", "--mc-samples", "20000", "--mc-seed", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["total"] == 50 and data["inside"] >= 48


def test_config_file_and_override(tmp_path):
    cfg = write_json(tmp_path / "cfg.json", {
        "command": "gamma-min", "t_range": "-1:1:3", "s_range": "-1:1:3", "rho_range": "0.5:1:2",
        "out": str(tmp_path / "a.json"),
    })
    assert cli.execute(["--config", cfg]) == 0
    assert cli.execute(["gamma-min", "--config", cfg, "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_identical_runs_identical_bytes(tmp_path, families):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.execute(["cube-audit", "--families", families, "--out", str(a)])
    cli.execute(["cube-audit", "--families", families, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "monocorr", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "invalid choice" in proc.stderr
