import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gronwall2d.bound_engine import ModelConstants, integrate_bound, thresholds
from gronwall2d.cli import main
from gronwall2d.experiments import SweepSpec, run_sweep


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_thresholds_example(capsys):
    code, out, _ = run(capsys, "thresholds", "--C", "1", "--T", "0.1", "--M", "2")
    assert code == 0
    data = json.loads(out)
    assert data["eps0"] == 1.0 and data["m_bound"] == 2.0
    code, out2, _ = run(capsys, "thresholds", "--C", "1", "--T", "0.1", "--m-tilde", "1")
    assert out2 == out
    code, _, err = run(capsys, "thresholds", "--M", "2", "--m-tilde", "1")
    assert code == 1 and "only one" in err


def test_bound_example(capsys):
    code, out, _ = run(capsys, "bound", "--system", "boussinesq", "--eps", "0", "--z0", "2.71828",
                       "--C", "1", "--T", "1")
    assert code == 0
    assert json.loads(out)["final"] == pytest.approx(84.49, rel=1e-4)


def test_bound_blowup_exit_code(capsys):
    code, _, err = run(capsys, "bound", "--eps", "1", "--C", "5", "--T", "3", "--z0", "2")
    assert code == 2
    assert "reached t=" in err


def test_simulate_missing_config(capsys, tmp_path):
    out = tmp_path / "run"
    code, _, err = run(capsys, "simulate", "--config", str(tmp_path / "none.yaml"), "--out", str(out))
    assert code == 1 and "not found" in err
    assert not out.exists()
    code, _, _ = run(capsys, "simulate", "--out", str(out))
    assert code == 1 and not out.exists()


def test_strict_keys(capsys, tmp_path):
    code, _, err = run(capsys, "thresholds", "--M", "2", "--set", "colour=red")
    assert code == 1 and "colour" in err
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n: 32\nbogus: 1\n")
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 1 and "bogus" in err
    code, _, err = run(capsys, "bound", "--set", "z0=abc")
    assert code == 1 and "z0" in err


def test_invalid_values_exit_one(capsys):
    code, _, _ = run(capsys, "bound", "--z0", "0.5")
    assert code == 1
    code, _, _ = run(capsys, "thresholds")
    assert code == 1


def test_bound_output_matches_library(capsys, tmp_path):
    code, _, _ = run(capsys, "bound", "--eps", "0.01", "--z0", "3", "--C", "0.8", "--T", "0.5",
                     "--n-eval", "20", "--out", str(tmp_path / "cli"))
    assert code == 0
    mc = ModelConstants(0.8, 0.5, 0.01)
    direct = integrate_bound("boussinesq", 3.0, mc, 1e-10, 1e-12, t_eval=np.linspace(0, 0.5, 21))
    direct.to_csv(tmp_path / "direct.csv")
    assert (tmp_path / "cli" / "trajectory.csv").read_bytes() == \
        (tmp_path / "direct.csv").read_bytes()
    assert (tmp_path / "cli" / "manifest.json").exists()


def test_thresholds_output_matches_library(capsys, tmp_path):
    code, out, _ = run(capsys, "thresholds", "--C", "1", "--T", "1", "--M", "2",
                       "--out", str(tmp_path))
    assert code == 0
    direct = thresholds(1.0, ModelConstants(1.0, 1.0)).to_json()
    assert out.strip() == direct
    assert (tmp_path / "thresholds.json").read_text().strip() == direct


def test_sweep_matches_library(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("GRONWALL2D_WORKERS", "2")
    code, _, _ = run(capsys, "sweep", "--variable", "epsilon", "--values", "1e-5,1e-10,1e-20",
                     "--out", str(tmp_path / "cli"))
    assert code == 0
    run_sweep(SweepSpec("epsilon", (1e-5, 1e-10, 1e-20), outputs=tmp_path / "lib"), workers=1)
    assert (tmp_path / "cli" / "summary.csv").read_bytes() == \
        (tmp_path / "lib" / "summary.csv").read_bytes()
    manifest = json.loads((tmp_path / "cli" / "manifest.json").read_text())
    assert manifest["outputs"]["summary"] == "summary.csv"


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"c_const": 1.0, "horizon": 0.5, "m_bound": 2.0}))
    _, out, _ = run(capsys, "thresholds", "--config", str(cfg), "--T", "0.1")
    assert json.loads(out)["eps0"] == 1.0
    _, out, _ = run(capsys, "thresholds", "--config", str(cfg), "--T", "0.1", "--set", "horizon=1")
    assert math.exp(json.loads(out)["log_eps1"]) < 1e-100


def test_picard(capsys):
    code, out, _ = run(capsys, "picard", "--w0", "2", "--eps", "0.01", "--T", "0.1",
                       "--grid-n", "200")
    data = json.loads(out)
    assert code == 0 and data["in_regime"] and data["contraction_estimate"] < 0.103


def test_simulate_and_compare(capsys, tmp_path):
    cfg = tmp_path / "sim.yaml"
    cfg.write_text("n: 32\ndt: 0.005\nt_end: 0.05\nepsilon: 0.01\ntarget_u_h3: 10\n"
                   "target_phi_h3: 10\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "s"))
    assert code == 0 and json.loads(out)["steps"] == 10
    for name in ("series.csv", "omega.bin", "omega.bin.json", "phi.bin", "manifest.json"):
        assert (tmp_path / "s" / name).exists()
    code, out, _ = run(capsys, "compare", "--config", str(cfg), "--set", "calibration=sup",
                       "--out", str(tmp_path / "c"))
    assert code == 0 and json.loads(out)["holds"] is True
    manifest = json.loads((tmp_path / "c" / "manifest.json").read_text())
    assert manifest["config"]["calibration"] == "sup"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gronwall2d.cli", "thresholds", "--M", "2",
                           "--T", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["eps0"] == 1.0
