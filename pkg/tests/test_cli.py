"""In-process command-line interface tests."""

import json
import os

import numpy as np
import pytest

from modnls.cli import run_command


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_config(tmp_path, **overrides):
    cfg = {
        "d": 1, "k": 1, "N": 2, "s": 1.0, "gamma": 0.55, "lambda": 0.5,
        "rho": 1.0, "T": 0.1, "M": 16, "scheme": "picard",
        "path": {"kind": "fbm", "H": 0.5, "T": 0.1, "M": 16, "seed": 3},
        "init": {"type": "plane_wave", "c": [0.02, 0.0], "m": 1},
    }
    cfg.update(overrides)
    out = tmp_path / "config.json"
    out.write_text(json.dumps(cfg))
    return str(out)


def test_gen_path_linear(tmp_path, capsys):
    out = tmp_path / "lin.csv"
    rc = run_command(["gen-path", "--kind", "linear", "--T", "1.0",
                      "--M", "8", "--out", str(out)])
    assert rc == 0
    assert str(out) in capsys.readouterr().out
    rows = [ln for ln in out.read_text().splitlines() if ln.strip()]
    assert rows[0] == "t,w"
    assert len(rows) == 1 + 9
    data = np.loadtxt(rows[1:], delimiter=",")
    np.testing.assert_allclose(data[:, 0], data[:, 1], atol=1e-15)


def test_gen_path_fbm_missing_hurst(tmp_path, capsys):
    rc = run_command(["gen-path", "--kind", "fbm", "--T", "1.0", "--M", "8",
                      "--seed", "1", "--out", str(tmp_path / "f.csv")])
    assert rc == 2
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "ConfigError"
    assert "--H" in diag["message"]


def test_irregularity_report_keys(tmp_path):
    pcsv = tmp_path / "lin.csv"
    assert run_command(["gen-path", "--kind", "linear", "--T", "1.0",
                        "--M", "64", "--out", str(pcsv)]) == 0
    rep = tmp_path / "irr.json"
    rc = run_command(["irregularity", "--path", str(pcsv), "--gamma", "0.5",
                      "--rho", "0.5", "--amax", "16", "--pairs", "40",
                      "--out", str(rep)])
    assert rc == 0
    payload = read_json(rep)
    assert set(payload) == {"rho", "gamma", "norm_estimate", "a_max",
                            "pair_count", "trend"}


def test_solve_happy_path(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "run"
    rc = run_command(["solve", "--config", cfg, "--out", str(out)])
    assert rc == 0
    report = read_json(out / "report.json")
    assert set(report) == {"scheme", "iterations", "residuals", "times",
                           "norms", "mass", "mass_drift"}
    assert report["scheme"] == "picard"
    assert len(report["times"]) == 17
    assert report["mass_drift"] < 1e-8
    states = sorted(f for f in os.listdir(out) if f.endswith(".csv"))
    assert states[0] == "state_0000.csv" and states[-1] == "state_0016.csv"
    assert len(states) == 17


def test_solve_reruns_byte_identical(tmp_path):
    cfg = write_config(tmp_path)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run_command(["solve", "--config", cfg, "--out", str(out)]) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]


def test_solve_rejects_bad_config(tmp_path, capsys):
    cfg = write_config(tmp_path, gamma=0.5, **{"lambda": 0.7})
    rc = run_command(["solve", "--config", cfg, "--out", str(tmp_path / "x")])
    assert rc == 2
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "ConfigError"
    assert "lambda" in diag["message"]


def test_solve_blowup_exit_code(tmp_path, capsys):
    cfg = write_config(
        tmp_path, scheme="euler_young", M=8,
        path={"kind": "fbm", "H": 0.5, "T": 0.1, "M": 8, "seed": 3},
        init={"type": "random", "s": 1.0, "seed": 0, "scale": 1e3})
    rc = run_command(["solve", "--config", cfg, "--out", str(tmp_path / "x")])
    assert rc == 3
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "BlowUpError"
    assert diag["step"] >= 1


def test_converge_csv(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "conv"
    rc = run_command(["converge", "--config", cfg, "--levels", "3",
                      "--out", str(out)])
    assert rc == 0
    rows = (out / "convergence.csv").read_text().splitlines()
    assert rows[0] == "mesh,error,order"
    assert len(rows) == 3
    coarse = rows[1].split(",")
    assert float(coarse[0]) == pytest.approx(0.1 / 4)
    assert float(coarse[2]) > 0.5  # first-order scheme


def test_verify_estimates_counting(tmp_path):
    out = tmp_path / "count.json"
    rc = run_command(["verify-estimates", "--which", "counting", "--d", "1",
                      "--k", "1", "--N", "2", "--out", str(out)])
    assert rc == 0
    payload = read_json(out)
    assert payload["which"] == "counting"
    assert payload["identity_holds"] is True
    assert payload["violations"] == 0


def test_verify_estimates_eq21_smoke(tmp_path):
    out = tmp_path / "eq21.json"
    rc = run_command(["verify-estimates", "--which", "eq21", "--d", "2",
                      "--k", "1", "--N", "2", "--rho", "1.0", "--s", "0.3",
                      "--trials", "2", "--out", str(out)])
    assert rc == 0
    payload = read_json(out)
    assert payload["estimate_id"] == "eq21"
    assert payload["ratio"] > 0


def test_verify_estimates_eq26_blocks(tmp_path):
    out = tmp_path / "eq26.json"
    rc = run_command(["verify-estimates", "--which", "eq26", "--d", "2",
                      "--k", "1", "--blocks", "2,1,1,1", "--mu", "0",
                      "--trials", "2", "--out", str(out)])
    assert rc == 0
    payload = read_json(out)
    assert payload["estimate_id"] == "eq26"
    assert payload["parameters"]["blocks"] == [2, 1, 1, 1]


def test_xnorm_smoke(tmp_path):
    pcsv = tmp_path / "lin.csv"
    assert run_command(["gen-path", "--kind", "linear", "--T", "0.5",
                        "--M", "32", "--out", str(pcsv)]) == 0
    out = tmp_path / "xn.json"
    rc = run_command(["xnorm", "--path", str(pcsv), "--d", "1", "--k", "1",
                      "--N", "2", "--gamma", "0.55", "--s", "1.0",
                      "--trials", "2", "--out", str(out)])
    assert rc == 0
    payload = read_json(out)
    assert payload["norm_estimate"] > 0
    assert payload["trials"] == 2


def test_usage_exit_codes(capsys):
    assert run_command([]) == 64
    assert "usage:" in capsys.readouterr().err
    assert run_command(["frobnicate"]) == 64
    assert "usage:" in capsys.readouterr().err
    assert run_command(["--help"]) == 0
    assert "usage:" in capsys.readouterr().out


def test_threads_flag(tmp_path, capsys):
    out = tmp_path / "lin.csv"
    rc = run_command(["gen-path", "--threads", "2", "--kind", "linear",
                      "--T", "1.0", "--M", "4", "--out", str(out)])
    assert rc == 0
    capsys.readouterr()
    rc = run_command(["gen-path", "--threads=bogus", "--kind", "linear",
                      "--T", "1.0", "--M", "4", "--out", str(out)])
    assert rc == 2
    assert "threads" in json.loads(capsys.readouterr().err)["message"]
