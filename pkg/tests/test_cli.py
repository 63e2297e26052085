"""Tests for the command-line experiment runner."""

import json

import numpy as np
import pytest

from spqm import cli, verify


def _read_output(path):
    lines = path.read_text().splitlines()
    meta = json.loads(lines[0])
    return meta, lines[1:]


def test_missing_dt_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["simulate", "--kappa", "1", "--t-final", "0.1"])
    assert info.value.code == 2
    assert "--dt" in capsys.readouterr().err


def test_bad_step_count_is_usage_error():
    with pytest.raises(SystemExit):
        cli.main(["simulate", "--t-final", "0.0105", "--dt", "1e-2"])


def test_simulate_output(tmp_path):
    out = tmp_path / "traj.csv"
    code = cli.main(["simulate", "--t-final", "0.1", "--dt", "1e-3",
                     "--seed", "5", "--out", str(out)])
    assert code == 0
    meta, rows = _read_output(out)
    assert meta["subcommand"] == "simulate"
    assert meta["seed"] == 5
    assert meta["closed_form_deviation"] <= 1e-10
    header = rows[0].split(",")
    assert header[:4] == ["k", "t", "re_dw", "im_dw"]
    assert len(rows) == 1 + 100  # header + one row per step


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--t-final", "0.05", "--dt", "1e-3", "--seed", "3"]
    cli.main(args + ["--out", str(a)])
    cli.main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_moments_closed_form_row(tmp_path):
    out = tmp_path / "moments.csv"
    code = cli.main(["moments", "--kappa", "1", "--t-final", "5",
                     "--out", str(out)])
    assert code == 0
    _, rows = _read_output(out)
    last = rows[-1].split(",")
    assert abs(float(last[0]) - 5.0) <= 1e-12
    assert abs(float(last[1]) - 5 / 6) <= 1e-6  # n(5) = kT/(1+kT)


def test_moments_json_rows(tmp_path):
    out = tmp_path / "moments.jsonl"
    cli.main(["moments", "--t-final", "1", "--format", "json",
              "--out", str(out)])
    _, rows = _read_output(out)
    row = json.loads(rows[-1])
    assert abs(row["kT"] - 1.0) <= 1e-12
    assert abs(row["n"] - 0.5) <= 1e-6


def test_distributions_with_mc(tmp_path):
    out = tmp_path / "dists.csv"
    code = cli.main(["distributions", "--t-final", "0.5", "--dt", "1e-2",
                     "--paths", "5000", "--seed", "11", "--out", str(out)])
    assert code == 0
    meta, rows = _read_output(out)
    assert "fk_normalization" in meta and "fk_ess" in meta
    assert len(rows) == 1 + 50
    sigma_col = [float(r.split(",")[1]) for r in rows[1:]]
    assert np.all(np.diff(sigma_col) > 0)  # Sigma grows


def test_povm_report(tmp_path):
    out = tmp_path / "povm.csv"
    code = cli.main(["povm", "--t-final", "1", "--dim", "12",
                     "--out", str(out)])
    assert code == 0
    _, rows = _read_output(out)
    header = rows[0].split(",")
    values = dict(zip(header, rows[1].split(",")))
    assert float(values["partition_residual"]) <= 1e-6
    assert float(values["completeness_deviation"]) <= 1e-3


def test_verify_exit_codes(monkeypatch, capsys, tmp_path):
    calls = []

    def fake_run_all():
        calls.append(1)
        return [verify.CheckResult(1, "stub pass", True, "ok", 0.0),
                verify.CheckResult(2, "stub fail", False, "bad", 0.0)]

    monkeypatch.setattr(verify, "run_all", fake_run_all)
    out = tmp_path / "verify.csv"
    assert cli.main(["verify", "--out", str(out)]) == 1
    report = capsys.readouterr().out
    assert "[PASS]  1 stub pass" in report
    assert "[FAIL]  2 stub fail" in report

    monkeypatch.setattr(verify, "run_all", lambda: [
        verify.CheckResult(1, "stub pass", True, "ok", 0.0)])
    assert cli.main(["verify"]) == 0
