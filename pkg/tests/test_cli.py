import json
import math

import numpy as np
import pytest

from swarmcarry.cli import main
from swarmcarry.control import axis_gains, damping_ratios
from swarmcarry.experiments import equilateral_tuning
from swarmcarry.io import write_log
from swarmcarry.sim import TrajectoryLog


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_tune_matches_library(capsys):
    code, out, _ = run_cli(capsys, "tune")
    assert code == 0
    data = json.loads(out)
    g = equilateral_tuning()
    assert data["k_p"] == pytest.approx(g.k_p, rel=1e-12)
    assert data["k"] == pytest.approx(g.k, rel=1e-12)
    assert data["B"] == pytest.approx(g.B, rel=1e-12)
    zx, zy = damping_ratios(0.027, axis_gains(g.k, g.B, g.k_p, g.bearings))
    assert (data["zeta_x"], data["zeta_y"]) == pytest.approx((zx, zy))


def test_tune_single_axis_closed_form(capsys):
    code, out, _ = run_cli(capsys, "tune", "--no-payload", "--bearings", "0", "--k", "2.0", "--zeta", "1.0")
    assert code == 0
    data = json.loads(out)
    assert data["B"] == pytest.approx(2 * math.sqrt(0.027 * 2.0))
    assert data["zeta_y"] is None and data["warnings"]


def test_tune_taut_geometry_fails(capsys):
    code, _, err = run_cli(capsys, "tune", "--cable-length", "0.3")
    assert code == 2 and "TautCableError" in err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["fly"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["run", "--suite", "--config", "x.json"])
    assert e.value.code == 1
    code, _, _ = run_cli(capsys, "run", "--suite")
    assert code == 1


def test_scenario_then_run_with_repetitions(tmp_path, capsys):
    cfg = tmp_path / "sd.json"
    assert run_cli(capsys, "scenario", "--kind", "spring_damper", "--seed", "4", "--out", cfg)[0] == 0
    out = tmp_path / "runs"
    code, printed, _ = run_cli(capsys, "run", "--config", cfg, "--repetitions", "2", "--out", out)
    assert code == 0
    files = sorted(p.name for p in out.glob("*.csv"))
    assert files == ["spring_damper-4-seed4.csv", "spring_damper-4-seed5.csv"]
    meta = json.loads((out / "spring_damper-4-seed5.meta.json").read_text())
    assert meta["seed"] == 5


def test_manifest_run(tmp_path, capsys):
    run_cli(capsys, "scenario", "--kind", "lennard_jones", "--out", tmp_path / "lj.json")
    (tmp_path / "m.json").write_text(json.dumps({"scenario": "lj.json", "output": "out", "seeds": [11, 12], "repetitions": 1}))
    code, _, _ = run_cli(capsys, "run", "--manifest", tmp_path / "m.json")
    assert code == 0
    assert [p.name for p in (tmp_path / "out").glob("*.csv")] == ["lennard_jones-0-seed11.csv"]


def test_suite_compare_and_rerun(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(capsys, "run", "--suite", "--out", a, "--jobs", "2")[0] == 0
    assert len(list(a.glob("*.csv"))) == 11
    assert run_cli(capsys, "run", "--suite", "--out", b)[0] == 0
    code, out, _ = run_cli(capsys, "compare", "--suite-dir", a, "--out", a / "report")
    assert code == 0
    for group in ("no_payload", "spring_damper", "lennard_jones"):
        assert group in out
    assert out.count("mean / std") == 3
    run_cli(capsys, "compare", "--suite-dir", b, "--out", b / "report")
    assert (a / "report" / "report.csv").read_bytes() == (b / "report" / "report.csv").read_bytes()
    summary = json.loads((a / "report" / "summary.json").read_text())
    assert summary["spring_damper"]["runs"] == 5 and summary["no_payload"]["std"] == 0.0


def test_compare_with_explicit_groups(tmp_path, capsys):
    out = tmp_path / "s"
    run_cli(capsys, "run", "--suite", "--out", out)
    sd = sorted(out.glob("spring_damper-*.csv"))
    lj = sorted(out.glob("lennard_jones-*.csv"))
    code, text, _ = run_cli(capsys, "compare", "--group-a", *sd, "--group-b", *lj, "--baseline", out / "no_payload-0.csv")
    assert code == 0 and "no_payload-0" in text


def test_analyze_constant_log_warns(tmp_path, capsys):
    t = np.arange(0, 10.01, 0.01)
    pos = np.ones((t.size, 3, 2))
    log = TrajectoryLog(t=t, ids=np.arange(3), position=pos, velocity=0 * pos, command=0 * pos)
    path = write_log(log, tmp_path / "still.csv")
    code, out, err = run_cli(capsys, "analyze", path)
    assert code == 0
    assert "zero-variance" in err and "n/a" in out


def test_analyze_missing_log_fails(tmp_path, capsys):
    code, _, err = run_cli(capsys, "analyze", tmp_path / "nope.csv")
    assert code == 2 and "nope.csv" in err
