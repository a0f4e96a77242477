import csv
import math

import numpy as np
import pytest

from phasekit import bench
from phasekit.bench import CSV_FIELDS, ExperimentSpec, kparams, run_experiment
from phasekit.equations import get_equation, registry
from phasekit.errors import InvalidArgumentError


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_registry_coefficients():
    assert set(registry()) == {"exp1", "exp2", "exp3", "exp5", "exp6"}
    k = 2.0**8
    q = get_equation("exp1").coeffs(k)(np.array([0.0]))[:, 0]
    assert q[1] == pytest.approx(-1j * k)
    assert q[0] == pytest.approx(2.0**24 * 2 / (1 + 2.0**8))
    q5 = get_equation("exp5").coeffs(k)(np.linspace(-1, 1, 7))
    assert np.all(q5[1:] == 0)
    assert get_equation("exp2").coeffs(k)(np.array([0.0]))[2, 0] == pytest.approx(-3)
    with pytest.raises(InvalidArgumentError):
        get_equation("exp4")


def test_kparams():
    assert kparams("exp1", 8, 10) == [256.0, 512.0, 1024.0]
    assert kparams("exp5", 17, 20) == [2.0**17, 2.0**18]
    assert kparams("exp1", 9, 8) == []


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("exp1", [300.0])
    with pytest.raises(ValueError):
        ExperimentSpec("exp5", [2.0**19])
    with pytest.raises(ValueError):
        ExperimentSpec("exp1", [256.0], method="fast")
    with pytest.raises(InvalidArgumentError):
        ExperimentSpec("nope", [256.0])


def test_exp1_rows(tmp_path):
    out = tmp_path / "r.csv"
    rows = run_experiment(ExperimentSpec("exp1", [256.0], out=str(out)))
    assert [r.method for r in rows] == ["global", "local"]
    for r in rows:
        assert r.status == "ok" and r.time_s > 0 and r.max_err <= 1e-7
        assert r.coeff_count > 0 and r.panel_count > 0 and r.cond_number >= 1
    with open(out) as fh:
        assert fh.readline().strip() == ",".join(CSV_FIELDS)
    assert CSV_FIELDS == ["equation", "method", "kparam", "time_s", "max_err", "max_residual",
                          "coeff_count", "panel_count", "cond_number", "status"]


def test_exp5_residual_only(tmp_path):
    rows = run_experiment(ExperimentSpec("exp5", [256.0], method="global"))
    assert math.isnan(rows[0].max_err) and rows[0].max_residual <= 1e-9


def test_empty_sweep_header_only(tmp_path):
    out = tmp_path / "e.csv"
    assert run_experiment(ExperimentSpec("exp1", [], out=str(out))) == []
    assert out.read_text().strip() == ",".join(CSV_FIELDS)


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run_experiment(ExperimentSpec("exp2", [256.0], method="global", out=str(p)))
    strip = lambda rows: [{k: v for k, v in r.items() if k != "time_s"} for r in rows]
    assert strip(read(a)) == strip(read(b))


def test_exp6_contrast_at_largest_k():
    rows = run_experiment(ExperimentSpec("exp6", [2.0**20], reference=False))
    status = {r.method: r.status for r in rows}
    assert status == {"global": "discontinuous", "local": "ok"}


def test_failures_recorded_not_raised():
    rows = run_experiment(ExperimentSpec("exp5", [256.0], method="local"))
    assert rows[0].status == "propagation_failed" and rows[0].time_s >= 0


def test_cli(tmp_path, capsys):
    out = tmp_path / "cli.csv"
    assert bench.main(["--experiment", "exp1", "--method", "global", "--kmin", "8", "--kmax", "9",
                       "--out", str(out), "--serial"]) == 0
    rows = read(out)
    assert [float(r["kparam"]) for r in rows] == [256.0, 512.0]
    assert all(r["status"] == "ok" for r in rows)
    assert bench.main(["--experiment", "exp9", "--out", str(out)]) == 2
    assert bench.main(["--experiment", "exp1", "--kmin", "8", "--kmax", "8",
                       "--out", str(tmp_path / "missing" / "x.csv")]) == 2
