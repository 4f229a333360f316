import dataclasses
import math

import numpy as np
import pytest

from anisofem import harness
from anisofem.errors import MalformedCsv
from anisofem.harness import (COLUMNS, RunRecord, emit_plot_data, loglog_slope, read_plot_data,
                              read_records, run_case, run_convergence_study, write_records)


def rec(mode="anisotropic", N=1000, err=1.0, ku=100.0, ks=50.0, error=""):
    return RunRecord(mode, N, N // 2, err, 0.9 * err, 3.0, ku, ks, 1.25, 42, error)


def test_csv_header_and_round_trip(tmp_path):
    rs = [rec(N=1000, err=0.1 + 1e-13), rec(mode="uniform", N=2000, err=1 / 3)]
    p = tmp_path / "s.csv"
    write_records(rs, p)
    assert p.read_text().splitlines()[0] == ",".join(COLUMNS)
    back = read_records(p)
    assert back == rs


def test_error_column_only_when_needed(tmp_path):
    p = tmp_path / "s.csv"
    rs = [rec(), rec(N=0, err=math.nan, error="SolverDivergence: no")]
    write_records(rs, p)
    assert p.read_text().splitlines()[0].endswith(",error")
    back = read_records(p)
    assert back[1].error == "SolverDivergence: no" and math.isnan(back[1].energy_error)


@pytest.mark.parametrize("text", [
    "",
    "mode,N\nuniform,3\n",
    ",".join(COLUMNS) + "\nuniform,10\n",
    ",".join(COLUMNS) + "\nuniform,ten,5,1,1,1,1,1,1,42\n",
    ",".join(COLUMNS) + "\nhybrid,10,5,1,1,1,1,1,1,42\n",
])
def test_malformed_csv(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(MalformedCsv):
        read_records(p)


def test_plot_data_empty(tmp_path):
    paths = emit_plot_data([], tmp_path)
    for p in paths.values():
        lines = p.read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("#")


def test_plot_data_reference_lines(tmp_path):
    rs = [rec(N=n, err=e, ku=k) for n, e, k in [(4000, 0.5, 900.0), (1000, 1.0, 200.0),
                                                 (16000, 0.26, 4000.0)]]
    csv = tmp_path / "s.csv"
    write_records(rs, csv)
    emit_plot_data(csv, tmp_path)
    conv = read_plot_data(tmp_path / "convergence.dat")["anisotropic"]
    assert conv.shape == (3, 3)
    assert np.array_equal(conv[:, 0], [1000, 4000, 16000])
    assert np.allclose(conv[:, 2], [1.0, 0.5, 0.25], rtol=1e-15)
    cond = read_plot_data(tmp_path / "conditioning.dat")["anisotropic"]
    assert cond.shape == (3, 5)
    assert np.allclose(cond[:, 3], [200.0, 800.0, 3200.0], rtol=1e-15)
    nlogn = 200.0 * cond[:, 0] * np.log(cond[:, 0]) / (1000 * np.log(1000))
    assert np.allclose(cond[:, 4], nlogn, rtol=1e-15)
    # values survive to 12 significant digits
    assert np.allclose(conv[:, 1], [1.0, 0.5, 0.26], rtol=1e-12, atol=0)


def test_plot_data_blocks_per_mode(tmp_path):
    rs = [rec(mode="uniform"), rec(mode="isotropic"), rec(mode="isotropic", N=4000),
          rec(mode="anisotropic", N=0, error="x")]
    emit_plot_data(rs, tmp_path)
    text = (tmp_path / "convergence.dat").read_text()
    assert "\n\n\n# mode isotropic" in text
    data = read_plot_data(tmp_path / "convergence.dat")
    assert set(data) == {"uniform", "isotropic"}
    assert len(data["isotropic"]) == 2


def test_plot_data_skips_nan_kappa(tmp_path):
    emit_plot_data([rec(ku=math.nan, ks=math.nan)], tmp_path)
    assert read_plot_data(tmp_path / "conditioning.dat") == {}


def test_loglog_slope():
    n = np.array([1e3, 4e3, 1.6e4])
    assert loglog_slope(n, 3 * n**-0.5) == pytest.approx(-0.5, abs=1e-12)


@pytest.mark.parametrize("targets", [[100, 500], [2000, 1000]])
def test_target_validation(targets):
    with pytest.raises(ValueError):
        run_convergence_study(["uniform"], targets)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        run_convergence_study(["hybrid"], [500])


def test_failed_case_becomes_row(monkeypatch, tmp_path):
    def boom(*a, **k):
        raise RuntimeError("broken")
    monkeypatch.setattr(harness, "run_case", boom)
    rs = run_convergence_study(["uniform", "isotropic"], [300], out=tmp_path / "s.csv")
    assert [r.mode for r in rs] == ["uniform", "isotropic"]
    assert all(r.error == "RuntimeError: broken" for r in rs)
    assert read_records(tmp_path / "s.csv")[0].error == "RuntimeError: broken"


def _mask(r):
    return dataclasses.replace(r, wall_time=0.0)


@pytest.mark.parametrize("mode", ["uniform", "anisotropic"])
def test_runs_are_deterministic(mode):
    a = run_case(mode, 300, seed=5, conditioning=True)
    b = run_case(mode, 300, seed=5, conditioning=True)
    assert _mask(a).row() == _mask(b).row()
    assert a.kappa_unscaled > 1.0 and a.kappa_scaled > 1.0
    assert a.N > 0 and np.isfinite(a.energy_error) and a.hb_estimate > 0


def test_convergence_study_leaves_kappa_unset():
    (r,) = run_convergence_study(["uniform"], [300])
    assert math.isnan(r.kappa_unscaled) and math.isnan(r.kappa_scaled)
