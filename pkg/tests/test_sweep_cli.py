"""Sweep determinism, provenance round-trips, and the CLI surface."""

import json
from dataclasses import replace

import numpy as np
import pytest

import sta_link.sweep as sweep_mod
from sta_link.cli import main
from sta_link.dynamics import DissipationRates, IntegratorConfig
from sta_link.protocol import ProtocolConfig, TlConvention
from sta_link.sweep import (
    SweepGrid,
    default_grid,
    grid_from_provenance,
    linear_grid,
    run_sweep,
)

FAST = IntegratorConfig(method="DOP853", rtol=1e-9, atol=1e-11, max_step=np.inf)


def small_grid() -> SweepGrid:
    base = ProtocolConfig.paper_dissipative(
        t_l_convention=TlConvention.TEXT_30_OVER_V, integrator=FAST
    )
    return SweepGrid((2.0, 2.62), (0.4, 0.5), base)


# ---------------------------------------------------------------------------
# sweep machinery
# ---------------------------------------------------------------------------

def test_linear_grid():
    assert linear_grid(0.5, 4.0, 15)[0] == 0.5
    assert linear_grid(0.5, 4.0, 15)[-1] == 4.0
    assert len(linear_grid(0.5, 4.0, 15)) == 15
    assert linear_grid(1.0, 2.0, 1) == (1.0,)
    with pytest.raises(ValueError):
        linear_grid(1.0, 2.0, 0)
    with pytest.raises(ValueError):
        linear_grid(2.0, 1.0, 3)


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid((), (0.5,))
    with pytest.raises(ValueError):
        SweepGrid((1.0, 1.0), (0.5,))
    with pytest.raises(ValueError):
        SweepGrid((-1.0, 1.0), (0.5,))
    grid = default_grid()
    assert len(grid) == 150
    assert grid.base.t_l_convention is TlConvention.FIG3_FORMULA


def test_single_point_sweep():
    grid = SweepGrid((2.62,), (0.5,), small_grid().base)
    result = run_sweep(grid)
    assert len(result.points) == 1
    point = result.points[0]
    assert point.error is None
    assert point.infidelity == pytest.approx(0.0179, abs=1e-2)
    assert point.t_total == pytest.approx(20.3172, abs=5e-4)
    assert result.to_csv_text().splitlines()[0] == "v,g3,infidelity,t_total"
    assert len(result.to_csv_text().splitlines()) == 2


def test_lossless_anchor_point():
    base = replace(small_grid().base, rates=DissipationRates.lossless())
    result = run_sweep(SweepGrid((2.62,), (0.5,), base))
    assert result.points[0].infidelity <= 1e-4


def test_row_major_order():
    result = run_sweep(small_grid())
    keys = [(p.v, p.g3) for p in result.points]
    assert keys == [(2.0, 0.4), (2.0, 0.5), (2.62, 0.4), (2.62, 0.5)]


def test_failed_point_sentinel(monkeypatch):
    calls = {"n": 0}
    real_run = sweep_mod.run

    def flaky(cfg, **kwargs):
        calls["n"] += 1
        if calls["n"] == 2:
            raise RuntimeError("synthetic failure")
        return real_run(cfg, **kwargs)

    monkeypatch.setattr(sweep_mod, "run", flaky)
    result = run_sweep(small_grid(), jobs=1)
    assert sum(1 for p in result.points if p.error) == 1
    bad = result.points[1]
    assert bad.infidelity == -1.0 and bad.t_total == -1.0
    assert "synthetic failure" in bad.error
    assert result.provenance["errors"]["1"] == bad.error
    # the sweep still completed every other point
    assert all(p.error is None for i, p in enumerate(result.points) if i != 1)


def test_jobs_do_not_change_bytes():
    grid = small_grid()
    serial = run_sweep(grid, jobs=1)
    parallel = run_sweep(grid, jobs=3)
    assert serial.to_csv_text() == parallel.to_csv_text()
    assert serial.provenance_json() == parallel.provenance_json()


def test_provenance_round_trip():
    grid = small_grid()
    result = run_sweep(grid)
    rebuilt = grid_from_provenance(json.loads(result.provenance_json()))
    assert rebuilt.v_values == grid.v_values
    assert rebuilt.g3_values == grid.g3_values
    assert rebuilt.base == grid.base
    again = run_sweep(replace(rebuilt, v_values=(2.62,), g3_values=(0.5,)))
    original = [p for p in result.points if (p.v, p.g3) == (2.62, 0.5)][0]
    assert again.points[0].infidelity == original.infidelity


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_simulate_summary(capsys):
    rc = main(["simulate", "--mode", "double-sta", "--lossless", "--method", "DOP853"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[0].startswith("mode,v_l,v_r")
    fields = out[1].split(",")
    assert fields[0] == "double-sta"
    assert float(fields[8]) == pytest.approx(20.32, abs=0.01)
    assert float(fields[10]) == pytest.approx(0.99999, abs=1e-4)


def test_cli_simulate_writes_outputs(tmp_path, capsys):
    rc = main(
        ["simulate", "--mode", "double-sta", "--lossless", "--method", "DOP853",
         "--out", str(tmp_path), "--output-dt", "0.05"]
    )
    capsys.readouterr()
    assert rc == 0
    traj = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,P_Al,P_Bl,P_Cl,P_W,P_Cr,P_Br,P_Ar,norm"
    assert (tmp_path / "couplings.csv").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["F_e"] == pytest.approx(0.99999, abs=1e-4)
    line = (tmp_path / "summary.csv").read_text().splitlines()[1]
    assert line.split(",")[0] == "double-sta"


def test_cli_sta_stirap_defaults(capsys):
    rc = main(["simulate", "--mode", "sta-stirap", "--lossless", "--method", "DOP853"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    fields = out[1].split(",")
    assert fields[0] == "sta-stirap"
    assert float(fields[2]) == 1.0  # v_r defaults to g0 for the baseline
    assert float(fields[8]) == pytest.approx(29.59, abs=0.01)
    assert float(fields[10]) == pytest.approx(0.8606, abs=5e-3)


def test_cli_round_trip(capsys):
    rc = main(["simulate", "--mode", "round-trip", "--lossless", "--method", "DOP853"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[1].split(",")[0] == "double-sta"
    assert out[2].split(",")[0] == "reverse"
    assert out[3].startswith("composite_fidelity,")
    assert float(out[3].split(",")[1]) > 0.9999


def test_cli_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nmode = sta-stirap\nv_l = 2.0\n")
    rc = main(["simulate", "--config", str(cfg), "--v-l", "2.62", "--lossless",
               "--method", "DOP853"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    fields = out[1].split(",")
    assert fields[0] == "sta-stirap"  # from file
    assert float(fields[1]) == 2.62  # flag beats file


def test_cli_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    rc = main(["simulate", "--config", str(cfg)])
    assert rc == 2
    assert "nonsense" in capsys.readouterr().err


def test_cli_sweep_single_row(tmp_path, capsys):
    rc = main(
        ["sweep", "--v-min", "2.62", "--v-max", "2.62", "--v-steps", "1",
         "--g3-min", "0.5", "--g3-max", "0.5", "--g3-steps", "1",
         "--tl-convention", "text30", "--out", str(tmp_path)]
    )
    capsys.readouterr()
    assert rc == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "v,g3,infidelity,t_total"
    assert len(lines) == 2
    v, g3, infid, t_total = (float(x) for x in lines[1].split(","))
    assert (v, g3) == (2.62, 0.5)
    assert infid == pytest.approx(0.0261, abs=1e-2)
    prov = json.loads((tmp_path / "provenance.json").read_text())
    assert prov["tool"] == "sta-link"
    assert prov["errors"] == {}


def test_cli_sweep_env_jobs(tmp_path, monkeypatch, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    args = ["sweep", "--v-min", "2.0", "--v-max", "2.62", "--v-steps", "2",
            "--g3-min", "0.5", "--g3-max", "0.5", "--g3-steps", "1",
            "--tl-convention", "text30", "--rtol", "1e-8"]
    monkeypatch.setenv("STA_LINK_JOBS", "2")
    assert main(args + ["--out", str(out1)]) == 0
    monkeypatch.delenv("STA_LINK_JOBS")
    assert main(args + ["--out", str(out2), "--jobs", "1"]) == 0
    capsys.readouterr()
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()


def test_cli_pulses_csv(capsys):
    rc = main(["pulses", "--node", "b", "--samples", "5"])
    out = capsys.readouterr().out.splitlines()
    assert rc == 0
    assert out[0] == "t,G1c,G2c,mu,theta"
    assert len(out) == 6
    row = [float(x) for x in out[3].split(",")]  # center sample
    assert row[0] == 0.0
    assert row[4] == pytest.approx(np.pi / 4, rel=1e-10)


def test_cli_pulses_vitanov_kind(tmp_path):
    path = tmp_path / "p.csv"
    rc = main(["pulses", "--kind", "vitanov", "--v", "1.0", "--samples", "3",
               "--out", str(path)])
    assert rc == 0
    rows = path.read_text().splitlines()
    center = [float(x) for x in rows[2].split(",")]
    assert center[3] == 0.0  # no dressing for the bare pulses


def test_cli_validate(capsys):
    rc = main(["validate", "--check", "decoupling"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "decoupling-satd: PASS" in out
    assert "decoupling-satd+kappa: PASS" in out


def test_cli_exit_codes():
    assert main(["simulate", "--no-such-flag"]) == 2
    assert main(["nonsense"]) == 2
    assert main([]) == 2
