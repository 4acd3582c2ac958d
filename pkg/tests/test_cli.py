from pathlib import Path

import pytest

from quenchlab.cli import main

ROOT = Path(__file__).resolve().parents[1]

SMALL = """
model.m = 1.2
model.beta = 0.5
model.n_dim = 1
sim.eps = 1e-12
sim.boundary_mode = zero
sim.t_end = 0.1
sim.n_records = 10
domain.kind = interval
domain.n_cells = 64
initial.kind = bump
initial.height = 0.5
outputs.svg = false
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return p


def test_verify_bernstein(tmp_path, capsys):
    assert main(["verify-bernstein", "--trials", "10000", "--seed", "42", "--out", str(tmp_path)]) == 0
    assert "min_slack=" in capsys.readouterr().out
    assert (tmp_path / "checks.csv").exists()


def test_run_steady_profile_with_unit_boundary(tmp_path):
    assert main(["run", "--config", str(ROOT / "configs" / "steady_ball.cfg"), "--out", str(tmp_path)]) == 0
    text = (tmp_path / "checks.csv").read_text()
    assert "stationary_drift,pass" in text
    assert (tmp_path / "svg" / "sup_u.svg").exists()


def test_report_on_empty_directory(tmp_path):
    assert main(["report", str(tmp_path)]) != 0


def test_usage_and_config_errors(tmp_path, small_cfg):
    assert main(["frobnicate"]) == 2
    assert main(["run"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text(SMALL + "unknown.key = 3\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_run_is_bit_reproducible(tmp_path, small_cfg):
    for d in ("a", "b"):
        assert main(["run", "--config", str(small_cfg), "--out", str(tmp_path / d)]) == 0
    for name in ("series.csv", "free_boundary.csv", "snapshots/u_0005.csv", "checks.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_quench_and_report(tmp_path, small_cfg):
    assert main(["quench", "--config", str(small_cfg), "--out", str(tmp_path / "q")]) == 0
    assert main(["verify-barriers", "--config", str(small_cfg), "--out", str(tmp_path / "b")]) == 0
    assert main(["report", str(tmp_path), "--out", str(tmp_path / "rep")]) == 0
    rows = (tmp_path / "rep" / "report.csv").read_text().splitlines()
    names = [r.split(",")[0] for r in rows[1:]]
    assert len(names) == len(set(names))
    assert "quench_barrier" in names and "supersolution_step" in names
    svg = tmp_path / "rep" / "report_svg" / "q" / "sup_u.svg"
    data = svg.read_bytes()
    assert len(data) < 2_000_000 and b"xlink:href=\"http" not in data


def test_sweep_writes_per_rung_directories(tmp_path):
    cfg = tmp_path / "ladder.cfg"
    cfg.write_text(SMALL.replace("sim.eps = 1e-12\nsim.boundary_mode = zero\n", "")
                   + "sweep.eps = 0.2, 0.1\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "s"), "--jobs", "2"]) == 0
    assert (tmp_path / "s" / "rung_00" / "series.csv").exists()
    assert (tmp_path / "s" / "rung_01" / "series.csv").exists()
    assert (tmp_path / "s" / "gaps.csv").exists()
