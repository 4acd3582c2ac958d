import numpy as np

from quenchlab.grid import Domain, Grid
from quenchlab.initial import bump
from quenchlab.params import ModelParams
from quenchlab.plotting import plot_all_series, plot_snapshots
from quenchlab.solver import SimConfig, run


def test_svgs_are_reproducible_and_small(tmp_path):
    g = Grid(Domain.interval(0.0, 1.0), 32)
    r = run(bump(g, 0.5, 0.5, 0.5), SimConfig(eps=0.05, t_end=0.02, n_records=8), ModelParams(1.0, 0.5, 1))
    a = plot_all_series(r.series, tmp_path / "a")
    b = plot_all_series(r.series, tmp_path / "b")
    for pa, pb in zip(a, b):
        data = pa.read_bytes()
        assert data == pb.read_bytes()
        assert data.startswith(b"<?xml") and len(data) < 2_000_000
    snap = plot_snapshots(r, tmp_path / "snap.svg")
    assert snap.stat().st_size > 0
