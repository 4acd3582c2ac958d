"""SVG figures for diagnostic series and snapshots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .solver import SERIES_COLUMNS, DiagnosticsSeries, RunResult  # noqa: E402

# reproducible SVG bytes
matplotlib.rcParams["svg.hashsalt"] = "quenchlab"


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_series(series: DiagnosticsSeries, column: str, path, loglog: bool = False) -> Path:
    t = series.t
    y = series.column(column)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if loglog:
        keep = (t > 0) & (y > 0)
        ax.loglog(t[keep], y[keep], marker=".")
    else:
        ax.plot(t, y, marker=".")
    ax.set_xlabel("t")
    ax.set_ylabel(column)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, Path(path))


def plot_all_series(series: DiagnosticsSeries, out_dir, loglog_columns=("grad_gamma_sup",)) -> list[Path]:
    out_dir = Path(out_dir)
    return [plot_series(series, c, out_dir / f"{c}.svg", c in loglog_columns)
            for c in SERIES_COLUMNS if c != "t"]


def plot_snapshots(result: RunResult, path, max_curves: int = 8) -> Path:
    snaps = result.snapshots
    pick = np.unique(np.linspace(0, len(snaps) - 1, min(max_curves, len(snaps))).astype(int))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for i in pick:
        s = snaps[i]
        ax.plot(s.grid.nodes, s.values, label=f"t={s.time:.3g}")
    ax.set_xlabel("r" if result.grid.is_ball else "x")
    ax.set_ylabel("u")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, Path(path))
