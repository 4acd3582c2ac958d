"""Initial data families."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameters
from .grid import Field, Grid, read_field_csv


def bump_values(x, center: float = 0.5, width: float = 0.5, height: float = 1.0) -> np.ndarray:
    """Smooth bump ``height * exp(1 - 1/(1 - s^2))`` supported on ``|x - center| < width/2``."""
    if not width > 0:
        raise InvalidParameters("bump width must be > 0")
    s = 2.0 * (np.asarray(x, dtype=float) - center) / width
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def constant(grid: Grid, c: float) -> Field:
    if c < 0:
        raise InvalidParameters("constant initial data must be >= 0")
    return Field(grid, np.full(grid.n_nodes, float(c)))


def bump(grid: Grid, center: float = 0.5, width: float = 0.5, height: float = 1.0) -> Field:
    return Field(grid, bump_values(grid.nodes, center, width, height))


def power_profile(grid: Grid, coeff: float, exponent: float, x0: float = 0.0) -> Field:
    """``coeff * |x - x0|^exponent``."""
    return Field(grid, coeff * np.abs(grid.nodes - x0) ** exponent)


def from_csv(grid: Grid, path) -> Field:
    """Load nodal values, interpolating when the file was written on another grid."""
    _, x, u = read_field_csv(path)
    if x.size == grid.n_nodes and np.allclose(x, grid.nodes, rtol=0, atol=1e-12):
        vals = u
    else:
        vals = np.interp(grid.nodes, x, u, left=0.0, right=0.0)
    return Field(grid, np.maximum(vals, 0.0))
