"""Uniform 1D and radially symmetric grids with conservative operators.

Nodes include both endpoints. On an interval ``(a, b)`` both end nodes carry
Dirichlet data; on a ball the node at ``r = 0`` is a symmetry node and only
``r = R`` is a boundary node. Each node owns a dual cell
``[x_i - h/2, x_i + h/2]`` (clipped to the domain) whose exact measure is
used both by the Laplacian and by every quadrature, so that discrete
summation by parts holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidParameters, SingularSystem


def sphere_area(n_dim: int) -> float:
    """Surface measure of the unit sphere in ``R^n`` (2 for n = 1)."""
    return 2.0 * math.pi ** (n_dim / 2.0) / math.gamma(n_dim / 2.0)


@dataclass(frozen=True)
class Domain:
    kind: str
    a: float = 0.0
    b: float = 1.0
    radius: float = 1.0
    n_dim: int = 1

    def __post_init__(self):
        if self.kind == "interval":
            if not self.b > self.a:
                raise InvalidParameters(f"interval needs b > a, got ({self.a}, {self.b})")
            if self.n_dim != 1:
                raise InvalidParameters("an interval is one-dimensional")
        elif self.kind == "ball":
            if not self.radius > 0:
                raise InvalidParameters(f"ball radius must be > 0, got {self.radius}")
            if self.n_dim < 1:
                raise InvalidParameters("n_dim must be >= 1")
        else:
            raise InvalidParameters(f"unknown domain kind {self.kind!r}")

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> "Domain":
        return cls("interval", a=a, b=b)

    @classmethod
    def ball(cls, radius: float = 1.0, n_dim: int = 2) -> "Domain":
        return cls("ball", radius=radius, n_dim=n_dim)

    @property
    def length(self) -> float:
        return self.b - self.a if self.kind == "interval" else self.radius

    @property
    def measure(self) -> float:
        if self.kind == "interval":
            return self.b - self.a
        return sphere_area(self.n_dim) * self.radius**self.n_dim / self.n_dim


class Grid:
    """Node-centred grid on a :class:`Domain` with ``n_cells`` uniform cells."""

    def __init__(self, domain: Domain, n_cells: int):
        if n_cells < 1:
            raise InvalidParameters("n_cells must be >= 1")
        self.domain = domain
        self.n_cells = int(n_cells)
        self.h = domain.length / n_cells
        n = self.n_cells + 1
        if domain.kind == "interval":
            self.nodes = domain.a + self.h * np.arange(n)
            # the endpoint is set exactly so it matches b bit for bit
            self.nodes[-1] = domain.b
            lo = np.maximum(self.nodes - 0.5 * self.h, domain.a)
            hi = np.minimum(self.nodes + 0.5 * self.h, domain.b)
            self.volumes = hi - lo
            self.face_areas = np.ones(self.n_cells)
            self.boundary = np.zeros(n, dtype=bool)
            self.boundary[[0, -1]] = True
        else:
            nd = domain.n_dim
            w = sphere_area(nd)
            self.nodes = self.h * np.arange(n)
            self.nodes[-1] = domain.radius
            lo = np.maximum(self.nodes - 0.5 * self.h, 0.0)
            hi = np.minimum(self.nodes + 0.5 * self.h, domain.radius)
            self.volumes = w / nd * (hi**nd - lo**nd)
            faces = 0.5 * (self.nodes[:-1] + self.nodes[1:])
            self.face_areas = w * faces ** (nd - 1)
            self.boundary = np.zeros(n, dtype=bool)
            self.boundary[-1] = True
        for arr in (self.nodes, self.volumes, self.face_areas, self.boundary):
            arr.setflags(write=False)
        self.interior = ~self.boundary
        self.interior.setflags(write=False)
        # coefficients of the conservative Laplacian: (Lv)_i = hi_i (v_{i+1}-v_i) - lo_i (v_i - v_{i-1})
        coef_hi = np.zeros(n)
        coef_lo = np.zeros(n)
        coef_hi[:-1] = self.face_areas / (self.h * self.volumes[:-1])
        coef_lo[1:] = self.face_areas / (self.h * self.volumes[1:])
        coef_hi[self.boundary] = 0.0
        coef_lo[self.boundary] = 0.0
        self.coef_hi = coef_hi
        self.coef_lo = coef_lo
        self.coef_hi.setflags(write=False)
        self.coef_lo.setflags(write=False)

    @property
    def n_dim(self) -> int:
        return self.domain.n_dim

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def is_ball(self) -> bool:
        return self.domain.kind == "ball"

    @property
    def coord_name(self) -> str:
        return "r" if self.is_ball else "x"

    def distance_to_boundary(self) -> np.ndarray:
        if self.is_ball:
            return self.domain.radius - self.nodes
        return np.minimum(self.nodes - self.domain.a, self.domain.b - self.nodes)

    def cell_volumes(self) -> np.ndarray:
        """Exact measure of each cell ``[x_i, x_{i+1}]``."""
        if not self.is_ball:
            return np.diff(self.nodes)
        nd = self.n_dim
        return sphere_area(nd) / nd * np.diff(self.nodes**nd)

    def same_as(self, other: "Grid") -> bool:
        return self.domain == other.domain and self.n_cells == other.n_cells

    def __repr__(self):
        return f"Grid({self.domain!r}, n_cells={self.n_cells})"


@dataclass(frozen=True)
class Field:
    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise InvalidParameters(
                f"field has {v.shape} values, grid has {self.grid.n_nodes} nodes"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidParameters("field values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, fn, time: float = 0.0) -> "Field":
        return cls(grid, np.maximum(np.asarray(fn(grid.nodes), dtype=float), 0.0), time)

    def at(self, time: float, values: np.ndarray) -> "Field":
        return replace(self, values=values, time=time)

    def to_csv(self, path) -> None:
        write_field_csv(self, path)


@dataclass(frozen=True)
class WeightField:
    grid: Grid
    zeta_values: np.ndarray = field(repr=False)

    def comparison_constants(self) -> tuple[float, float]:
        """Constants ``c_lo <= zeta/delta <= c_hi`` over interior nodes."""
        d = self.grid.distance_to_boundary()
        mask = d > 0
        ratio = self.zeta_values[mask] / d[mask]
        return float(ratio.min()), float(ratio.max())


def laplacian(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Conservative discrete Laplacian; zero on boundary nodes.

    At ``r = 0`` this reduces to ``2N (v_1 - v_0)/h^2``.
    """
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    dv = np.diff(v)
    out[:-1] += grid.coef_hi[:-1] * dv
    out[1:] -= grid.coef_lo[1:] * dv
    out[grid.boundary] = 0.0
    return out


def laplacian_of_power(fld: Field, exponent: float) -> Field:
    v = fld.values**exponent
    return fld.at(fld.time, laplacian(fld.grid, v))


def _tridiagonal(grid: Grid):
    """Banded form of ``-L`` restricted to interior nodes."""
    idx = np.flatnonzero(grid.interior)
    k = idx.size
    ab = np.zeros((3, k))
    ab[1] = grid.coef_hi[idx] + grid.coef_lo[idx]
    # super-diagonal: coupling of row i to column i+1
    ab[0, 1:] = -grid.coef_hi[idx[:-1]]
    ab[2, :-1] = -grid.coef_lo[idx[1:]]
    return idx, ab


def solve_zeta(grid: Grid) -> WeightField:
    """Discrete solution of ``-Lap zeta = 1``, ``zeta = 0`` on the boundary."""
    if grid.n_cells < 2:
        raise SingularSystem("need at least two cells to solve for zeta")
    idx, ab = _tridiagonal(grid)
    zeta = np.zeros(grid.n_nodes)
    zeta[idx] = solve_banded((1, 1), ab, np.ones(idx.size))
    zeta[grid.boundary] = 0.0
    zeta.setflags(write=False)
    return WeightField(grid, zeta)


@dataclass(frozen=True)
class Norms:
    sup: float
    l1: float
    lq: float
    l1_zeta: float
    q: float


def norms(fld: Field, weight: WeightField | None = None, q: float = 2.0) -> Norms:
    if q < 1:
        raise InvalidParameters(f"q must be >= 1, got {q}")
    u = np.abs(fld.values)
    vol = fld.grid.volumes
    l1_zeta = float(np.sum(u * weight.zeta_values * vol)) if weight is not None else math.nan
    return Norms(
        sup=float(u.max()),
        l1=float(np.sum(u * vol)),
        lq=float(np.sum(u**q * vol) ** (1.0 / q)),
        l1_zeta=l1_zeta,
        q=q,
    )


def gradient_power_sup(fld: Field, exponent: float) -> float:
    """``max_i |u_{i+1}^p - u_i^p| / h`` over adjacent nodes."""
    if exponent <= 0:
        raise InvalidParameters("exponent must be > 0")
    w = np.maximum(fld.values, 0.0) ** exponent
    if w.size < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(w))) / fld.grid.h)


def write_field_csv(fld: Field, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"{fld.grid.coord_name},u\n")
        for x, u in zip(fld.grid.nodes, fld.values):
            fh.write(f"{x:.17g},{u:.17g}\n")


def read_field_csv(path) -> tuple[str, np.ndarray, np.ndarray]:
    """Return ``(coord_name, coords, values)`` from a field CSV."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 2 or header[1] != "u" or header[0] not in ("x", "r"):
            raise ValueError(f"{path}: expected header 'x,u' or 'r,u', got {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header[0], data[:, 0], data[:, 1]
