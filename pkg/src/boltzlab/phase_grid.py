"""Discrete phase space, distribution storage and mixed Lebesgue norms.

Positions live on a periodic torus [0, L)^N, velocities on a truncated
box [-v_max, v_max]^N; both are discretized by cell centers.  Velocity
values outside the box are treated as zero throughout the package.
Quadrature is midpoint in (x, v) and trapezoid in time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

import numpy as np

Reciprocal = Union[Fraction, float, int]

_SNAPSHOT_MAGIC = "boltzlab-snapshot-v1"


@dataclass(frozen=True)
class PhaseGrid:
    """Cell-centered tensor grid over the periodic x-torus times the v-box."""

    dim: int
    x_period: float
    n_x: int
    v_max: float
    n_v: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        for name in ("n_x", "n_v"):
            n = getattr(self, name)
            if n < 4 or n % 2:
                raise ValueError(f"{name} must be even and >= 4, got {n}")
        if self.x_period <= 0 or self.v_max <= 0:
            raise ValueError("x_period and v_max must be positive")

    @property
    def dx(self) -> float:
        return self.x_period / self.n_x

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n_v

    @property
    def x_nodes(self) -> np.ndarray:
        return (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def v_nodes(self) -> np.ndarray:
        return -self.v_max + (np.arange(self.n_v) + 0.5) * self.dv

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_x,) * self.dim + (self.n_v,) * self.dim

    @property
    def n_x_total(self) -> int:
        return self.n_x ** self.dim

    @property
    def n_v_total(self) -> int:
        return self.n_v ** self.dim

    @property
    def x_cell_volume(self) -> float:
        return self.dx ** self.dim

    @property
    def v_cell_volume(self) -> float:
        return self.dv ** self.dim

    def v_node_coords(self) -> np.ndarray:
        """All velocity nodes as an (n_v^N, N) array in C order."""
        axes = np.meshgrid(*([self.v_nodes] * self.dim), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=1)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "x_period": self.x_period,
            "n_x": self.n_x,
            "v_max": self.v_max,
            "n_v": self.n_v,
        }


@dataclass
class DistributionFunction:
    """Distribution values over one PhaseGrid; immutable by convention."""

    grid: PhaseGrid
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("distribution values must be finite")

    def copy(self) -> "DistributionFunction":
        return DistributionFunction(self.grid, self.values.copy(), self.nonnegative)

    def xv_view(self) -> np.ndarray:
        """(n_x^N, n_v^N) view with x flattened first, v second."""
        return self.values.reshape(self.grid.n_x_total, self.grid.n_v_total)

    def __add__(self, other: "DistributionFunction") -> "DistributionFunction":
        _require_same_grid(self, other)
        return DistributionFunction(self.grid, self.values + other.values,
                                    self.nonnegative and other.nonnegative)

    def __sub__(self, other: "DistributionFunction") -> "DistributionFunction":
        _require_same_grid(self, other)
        return DistributionFunction(self.grid, self.values - other.values, False)

    def __mul__(self, scalar: float) -> "DistributionFunction":
        return DistributionFunction(self.grid, self.values * float(scalar),
                                    self.nonnegative and scalar >= 0)

    __rmul__ = __mul__


def _require_same_grid(f: DistributionFunction, g: DistributionFunction) -> None:
    if f.grid != g.grid:
        raise ValueError("distribution functions live on different grids")


@dataclass
class NormTrace:
    """A nonnegative scalar recorded along a strictly increasing time lattice."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if self.times.size == 0:
            raise ValueError("trace must be nonempty")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("trace values must be finite and nonnegative")


def _as_float_reciprocal(inv: Reciprocal, name: str) -> float:
    x = float(inv)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name}={x} outside [0, 1]")
    return x


def mixed_norm_xv(f: DistributionFunction, inv_r: Reciprocal, inv_p: Reciprocal) -> float:
    """Midpoint-rule norm with exponent r over x of the exponent-p v-norm.

    A reciprocal of 0 selects the essential supremum in that variable.
    """
    ir = _as_float_reciprocal(inv_r, "inv_r")
    ip = _as_float_reciprocal(inv_p, "inv_p")
    a = np.abs(f.xv_view())
    if ip == 0.0:
        inner = a.max(axis=1)
    else:
        p = 1.0 / ip
        inner = (np.sum(a ** p, axis=1) * f.grid.v_cell_volume) ** ip
    if ir == 0.0:
        return float(inner.max())
    r = 1.0 / ir
    return float((np.sum(inner ** r) * f.grid.x_cell_volume) ** ir)


def lebesgue_norm_a(f: DistributionFunction, inv_a: Reciprocal) -> float:
    """Joint (x, v) norm with a single exponent a: the r = p = a case."""
    return mixed_norm_xv(f, inv_a, inv_a)


def time_norm(trace: NormTrace, inv_q: Reciprocal) -> float:
    """Trapezoidal accumulation of the trace in the exponent-q sense."""
    iq = _as_float_reciprocal(inv_q, "inv_q")
    if iq == 0.0:
        return float(trace.values.max())
    q = 1.0 / iq
    if trace.times.size == 1:
        return float(trace.values[0])  # degenerate single-sample trace
    return float(np.trapezoid(trace.values ** q, trace.times) ** iq)


def _periodic_delta(x: np.ndarray, x0: float, period: float) -> np.ndarray:
    d = np.mod(x - x0 + 0.5 * period, period) - 0.5 * period
    return d


def make_gaussian(
    grid: PhaseGrid,
    x0: Sequence[float],
    v0: Sequence[float],
    sigma_x: float,
    sigma_v: float,
    amplitude: float,
) -> DistributionFunction:
    """Separable Gaussian bump, periodically wrapped in x, plain in v."""
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (grid.dim,))
    v0 = np.broadcast_to(np.asarray(v0, dtype=float), (grid.dim,))
    if sigma_x < 2 * grid.dx or sigma_v < 2 * grid.dv:
        raise ValueError(
            f"unresolvable width: need sigma_x >= {2 * grid.dx:g} and sigma_v >= {2 * grid.dv:g}"
        )
    shape = grid.shape
    values = np.ones(shape)
    for d in range(grid.dim):
        dx = _periodic_delta(grid.x_nodes, x0[d], grid.x_period)
        prof = np.exp(-0.5 * (dx / sigma_x) ** 2)
        values *= prof.reshape((1,) * d + (-1,) + (1,) * (2 * grid.dim - d - 1))
    for d in range(grid.dim):
        dv = grid.v_nodes - v0[d]
        prof = np.exp(-0.5 * (dv / sigma_v) ** 2)
        ax = grid.dim + d
        values *= prof.reshape((1,) * ax + (-1,) + (1,) * (2 * grid.dim - ax - 1))
    return DistributionFunction(grid, amplitude * values, nonnegative=amplitude >= 0)


def make_maxwellian(
    grid: PhaseGrid,
    rho: float,
    u: Sequence[float],
    temperature: float,
) -> DistributionFunction:
    """Spatially uniform equilibrium rho (2 pi T)^{-N/2} exp(-|v-u|^2 / 2T)."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    sigma = np.sqrt(temperature)
    if sigma < 2 * grid.dv:
        raise ValueError(f"unresolvable width: need sqrt(T) >= {2 * grid.dv:g}")
    u = np.broadcast_to(np.asarray(u, dtype=float), (grid.dim,))
    values = np.full(grid.shape, rho * (2.0 * np.pi * temperature) ** (-grid.dim / 2.0))
    for d in range(grid.dim):
        dv = grid.v_nodes - u[d]
        prof = np.exp(-0.5 * dv ** 2 / temperature)
        ax = grid.dim + d
        values = values * prof.reshape((1,) * ax + (-1,) + (1,) * (2 * grid.dim - ax - 1))
    return DistributionFunction(grid, values, nonnegative=rho >= 0)


def save_snapshot(f: DistributionFunction, path: Union[str, Path]) -> None:
    """Write one distribution as a JSON header line plus flat float64 bytes."""
    path = Path(path)
    header = {
        "format": _SNAPSHOT_MAGIC,
        "grid": f.grid.to_dict(),
        "nonnegative": bool(f.nonnegative),
        "dtype": "<f8",
        "count": int(f.values.size),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_snapshot(path: Union[str, Path]) -> DistributionFunction:
    path = Path(path)
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}: not a snapshot file") from exc
        if header.get("format") != _SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: unknown snapshot format {header.get('format')!r}")
        grid = PhaseGrid(**header["grid"])
        raw = fh.read(8 * header["count"])
    values = np.frombuffer(raw, dtype="<f8", count=header["count"]).reshape(grid.shape)
    return DistributionFunction(grid, values.copy(), bool(header.get("nonnegative", False)))
