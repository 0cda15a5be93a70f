"""Dense gridded coefficient tables and multilinear interpolation.

Tables are one to three dimensional and immutable after construction.
Lookups inside the grid hull are multilinear; outside, the edge cell's
linear model continues (clamped-gradient extrapolation) and the event is
flagged. The interpolation kernel is scalar Python on purpose: it sits
inside the 6-DOF derivative loop and a numpy round-trip per lookup would
dominate the simulation cost.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from math import isfinite
from typing import Iterable, Mapping, Sequence

import numpy as np

KNOWN_AXES = ("alpha", "beta", "mach", "p_hat", "q_hat", "r_hat")


def _valid_axis_name(name: str) -> bool:
    return name in KNOWN_AXES or name.startswith("delta_")


@dataclass(frozen=True)
class AeroTable:
    """One coefficient over a dense rectangular grid of 1 to 3 axes."""

    axis_names: tuple[str, ...]
    axis_grids: tuple[tuple[float, ...], ...]
    values: tuple[float, ...]
    strides: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        names = tuple(self.axis_names)
        grids = tuple(tuple(float(g) for g in grid) for grid in self.axis_grids)
        object.__setattr__(self, "axis_names", names)
        object.__setattr__(self, "axis_grids", grids)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not 1 <= len(names) <= 3:
            raise ValueError(f"table must have 1 to 3 axes, got {len(names)}")
        if len(grids) != len(names):
            raise ValueError("one grid required per axis")
        for name, grid in zip(names, grids):
            if not _valid_axis_name(name):
                raise ValueError(f"unknown axis name {name!r}")
            if len(grid) < 2:
                raise ValueError(f"axis {name!r} needs at least 2 grid points")
            if any(grid[i + 1] <= grid[i] for i in range(len(grid) - 1)):
                raise ValueError(f"axis {name!r} grid is not strictly increasing")
        expected = 1
        for grid in grids:
            expected *= len(grid)
        if len(self.values) != expected:
            raise ValueError(
                f"value count {len(self.values)} != product of grid sizes {expected}"
            )
        if not all(isfinite(v) for v in self.values):
            raise ValueError("table contains non-finite values")
        # Row-major strides for flat indexing.
        strides = [1] * len(grids)
        for i in range(len(grids) - 2, -1, -1):
            strides[i] = strides[i + 1] * len(grids[i + 1])
        object.__setattr__(self, "strides", tuple(strides))

    @classmethod
    def from_grid(
        cls,
        axis_names: Sequence[str],
        axis_grids: Sequence[Sequence[float]],
        values: np.ndarray | Sequence[float],
    ) -> "AeroTable":
        arr = np.asarray(values, dtype=float)
        return cls(tuple(axis_names), tuple(tuple(g) for g in axis_grids), tuple(arr.ravel()))

    @classmethod
    def constant(
        cls, axis_names: Sequence[str], axis_grids: Sequence[Sequence[float]], value: float
    ) -> "AeroTable":
        n = 1
        for g in axis_grids:
            n *= len(g)
        return cls(tuple(axis_names), tuple(tuple(g) for g in axis_grids), (value,) * n)

    def as_array(self) -> np.ndarray:
        shape = tuple(len(g) for g in self.axis_grids)
        return np.asarray(self.values, dtype=float).reshape(shape)

    def shape(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.axis_grids)


def _cell_and_t(grid: tuple[float, ...], x: float) -> tuple[int, float, bool]:
    """Edge cell index, interpolation parameter, and out-of-hull flag.

    t falls outside [0, 1] when x is outside the grid, which continues the
    edge cell's linear model.
    """
    lo, hi = grid[0], grid[-1]
    outside = x < lo or x > hi
    if x <= lo:
        i = 0
    elif x >= hi:
        i = len(grid) - 2
    else:
        i = bisect_right(grid, x) - 1
    t = (x - grid[i]) / (grid[i + 1] - grid[i])
    return i, t, outside


def interpolate_with_flag(table: AeroTable, point: Mapping[str, float]) -> tuple[float, bool]:
    """Multilinear lookup returning (value, clamped) where clamped marks
    any axis that fell outside the grid hull."""
    ndim = len(table.axis_names)
    cells = []
    ts = []
    clamped = False
    for name, grid in zip(table.axis_names, table.axis_grids):
        if name not in point:
            raise KeyError(f"lookup point missing axis {name!r}")
        i, t, outside = _cell_and_t(grid, point[name])
        clamped = clamped or outside
        cells.append(i)
        ts.append(t)

    values = table.values
    strides = table.strides
    base = 0
    for i, s in zip(cells, strides):
        base += i * s

    # lerp in the v0*(1-t) + v1*t form so exact node hits are bit-exact.
    if ndim == 1:
        t0 = ts[0]
        out = values[base] * (1.0 - t0) + values[base + 1] * t0
    elif ndim == 2:
        t0, t1 = ts
        s0 = strides[0]
        a = values[base] * (1.0 - t1) + values[base + 1] * t1
        b = values[base + s0] * (1.0 - t1) + values[base + s0 + 1] * t1
        out = a * (1.0 - t0) + b * t0
    else:
        t0, t1, t2 = ts
        s0, s1 = strides[0], strides[1]
        out = 0.0
        w0 = (1.0 - t0, t0)
        w1 = (1.0 - t1, t1)
        for i0 in (0, 1):
            for i1 in (0, 1):
                idx = base + i0 * s0 + i1 * s1
                inner = values[idx] * (1.0 - t2) + values[idx + 1] * t2
                out += w0[i0] * w1[i1] * inner
    return out, clamped


def interpolate(table: AeroTable, point: Mapping[str, float]) -> float:
    """Multilinear interpolation of the table at the given axis values."""
    return interpolate_with_flag(table, point)[0]


def table_from_function(
    axis_names: Sequence[str],
    axis_grids: Sequence[Sequence[float]],
    fn,
) -> AeroTable:
    """Tabulate fn(*coords) over the full grid in row-major order."""
    grids = [tuple(float(g) for g in grid) for grid in axis_grids]
    mesh: Iterable[tuple[float, ...]]
    if len(grids) == 1:
        mesh = ((a,) for a in grids[0])
    elif len(grids) == 2:
        mesh = ((a, b) for a in grids[0] for b in grids[1])
    else:
        mesh = ((a, b, c) for a in grids[0] for b in grids[1] for c in grids[2])
    values = tuple(float(fn(*coords)) for coords in mesh)
    return AeroTable(tuple(axis_names), tuple(grids), values)
