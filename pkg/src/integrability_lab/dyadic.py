"""
Dyadic grids, the Haar and Schauder systems, and the operators G_n.

Grid functions are left-constant step functions (one value per cell) or
node samples of a continuous function (one value per node, kind "linear").
All operators keep the grid of their input.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import AcceptanceError, RejectedInputError
from .spaces import check_exponent, lp_norm_rows

logger = logging.getLogger(__name__)

MAX_LEVEL = 24
KINDS = ("step", "linear")
HORIZON_PREFIX = "# T="


# ---------------------------------------------------------------------------
# Grids and grid functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicGrid:
    T: float = 1.0
    L: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise RejectedInputError(f"horizon T must be positive and finite, got {self.T}")
        if isinstance(self.L, bool) or not isinstance(self.L, (int, np.integer)):
            raise RejectedInputError(f"grid level must be an integer, got {self.L!r}")
        if not 0 <= self.L <= MAX_LEVEL:
            raise RejectedInputError(f"grid level must lie in [0, {MAX_LEVEL}], got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "T", float(self.T))

    @property
    def n_cells(self) -> int:
        return 2**self.L

    @property
    def cell_width(self) -> float:
        return self.T * 2.0**-self.L

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.cell_width

    @property
    def left_endpoints(self) -> np.ndarray:
        return self.edges[:-1]

    @property
    def nodes(self) -> np.ndarray:
        return self.edges

    def refine(self) -> DyadicGrid:
        return DyadicGrid(self.T, self.L + 1)

    def cells_per_block(self, n: int) -> int:
        """Number of grid cells in one level-n dyadic interval."""
        check_level(n, self.L)
        return 2 ** (self.L - n)


def check_level(n: int, L: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise RejectedInputError(f"level must be a non-negative integer, got {n!r}")
    if n > L:
        raise RejectedInputError(f"level {n} is finer than the grid level {L}")
    return int(n)


@dataclass(frozen=True)
class GridFunction:
    """
    An l^p_N-valued function on a dyadic grid.

    values has shape (cells, N) for kind "step" and (cells + 1, N) for
    kind "linear". A 1-D array is read as N = 1.
    """

    grid: DyadicGrid
    values: np.ndarray
    p: float = 2.0
    kind: str = "step"

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise RejectedInputError(f"values must be 2-D (rows, N), got shape {values.shape}")
        if self.kind not in KINDS:
            raise RejectedInputError(f"kind must be one of {KINDS}, got {self.kind!r}")
        expected = self.grid.n_cells + (1 if self.kind == "linear" else 0)
        if values.shape[0] != expected:
            raise RejectedInputError(
                f"{self.kind} function on level {self.grid.L} needs {expected} rows, "
                f"got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise RejectedInputError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "p", check_exponent(self.p, allow_inf=True))

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def as_step(self) -> GridFunction:
        if self.kind == "step":
            return self
        return GridFunction(self.grid, self.values[:-1], self.p, "step")

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.grid, values, self.p, self.kind)

    def scaled(self, c: float) -> GridFunction:
        return self.with_values(c * self.values)

    def _check_compatible(self, other: GridFunction) -> None:
        if (other.grid, other.kind, other.p, other.dim) != (self.grid, self.kind, self.p, self.dim):
            raise RejectedInputError("grid functions live on different grids or spaces")

    def __add__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        self._check_compatible(other)
        return self.with_values(self.values - other.values)


def sample_function(
    fn: Callable[[np.ndarray], np.ndarray],
    grid: DyadicGrid,
    p: float = 2.0,
    kind: str = "step",
) -> GridFunction:
    """Sample fn at left endpoints (step) or at all nodes (linear)."""
    times = grid.left_endpoints if kind == "step" else grid.nodes
    return GridFunction(grid, np.asarray(fn(times), dtype=float), p, kind)


# ---------------------------------------------------------------------------
# Haar and Schauder systems on [0, 1]
# ---------------------------------------------------------------------------

def _check_index(n: int, k: int) -> None:
    if n == 0 and k == 0:
        return
    if n < 0 or not 1 <= k <= 2**n:
        raise RejectedInputError(f"Haar index out of range: n={n}, k={k}")


def haar(n: int, k: int, t: float | np.ndarray) -> float | np.ndarray:
    """L^2-normalised Haar function g_nk; (0, 0) is the constant 1."""
    _check_index(n, k)
    t_arr = np.asarray(t, dtype=float)
    if n == 0 and k == 0:
        out = np.ones_like(t_arr)
    else:
        width = 2.0**-n
        left, mid, right = (k - 1) * width, (k - 0.5) * width, k * width
        height = 2.0 ** (n / 2)
        out = np.where(
            (t_arr >= left) & (t_arr < mid),
            height,
            np.where((t_arr >= mid) & (t_arr < right), -height, 0.0),
        )
    return float(out) if out.ndim == 0 else out


def schauder(n: int, k: int, t: float | np.ndarray) -> float | np.ndarray:
    """Schauder function phi_nk(t) = int_0^t g_nk; (0, 0) is phi_00(t) = t."""
    _check_index(n, k)
    t_arr = np.asarray(t, dtype=float)
    if n == 0 and k == 0:
        out = t_arr.copy()
    else:
        half = 2.0 ** (-n - 1)
        mid = (k - 0.5) * 2.0**-n
        out = 2.0 ** (n / 2) * np.clip(half - np.abs(t_arr - mid), 0.0, None)
    return float(out) if out.ndim == 0 else out


def schauder_active(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    For each time, the index k of the level-n tent whose support holds it
    and the tent's value there; at t = 1 the last tent (value 0) is used.
    """
    if n < 0:
        raise RejectedInputError(f"level must be non-negative, got {n}")
    t = np.asarray(t, dtype=float)
    k = np.minimum(np.floor(t * 2.0**n).astype(np.int64) + 1, 2**n)
    mid = (k - 0.5) * 2.0**-n
    value = 2.0 ** (n / 2) * np.clip(2.0 ** (-n - 1) - np.abs(t - mid), 0.0, None)
    return k, value


@lru_cache(maxsize=64)
def schauder_l2sq(n: int) -> float:
    """
    int_0^1 phi_nk^2 dt = 2^(-2n-2) / 3, the same for every k.

    Cross-checked against composite Simpson on the level max(16, n+2) grid
    restricted to the support; the integrand is piecewise quadratic with
    breaks on even nodes, so the rule is exact up to rounding.
    """
    if n < 0:
        raise RejectedInputError(f"level must be non-negative, got {n}")
    value = 2.0 ** (-2 * n - 2) / 3.0
    sub_level = max(16, n + 2) - n
    nodes = np.arange(2**sub_level + 1) * 2.0 ** (-n - sub_level)
    quad = integrate.simpson(schauder(n, 1, nodes) ** 2, x=nodes)
    if abs(quad - value) > 1e-12 * value:
        logger.error("Schauder L2 quadrature mismatch at n=%d: %r vs %r", n, quad, value)
        raise AcceptanceError(["schauder_l2sq_quadrature"], f"n={n}")
    return value


def haar_cell_integrals(n: int, k: int, grid: DyadicGrid) -> np.ndarray:
    """
    Exact integrals of the T-rescaled Haar function over each grid cell.

    On [0, T] the orthonormal element is T^(-1/2) g_nk(t/T), whose primitive
    is T^(1/2) phi_nk(t/T).
    """
    _check_index(n, k)
    scale = math.sqrt(grid.T)
    if n == 0 and k == 0:
        return np.full(grid.n_cells, grid.cell_width / scale)
    return scale * np.diff(schauder(n, k, grid.edges / grid.T))


# ---------------------------------------------------------------------------
# Conditional expectation, translation, G_n
# ---------------------------------------------------------------------------

def block_average(values: np.ndarray, block: int, axis: int = 0) -> np.ndarray:
    """Replace consecutive runs of `block` entries along axis by their mean."""
    values = np.asarray(values, dtype=float)
    if block == 1:
        return values.copy()
    moved = np.moveaxis(values, axis, 0)
    shape = moved.shape
    grouped = moved.reshape((shape[0] // block, block) + shape[1:])
    means = grouped.sum(axis=1) / block
    return np.moveaxis(np.repeat(means, block, axis=0), 0, axis)


def shift_array(values: np.ndarray, cells: int, axis: int = 0) -> np.ndarray:
    """Shift right by `cells` entries along axis, zero-filling the start."""
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    length = values.shape[axis]
    if cells < length:
        src = [slice(None)] * values.ndim
        dst = [slice(None)] * values.ndim
        src[axis] = slice(0, length - cells)
        dst[axis] = slice(cells, length)
        out[tuple(dst)] = values[tuple(src)]
    return out


def g_op_array(values: np.ndarray, L: int, n: int, axis: int = 0) -> np.ndarray:
    """G_n applied along the cell axis of an array of step values on a level-L grid."""
    check_level(n, L)
    block = 2 ** (L - n)
    return shift_array(block_average(values, block, axis), block, axis)


def cond_exp(f: GridFunction, n: int) -> GridFunction:
    """E(f | D_n) on f's own grid; linear input is read as its step version."""
    f = f.as_step()
    block = f.grid.cells_per_block(n)
    return f.with_values(block_average(f.values, block))


def shift_cells(f: GridFunction, cells: int) -> GridFunction:
    if cells < 0:
        raise RejectedInputError(f"shift must be non-negative, got {cells}")
    f = f.as_step()
    return f.with_values(shift_array(f.values, cells))


def translate(f: GridFunction, n: int) -> GridFunction:
    """tau_n: right shift by 2^(-n) T with zero fill."""
    return shift_cells(f, f.grid.cells_per_block(n))


def g_op(f: GridFunction, n: int) -> GridFunction:
    return translate(cond_exp(f, n), n)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def lp_time_norm(f: GridFunction, r: float) -> float:
    """L^r(0, T; l^p_N) norm of the step version of f."""
    r = check_exponent(r, allow_inf=True)
    f = f.as_step()
    pointwise = lp_norm_rows(f.values, f.p)
    if math.isinf(r):
        return float(pointwise.max())
    return float((f.grid.cell_width * np.sum(pointwise**r)) ** (1.0 / r))


def l2_norm(f: GridFunction) -> float:
    return lp_time_norm(f, 2.0)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def to_csv(f: GridFunction, path: str | Path) -> Path:
    """One row per cell (t_left) or node (t); a leading `# T=` line records the horizon."""
    path = Path(path)
    times = f.grid.left_endpoints if f.kind == "step" else f.grid.nodes
    header = ["t_left" if f.kind == "step" else "t"] + [f"x{i + 1}" for i in range(f.dim)]
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{HORIZON_PREFIX}{float(f.grid.T)!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for t, row in zip(times, f.values):
            writer.writerow([repr(float(t))] + [repr(float(x)) for x in row])
    logger.debug("Wrote %s grid function (%d rows, T=%s) to %s", f.kind, len(times), f.grid.T, path)
    return path


def _read_horizon(path: Path, line: str) -> float:
    try:
        T = float(line[len(HORIZON_PREFIX):])
    except ValueError as exc:
        raise RejectedInputError(f"{path}: bad horizon line {line!r}") from exc
    if not (math.isfinite(T) and T > 0.0):
        raise RejectedInputError(f"{path}: horizon must be finite and positive, got {T}")
    return T


def from_csv(path: str | Path, p: float = 2.0) -> GridFunction:
    """
    Read a grid function written by to_csv.

    The horizon comes from the `# T=` line when present; otherwise it is
    inferred from the time column, and a single-cell step file defaults to T = 1.
    """
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    T_declared = None
    if lines and lines[0].startswith(HORIZON_PREFIX):
        T_declared = _read_horizon(path, lines[0])
        lines = lines[1:]
    rows = [row for row in csv.reader(lines) if row]
    if len(rows) < 2:
        raise RejectedInputError(f"{path}: header row and at least one data row required")
    header, body = rows[0], rows[1:]
    if header[0] not in ("t_left", "t"):
        raise RejectedInputError(f"{path}: first column must be t_left or t, got {header[0]!r}")
    kind = "step" if header[0] == "t_left" else "linear"
    try:
        data = np.array([[float(x) for x in row] for row in body], dtype=float)
    except ValueError as exc:
        raise RejectedInputError(f"{path}: non-numeric entry ({exc})") from exc
    if data.shape[1] != len(header):
        raise RejectedInputError(f"{path}: rows do not match the header width")
    cells = data.shape[0] - (1 if kind == "linear" else 0)
    L = int(round(math.log2(cells))) if cells > 0 else -1
    if cells < 1 or 2**L != cells:
        raise RejectedInputError(f"{path}: {cells} cells is not a power of two")
    if kind == "linear":
        T = float(data[-1, 0])
    elif cells > 1:
        T = float((data[1, 0] - data[0, 0]) * cells)
    else:
        T = 1.0 if T_declared is None else T_declared
    if T_declared is not None:
        if not math.isclose(T, T_declared, rel_tol=1e-9):
            raise RejectedInputError(f"{path}: time column implies T={T}, header declares T={T_declared}")
        T = T_declared
    return GridFunction(DyadicGrid(T, L), data[:, 1:], p, kind)
