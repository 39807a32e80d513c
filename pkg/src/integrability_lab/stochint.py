"""
Brownian paths, adapted processes and their stochastic integrals.

Brownian motion on a level-L grid is built by dyadic midpoint (Brownian
bridge) refinement from the normals of one stream per path: the terminal
value first, then the 2^(l-1) midpoints of level l for l = 1..L. A path
at level L is therefore the restriction of the same path at level L + 1.

Processes carry an evaluator mapping a batch of increments of shape
(paths, cells, d) to operator values of shape (paths, cells, N, d); the
value on cell j may only look at increments of cells < j.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicGrid, GridFunction
from .errors import RejectedInputError
from .models import MomentEstimate, MonteCarloEstimate
from .spaces import check_exponent, lp_norm_rows
from .streams import map_batches, philox_generator, standard_normal_rows

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]

BROWNIAN_TAG = "brownian"
# elements per batch of process values; fixes the batch layout independently of workers
BATCH_ELEMENTS = 2**22


# ---------------------------------------------------------------------------
# Brownian paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BrownianPath:
    grid: DyadicGrid
    increments: np.ndarray  # (cells, d)
    seed: int = 0
    path_index: int = 0

    @property
    def d(self) -> int:
        return int(self.increments.shape[1])

    def nodes(self) -> np.ndarray:
        """W at every grid node, shape (cells + 1, d)."""
        out = np.zeros((self.grid.n_cells + 1, self.d))
        np.cumsum(self.increments, axis=0, out=out[1:])
        return out

    def project(self, h: np.ndarray) -> np.ndarray:
        """W_H(t)h at every grid node."""
        h = np.asarray(h, dtype=float)
        if h.shape != (self.d,):
            raise RejectedInputError(f"direction must have shape ({self.d},), got {h.shape}")
        return self.nodes() @ h


def bridge_increments(normals: np.ndarray, grid: DyadicGrid, d: int) -> np.ndarray:
    """
    Increments (batch, cells, d) from level-ordered normals (batch, cells * d).

    Normals [0, d) give W(T); normals [2^(l-1) d, 2^l d) give the level-l
    midpoints, each with bridge variance (parent width) / 4.
    """
    batch = normals.shape[0]
    z = normals.reshape(batch, grid.n_cells, d)
    w = np.zeros((batch, 2, d))
    w[:, 1] = math.sqrt(grid.T) * z[:, 0]
    for level in range(1, grid.L + 1):
        parent_width = grid.T * 2.0 ** (1 - level)
        start = 2 ** (level - 1)
        mids = 0.5 * (w[:, :-1] + w[:, 1:]) + 0.5 * math.sqrt(parent_width) * z[:, start : 2 * start]
        refined = np.empty((batch, 2 * start + 1, d))
        refined[:, ::2] = w
        refined[:, 1::2] = mids
        w = refined
    return np.diff(w, axis=1)


def brownian_increments(
    d: int, grid: DyadicGrid, seed: int, start: int, count: int
) -> np.ndarray:
    """Increments of paths start..start+count-1, shape (count, cells, d)."""
    if d < 1:
        raise RejectedInputError(f"Brownian dimension must be >= 1, got {d}")
    normals = standard_normal_rows(seed, BROWNIAN_TAG, start, count, grid.n_cells * d)
    return bridge_increments(normals, grid, d)


def sample_brownian(d: int, grid: DyadicGrid, seed: int, path_index: int) -> BrownianPath:
    increments = brownian_increments(d, grid, seed, path_index, 1)[0]
    return BrownianPath(grid, increments, seed, path_index)


def _past_values(increments: np.ndarray) -> np.ndarray:
    """W at the left endpoint of every cell, shape (batch, cells, d)."""
    out = np.zeros_like(increments)
    np.cumsum(increments[:, :-1], axis=1, out=out[:, 1:])
    return out


# ---------------------------------------------------------------------------
# Processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampledProcess:
    """
    An operator-valued process Hom(R^d, l^p_N) sampled on grid cells.

    Deterministic processes hold `values` of shape (cells, N, d) and reuse
    them for every path; random ones hold an `evaluator`.
    """

    grid: DyadicGrid
    N: int
    d: int
    p: float = 2.0
    values: np.ndarray | None = None
    evaluator: Evaluator | None = None
    adapted: bool = True
    elementary: ElementaryProcess | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", check_exponent(self.p, allow_inf=True))
        if (self.values is None) == (self.evaluator is None):
            raise RejectedInputError("a process needs exactly one of values or evaluator")
        if self.values is not None:
            values = np.array(self.values, dtype=float)
            if values.shape != (self.grid.n_cells, self.N, self.d):
                raise RejectedInputError(
                    f"values must have shape {(self.grid.n_cells, self.N, self.d)}, "
                    f"got {values.shape}"
                )
            if not np.all(np.isfinite(values)):
                raise RejectedInputError("process values must be finite")
            values.setflags(write=False)
            object.__setattr__(self, "values", values)

    @property
    def deterministic(self) -> bool:
        return self.values is not None

    def evaluate(self, increments: np.ndarray) -> np.ndarray:
        """Values (batch, cells, N, d) for a batch of increments (batch, cells, d)."""
        if self.values is not None:
            return np.broadcast_to(self.values, (increments.shape[0],) + self.values.shape)
        return self.evaluator(increments)

    def scaled(self, c: float) -> SampledProcess:
        return combine(c, self, 0.0, None)


def combine(
    a: float, phi: SampledProcess, b: float, psi: SampledProcess | None
) -> SampledProcess:
    """The process a*phi + b*psi (psi may be None)."""
    if psi is not None and (psi.grid, psi.N, psi.d, psi.p) != (phi.grid, phi.N, phi.d, phi.p):
        raise RejectedInputError("processes live on different grids or spaces")
    adapted = phi.adapted and (psi is None or psi.adapted)
    if phi.deterministic and (psi is None or psi.deterministic):
        values = a * phi.values + (0.0 if psi is None else b * psi.values)
        return SampledProcess(phi.grid, phi.N, phi.d, phi.p, values=values, adapted=adapted)

    def evaluator(increments: np.ndarray) -> np.ndarray:
        out = a * phi.evaluate(increments)
        return out if psi is None else out + b * psi.evaluate(increments)

    return SampledProcess(phi.grid, phi.N, phi.d, phi.p, evaluator=evaluator, adapted=adapted)


def deterministic_process(grid: DyadicGrid, values: np.ndarray, p: float = 2.0) -> SampledProcess:
    """Deterministic process from values (cells, N, d) or (cells, N) for d = 1."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        values = values[:, :, None]
    if values.ndim != 3:
        raise RejectedInputError(f"values must be (cells, N, d), got shape {values.shape}")
    return SampledProcess(grid, values.shape[1], values.shape[2], p, values=values)


def adapted_process(
    grid: DyadicGrid,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    N: int,
    d: int,
    p: float = 2.0,
) -> SampledProcess:
    """
    Process Phi(t_j) = fn(t_left, W(t_left)) on every cell.

    fn receives the left endpoints (cells,) and the Brownian values at them
    (batch, cells, d) and returns (batch, cells, N, d). Adapted by construction.
    """
    times = grid.left_endpoints

    def evaluator(increments: np.ndarray) -> np.ndarray:
        return fn(times, _past_values(increments))

    return SampledProcess(grid, N, d, p, evaluator=evaluator)


def check_adapted(phi: SampledProcess, path: BrownianPath, cells: Sequence[int] | None = None) -> bool:
    """
    Check the measurability contract on one path.

    For each tested cell j the increments of cells >= j are replaced by
    fresh noise; the values on cells <= j must not move.
    """
    if phi.deterministic:
        return True
    M = phi.grid.n_cells
    if cells is None:
        cells = sorted(set(np.linspace(0, M - 1, num=min(M, 16)).astype(int).tolist()))
    noise = philox_generator(path.seed, "adapted-check", path.path_index).standard_normal(
        (len(cells), M, path.d)
    ) * math.sqrt(phi.grid.cell_width)
    base = phi.evaluate(path.increments[None])[0]
    batch = np.repeat(path.increments[None], len(cells), axis=0)
    for row, j in enumerate(cells):
        batch[row, j:] = noise[row, j:]
    perturbed = phi.evaluate(batch)
    for row, j in enumerate(cells):
        if not np.allclose(perturbed[row, : j + 1], base[: j + 1], rtol=1e-12, atol=1e-14):
            logger.warning("Process looks ahead at cell %d", j)
            return False
    return True


def require_adapted(phi: SampledProcess, path: BrownianPath) -> None:
    """Refuse a process that is flagged non-adapted or fails check_adapted on `path`."""
    if not phi.adapted:
        raise RejectedInputError("process is not adapted; refusing to integrate")
    if not check_adapted(phi, path):
        raise RejectedInputError(
            "process values depend on future Brownian increments; refusing to integrate"
        )


@dataclass(frozen=True)
class ElementaryProcess:
    """
    Piecewise-constant process on a grid-aligned partition t_0 < ... < t_n.

    breaks holds the partition as cell indices. Interval k runs from
    breaks[k] to breaks[k + 1]; its value may use increments of cells
    before breaks[k] only. Deterministic ones hold `values` of shape
    (intervals, N, d); random ones an evaluator returning
    (batch, intervals, N, d).
    """

    grid: DyadicGrid
    breaks: tuple[int, ...]
    N: int
    d: int
    p: float = 2.0
    values: np.ndarray | None = None
    evaluator: Evaluator | None = None
    adapted: bool = True

    @property
    def intervals(self) -> int:
        return len(self.breaks) - 1

    def interval_values(self, increments: np.ndarray) -> np.ndarray:
        if self.values is not None:
            return np.broadcast_to(self.values, (increments.shape[0],) + self.values.shape)
        return self.evaluator(increments)

    def to_sampled(self) -> SampledProcess:
        M = self.grid.n_cells
        owner = np.full(M, -1)
        for k in range(self.intervals):
            owner[self.breaks[k] : self.breaks[k + 1]] = k
        active = owner >= 0

        def spread(interval_values: np.ndarray) -> np.ndarray:
            out = np.zeros(interval_values.shape[:1] + (M, self.N, self.d))
            out[:, active] = interval_values[:, owner[active]]
            return out

        if self.values is not None:
            return SampledProcess(
                self.grid, self.N, self.d, self.p,
                values=spread(self.values[None])[0], adapted=self.adapted, elementary=self,
            )
        return SampledProcess(
            self.grid, self.N, self.d, self.p,
            evaluator=lambda inc: spread(self.evaluator(inc)),
            adapted=self.adapted, elementary=self,
        )


def _aligned_breaks(grid: DyadicGrid, times: Sequence[float]) -> tuple[int, ...]:
    if len(times) < 2:
        raise RejectedInputError("a partition needs at least two times")
    breaks = []
    for t in times:
        x = t / grid.cell_width
        idx = int(round(x))
        if abs(x - idx) > 1e-9 or not 0 <= idx <= grid.n_cells:
            raise RejectedInputError(f"partition time {t} is not a node of the level-{grid.L} grid")
        breaks.append(idx)
    if any(b >= c for b, c in zip(breaks, breaks[1:])):
        raise RejectedInputError("partition times must be strictly increasing")
    return tuple(breaks)


def elementary_process(
    grid: DyadicGrid, times: Sequence[float], values: np.ndarray, p: float = 2.0
) -> ElementaryProcess:
    """Deterministic elementary process; values (intervals, N, d)."""
    breaks = _aligned_breaks(grid, times)
    values = np.asarray(values, dtype=float)
    if values.ndim != 3 or values.shape[0] != len(breaks) - 1:
        raise RejectedInputError(
            f"values must have shape ({len(breaks) - 1}, N, d), got {values.shape}"
        )
    values = values.copy()
    values.setflags(write=False)
    return ElementaryProcess(grid, breaks, values.shape[1], values.shape[2], p, values=values)


def adapted_elementary_process(
    grid: DyadicGrid,
    times: Sequence[float],
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    N: int,
    d: int,
    p: float = 2.0,
) -> ElementaryProcess:
    """
    Elementary process whose value on (t_k, t_(k+1)] is fn(t_k, W(t_k)).

    fn gets the interval starts (intervals,) and W there (batch, intervals, d)
    and returns (batch, intervals, N, d).
    """
    breaks = _aligned_breaks(grid, times)
    starts = np.array(breaks[:-1])

    def evaluator(increments: np.ndarray) -> np.ndarray:
        w = np.zeros(increments.shape[:1] + (grid.n_cells + 1, increments.shape[2]))
        np.cumsum(increments, axis=1, out=w[:, 1:])
        return fn(starts * grid.cell_width, w[:, starts])

    return ElementaryProcess(grid, breaks, N, d, p, evaluator=evaluator)


# ---------------------------------------------------------------------------
# Integrals
# ---------------------------------------------------------------------------

def _check_path(grid: DyadicGrid, d: int, path: BrownianPath) -> None:
    if path.grid != grid:
        raise RejectedInputError(
            f"process grid (T={grid.T}, L={grid.L}) differs from path grid "
            f"(T={path.grid.T}, L={path.grid.L})"
        )
    if path.d != d:
        raise RejectedInputError(f"process acts on R^{d}, path is {path.d}-dimensional")


def _elementary_running(phi: ElementaryProcess, path: BrownianPath) -> GridFunction:
    w = path.nodes()
    values = phi.interval_values(path.increments[None])[0]
    node_idx = np.arange(phi.grid.n_cells + 1)
    running = np.zeros((phi.grid.n_cells + 1, phi.N))
    for k in range(phi.intervals):
        upper = w[np.minimum(phi.breaks[k + 1], node_idx)]
        lower = w[np.minimum(phi.breaks[k], node_idx)]
        running += (upper - lower) @ values[k].T
    return GridFunction(phi.grid, running, phi.p, "linear")


def integrate_elementary(phi: ElementaryProcess, path: BrownianPath) -> GridFunction:
    """Running integral at every grid node from the defining sum of W-differences."""
    _check_path(phi.grid, phi.d, path)
    require_adapted(phi.to_sampled(), path)
    return _elementary_running(phi, path)


def running_integrals(values: np.ndarray, increments: np.ndarray) -> np.ndarray:
    """Left-point sums at every node: (batch, cells, N, d) x (batch, cells, d) -> (batch, cells+1, N)."""
    steps = np.einsum("bcnd,bcd->bcn", values, increments)
    out = np.zeros((steps.shape[0], steps.shape[1] + 1, steps.shape[2]))
    np.cumsum(steps, axis=1, out=out[:, 1:])
    return out


def terminal_integrals(phi: SampledProcess, increments: np.ndarray) -> np.ndarray:
    """X(T) for a batch of paths, shape (batch, N)."""
    batch = increments.shape[0]
    if phi.deterministic:
        kernel = phi.values.transpose(0, 2, 1).reshape(-1, phi.N)
        return increments.reshape(batch, -1) @ kernel
    return np.einsum("bcnd,bcd->bn", phi.evaluate(increments), increments)


def integrate_sampled(phi: SampledProcess, path: BrownianPath) -> GridFunction:
    """Running Ito integral sum_{j < cell(t)} Phi(t_j) dW_j at every node."""
    _check_path(phi.grid, phi.d, path)
    require_adapted(phi, path)
    if phi.elementary is not None:
        return _elementary_running(phi.elementary, path)
    values = phi.evaluate(path.increments[None])
    running = running_integrals(values, path.increments[None])[0]
    return GridFunction(phi.grid, running, phi.p, "linear")


def integrate_components(phi: SampledProcess, path: BrownianPath) -> list[GridFunction]:
    """int Phi h_i dW_H h_i for each standard basis vector h_i of R^d."""
    _check_path(phi.grid, phi.d, path)
    require_adapted(phi, path)
    values = phi.evaluate(path.increments[None])
    out = []
    for i in range(phi.d):
        running = running_integrals(values[..., i : i + 1], path.increments[None, :, i : i + 1])[0]
        out.append(GridFunction(phi.grid, running, phi.p, "linear"))
    return out


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def path_batch_size(phi: SampledProcess) -> int:
    per_path = phi.grid.n_cells * max(1, phi.N * phi.d)
    return max(1, min(4096, BATCH_ELEMENTS // per_path))


def pathwise_norms(
    phi: SampledProcess, paths: int, seed: int, sup: bool = True
) -> tuple[np.ndarray | None, np.ndarray]:
    """Per-path sup_t ||X(t)|| over nodes (or None) and ||X(T)||."""
    require_adapted(phi, sample_brownian(phi.d, phi.grid, seed, 0))

    def batch(start: int, stop: int) -> tuple[np.ndarray | None, np.ndarray]:
        increments = brownian_increments(phi.d, phi.grid, seed, start, stop - start)
        if not sup:
            return None, lp_norm_rows(terminal_integrals(phi, increments), phi.p)
        running = running_integrals(phi.evaluate(increments), increments)
        norms = lp_norm_rows(running, phi.p)
        return norms.max(axis=1), norms[:, -1]

    results = map_batches(batch, paths, path_batch_size(phi))
    terminal = np.concatenate([r[1] for r in results])
    sups = np.concatenate([r[0] for r in results]) if sup else None
    return sups, terminal


def moment_estimate(
    phi: SampledProcess, q: float, paths: int, seed: int, terminal_only: bool = False
) -> MomentEstimate:
    """Monte Carlo E sup_t ||int_0^t Phi dW||^q and E ||X(T)||^q."""
    if not (0.0 < q < math.inf):
        raise RejectedInputError(f"moment exponent must lie in (0, inf), got {q}")
    if paths < 2:
        raise RejectedInputError(f"need at least 2 paths, got {paths}")
    logger.info(
        "Moment estimate q=%s paths=%d level=%d N=%d d=%d", q, paths, phi.grid.L, phi.N, phi.d
    )
    sups, terminal = pathwise_norms(phi, paths, seed, sup=not terminal_only)
    return MomentEstimate(
        q=q,
        paths=paths,
        seed=seed,
        grid_level=phi.grid.L,
        terminal=MonteCarloEstimate.from_samples(terminal**q),
        sup=None if sups is None else MonteCarloEstimate.from_samples(sups**q),
    )


def square_function_coordinates(values: np.ndarray, cell_width: float) -> np.ndarray:
    """(int ||phi(t, i)||_H^2 dt)^(1/2) per coordinate; values (..., cells, N, d)."""
    return np.sqrt(cell_width * np.sum(values**2, axis=(-3, -1)))


def square_function_norm(phi: SampledProcess, path: BrownianPath | None = None, p: float | None = None) -> float:
    """l^p norm of the per-coordinate square function on one path."""
    p = phi.p if p is None else check_exponent(p, allow_inf=True)
    if path is None:
        if not phi.deterministic:
            raise RejectedInputError("a random process needs a path")
        values = phi.values
    else:
        _check_path(phi.grid, phi.d, path)
        values = phi.evaluate(path.increments[None])[0]
    return float(lp_norm_rows(square_function_coordinates(values, phi.grid.cell_width), p))


def square_function_norms(phi: SampledProcess, increments: np.ndarray) -> np.ndarray:
    """Square-function norms for a batch of paths."""
    coords = square_function_coordinates(phi.evaluate(increments), phi.grid.cell_width)
    return lp_norm_rows(coords, phi.p)


# ---------------------------------------------------------------------------
# Built-in adapted generators
# ---------------------------------------------------------------------------

def random_adapted_process(
    grid: DyadicGrid, N: int, d: int, p: float, seed: int, instance: int
) -> SampledProcess:
    """
    Bounded adapted process sum_r f_r(t, W(t)) M_r with random fixed matrices.

    f_1 = cos(a t + b), f_2 = tanh(<u, W> + c), f_3 = 1 / (1 + |W|^2).
    """
    rng = philox_generator(seed, "corpus", instance)
    mats = rng.standard_normal((3, N, d)) / math.sqrt(d)
    a, b, c = rng.uniform(0.5, 6.0), rng.uniform(0.0, 2 * math.pi), rng.uniform(-1.0, 1.0)
    u = rng.standard_normal(d)

    def fn(t: np.ndarray, w: np.ndarray) -> np.ndarray:
        f1 = np.broadcast_to(np.cos(a * t + b), w.shape[:2])
        f2 = np.tanh(w @ u + c)
        f3 = 1.0 / (1.0 + np.sum(w**2, axis=-1))
        return (
            f1[..., None, None] * mats[0]
            + f2[..., None, None] * mats[1]
            + f3[..., None, None] * mats[2]
        )

    return adapted_process(grid, fn, N, d, p)


def random_step_process(
    grid: DyadicGrid, N: int, d: int, p: float, seed: int, instance: int, level: int = 3
) -> SampledProcess:
    """Deterministic process, constant on level-`level` dyadic intervals, Gaussian values."""
    level = min(level, grid.L)
    rng = philox_generator(seed, "corpus", instance)
    coarse = rng.standard_normal((2**level, N, d)) / math.sqrt(d)
    values = np.repeat(coarse, 2 ** (grid.L - level), axis=0)
    return deterministic_process(grid, values, p)


def lipschitz_test_process(grid: DyadicGrid, N: int = 4, d: int = 2, p: float = 2.0) -> SampledProcess:
    """
    Phi(t, W) = A cos(t) + 0.1 B tanh(<u, W(t)>), Lipschitz in (t, W) and bounded.

    A, B and u are fixed draws of the "lipschitz" stream with seed 0.
    """
    rng = philox_generator(0, "lipschitz", 0)
    A = rng.standard_normal((N, d)) / math.sqrt(d)
    B = rng.standard_normal((N, d)) / math.sqrt(d)
    u = rng.standard_normal(d)
    u /= np.linalg.norm(u)

    def fn(t: np.ndarray, w: np.ndarray) -> np.ndarray:
        drift = np.cos(t)[None, :, None, None] * A
        return drift + 0.1 * np.tanh(w @ u)[..., None, None] * B

    return adapted_process(grid, fn, N, d, p)
