"""
Experiment drivers: the Schauder counterexample psi_N, the divergence table,
the Haar-block embedding bound, the G_n approximation scheme, and the
equivalence, domination and dominated-convergence campaigns.

Every driver returns a report model whose `checks` record the embedded
acceptance assertions. With strict=True a failed check raises
AcceptanceError after logging; the CLI runs with strict=False so the
report is written before the exit code is decided.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from . import constants
from .besov import (
    besov_dyadic_seminorm,
    besov_integral_seminorm,
    besov_norm,
    holder_norm,
    holder_seminorm,
)
from .dyadic import (
    DyadicGrid,
    GridFunction,
    block_average,
    g_op_array,
    lp_time_norm,
    schauder_active,
    schauder_l2sq,
)
from .errors import AcceptanceError, RejectedInputError
from .gamma import (
    domination_compare,
    domination_violation,
    gamma_norm_mc,
    gamma_norm_value,
    gaussian_abs_moment,
    operator_square_norm,
    represent_operator,
)
from .models import (
    ApproximationRow,
    ApproximationTable,
    BesovParams,
    BesovReport,
    CheckedReport,
    CounterexampleReport,
    DivergenceRow,
    DivergenceTable,
    DominatedConvergenceRow,
    DominatedConvergenceTable,
    DominationCampaign,
    EmbeddingCampaign,
    EmbeddingResult,
    EquivalenceRow,
    EquivalenceStatistics,
    MonteCarloEstimate,
    PsiMoment,
    PsiSpec,
)
from .spaces import lp_norm_rows
from .stochint import (
    SampledProcess,
    brownian_increments,
    deterministic_process,
    moment_estimate,
    path_batch_size,
    random_adapted_process,
    random_step_process,
    require_adapted,
    running_integrals,
    sample_brownian,
    square_function_norms,
    terminal_integrals,
)
from .streams import map_batches, philox_generator

logger = logging.getLogger(__name__)


def enforce(report: CheckedReport) -> None:
    failed = report.failed_checks()
    if failed:
        logger.error("%s failed checks: %s", type(report).__name__, ", ".join(failed))
        raise AcceptanceError(failed)


def _finish(report: CheckedReport, strict: bool) -> None:
    if strict:
        enforce(report)


# ---------------------------------------------------------------------------
# The counterexample psi_N
# ---------------------------------------------------------------------------

def psi_values(psi: PsiSpec, times: np.ndarray) -> np.ndarray:
    """psi_N at the given times, shape (len(times), 2^(N+1)); column 2^n + k - 1 holds level n, tent k."""
    times = np.asarray(times, dtype=float)
    out = np.zeros((times.size, psi.dimension))
    rows = np.arange(times.size)
    for n in range(psi.N + 1):
        k, value = schauder_active(n, times)
        out[rows, 2**n + k - 1] = 2.0 ** ((psi.p - 1.0) * n / psi.p) * value
    return out


def build_psi(psi: PsiSpec, grid_level: int) -> SampledProcess:
    """psi_N sampled at left endpoints of the level-L grid on [0, 1], as a map R -> l^p."""
    if grid_level < psi.N + 2:
        raise RejectedInputError(
            f"grid level {grid_level} is too coarse for N={psi.N}; need >= {psi.N + 2}"
        )
    grid = DyadicGrid(1.0, grid_level)
    return deterministic_process(grid, psi_values(psi, grid.left_endpoints), psi.p)


def psi_node_profile(psi: PsiSpec, level: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Compressed node samples of psi_N: per node and per Schauder level n,
    the active tent index and its weighted value.

    Only levels n < `level` are kept; finer tents vanish at every node.
    """
    nodes = np.arange(2**level + 1) * 2.0**-level
    levels = min(psi.N, level - 1) + 1
    index = np.zeros((nodes.size, levels), dtype=np.int64)
    value = np.zeros((nodes.size, levels))
    for n in range(levels):
        index[:, n], tent = schauder_active(n, nodes)
        value[:, n] = 2.0 ** ((psi.p - 1.0) * n / psi.p) * tent
    return index, value


def psi_holder_parts(psi: PsiSpec, level: int) -> tuple[float, float]:
    """(sup norm, C^alpha seminorm) of psi_N over the level-`level` nodes."""
    if level < 1:
        raise RejectedInputError(f"Hoelder level must be >= 1, got {level}")
    p, alpha = psi.p, psi.alpha
    index, value = psi_node_profile(psi, level)
    powered = np.abs(value) ** p
    sup_part = float(np.max(np.sum(powered, axis=1)) ** (1.0 / p))
    delta = 2.0**-level
    best = 0.0
    for lag in range(1, index.shape[0]):
        same = index[lag:] == index[:-lag]
        diff = np.abs(value[lag:] - value[:-lag]) ** p
        total = np.where(same, diff, powered[lag:] + powered[:-lag]).sum(axis=1)
        best = max(best, float(total.max()) ** (1.0 / p) / (lag * delta) ** alpha)
    return sup_part, best


def psi_holder_norm(psi: PsiSpec, level: int) -> float:
    sup_part, seminorm = psi_holder_parts(psi, level)
    return sup_part + seminorm


def psi_grid_function(psi: PsiSpec, level: int) -> GridFunction:
    """Dense node sampling of psi_N (piecewise-linear interpretation)."""
    grid = DyadicGrid(1.0, level)
    return GridFunction(grid, psi_values(psi, grid.nodes), psi.p, "linear")


def psi_moment_sum(N: int, p: float) -> float:
    """sum_{n<=N} sum_k 2^((p-1)n) m_p^p (int phi_nk^2)^(p/2), any p > 0."""
    mp = gaussian_abs_moment(p) ** p
    terms = [2**n * 2.0 ** ((p - 1.0) * n) * mp * schauder_l2sq(n) ** (p / 2.0) for n in range(N + 1)]
    return math.fsum(terms)


def psi_exact_moment(psi: PsiSpec) -> PsiMoment:
    summed = psi_moment_sum(psi.N, psi.p)
    mp = gaussian_abs_moment(psi.p) ** psi.p
    closed = mp * (psi.N + 1) * 12.0 ** (-psi.p / 2.0)
    displayed = mp * psi.N * 12.0 ** (-psi.p / 2.0)
    discrepancy = abs(summed - displayed) / summed
    return PsiMoment(
        N=psi.N,
        p=psi.p,
        summed=summed,
        closed_form=closed,
        displayed=displayed,
        relative_discrepancy=discrepancy,
        discrepancy_flag=discrepancy > 1e-12,
    )


def psi_holder_constant(p: float) -> float:
    """C_p: the sup-part bound plus the seminorm bound, alpha = 1/p - 1/2."""
    if not 1.0 <= p < 2.0:
        raise RejectedInputError(f"psi_holder_constant needs p in [1, 2), got {p}")
    alpha = 1.0 / p - 0.5
    r = 2.0 ** (1.0 - p / 2.0)
    sup_part = 0.5 * (r / (r - 1.0)) ** (1.0 / p)
    semi_part = (
        2.0 ** (2.0 - alpha) / (2.0 ** (1.5 * p - 1.0) - 1.0)
        + 1.0 / (1.0 - 2.0 ** (-(1.0 - p / 2.0)))
    ) ** (1.0 / p)
    return sup_part + semi_part


def counterexample_experiment(
    p: float,
    N: int,
    grid_level: int = 12,
    paths: int = 100_000,
    seed: int = 0,
    holder_level: int = 10,
    strict: bool = True,
) -> CounterexampleReport:
    """Monte Carlo E ||int psi_N dW||^p against the exact sum, plus the Hoelder bound."""
    psi = PsiSpec(N=N, p=p)
    logger.info("Counterexample p=%s N=%d level=%d paths=%d", p, N, grid_level, paths)
    exact = psi_exact_moment(psi)
    mc = moment_estimate(build_psi(psi, grid_level), q=p, paths=paths, seed=seed, terminal_only=True)
    estimate = mc.terminal
    z = (estimate.estimate - exact.summed) / estimate.stderr if estimate.stderr > 0 else 0.0
    holder = psi_holder_norm(psi, holder_level)
    bound = psi_holder_constant(p)
    report = CounterexampleReport(
        p=p,
        N=N,
        grid_level=grid_level,
        paths=paths,
        seed=seed,
        exact=exact,
        estimate=estimate,
        z_score=z,
        holder_level=holder_level,
        holder_norm=holder,
        holder_constant=bound,
        checks={
            "moment_within_3se": abs(z) <= constants.STDERR_MULTIPLIER,
            "holder_bound": holder <= bound,
        },
    )
    _finish(report, strict)
    return report


def divergence_experiment(
    p: float, N_list: Sequence[int], holder_level: int = 10, strict: bool = True
) -> DivergenceTable:
    """Exact moment K_p (N+1)^(1/p) against the bounded Hoelder norm of psi_N."""
    Ns = sorted(set(int(n) for n in N_list))
    if len(Ns) < 2:
        raise RejectedInputError("divergence needs at least two distinct values of N")
    bound = psi_holder_constant(p)
    rows = []
    for N in Ns:
        psi = PsiSpec(N=N, p=p)
        moment = psi_moment_sum(N, p) ** (1.0 / p)
        holder = psi_holder_norm(psi, holder_level)
        rows.append(DivergenceRow(N=N, moment=moment, holder_norm=holder, ratio=moment / holder))
        logger.debug("divergence N=%d moment=%.6g holder=%.6g", N, moment, holder)
    x = np.log(np.array(Ns, dtype=float) + 1.0)
    y = np.log([row.moment for row in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    ratios = [row.ratio for row in rows]
    n_star = None
    for i, row in enumerate(rows):
        if all(r > 1.0 for r in ratios[i:]):
            n_star = row.N
            break
    report = DivergenceTable(
        p=p,
        holder_level=holder_level,
        holder_constant=bound,
        slope=slope,
        n_star=n_star,
        rows=rows,
        checks={
            "slope": abs(slope - 1.0 / p) <= 1e-12,
            "ratio_increasing": all(b > a for a, b in zip(ratios, ratios[1:])),
            "holder_bounded": all(row.holder_norm <= bound for row in rows),
        },
    )
    _finish(report, strict)
    return report


# ---------------------------------------------------------------------------
# Embedding bound
# ---------------------------------------------------------------------------

def schauder_series_process(
    grid: DyadicGrid, N: int, p: float, seed: int, instance: int, top_level: int = 6
) -> SampledProcess:
    """
    Random deterministic process x_0 + sum_{n<=top, k} 2^(n/2) a_n phi_nk(t) x_nk
    with Gaussian x's in R^N and a random geometric decay a_n.
    """
    rng = philox_generator(seed, "corpus", instance)
    decay = rng.uniform(0.2, 0.8)
    amplitude = rng.uniform(0.2, 1.0)
    t = grid.left_endpoints
    values = np.tile(rng.standard_normal(N), (t.size, 1))
    for n in range(min(top_level, grid.L) + 1):
        coeffs = rng.standard_normal((2**n, N)) * amplitude * 2.0 ** (n / 2 - n * decay)
        k, tent = schauder_active(n, t)
        values += tent[:, None] * coeffs[k - 1]
    return deterministic_process(grid, values, p)


def embedding_bound(
    phi: SampledProcess, p: float, n_max: int, samples: int = 4000, seed: int = 0
) -> EmbeddingResult:
    """
    gamma-norm of the level-n_max Haar section against the Besov-side bound
    ||Phi||_{L^p(gamma)} + T_p 2^(-1+1/p) (sum_n 2^(n(1-p/2)) int ||Phi(s) - Phi(s + 2^(-n-1))||^p ds)^(1/p).
    """
    if not phi.deterministic:
        raise RejectedInputError("embedding_bound needs a deterministic process")
    if phi.grid.T != 1.0:
        raise RejectedInputError(f"embedding_bound works on [0, 1], got T={phi.grid.T}")
    if not 1.0 <= p <= 2.0 or p != phi.p:
        raise RejectedInputError(f"p must lie in [1, 2] and match the target exponent {phi.p}")
    L = phi.grid.L
    if not 0 <= n_max <= L - 1:
        raise RejectedInputError(f"n_max must lie in [0, {L - 1}], got {n_max}")
    delta = phi.grid.cell_width
    values = phi.values

    pointwise = gamma_norm_value(values, p, samples, seed)
    lp_part = float((delta * np.sum(pointwise**p)) ** (1.0 / p))
    terms = []
    for n in range(n_max + 1):
        shift = 2 ** (L - n - 1)
        diffs = gamma_norm_value(values[shift:] - values[:-shift], p, samples, seed)
        terms.append(2.0 ** (n * (1.0 - p / 2.0)) * delta * float(np.sum(diffs**p)))
    block_sum = math.fsum(terms) ** (1.0 / p)
    right = lp_part + constants.TYPE_CONSTANT * 2.0 ** (-1.0 + 1.0 / p) * block_sum

    left = gamma_norm_mc(represent_operator(phi, n_max), samples, seed)
    dyadic = ratio = None
    if phi.d == 1 and p < 2.0:
        f = GridFunction(phi.grid, values[:, :, 0], p, "step")
        params = BesovParams(s=1.0 / p - 0.5, p=p, q=p)
        dyadic = besov_dyadic_seminorm(f, params, levels=n_max)
        ratio = block_sum / dyadic if dyadic > 0 else None
    return EmbeddingResult(
        left=left,
        right=right,
        lp_part=lp_part,
        block_sum=block_sum,
        block_terms=terms,
        type_constant=constants.TYPE_CONSTANT,
        dyadic_seminorm=dyadic,
        block_ratio=ratio,
        holds=left.estimate <= right + constants.STDERR_MULTIPLIER * left.stderr,
    )


def embedding_campaign(
    p: float,
    instances: int = 30,
    N: int = 8,
    grid_level: int = 10,
    n_max: int = 9,
    samples: int = 4000,
    seed: int = 0,
    strict: bool = True,
) -> EmbeddingCampaign:
    grid = DyadicGrid(1.0, grid_level)
    band = constants.EMBEDDING_BLOCK_BAND
    results = []
    for i in range(instances):
        phi = schauder_series_process(grid, N, p, seed, i)
        result = embedding_bound(phi, p, n_max, samples, seed)
        finer = gamma_norm_mc(represent_operator(phi, n_max + 1), samples, seed).estimate
        result.left_refined = finer
        result.truncation_change = abs(finer - result.left.estimate) / max(finer, 1e-300)
        results.append(result)
        logger.debug(
            "embedding instance %d: left=%.6g refined=%s right=%.6g",
            i, result.left.estimate, result.left_refined, result.right,
        )
    ratios = [r.block_ratio for r in results if r.block_ratio is not None]
    changes = [r.truncation_change for r in results]
    report = EmbeddingCampaign(
        p=p,
        N=N,
        grid_level=grid_level,
        n_max=n_max,
        results=results,
        checks={
            "left_le_right": all(r.holds for r in results),
            "block_ratio_band": all(1.0 / band <= r <= band for r in ratios),
            "truncation_stable": all(c < constants.TRUNCATION_TOLERANCE for c in changes),
        },
    )
    _finish(report, strict)
    return report


# ---------------------------------------------------------------------------
# Approximation by G_n
# ---------------------------------------------------------------------------

def _monotone_within(values: Sequence[float], tolerance: float) -> bool:
    return all(b <= a * (1.0 + tolerance) for a, b in zip(values, values[1:]))


def approximation_experiment(
    phi: SampledProcess, n_max: int, paths: int, seed: int, strict: bool = True
) -> ApproximationTable:
    """
    ||G_n Phi - Phi|| in L^2(Omega x [0, T]) and E sup_t ||int (G_n Phi - Phi) dW||^2 for n <= n_max.

    Operator values are measured by operator_square_norm, the gamma-norm for
    p = 2 or d = 1.
    """
    L = phi.grid.L
    if not 0 <= n_max <= L:
        raise RejectedInputError(f"n_max must lie in [0, {L}], got {n_max}")
    require_adapted(phi, sample_brownian(phi.d, phi.grid, seed, 0))
    levels = range(n_max + 1)
    delta = phi.grid.cell_width
    logger.info("Approximation level=%d n_max=%d paths=%d", L, n_max, paths)

    def batch(start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        increments = brownian_increments(phi.d, phi.grid, seed, start, stop - start)
        values = np.asarray(phi.evaluate(increments))
        l2 = np.empty((len(levels), stop - start))
        sup_sq = np.empty((len(levels), stop - start))
        for row, n in enumerate(levels):
            diff = g_op_array(values, L, n, axis=1) - values
            l2[row] = delta * np.sum(operator_square_norm(diff, phi.p) ** 2, axis=1)
            running = lp_norm_rows(running_integrals(diff, increments), phi.p)
            sup_sq[row] = running.max(axis=1) ** 2
        return l2, sup_sq

    results = map_batches(batch, paths, path_batch_size(phi))
    l2 = np.concatenate([r[0] for r in results], axis=1)
    sup_sq = np.concatenate([r[1] for r in results], axis=1)
    rows = [
        ApproximationRow(
            n=n,
            l2_error=float(math.sqrt(np.mean(l2[row]))),
            mc_sup_sq=MonteCarloEstimate.from_samples(sup_sq[row]),
        )
        for row, n in enumerate(levels)
    ]
    l2_col = [r.l2_error for r in rows]
    mc_col = [r.mc_sup_sq.estimate for r in rows]
    checks = {
        "l2_monotone": _monotone_within(l2_col, constants.MONOTONE_TOLERANCE),
        "mc_monotone": _monotone_within(mc_col, constants.MONOTONE_TOLERANCE),
    }
    check_at = constants.APPROXIMATION_CHECK_LEVEL
    if n_max >= check_at:
        threshold = constants.APPROXIMATION_THRESHOLD
        checks["l2_below_threshold"] = l2_col[check_at] < threshold * l2_col[0]
        checks["mc_below_threshold"] = mc_col[check_at] < threshold * mc_col[0]
    report = ApproximationTable(grid_level=L, paths=paths, seed=seed, rows=rows, checks=checks)
    _finish(report, strict)
    return report


# ---------------------------------------------------------------------------
# Square-function equivalence
# ---------------------------------------------------------------------------

def _equivalence_row(phi: SampledProcess, instance: int, paths: int, seed: int) -> EquivalenceRow:
    def batch(start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        increments = brownian_increments(phi.d, phi.grid, seed, start, stop - start)
        terminal = lp_norm_rows(terminal_integrals(phi, increments), phi.p) ** 2
        return terminal, square_function_norms(phi, increments) ** 2

    results = map_batches(batch, paths, path_batch_size(phi))
    x = np.concatenate([r[0] for r in results])
    s = np.concatenate([r[1] for r in results])
    a, b = float(np.mean(x)), float(np.mean(s))
    ratio = math.sqrt(a / b)
    cov = np.cov(x, s, ddof=1)
    log_var = 0.25 * (cov[0, 0] / a**2 + cov[1, 1] / b**2 - 2.0 * cov[0, 1] / (a * b)) / paths
    return EquivalenceRow(
        instance=instance,
        ratio=ratio,
        stderr=ratio * math.sqrt(max(log_var, 0.0)),
        mean_terminal_sq=a,
        mean_square_function_sq=b,
    )


def _equivalence_rows(
    p: float, N: int, d: int, instances: int, paths: int, seed: int, grid_level: int, deterministic: bool
) -> list[EquivalenceRow]:
    grid = DyadicGrid(1.0, grid_level)
    rows = []
    for i in range(instances):
        if deterministic:
            phi = random_step_process(grid, N, d, p, seed, i)
        else:
            phi = random_adapted_process(grid, N, d, p, seed, i)
        rows.append(_equivalence_row(phi, i, paths, seed))
    return rows


def equivalence_experiment(
    p: float,
    N: int,
    d: int,
    instances: int,
    paths: int,
    seed: int,
    grid_level: int = 8,
    deterministic: bool = False,
    refine: bool = False,
    strict: bool = True,
) -> EquivalenceStatistics:
    """Ratio (E||X_T||^2)^(1/2) / (E S^2)^(1/2) over random bounded adapted instances."""
    if p <= 1.0:
        raise RejectedInputError(
            "p = 1: l^1 is not a UMD space, so the square-function equivalence "
            "has no constant; use p in (1, inf)"
        )
    if math.isinf(p):
        raise RejectedInputError("equivalence needs a finite p")
    logger.info("Equivalence p=%s N=%d d=%d instances=%d paths=%d", p, N, d, instances, paths)
    rows = _equivalence_rows(p, N, d, instances, paths, seed, grid_level, deterministic)
    ratios = np.array([r.ratio for r in rows])
    spread = float(ratios.max() / ratios.min())
    band = constants.EQUIVALENCE_RATIO_BAND
    checks = {
        "ratio_band": bool(np.all((ratios >= 1.0 / band) & (ratios <= band))),
        "spread_limit": spread <= constants.EQUIVALENCE_SPREAD_LIMIT,
    }
    if p == 2.0 and deterministic:
        checks["isometry"] = all(
            abs(r.ratio - 1.0) <= constants.STDERR_MULTIPLIER * r.stderr + 1e-12 for r in rows
        )
    refined_spread = spread_change = None
    if refine:
        finer = _equivalence_rows(p, N, d, instances, paths, seed, grid_level + 1, deterministic)
        finer_ratios = np.array([r.ratio for r in finer])
        refined_spread = float(finer_ratios.max() / finer_ratios.min())
        spread_change = abs(refined_spread - spread) / spread
        checks["spread_stability"] = spread_change < constants.SPREAD_STABILITY
    report = EquivalenceStatistics(
        p=p,
        N=N,
        d=d,
        grid_level=grid_level,
        paths=paths,
        rows=rows,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        median_ratio=float(np.median(ratios)),
        spread=spread,
        refined_spread=refined_spread,
        spread_change=spread_change,
        checks=checks,
    )
    _finish(report, strict)
    return report


# ---------------------------------------------------------------------------
# Domination and dominated convergence
# ---------------------------------------------------------------------------

def _multiplied(psi: SampledProcess, c: np.ndarray) -> SampledProcess:
    return deterministic_process(psi.grid, c[:, None, None] * psi.values, psi.p)


def domination_campaign(
    p: float,
    N: int,
    d: int,
    grid_level: int,
    instances: int = 30,
    samples: int = 4000,
    seed: int = 0,
    strict: bool = True,
) -> DominationCampaign:
    """Phi = c(t) Psi with |c| <= 0.95 per cell against Psi, one random Psi per instance."""
    grid = DyadicGrid(1.0, grid_level)
    reports = []
    for i in range(instances):
        psi = random_step_process(grid, N, d, p, seed, i)
        c = philox_generator(seed, "multiplier", i).uniform(-0.95, 0.95, grid.n_cells)
        reports.append(domination_compare(_multiplied(psi, c), psi, 64, samples, seed))
    checks = {
        "hypothesis": all(r.hypothesis_holds for r in reports),
        "mc_ordering": all(bool(r.mc_holds) for r in reports),
    }
    if not math.isinf(p):
        checks["exact_ordering"] = all(bool(r.exact_holds) for r in reports)
    report = DominationCampaign(p=p, N=N, d=d, grid_level=grid_level, instances=reports, checks=checks)
    _finish(report, strict)
    return report


def dominated_convergence_experiment(
    p: float,
    N: int,
    d: int,
    grid_level: int,
    n_max: int,
    paths: int,
    seed: int = 0,
    strict: bool = True,
) -> DominatedConvergenceTable:
    """
    Phi_n = E(c | D_n) Psi converges to Phi = c Psi with |c_n| <= 1 throughout;
    the stochastic integrals converge in L^2(Omega; C([0, 1]; l^p)).
    """
    if not 0 <= n_max <= grid_level:
        raise RejectedInputError(f"n_max must lie in [0, {grid_level}], got {n_max}")
    grid = DyadicGrid(1.0, grid_level)
    psi = random_step_process(grid, N, d, p, seed, 0)
    c = 0.9 * np.sin(2.0 * math.pi * grid.left_endpoints + 0.3)
    phi = _multiplied(psi, c)
    rows = []
    for n in range(n_max + 1):
        c_n = block_average(c, 2 ** (grid_level - n))
        phi_n = _multiplied(psi, c_n)
        violation, _ = domination_violation(phi_n, psi, 64, seed)
        diff = _multiplied(psi, c_n - c)
        l2 = float(math.sqrt(grid.cell_width * np.sum(operator_square_norm(diff.values, p) ** 2)))
        sup = moment_estimate(diff, q=2.0, paths=paths, seed=seed).sup
        rows.append(DominatedConvergenceRow(n=n, domination_holds=violation is None, l2_error=l2, mc_sup_sq=sup))
    mc_col = [r.mc_sup_sq.estimate for r in rows]
    report = DominatedConvergenceTable(
        p=p,
        grid_level=grid_level,
        paths=paths,
        rows=rows,
        checks={
            "domination": all(r.domination_holds for r in rows),
            "mc_monotone": _monotone_within(mc_col, constants.MONOTONE_TOLERANCE),
            "mc_below_threshold": mc_col[-1] < constants.APPROXIMATION_THRESHOLD * mc_col[0],
        },
    )
    _finish(report, strict)
    return report


# ---------------------------------------------------------------------------
# Besov and Hoelder norms of a grid function
# ---------------------------------------------------------------------------

def besov_experiment(
    f: GridFunction, params: BesovParams, alpha: float, strict: bool = True
) -> BesovReport:
    """Dyadic against integral seminorm, and the Hoelder domination of the dyadic seminorm."""
    f = f.as_step()
    dyadic = besov_dyadic_seminorm(f, params)
    integral = besov_integral_seminorm(f, params)
    c = constants.besov_equivalence_constant(params.q, params.s)
    ratio = dyadic / integral if integral > 0 else 1.0
    semi = holder_seminorm(f, alpha)
    checks = {"seminorm_equivalence": 1.0 / c <= ratio <= c}
    dom_constant = None
    if params.s < alpha and params.T == 1.0 and f.grid.T == 1.0:
        dom_constant = constants.holder_domination_constant(params.s, alpha, params.q)
        checks["holder_domination"] = dyadic <= dom_constant * semi * (1.0 + 1e-12)
    report = BesovReport(
        params=params,
        alpha=alpha,
        grid_level=f.grid.L,
        lp_norm=lp_time_norm(f, params.p),
        dyadic_seminorm=dyadic,
        integral_seminorm=integral,
        seminorm_ratio=ratio,
        equivalence_constant=c,
        besov_norm=besov_norm(f, params),
        holder_norm=holder_norm(f, alpha),
        holder_seminorm=semi,
        holder_domination_constant=dom_constant,
        checks=checks,
    )
    _finish(report, strict)
    return report
