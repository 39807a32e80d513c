"""
Finite sections of the representing operator and gamma-radonifying norms.

A deterministic process Phi on [0, T] represents the operator
R f = int_0^T Phi(t) f(t) dt from L^2(0, T; R^d) into l^p_N. Its section
on the Haar system up to level m (plus the constant function) times the
standard basis of R^d is a GammaOperator: column b*d + i is R(g_b x h_i).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from .dyadic import haar_cell_integrals
from .errors import RejectedInputError
from .models import DominationReport, MonteCarloEstimate
from .spaces import check_exponent, dual_exponent, lp_norm_rows
from .stochint import SampledProcess
from .streams import map_batches, philox_generator, standard_normal_rows

logger = logging.getLogger(__name__)

SAMPLE_BATCH = 1024
MAX_RADEMACHER_TERMS = 12


def gaussian_abs_moment(p: float) -> float:
    """m_p = (E|g|^p)^(1/p) for a standard Gaussian g."""
    p = float(p)
    if not 0.0 < p < math.inf:
        raise RejectedInputError(f"moment exponent must be positive, got {p}")
    log_moment = 0.5 * p * math.log(2.0) + special.gammaln((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)
    return math.exp(log_moment / p)


def haar_basis_size(m: int) -> int:
    """Number of functions g_00 and g_nk, n = 0..m."""
    if m < 0:
        raise RejectedInputError(f"basis level must be non-negative, got {m}")
    return 2 ** (m + 1)


def haar_basis_index(m: int) -> list[tuple[int, int]]:
    index = [(0, 0)]
    for n in range(m + 1):
        index.extend((n, k) for k in range(1, 2**n + 1))
    return index


# ---------------------------------------------------------------------------
# Operator sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaOperator:
    entries: np.ndarray  # (N, columns)
    p: float = 2.0
    basis_level: int | None = None
    d: int = 1

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2:
            raise RejectedInputError(f"entries must be 2-D, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise RejectedInputError("operator entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "p", check_exponent(self.p, allow_inf=True))

    @property
    def N(self) -> int:
        return int(self.entries.shape[0])

    @property
    def columns(self) -> int:
        return int(self.entries.shape[1])

    def row_sigma(self) -> np.ndarray:
        return np.sqrt(np.sum(self.entries**2, axis=1))

    def _derived(self, entries: np.ndarray) -> GammaOperator:
        return GammaOperator(entries, self.p, self.basis_level, self.d)

    def scaled(self, c: float) -> GammaOperator:
        return self._derived(c * self.entries)

    def permuted(self, order: np.ndarray, signs: np.ndarray | None = None) -> GammaOperator:
        """Columns reordered (and optionally sign-flipped): another orthonormal system."""
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(self.columns)):
            raise RejectedInputError("order must be a permutation of the column indices")
        entries = self.entries[:, order]
        if signs is not None:
            entries = entries * np.asarray(signs, dtype=float)[None, :]
        return self._derived(entries)

    def with_zero_columns(self, count: int) -> GammaOperator:
        return self._derived(np.hstack([self.entries, np.zeros((self.N, count))]))

    def descriptor(self) -> str:
        level = "none" if self.basis_level is None else str(self.basis_level)
        return f"basis=haar;level={level};d={self.d};p={self.p!r}"

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([self.descriptor()] + [f"j{j + 1}" for j in range(self.columns)])
            for i, row in enumerate(self.entries):
                writer.writerow([f"x{i + 1}"] + [repr(float(x)) for x in row])
        return path

    @classmethod
    def from_csv(cls, path: str | Path) -> GammaOperator:
        path = Path(path)
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise RejectedInputError(f"{path}: empty operator file")
        fields = dict(part.split("=", 1) for part in rows[0][0].split(";") if "=" in part)
        try:
            level = None if fields.get("level", "none") == "none" else int(fields["level"])
            entries = np.array([[float(x) for x in row[1:]] for row in rows[1:]], dtype=float)
            return cls(entries, float(fields.get("p", "2.0")), level, int(fields.get("d", "1")))
        except (KeyError, ValueError) as exc:
            raise RejectedInputError(f"{path}: malformed operator file ({exc})") from exc


def represent_operator(phi: SampledProcess, basis_level: int) -> GammaOperator:
    """Exact Haar section of the operator represented by a deterministic step process."""
    if not phi.deterministic:
        raise RejectedInputError("represent_operator needs a deterministic process")
    if basis_level < 0 or basis_level > phi.grid.L:
        raise RejectedInputError(
            f"basis level {basis_level} must lie in [0, grid level {phi.grid.L}]"
        )
    weights = np.stack(
        [haar_cell_integrals(n, k, phi.grid) for n, k in haar_basis_index(basis_level)]
    )
    entries = np.einsum("bc,cnd->nbd", weights, phi.values).reshape(phi.N, -1)
    return GammaOperator(entries, phi.p, basis_level, phi.d)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def gamma_squared_samples(R: GammaOperator, samples: int, seed: int) -> np.ndarray:
    """||sum_j g_j R_j||^2 for each of `samples` Gaussian draws."""

    def batch(start: int, stop: int) -> np.ndarray:
        g = standard_normal_rows(seed, "gamma", start, stop - start, R.columns)
        return lp_norm_rows(g @ R.entries.T, R.p) ** 2

    return np.concatenate(map_batches(batch, samples, SAMPLE_BATCH))


def gamma_norm_mc(R: GammaOperator, samples: int, seed: int) -> MonteCarloEstimate:
    """Monte Carlo gamma-norm (E ||sum g_j R_j||^2)^(1/2) with propagated stderr."""
    if samples < 2:
        raise RejectedInputError(f"need at least 2 samples, got {samples}")
    return MonteCarloEstimate.from_samples(gamma_squared_samples(R, samples, seed)).root(2.0)


def gamma_pth_moment_exact(R: GammaOperator) -> float:
    """E ||G||_p^p = m_p^p sum_i row_sigma(i)^p."""
    if math.isinf(R.p):
        raise RejectedInputError("no coordinatewise moment formula for p = inf")
    return gaussian_abs_moment(R.p) ** R.p * math.fsum(R.row_sigma() ** R.p)


def gamma_norm_value(values: np.ndarray, p: float, samples: int = 4000, seed: int = 0) -> np.ndarray:
    """
    gamma(R^d, l^p_N) norms of a batch of operator values (K, N, d).

    Exact for d = 1 (the l^p norm of the single column) and for p = 2
    (Frobenius); otherwise Monte Carlo with the same Gaussians for every value.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 3:
        raise RejectedInputError(f"values must be (K, N, d), got shape {values.shape}")
    K, N, d = values.shape
    if d == 1:
        return lp_norm_rows(values[:, :, 0], p)
    if p == 2.0:
        return np.sqrt(np.sum(values**2, axis=(1, 2)))
    g = standard_normal_rows(seed, "gamma-value", 0, samples, d)
    chunk = max(1, 2**22 // max(1, samples * N))
    out = np.empty(K)
    for start in range(0, K, chunk):
        block = values[start : start + chunk]
        images = np.einsum("knd,sd->ksn", block, g)
        out[start : start + chunk] = np.sqrt(np.mean(lp_norm_rows(images, p) ** 2, axis=1))
    return out


def operator_square_norm(values: np.ndarray, p: float) -> np.ndarray:
    """
    ||(|A^* e_i|_H)_i||_{l^p} over the last two axes (N, d).

    Equal to the gamma-norm when p = 2 or d = 1, equivalent to it otherwise.
    """
    return lp_norm_rows(np.sqrt(np.sum(np.asarray(values) ** 2, axis=-1)), p)


# ---------------------------------------------------------------------------
# Domination
# ---------------------------------------------------------------------------

def _sample_functionals(N: int, p: float, count: int, seed: int) -> np.ndarray:
    """Coordinate functionals, then sign patterns and Gaussian directions, unit in l^{p'}."""
    rng = philox_generator(seed, "functional", 0)
    signs = rng.choice([-1.0, 1.0], size=(count // 2, N))
    gauss = rng.standard_normal((count - count // 2, N))
    random = np.vstack([signs, gauss])
    random /= lp_norm_rows(random, dual_exponent(p))[:, None]
    return np.vstack([np.eye(N), random])


def _quadratic_forms(values: np.ndarray, functionals: np.ndarray, cell_width: float) -> np.ndarray:
    """int ||Phi(t)^* x*||^2 dt for each functional row."""
    images = np.einsum("cnd,fn->fcd", values, functionals)
    return cell_width * np.sum(images**2, axis=(1, 2))


def domination_violation(
    phi: SampledProcess, psi: SampledProcess, functional_samples: int = 64, seed: int = 0
) -> tuple[int | None, np.ndarray]:
    """
    First functional x* with int ||Phi^* x*||^2 > int ||Psi^* x*||^2, or None.

    The N coordinate functionals come first, so a coordinate violation is
    reported by its coordinate index.
    """
    if not (phi.deterministic and psi.deterministic):
        raise RejectedInputError("domination needs deterministic processes")
    if phi.grid != psi.grid:
        raise RejectedInputError("processes live on different grids")
    if (phi.N, phi.d, phi.p) != (psi.N, psi.d, psi.p):
        raise RejectedInputError("processes have different target or noise spaces")
    functionals = _sample_functionals(phi.N, phi.p, functional_samples, seed)
    a_phi = _quadratic_forms(phi.values, functionals, phi.grid.cell_width)
    a_psi = _quadratic_forms(psi.values, functionals, psi.grid.cell_width)
    violations = np.flatnonzero(a_phi > a_psi * (1.0 + 1e-12))
    return (int(violations[0]) if violations.size else None), functionals


def domination_compare(
    phi: SampledProcess,
    psi: SampledProcess,
    functional_samples: int = 64,
    mc_samples: int = 4000,
    seed: int = 0,
) -> DominationReport:
    """
    Check int ||Phi^* x*||^2 <= int ||Psi^* x*||^2 on sampled functionals, then
    compare the gamma-norms of the represented operators.
    """
    first, functionals = domination_violation(phi, psi, functional_samples, seed)
    if first is not None:
        logger.info("Domination hypothesis fails at functional %d", first)
        return DominationReport(
            hypothesis_holds=False,
            functionals_checked=len(functionals),
            violation_index=first,
            violation_functional=functionals[first].tolist(),
        )

    level = max(phi.grid.L - 1, 0)
    r_phi = represent_operator(phi, level)
    r_psi = represent_operator(psi, level)
    est_phi = gamma_norm_mc(r_phi, mc_samples, seed)
    est_psi = gamma_norm_mc(r_psi, mc_samples, seed)
    joint = math.hypot(est_phi.stderr, est_psi.stderr)
    report = DominationReport(
        hypothesis_holds=True,
        functionals_checked=len(functionals),
        phi_norm=est_phi,
        psi_norm=est_psi,
        norm_ratio=est_phi.estimate / est_psi.estimate if est_psi.estimate > 0 else None,
        mc_holds=est_phi.estimate <= est_psi.estimate + 3.0 * joint,
    )
    if not math.isinf(phi.p):
        m_phi, m_psi = gamma_pth_moment_exact(r_phi), gamma_pth_moment_exact(r_psi)
        report.phi_exact_moment = m_phi
        report.psi_exact_moment = m_psi
        report.exact_holds = m_phi <= m_psi
    report.checks = {"mc_ordering": bool(report.mc_holds)}
    if report.exact_holds is not None:
        report.checks["exact_ordering"] = report.exact_holds
    return report


# ---------------------------------------------------------------------------
# Type constants
# ---------------------------------------------------------------------------

def rademacher_type_ratio(xs: np.ndarray, p: float) -> float:
    """(E ||sum r_k x_k||^2)^(1/2) / (sum ||x_k||^p)^(1/p), exact over all sign patterns."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    K = xs.shape[0]
    if K > MAX_RADEMACHER_TERMS:
        raise RejectedInputError(f"at most {MAX_RADEMACHER_TERMS} summands, got {K}")
    patterns = ((np.arange(2**K)[:, None] >> np.arange(K)) & 1) * 2.0 - 1.0
    sums = patterns @ xs
    numerator = math.sqrt(np.mean(lp_norm_rows(sums, p) ** 2))
    denominator = float(np.sum(lp_norm_rows(xs, p) ** p) ** (1.0 / p))
    return numerator / denominator if denominator > 0 else 0.0


def type_p_lower_bound(p: float, N: int, trials: int, seed: int) -> float:
    """
    Empirical lower bound for the type-p constant of l^p_N.

    The single-summand ratio is identically 1, so the bound starts there.
    Each trial draws 2..12 sparse Gaussian vectors.
    """
    p = check_exponent(p)
    if p > 2.0:
        raise RejectedInputError(f"type p needs p in [1, 2], got {p}")
    if N < 1 or trials < 1:
        raise RejectedInputError("N and trials must be positive")
    best = 1.0
    for trial in range(trials):
        rng = philox_generator(seed, "type", trial)
        K = int(rng.integers(2, MAX_RADEMACHER_TERMS + 1))
        xs = rng.standard_normal((K, N)) * (rng.random((K, N)) < 0.6)
        if not np.any(xs):
            continue
        best = max(best, rademacher_type_ratio(xs, p))
    logger.debug("type_%s lower bound for N=%d over %d trials: %.6f", p, N, trials, best)
    return best
