"""Shared parameter, configuration and report models."""

from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .streams import MAX_SEED


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

class BesovParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float = Field(gt=0.0, lt=1.0, description="Smoothness")
    p: float = Field(ge=1.0, description="Integrability exponent (may be inf)")
    q: float = Field(ge=1.0, description="Summability exponent (may be inf)")
    T: float = Field(default=1.0, gt=0.0, description="Horizon")


class PsiSpec(BaseModel):
    """The Schauder counterexample psi_N with values in l^p of dimension 2^(N+1)."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=0, description="Top Schauder level")
    p: float = Field(ge=1.0, lt=2.0, description="Target exponent")

    @property
    def dimension(self) -> int:
        return 2 ** (self.N + 1)

    @property
    def alpha(self) -> float:
        return 1.0 / self.p - 0.5


# ---------------------------------------------------------------------------
# Estimates
# ---------------------------------------------------------------------------

class MonteCarloEstimate(BaseModel):
    estimate: float = Field(description="Sample estimate")
    stderr: float = Field(ge=0.0, description="Standard error of the estimate")
    samples: int = Field(ge=1, description="Number of samples used")

    @classmethod
    def from_samples(cls, values: np.ndarray) -> MonteCarloEstimate:
        values = np.asarray(values, dtype=float)
        n = int(values.size)
        stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(estimate=float(np.mean(values)), stderr=stderr, samples=n)

    def root(self, r: float) -> MonteCarloEstimate:
        """Estimate of mean^(1/r), stderr by the delta method."""
        value = self.estimate ** (1.0 / r) if self.estimate > 0 else 0.0
        if self.estimate > 0:
            stderr = self.stderr * value / (r * self.estimate)
        else:
            stderr = 0.0
        return MonteCarloEstimate(estimate=value, stderr=stderr, samples=self.samples)


class MomentEstimate(BaseModel):
    q: float = Field(description="Moment exponent")
    paths: int
    seed: int
    grid_level: int
    terminal: MonteCarloEstimate = Field(description="E ||X(T)||^q")
    sup: MonteCarloEstimate | None = Field(
        default=None, description="E sup_t ||X(t)||^q over grid nodes"
    )


class PsiMoment(BaseModel):
    N: int
    p: float
    summed: float = Field(description="Level-by-level sum, authoritative")
    closed_form: float = Field(description="m_p^p (N+1) 12^(-p/2)")
    displayed: float = Field(description="Closed form with N in place of N+1")
    relative_discrepancy: float
    discrepancy_flag: bool = Field(description="Displayed form differs from the sum")


# ---------------------------------------------------------------------------
# Experiment reports
# ---------------------------------------------------------------------------

class CheckedReport(BaseModel):
    checks: dict[str, bool] = Field(default_factory=dict)

    def failed_checks(self) -> list[str]:
        return sorted(name for name, ok in self.checks.items() if not ok)

    def table_rows(self) -> list[dict[str, Any]]:
        return []


class CounterexampleReport(CheckedReport):
    p: float
    N: int
    grid_level: int
    paths: int
    seed: int
    exact: PsiMoment
    estimate: MonteCarloEstimate = Field(description="Monte Carlo E ||int psi dW||^p")
    z_score: float
    holder_level: int
    holder_norm: float
    holder_constant: float

    def table_rows(self) -> list[dict[str, Any]]:
        return [{
            "p": self.p,
            "N": self.N,
            "exact": self.exact.summed,
            "estimate": self.estimate.estimate,
            "stderr": self.estimate.stderr,
            "z_score": self.z_score,
            "holder_norm": self.holder_norm,
            "holder_constant": self.holder_constant,
        }]


class DivergenceRow(BaseModel):
    N: int
    moment: float = Field(description="(E ||int psi_N dW||^p)^(1/p)")
    holder_norm: float
    ratio: float


class DivergenceTable(CheckedReport):
    p: float
    holder_level: int
    holder_constant: float
    slope: float = Field(description="Least-squares slope of log moment against log(N+1)")
    n_star: int | None = Field(description="First N from which every ratio exceeds 1")
    rows: list[DivergenceRow]

    def table_rows(self) -> list[dict[str, Any]]:
        return [row.model_dump() for row in self.rows]


class DominationReport(CheckedReport):
    hypothesis_holds: bool
    functionals_checked: int
    violation_index: int | None = Field(
        default=None, description="Index of the first violating functional"
    )
    violation_functional: list[float] | None = None
    phi_norm: MonteCarloEstimate | None = None
    psi_norm: MonteCarloEstimate | None = None
    norm_ratio: float | None = None
    phi_exact_moment: float | None = None
    psi_exact_moment: float | None = None
    exact_holds: bool | None = None
    mc_holds: bool | None = None


class DominationCampaign(CheckedReport):
    p: float
    N: int
    d: int
    grid_level: int
    instances: list[DominationReport]

    def table_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "instance": i,
                "hypothesis_holds": r.hypothesis_holds,
                "phi_norm": r.phi_norm.estimate if r.phi_norm else None,
                "psi_norm": r.psi_norm.estimate if r.psi_norm else None,
                "phi_exact_moment": r.phi_exact_moment,
                "psi_exact_moment": r.psi_exact_moment,
                "exact_holds": r.exact_holds,
                "mc_holds": r.mc_holds,
            }
            for i, r in enumerate(self.instances)
        ]


class EmbeddingResult(BaseModel):
    left: MonteCarloEstimate = Field(description="||R_Phi||_gamma at the truncation level")
    left_refined: float | None = Field(
        default=None, description="||R_Phi||_gamma one Haar level deeper, same samples"
    )
    truncation_change: float | None = Field(
        default=None, description="|left_refined - left| / left_refined"
    )
    right: float
    lp_part: float
    block_sum: float
    block_terms: list[float]
    type_constant: float
    dyadic_seminorm: float | None = None
    block_ratio: float | None = None
    holds: bool


class EmbeddingCampaign(CheckedReport):
    p: float
    N: int
    grid_level: int
    n_max: int
    results: list[EmbeddingResult]

    def table_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "instance": i,
                "left": r.left.estimate,
                "left_stderr": r.left.stderr,
                "left_refined": r.left_refined,
                "truncation_change": r.truncation_change,
                "right": r.right,
                "block_sum": r.block_sum,
                "dyadic_seminorm": r.dyadic_seminorm,
                "block_ratio": r.block_ratio,
                "holds": r.holds,
            }
            for i, r in enumerate(self.results)
        ]


class ApproximationRow(BaseModel):
    n: int
    l2_error: float = Field(description="||G_n Phi - Phi||_{L^2(Omega x [0,T]; gamma)}")
    mc_sup_sq: MonteCarloEstimate = Field(
        description="E sup_t ||int (G_n Phi - Phi) dW||^2"
    )


class ApproximationTable(CheckedReport):
    grid_level: int
    paths: int
    seed: int
    rows: list[ApproximationRow]

    def table_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "n": r.n,
                "l2_error": r.l2_error,
                "mc_sup_sq": r.mc_sup_sq.estimate,
                "mc_stderr": r.mc_sup_sq.stderr,
            }
            for r in self.rows
        ]


class EquivalenceRow(BaseModel):
    instance: int
    ratio: float = Field(description="(E||X_T||^2)^(1/2) / (E S^2)^(1/2)")
    stderr: float
    mean_terminal_sq: float
    mean_square_function_sq: float


class EquivalenceStatistics(CheckedReport):
    p: float
    N: int
    d: int
    grid_level: int
    paths: int
    rows: list[EquivalenceRow]
    min_ratio: float
    max_ratio: float
    median_ratio: float
    spread: float = Field(description="max_ratio / min_ratio")
    refined_spread: float | None = Field(
        default=None, description="Spread at grid level + 1 on the same paths"
    )
    spread_change: float | None = None

    def table_rows(self) -> list[dict[str, Any]]:
        return [row.model_dump() for row in self.rows]


class BesovReport(CheckedReport):
    params: BesovParams
    alpha: float
    grid_level: int
    lp_norm: float
    dyadic_seminorm: float
    integral_seminorm: float
    seminorm_ratio: float
    equivalence_constant: float
    besov_norm: float
    holder_norm: float
    holder_seminorm: float
    holder_domination_constant: float | None

    def table_rows(self) -> list[dict[str, Any]]:
        return [{
            "s": self.params.s,
            "p": self.params.p,
            "q": self.params.q,
            "dyadic_seminorm": self.dyadic_seminorm,
            "integral_seminorm": self.integral_seminorm,
            "ratio": self.seminorm_ratio,
            "besov_norm": self.besov_norm,
            "holder_norm": self.holder_norm,
        }]


class DominatedConvergenceRow(BaseModel):
    n: int
    domination_holds: bool
    l2_error: float
    mc_sup_sq: MonteCarloEstimate


class DominatedConvergenceTable(CheckedReport):
    p: float
    grid_level: int
    paths: int
    rows: list[DominatedConvergenceRow]

    def table_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "n": r.n,
                "domination_holds": r.domination_holds,
                "l2_error": r.l2_error,
                "mc_sup_sq": r.mc_sup_sq.estimate,
                "mc_stderr": r.mc_sup_sq.stderr,
            }
            for r in self.rows
        ]


# ---------------------------------------------------------------------------
# CLI configuration
# ---------------------------------------------------------------------------

Subcommand = Literal[
    "counterexample",
    "divergence",
    "equivalence",
    "embedding",
    "domination",
    "approximation",
    "besov",
    "dominated-convergence",
]

_DEFAULTS: dict[str, dict[str, Any]] = {
    "counterexample": {"p": 1.5, "N": 4, "grid_level": 12, "paths": 100_000, "holder_level": 10},
    "divergence": {"p": 1.5, "N_list": [2, 4, 8, 16, 32], "holder_level": 10},
    "equivalence": {"p": 1.5, "N": 8, "d": 2, "grid_level": 8, "instances": 50, "paths": 4000},
    "embedding": {
        "p": 1.5, "N": 8, "grid_level": 10, "n_max": 9, "instances": 30, "samples": 4000,
    },
    "domination": {"p": 1.5, "N": 4, "d": 2, "grid_level": 8, "instances": 30, "samples": 4000},
    "approximation": {"p": 2.0, "N": 4, "d": 2, "grid_level": 14, "n_max": 10, "paths": 10_000},
    "besov": {"p": 1.5, "N": 4, "grid_level": 10},
    "dominated-convergence": {
        "p": 1.5, "N": 4, "d": 2, "grid_level": 10, "n_max": 8, "paths": 4000,
    },
}


class ExperimentConfig(BaseModel):
    """Resolved configuration of one CLI run: config file, then flags, then defaults."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    subcommand: Subcommand
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    out: str = Field(default="reports", description="Output directory")
    p: float | None = Field(default=None, ge=1.0)
    N: int | None = Field(default=None, ge=0)
    N_list: list[int] | None = None
    d: int | None = Field(default=None, ge=1)
    grid_level: int | None = Field(default=None, ge=0, le=20)
    paths: int | None = Field(default=None, ge=2)
    instances: int | None = Field(default=None, ge=1)
    n_max: int | None = Field(default=None, ge=0)
    samples: int | None = Field(default=None, ge=2)
    holder_level: int | None = Field(default=None, ge=1, le=16)
    input: str | None = Field(default=None, description="CSV grid function for besov")
    s: float | None = Field(default=None, gt=0.0, lt=1.0)
    q: float | None = Field(default=None, ge=1.0)
    alpha: float | None = Field(default=None, gt=0.0, le=1.0)
    refine: bool = False
    deterministic: bool = False

    @field_validator("N_list", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(part) for part in value.replace(" ", "").split(",") if part]
        return value

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        defaults = _DEFAULTS.get(data.get("subcommand", ""), {})
        merged = dict(defaults)
        merged.update({k: v for k, v in data.items() if v is not None})
        return merged

    @model_validator(mode="after")
    def _check_preconditions(self) -> ExperimentConfig:
        sub = self.subcommand
        p = self.p
        if p is not None and math.isnan(p):
            raise ValueError("p must be a number")
        if sub in ("counterexample", "divergence") and not 1.0 <= p < 2.0:
            raise ValueError(f"{sub} needs 1 <= p < 2, got p={p}")
        if sub == "counterexample" and self.grid_level < self.N + 2:
            raise ValueError("counterexample needs grid_level >= N + 2")
        if sub == "divergence":
            if not self.N_list or any(n < 0 for n in self.N_list):
                raise ValueError("divergence needs a non-empty list of N >= 0")
        if sub == "equivalence":
            if p <= 1.0:
                raise ValueError(
                    "p = 1: l^1 is not a UMD space, so the square-function "
                    "equivalence has no constant; use p in (1, inf)"
                )
            if math.isinf(p):
                raise ValueError("equivalence needs a finite p")
        if sub == "embedding":
            if not 1.0 <= p <= 2.0:
                raise ValueError(f"embedding needs 1 <= p <= 2, got p={p}")
            if self.n_max > self.grid_level - 1:
                raise ValueError("embedding needs n_max <= grid_level - 1")
        if sub in ("approximation", "dominated-convergence") and self.n_max > self.grid_level:
            raise ValueError(f"{sub} needs n_max <= grid_level")
        if sub == "besov" and self.input is None and (p >= 2.0 or self.grid_level < self.N + 2):
            raise ValueError("besov on psi_N needs 1 <= p < 2 and grid_level >= N + 2")
        return self
