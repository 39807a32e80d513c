"""
Frozen numerical constants used by the acceptance checks.

Each constant is either an analytic bound or a calibrated value with a 2x
safety factor (see scripts/calibrate_constants.py). Reports embed
FROZEN_CONSTANTS_VERSION so a run can be tied to the constants it used.
"""

from __future__ import annotations

import math

from .errors import RejectedInputError

FROZEN_CONSTANTS_VERSION = "2026.10-1"

# Upper bound for the Rademacher type-p constant of l^p, lifted to L^2(Omega; l^p).
# Kahane-Khintchine gives <= sqrt(2); one more factor 2 of slack.
TYPE_CONSTANT = 2.0 * math.sqrt(2.0)

# Square-function equivalence ratios must sit in [1/C, C].
EQUIVALENCE_RATIO_BAND = 10.0
EQUIVALENCE_SPREAD_LIMIT = 10.0

# Block sum of the embedding bound against the dyadic Besov seminorm.
EMBEDDING_BLOCK_BAND = 8.0

# Relative change of the equivalence spread when the grid level is doubled.
SPREAD_STABILITY = 0.20

# Approximation and dominated-convergence columns.
APPROXIMATION_THRESHOLD = 0.05
APPROXIMATION_CHECK_LEVEL = 10
MONOTONE_TOLERANCE = 0.10

# Relative agreement of a truncated L^2 norm with its untruncated value.
TRUNCATION_TOLERANCE = 0.02

# Monte Carlo comparisons accept this many standard errors.
STDERR_MULTIPLIER = 3.0


def besov_equivalence_constant(q: float, s: float) -> float:
    """
    Constant c with 1/c <= dyadic / integral Besov seminorm <= c on dyadic grids.

    Sandwiching the modulus on each dyadic shell gives the ratio in
    [(ln 2)^(-1/q) 2^(-s), ((1 + 2^(q(1-s))) 2^(sq) / ln 2)^(1/q)]; the frozen
    value doubles the wider side.
    """
    if not 0.0 < s < 1.0:
        raise RejectedInputError(f"smoothness s must lie in (0, 1), got {s}")
    if q < 1.0:
        raise RejectedInputError(f"q must be >= 1, got {q}")
    if math.isinf(q):
        upper = 2.0**s
        lower = 1.0
    else:
        upper = ((1.0 + 2.0 ** (q * (1.0 - s))) * 2.0 ** (s * q) / math.log(2.0)) ** (1.0 / q)
        lower = math.log(2.0) ** (-1.0 / q) * 2.0 ** (-s)
    return 2.0 * max(upper, 1.0 / lower)


def holder_domination_constant(s: float, alpha: float, q: float) -> float:
    """Bound of the dyadic B^s_{p,q} seminorm by the C^alpha seminorm on [0, 1], s < alpha."""
    if not 0.0 < s < alpha <= 1.0:
        raise RejectedInputError(f"need 0 < s < alpha <= 1, got s={s}, alpha={alpha}")
    if math.isinf(q):
        return 1.0
    return (1.0 - 2.0 ** (-(alpha - s) * q)) ** (-1.0 / q)


def frozen_constants() -> dict[str, float | str]:
    return {
        "version": FROZEN_CONSTANTS_VERSION,
        "type_constant": TYPE_CONSTANT,
        "equivalence_ratio_band": EQUIVALENCE_RATIO_BAND,
        "equivalence_spread_limit": EQUIVALENCE_SPREAD_LIMIT,
        "embedding_block_band": EMBEDDING_BLOCK_BAND,
        "spread_stability": SPREAD_STABILITY,
        "approximation_threshold": APPROXIMATION_THRESHOLD,
        "monotone_tolerance": MONOTONE_TOLERANCE,
        "truncation_tolerance": TRUNCATION_TOLERANCE,
        "stderr_multiplier": STDERR_MULTIPLIER,
    }
