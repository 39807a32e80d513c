"""
Modulus of continuity, Besov norms and Hoelder norms of grid functions.

Shifts are restricted to whole cells, so rho_p(f, .) is a step function of
the scale t and both the dyadic sum and the dt/t integral can be evaluated
exactly.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .dyadic import GridFunction
from .errors import RejectedInputError
from .models import BesovParams
from .spaces import check_exponent, lp_norm_rows

logger = logging.getLogger(__name__)


def shift_profile(f: GridFunction, p: float, max_shift: int | None = None) -> np.ndarray:
    """
    Per-shift integrals of ||f(r + j delta) - f(r)||^p over I[j delta].

    Entry j (0 <= j < cells) holds the integral for a shift of j cells, or
    the essential sup when p is infinite. Shift -j gives the same value.
    """
    p = check_exponent(p, allow_inf=True)
    f = f.as_step()
    cells = f.grid.n_cells
    last = cells - 1 if max_shift is None else min(max_shift, cells - 1)
    delta = f.grid.cell_width
    profile = np.zeros(last + 1)
    for j in range(1, last + 1):
        norms = lp_norm_rows(f.values[j:] - f.values[:-j], f.p)
        if math.isinf(p):
            profile[j] = norms.max()
        else:
            profile[j] = delta * np.sum(norms**p)
    return profile


def _running_modulus(profile: np.ndarray, p: float) -> np.ndarray:
    roots = profile if math.isinf(p) else profile ** (1.0 / p)
    return np.maximum.accumulate(roots)


def _shift_index(t: float, delta: float, cells: int) -> int:
    return min(int(math.floor(t / delta + 1e-9)), cells - 1)


def modulus(f: GridFunction, t: float, p: float) -> float:
    """rho_p(f, t) over grid-aligned shifts |h| <= t."""
    if not t >= 0.0:
        raise RejectedInputError(f"scale t must be non-negative, got {t}")
    f = f.as_step()
    j = _shift_index(t, f.grid.cell_width, f.grid.n_cells)
    if j == 0:
        return 0.0
    return float(_running_modulus(shift_profile(f, p, max_shift=j), p)[j])


def _lq(terms: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(terms.max()) if terms.size else 0.0
    return float(np.sum(terms**q) ** (1.0 / q))


def besov_dyadic_terms(f: GridFunction, params: BesovParams) -> np.ndarray:
    """(2^(ns) rho_p(f, 2^(-n)))_{n=0..L}."""
    f = f.as_step()
    grid = f.grid
    rho = _running_modulus(shift_profile(f, params.p), params.p)
    levels = np.arange(grid.L + 1)
    shifts = [_shift_index(2.0 ** -int(n), grid.cell_width, grid.n_cells) for n in levels]
    return 2.0 ** (levels * params.s) * rho[shifts]


def besov_dyadic_seminorm(
    f: GridFunction, params: BesovParams, levels: int | None = None
) -> float:
    """l^q norm of the dyadic terms; `levels` truncates the sum at n <= levels."""
    terms = besov_dyadic_terms(f, params)
    if levels is not None:
        terms = terms[: levels + 1]
    return _lq(terms, params.q)


def besov_integral_seminorm(f: GridFunction, params: BesovParams) -> float:
    """
    (int_0^1 (t^(-s) rho_p(f, t))^q dt/t)^(1/q), exact.

    rho_p is constant on [j delta, (j+1) delta) and vanishes below delta,
    so each piece integrates in closed form.
    """
    f = f.as_step()
    delta = f.grid.cell_width
    cells = f.grid.n_cells
    rho = _running_modulus(shift_profile(f, params.p), params.p)
    pieces = max(1, math.ceil(1.0 / delta - 1e-9))
    j = np.arange(1, pieces)
    if j.size == 0:
        return 0.0
    a = j * delta
    b = np.minimum((j + 1) * delta, 1.0)
    values = rho[np.minimum(j, cells - 1)]
    s, q = params.s, params.q
    if math.isinf(q):
        return float(np.max(values * a ** (-s)))
    weights = (a ** (-s * q) - b ** (-s * q)) / (s * q)
    return float(np.sum(values**q * weights) ** (1.0 / q))


def besov_norm(f: GridFunction, params: BesovParams) -> float:
    """||f||_{L^p} + dyadic seminorm."""
    f = f.as_step()
    pointwise = lp_norm_rows(f.values, f.p)
    if math.isinf(params.p):
        lp_part = float(pointwise.max())
    else:
        lp_part = float((f.grid.cell_width * np.sum(pointwise**params.p)) ** (1.0 / params.p))
    return lp_part + besov_dyadic_seminorm(f, params)


# ---------------------------------------------------------------------------
# Hoelder norms
# ---------------------------------------------------------------------------

def _sample_points(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    if f.kind == "linear":
        return f.grid.nodes, f.values
    return f.grid.left_endpoints, f.values


def holder_seminorm(f: GridFunction, alpha: float) -> float:
    """
    sup over sample pairs of ||f(t) - f(s)|| / (t - s)^alpha.

    For node samples of a piecewise-linear function the sup over all pairs
    in [0, T] is attained at nodes.
    """
    if not 0.0 < alpha <= 1.0:
        raise RejectedInputError(f"Hoelder exponent must lie in (0, 1], got {alpha}")
    times, values = _sample_points(f)
    delta = f.grid.cell_width
    best = 0.0
    for lag in range(1, len(times)):
        norms = lp_norm_rows(values[lag:] - values[:-lag], f.p)
        best = max(best, float(norms.max()) / (lag * delta) ** alpha)
    return best


def holder_norm(f: GridFunction, alpha: float) -> float:
    _, values = _sample_points(f)
    return float(lp_norm_rows(values, f.p).max()) + holder_seminorm(f, alpha)
