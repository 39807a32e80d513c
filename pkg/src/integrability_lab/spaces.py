"""Finite-dimensional l^p_N spaces, their duals and the Hilbert space H = R^d."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RejectedInputError


def check_exponent(p: float, allow_inf: bool = False) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0 or (math.isinf(p) and not allow_inf):
        bound = "[1, inf]" if allow_inf else "[1, inf)"
        raise RejectedInputError(f"exponent p must lie in {bound}, got {p}")
    return p


def _frozen_coords(coords: np.ndarray | list[float]) -> np.ndarray:
    arr = np.array(coords, dtype=float)
    if arr.ndim != 1:
        raise RejectedInputError(f"coordinates must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise RejectedInputError("coordinates must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LpVector:
    coords: np.ndarray
    p: float = 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _frozen_coords(self.coords))
        object.__setattr__(self, "p", check_exponent(self.p))

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    def __add__(self, other: LpVector) -> LpVector:
        if other.dim != self.dim or other.p != self.p:
            raise RejectedInputError("cannot add vectors of different spaces")
        return LpVector(self.coords + other.coords, self.p)

    def __sub__(self, other: LpVector) -> LpVector:
        return self + other.scaled(-1.0)

    def scaled(self, c: float) -> LpVector:
        return LpVector(c * self.coords, self.p)


@dataclass(frozen=True)
class HilbertVec:
    coords: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _frozen_coords(self.coords))

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])


def lp_norm(v: LpVector) -> float:
    """(sum |x_i|^p)^(1/p), compensated summation, scaled by max |x_i| to avoid overflow."""
    a = np.abs(v.coords)
    top = float(a.max()) if a.size else 0.0
    if top == 0.0:
        return 0.0
    a = a / top
    if v.p == 1.0:
        return top * math.fsum(a)
    if v.p == 2.0:
        return top * math.sqrt(math.fsum(a * a))
    return top * math.fsum(a**v.p) ** (1.0 / v.p)


def lp_norm_rows(values: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    """Vectorised l^p norm along `axis`; p may be inf."""
    a = np.abs(np.asarray(values, dtype=float))
    if not a.shape[axis]:
        return np.zeros(np.delete(a.shape, axis))
    top = a.max(axis=axis, keepdims=True)
    if math.isinf(p):
        return np.squeeze(top, axis=axis)
    a = np.divide(a, top, out=np.zeros_like(a), where=top > 0.0)
    top = np.squeeze(top, axis=axis)
    if p == 1.0:
        return top * a.sum(axis=axis)
    if p == 2.0:
        return top * np.sqrt(np.sum(a * a, axis=axis))
    return top * np.sum(a**p, axis=axis) ** (1.0 / p)


def dual_exponent(p: float) -> float:
    p = check_exponent(p, allow_inf=True)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def dual_pair(v: LpVector, w: np.ndarray | list[float]) -> float:
    """<v, w> for w in the dual l^{p'}_N."""
    w = np.asarray(w, dtype=float)
    if w.shape != v.coords.shape:
        raise RejectedInputError(
            f"dual vector has shape {w.shape}, expected {v.coords.shape}"
        )
    return math.fsum(v.coords * w)


def h_inner(a: HilbertVec, b: HilbertVec) -> float:
    if a.dim != b.dim:
        raise RejectedInputError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return math.fsum(a.coords * b.coords)
