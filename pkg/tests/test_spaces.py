from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from integrability_lab.errors import RejectedInputError
from integrability_lab.spaces import (
    HilbertVec,
    LpVector,
    check_exponent,
    dual_exponent,
    dual_pair,
    h_inner,
    lp_norm,
    lp_norm_rows,
)


class TestLpNorm:
    @pytest.mark.parametrize(
        "p, expected",
        [(1.0, 7.0), (2.0, 5.0), (3.0, (27.0 + 64.0) ** (1.0 / 3.0))],
    )
    def test_small_vectors(self, p, expected):
        assert lp_norm(LpVector([3.0, -4.0], p)) == pytest.approx(expected, rel=1e-14)

    def test_rows_match_scalar_norm(self):
        rng = np.random.default_rng(3)
        values = rng.standard_normal((5, 7))
        rows = lp_norm_rows(values, 1.5)
        for row, norm in zip(values, rows):
            assert norm == pytest.approx(lp_norm(LpVector(row, 1.5)), rel=1e-13)

    def test_rows_sup_norm(self):
        assert lp_norm_rows(np.array([[1.0, -3.0, 2.0]]), math.inf)[0] == 3.0

    def test_triangle_inequality(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a = LpVector(rng.standard_normal(6), 1.2)
            b = LpVector(rng.standard_normal(6), 1.2)
            assert lp_norm(a + b) <= lp_norm(a) + lp_norm(b) + 1e-12

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    def test_huge_entries_do_not_overflow(self, p):
        coords = np.array([3e300, -4e300, 1e300])
        expected = 1e300 * float(np.sum(np.abs([3.0, -4.0, 1.0]) ** p) ** (1.0 / p))
        assert lp_norm(LpVector(coords, p)) == pytest.approx(expected, rel=1e-13)
        assert lp_norm_rows(coords[None], p)[0] == pytest.approx(expected, rel=1e-13)

    def test_tiny_entries_do_not_underflow(self):
        assert lp_norm(LpVector([3e-200, 4e-200], 2.0)) == pytest.approx(5e-200, rel=1e-14)
        assert lp_norm(LpVector([0.0, 0.0], 1.5)) == 0.0
        assert lp_norm_rows(np.zeros((2, 3)), 1.5).tolist() == [0.0, 0.0]

    def test_nonincreasing_in_p(self):
        rng = np.random.default_rng(6)
        exponents = [1.0, 1.25, 1.5, 2.0, 3.0, 8.0]
        for _ in range(50):
            x = rng.standard_normal(rng.integers(1, 12)) * rng.uniform(0.01, 100.0)
            norms = [lp_norm(LpVector(x, p)) for p in exponents]
            assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))
            assert norms[-1] >= lp_norm_rows(x[None], math.inf)[0] * (1 - 1e-12)


class TestExponents:
    @pytest.mark.parametrize("p", [0.5, -1.0, math.nan])
    def test_rejects_below_one(self, p):
        with pytest.raises(RejectedInputError):
            check_exponent(p)

    def test_inf_needs_permission(self):
        with pytest.raises(RejectedInputError):
            check_exponent(math.inf)
        assert check_exponent(math.inf, allow_inf=True) == math.inf

    @pytest.mark.parametrize(
        "p, q", [(1.0, math.inf), (2.0, 2.0), (3.0, 1.5), (math.inf, 1.0), (1.5, 3.0)]
    )
    def test_dual_exponent(self, p, q):
        assert dual_exponent(p) == pytest.approx(q)


class TestDuality:
    def test_hoelder_inequality(self):
        rng = np.random.default_rng(5)
        p = 1.5
        for _ in range(20):
            v = LpVector(rng.standard_normal(8), p)
            w = rng.standard_normal(8)
            bound = lp_norm(v) * lp_norm_rows(w, dual_exponent(p))
            assert abs(dual_pair(v, w)) <= bound + 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(RejectedInputError):
            dual_pair(LpVector([1.0, 2.0]), [1.0, 2.0, 3.0])

    def test_h_inner(self):
        assert h_inner(HilbertVec([1.0, 2.0]), HilbertVec([3.0, -1.0])) == 1.0
        with pytest.raises(RejectedInputError):
            h_inner(HilbertVec([1.0]), HilbertVec([1.0, 2.0]))


class TestLpVector:
    def test_coordinates_are_read_only(self):
        v = LpVector([1.0, 2.0], 2.0)
        with pytest.raises(ValueError):
            v.coords[0] = 5.0
        with pytest.raises(dataclasses.FrozenInstanceError):
            v.p = 3.0

    def test_rejects_non_finite(self):
        with pytest.raises(RejectedInputError):
            LpVector([1.0, math.inf])

    def test_mixed_spaces(self):
        with pytest.raises(RejectedInputError):
            LpVector([1.0, 2.0], 2.0) + LpVector([1.0, 2.0], 1.5)

    def test_arithmetic(self):
        v = LpVector([1.0, 2.0], 1.5)
        w = LpVector([0.5, -1.0], 1.5)
        np.testing.assert_array_equal((v - w).coords, [0.5, 3.0])
        np.testing.assert_array_equal(v.scaled(2.0).coords, [2.0, 4.0])
