from __future__ import annotations

import numpy as np
import pytest

from integrability_lab.dyadic import (
    DyadicGrid,
    GridFunction,
    block_average,
    cond_exp,
    from_csv,
    g_op,
    g_op_array,
    haar,
    haar_cell_integrals,
    l2_norm,
    lp_time_norm,
    sample_function,
    schauder,
    schauder_active,
    schauder_l2sq,
    shift_array,
    to_csv,
    translate,
)
from integrability_lab.errors import RejectedInputError


def _haar_index(top):
    index = [(0, 0)]
    for n in range(top + 1):
        index.extend((n, k) for k in range(1, 2**n + 1))
    return index


class TestDyadicGrid:
    def test_geometry(self):
        grid = DyadicGrid(2.0, 3)
        assert grid.n_cells == 8
        assert grid.cell_width == 0.25
        assert grid.edges[-1] == 2.0
        assert grid.left_endpoints.size == 8
        assert grid.nodes.size == 9
        assert grid.refine() == DyadicGrid(2.0, 4)
        assert grid.cells_per_block(1) == 4

    @pytest.mark.parametrize("T, L", [(0.0, 3), (-1.0, 3), (1.0, -1), (1.0, 25), (1.0, 1.5)])
    def test_rejects_bad_grids(self, T, L):
        with pytest.raises(RejectedInputError):
            DyadicGrid(T, L)

    def test_level_finer_than_grid(self):
        with pytest.raises(RejectedInputError):
            DyadicGrid(1.0, 3).cells_per_block(4)


class TestGridFunction:
    def test_row_count_depends_on_kind(self):
        grid = DyadicGrid(1.0, 2)
        GridFunction(grid, np.zeros((4, 2)), 2.0, "step")
        GridFunction(grid, np.zeros((5, 2)), 2.0, "linear")
        with pytest.raises(RejectedInputError):
            GridFunction(grid, np.zeros((5, 2)), 2.0, "step")

    @pytest.mark.parametrize("bad", [np.full(4, np.nan), np.zeros((4, 2, 1))])
    def test_rejects_bad_values(self, bad):
        with pytest.raises(RejectedInputError):
            GridFunction(DyadicGrid(1.0, 2), bad)

    def test_rejects_unknown_kind(self):
        with pytest.raises(RejectedInputError):
            GridFunction(DyadicGrid(1.0, 2), np.zeros(4), kind="cubic")

    def test_as_step_drops_terminal_node(self):
        f = sample_function(lambda t: t, DyadicGrid(1.0, 2), kind="linear")
        np.testing.assert_array_equal(f.as_step().values[:, 0], [0.0, 0.25, 0.5, 0.75])

    def test_mixed_spaces_rejected(self):
        grid = DyadicGrid(1.0, 2)
        with pytest.raises(RejectedInputError):
            GridFunction(grid, np.zeros(4), 2.0) + GridFunction(grid, np.zeros(4), 1.5)


class TestHaarSchauder:
    def test_haar_orthonormal(self):
        grid = DyadicGrid(1.0, 6)
        mid = grid.left_endpoints + grid.cell_width / 2
        rows = np.stack([haar(n, k, mid) for n, k in _haar_index(3)])
        gram = grid.cell_width * rows @ rows.T
        np.testing.assert_allclose(gram, np.eye(len(rows)), atol=1e-12)

    @pytest.mark.parametrize("n, k", [(0, 0), (0, 1), (2, 3), (4, 16)])
    def test_schauder_is_primitive_of_haar(self, n, k):
        grid = DyadicGrid(1.0, 7)
        mid = grid.left_endpoints + grid.cell_width / 2
        primitive = np.concatenate([[0.0], np.cumsum(haar(n, k, mid) * grid.cell_width)])
        np.testing.assert_allclose(schauder(n, k, grid.edges), primitive, atol=1e-14)

    @pytest.mark.parametrize("n", [0, 1, 3, 6])
    def test_tent_height(self, n):
        k = 2**n
        assert schauder(n, k, (k - 0.5) * 2.0**-n) == pytest.approx(2.0 ** (-n / 2 - 1), rel=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
    def test_l2sq_closed_form(self, n):
        assert schauder_l2sq(n) == 2.0 ** (-2 * n - 2) / 3.0

    def test_active_tent_matches_schauder(self):
        t = np.random.default_rng(0).random(50)
        for n in range(4):
            k, value = schauder_active(n, t)
            direct = np.array([schauder(n, int(kk), tt) for kk, tt in zip(k, t)])
            np.testing.assert_allclose(value, direct, atol=1e-15)

    @pytest.mark.parametrize("n, k", [(1, 3), (2, 0), (-1, 1)])
    def test_rejects_bad_index(self, n, k):
        with pytest.raises(RejectedInputError):
            haar(n, k, 0.5)

    def test_cell_integrals_on_longer_horizon(self):
        grid = DyadicGrid(4.0, 5)
        assert haar_cell_integrals(0, 0, grid).sum() == pytest.approx(2.0)
        assert haar_cell_integrals(2, 3, grid).sum() == pytest.approx(0.0, abs=1e-15)


class TestConditionalExpectation:
    def test_halves_of_identity(self):
        grid = DyadicGrid(1.0, 4)
        f = sample_function(lambda t: t + grid.cell_width / 2, grid)
        np.testing.assert_allclose(cond_exp(f, 1).values[:, 0], [0.25] * 8 + [0.75] * 8)

    def test_tower_property(self):
        grid = DyadicGrid(1.0, 5)
        f = GridFunction(grid, np.random.default_rng(1).standard_normal((32, 3)))
        np.testing.assert_allclose(cond_exp(cond_exp(f, 3), 1).values, cond_exp(f, 1).values)

    def test_finest_level_is_identity(self):
        grid = DyadicGrid(1.0, 3)
        f = GridFunction(grid, np.arange(8.0))
        np.testing.assert_array_equal(cond_exp(f, 3).values, f.values)

    def test_block_average(self):
        out = block_average(np.array([1.0, 3.0, 5.0, 7.0]), 2)
        np.testing.assert_array_equal(out, [2.0, 2.0, 6.0, 6.0])


class TestApproximationOperator:
    def test_translate_zero_fills(self):
        f = GridFunction(DyadicGrid(1.0, 3), np.arange(1.0, 9.0))
        np.testing.assert_array_equal(translate(f, 2).values[:, 0], [0, 0, 1, 2, 3, 4, 5, 6])

    def test_shift_array_past_the_end(self):
        np.testing.assert_array_equal(shift_array(np.ones(4), 9), np.zeros(4))

    @pytest.mark.parametrize("n", range(7))
    def test_constant_residual_is_the_strip(self, n):
        grid = DyadicGrid(1.0, 6)
        x = np.array([1.0, -2.0, 0.5])
        f = GridFunction(grid, np.tile(x, (grid.n_cells, 1)), 2.0)
        residual = l2_norm(g_op(f, n) - f) ** 2
        assert residual == pytest.approx(2.0**-n * float(x @ x), rel=1e-12)

    def test_array_form_matches(self):
        grid = DyadicGrid(1.0, 5)
        values = np.random.default_rng(2).standard_normal((32, 2))
        f = GridFunction(grid, values)
        for n in range(6):
            np.testing.assert_array_equal(g_op_array(values, 5, n), g_op(f, n).values)

    def test_contraction_in_lp(self):
        grid = DyadicGrid(1.0, 6)
        f = GridFunction(grid, np.random.default_rng(3).standard_normal((64, 4)), 1.5)
        for n in range(7):
            assert lp_time_norm(g_op(f, n), 1.5) <= lp_time_norm(f, 1.5) + 1e-12


class TestCsv:
    @pytest.mark.parametrize("kind", ["step", "linear"])
    def test_written_function_reads_back(self, tmp_path, kind):
        grid = DyadicGrid(2.0, 3)
        f = sample_function(lambda t: np.stack([np.sin(t), t**2], axis=1), grid, 1.5, kind)
        g = from_csv(to_csv(f, tmp_path / "f.csv"), 1.5)
        assert g.grid == grid
        assert g.kind == kind
        np.testing.assert_array_equal(g.values, f.values)

    @pytest.mark.parametrize("kind", ["step", "linear"])
    def test_single_cell_keeps_its_horizon(self, tmp_path, kind):
        f = GridFunction(DyadicGrid(3.0, 0), [[2.0, -1.0]] + ([[0.5, 4.0]] if kind == "linear" else []), 2.0, kind)
        g = from_csv(to_csv(f, tmp_path / "one.csv"))
        assert g.grid == DyadicGrid(3.0, 0)
        assert (tmp_path / "one.csv").read_text(encoding="utf-8").startswith("# T=3.0\n")

    def test_file_without_horizon_line_infers_it(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("t_left,x1\n0.0,1\n0.5,2\n", encoding="utf-8")
        assert from_csv(path).grid == DyadicGrid(1.0, 1)

    def test_rejects_horizon_that_contradicts_the_times(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# T=2.0\nt_left,x1\n0.0,1\n0.5,2\n", encoding="utf-8")
        with pytest.raises(RejectedInputError, match="declares"):
            from_csv(path)

    def test_rejects_non_dyadic_length(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t_left,x1\n0.0,1\n0.3,2\n0.6,3\n", encoding="utf-8")
        with pytest.raises(RejectedInputError):
            from_csv(path)

    def test_rejects_unknown_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,x1\n0.0,1\n0.5,2\n", encoding="utf-8")
        with pytest.raises(RejectedInputError):
            from_csv(path)
