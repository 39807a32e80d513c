from __future__ import annotations

import math

import numpy as np
import pytest

from integrability_lab.besov import holder_norm
from integrability_lab.dyadic import DyadicGrid, GridFunction
from integrability_lab.errors import AcceptanceError, RejectedInputError
from integrability_lab.experiments import (
    _equivalence_row,
    approximation_experiment,
    besov_experiment,
    build_psi,
    counterexample_experiment,
    divergence_experiment,
    dominated_convergence_experiment,
    domination_campaign,
    embedding_bound,
    embedding_campaign,
    enforce,
    equivalence_experiment,
    psi_exact_moment,
    psi_grid_function,
    psi_holder_constant,
    psi_holder_norm,
    schauder_series_process,
)
from integrability_lab.models import BesovParams, CheckedReport, PsiSpec
from integrability_lab.stochint import SampledProcess, lipschitz_test_process, random_adapted_process


class TestPsi:
    @pytest.mark.parametrize("p", [1.0, 1.5])
    @pytest.mark.parametrize("N", [0, 2, 4, 9])
    def test_moment_sum_has_closed_form(self, p, N):
        moment = psi_exact_moment(PsiSpec(N=N, p=p))
        assert moment.summed == pytest.approx(moment.closed_form, rel=1e-12)
        assert moment.discrepancy_flag

    @pytest.mark.parametrize("p, N", [(1.0, 2), (1.5, 3), (1.2, 5)])
    def test_compressed_hoelder_norm_matches_dense(self, p, N):
        psi = PsiSpec(N=N, p=p)
        dense = holder_norm(psi_grid_function(psi, 7), psi.alpha)
        assert psi_holder_norm(psi, 7) == pytest.approx(dense, rel=1e-12)

    @pytest.mark.parametrize("p", [1.0, 1.2, 1.5])
    @pytest.mark.parametrize("N", [0, 1, 3, 8])
    def test_hoelder_bound(self, p, N):
        assert psi_holder_norm(PsiSpec(N=N, p=p), 10) <= psi_holder_constant(p)

    def test_values_live_on_the_right_columns(self):
        psi = build_psi(PsiSpec(N=1, p=1.5), 4)
        assert psi.values.shape == (16, 4, 1)
        # levels 0 and 1 are both active at t = 7/16; index 0 is never used
        assert np.count_nonzero(psi.values[7, :, 0]) == 2

    def test_hoelder_norm_grows_with_level(self):
        psi = PsiSpec(N=4, p=1.2)
        norms = [psi_holder_norm(psi, level) for level in (4, 6, 8, 10)]
        assert norms == sorted(norms)

    def test_coarse_grid_rejected(self):
        with pytest.raises(RejectedInputError):
            build_psi(PsiSpec(N=4, p=1.5), 5)

    def test_constant_needs_p_below_two(self):
        with pytest.raises(RejectedInputError):
            psi_holder_constant(2.0)


class TestCounterexample:
    def test_small_run(self):
        report = counterexample_experiment(1.5, 2, grid_level=8, paths=20_000, seed=1, holder_level=8, strict=False)
        rel = abs(report.estimate.estimate - report.exact.summed) / report.exact.summed
        assert rel < 0.03
        assert report.checks["holder_bound"]
        assert report.table_rows()[0]["N"] == 2

    def test_divergence_table(self):
        table = divergence_experiment(1.5, [2, 4, 8, 16, 32], holder_level=10)
        assert table.slope == pytest.approx(1.0 / 1.5, abs=1e-12)
        assert [row.N for row in table.rows] == [2, 4, 8, 16, 32]
        assert table.failed_checks() == []

    def test_divergence_needs_two_levels(self):
        with pytest.raises(RejectedInputError):
            divergence_experiment(1.5, [4, 4])


class TestEmbedding:
    def test_small_campaign(self):
        campaign = embedding_campaign(1.5, instances=3, N=4, grid_level=7, n_max=6, samples=2000, strict=False)
        assert campaign.checks["left_le_right"]
        assert campaign.checks["truncation_stable"]
        for result in campaign.results:
            assert result.lp_part > 0.0
            assert len(result.block_terms) == 7
            assert result.left_refined > 0.0
            expected = abs(result.left_refined - result.left.estimate) / result.left_refined
            assert result.truncation_change == pytest.approx(expected, rel=1e-12)
            assert result.truncation_change < 0.02
        row = campaign.table_rows()[0]
        assert row["left_refined"] == campaign.results[0].left_refined
        assert row["truncation_change"] == campaign.results[0].truncation_change

    def test_series_process_is_deterministic(self):
        grid = DyadicGrid(1.0, 6)
        a = schauder_series_process(grid, 3, 1.5, seed=0, instance=2)
        b = schauder_series_process(grid, 3, 1.5, seed=0, instance=2)
        assert a.deterministic
        np.testing.assert_array_equal(a.values, b.values)

    def test_rejects_random_process(self):
        with pytest.raises(RejectedInputError):
            embedding_bound(lipschitz_test_process(DyadicGrid(1.0, 5), p=1.5), 1.5, 3)

    @pytest.mark.parametrize("p, n_max", [(2.5, 3), (1.2, 3), (1.5, 7)])
    def test_rejects_bad_arguments(self, p, n_max):
        phi = schauder_series_process(DyadicGrid(1.0, 6), 3, 1.5, seed=0, instance=0)
        with pytest.raises(RejectedInputError):
            embedding_bound(phi, p, n_max)


class TestApproximation:
    def test_errors_decrease(self):
        phi = lipschitz_test_process(DyadicGrid(1.0, 8))
        table = approximation_experiment(phi, n_max=6, paths=500, seed=0, strict=False)
        assert [row.n for row in table.rows] == list(range(7))
        assert table.checks["l2_monotone"]
        assert table.checks["mc_monotone"]
        assert "l2_below_threshold" not in table.checks

    def test_rejects_level_beyond_grid(self):
        with pytest.raises(RejectedInputError):
            approximation_experiment(lipschitz_test_process(DyadicGrid(1.0, 4)), 5, 10, 0)

    def test_rejects_look_ahead_process(self):
        peeking = SampledProcess(DyadicGrid(1.0, 4), 1, 1, 2.0, evaluator=lambda inc: inc[..., None])
        with pytest.raises(RejectedInputError, match="future"):
            approximation_experiment(peeking, 2, 10, 0)


class TestEquivalence:
    def test_random_adapted_instances(self):
        stats = equivalence_experiment(1.5, 4, 2, instances=3, paths=500, seed=0, grid_level=5, strict=False)
        assert stats.checks["ratio_band"]
        assert stats.min_ratio <= stats.median_ratio <= stats.max_ratio
        assert stats.refined_spread is None

    def test_isometry_for_deterministic_p2(self):
        stats = equivalence_experiment(
            2.0, 4, 2, instances=2, paths=5000, seed=0, grid_level=5, deterministic=True, strict=False
        )
        for row in stats.rows:
            assert abs(row.ratio - 1.0) <= 5.0 * row.stderr

    @pytest.mark.parametrize("c", [0.01, 2.5, 300.0])
    def test_ratio_is_unchanged_by_scaling_an_instance(self, c):
        phi = random_adapted_process(DyadicGrid(1.0, 5), 4, 2, 1.5, seed=2, instance=1)
        base = _equivalence_row(phi, 0, paths=800, seed=6)
        scaled = _equivalence_row(phi.scaled(c), 0, paths=800, seed=6)
        assert scaled.ratio == pytest.approx(base.ratio, rel=1e-12)
        assert scaled.stderr == pytest.approx(base.stderr, rel=1e-9)
        assert scaled.mean_terminal_sq == pytest.approx(c**2 * base.mean_terminal_sq, rel=1e-12)

    @pytest.mark.parametrize("p", [1.0, math.inf])
    def test_rejects_non_umd_or_infinite_p(self, p):
        with pytest.raises(RejectedInputError):
            equivalence_experiment(p, 4, 2, instances=1, paths=10, seed=0)


class TestDomination:
    def test_small_campaign(self):
        campaign = domination_campaign(1.5, 4, 2, grid_level=5, instances=3, samples=1000, seed=0)
        assert campaign.failed_checks() == []
        assert len(campaign.instances) == 3

    def test_dominated_convergence(self):
        table = dominated_convergence_experiment(1.5, 4, 2, grid_level=6, n_max=6, paths=300, seed=0, strict=False)
        assert table.checks["domination"]
        assert table.checks["mc_below_threshold"]
        assert table.rows[-1].l2_error == 0.0


class TestBesovExperiment:
    def test_psi_satisfies_both_comparisons(self):
        psi = PsiSpec(N=3, p=1.5)
        f = GridFunction(DyadicGrid(1.0, 8), build_psi(psi, 8).values[:, :, 0], 1.5)
        params = BesovParams(s=psi.alpha / 2, p=1.5, q=1.5)
        report = besov_experiment(f, params, psi.alpha)
        assert set(report.checks) == {"seminorm_equivalence", "holder_domination"}
        assert report.besov_norm >= report.dyadic_seminorm


class TestEnforce:
    def test_names_failed_checks(self):
        with pytest.raises(AcceptanceError) as info:
            enforce(CheckedReport(checks={"b": False, "a": True, "c": False}))
        assert info.value.failed == ["b", "c"]

    def test_passing_report(self):
        enforce(CheckedReport(checks={"a": True}))


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("p, N", [(1.0, 2), (1.0, 4), (1.5, 2), (1.5, 4)])
    def test_counterexample_moment(self, p, N):
        counterexample_experiment(p, N, grid_level=12, paths=100_000, seed=0, holder_level=14)

    @pytest.mark.parametrize("p", [1.0, 1.2, 1.5])
    def test_hoelder_bound_at_level_14(self, p):
        bound = psi_holder_constant(p)
        for N in range(9):
            assert psi_holder_norm(PsiSpec(N=N, p=p), 14) <= bound

    def test_isometry_at_p2(self):
        equivalence_experiment(2.0, 8, 2, instances=10, paths=100_000, seed=0, deterministic=True)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_square_function_equivalence(self, p):
        equivalence_experiment(p, 8, 2, instances=50, paths=4000, seed=0, grid_level=8, refine=True)

    def test_domination_corpus(self):
        domination_campaign(1.5, 4, 2, grid_level=8, instances=30, samples=4000, seed=0)

    @pytest.mark.parametrize("p", [1.0, 1.5])
    def test_embedding_corpus(self, p):
        embedding_campaign(p, instances=30, N=8, grid_level=10, n_max=9, samples=4000, seed=0)

    def test_approximation_at_level_14(self):
        phi = lipschitz_test_process(DyadicGrid(1.0, 14))
        approximation_experiment(phi, n_max=10, paths=10_000, seed=0)
