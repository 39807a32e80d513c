from __future__ import annotations

import numpy as np
import pytest

from integrability_lab.errors import RejectedInputError
from integrability_lab.streams import (
    WORKERS_ENV,
    batch_bounds,
    get_worker_count,
    map_batches,
    philox_generator,
    standard_normal_rows,
)


class TestStreams:
    def test_same_address_same_draws(self):
        a = philox_generator(7, "brownian", 3).standard_normal(10)
        b = philox_generator(7, "brownian", 3).standard_normal(10)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("other", [(8, "brownian", 3), (7, "gamma", 3), (7, "brownian", 4)])
    def test_addresses_are_separated(self, other):
        a = philox_generator(7, "brownian", 3).standard_normal(10)
        b = philox_generator(*other).standard_normal(10)
        assert not np.array_equal(a, b)

    def test_rows_are_prefix_stable_in_width(self):
        narrow = standard_normal_rows(1, "t", 0, 4, 3)
        wide = standard_normal_rows(1, "t", 0, 4, 9)
        np.testing.assert_array_equal(narrow, wide[:, :3])

    def test_rows_do_not_depend_on_the_window(self):
        full = standard_normal_rows(2, "t", 0, 10, 5)
        part = standard_normal_rows(2, "t", 6, 3, 5)
        np.testing.assert_array_equal(full[6:9], part)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True])
    def test_rejects_bad_seeds(self, seed):
        with pytest.raises(RejectedInputError):
            philox_generator(seed, "t", 0)

    def test_largest_seed_is_accepted(self):
        philox_generator(2**64 - 1, "t", 0).standard_normal(2)

    def test_rejects_negative_index(self):
        with pytest.raises(RejectedInputError):
            philox_generator(0, "t", -1)


class TestBatches:
    def test_bounds(self):
        assert batch_bounds(10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert batch_bounds(0, 4) == []
        with pytest.raises(RejectedInputError):
            batch_bounds(10, 0)

    @pytest.mark.parametrize("raw, expected", [("3", 3), ("0", 1), ("lots", 1)])
    def test_worker_count_from_environment(self, monkeypatch, raw, expected):
        monkeypatch.setenv(WORKERS_ENV, raw)
        assert get_worker_count() == expected

    def test_results_do_not_depend_on_workers(self, monkeypatch):
        def fn(start, stop):
            return standard_normal_rows(5, "t", start, stop - start, 4).sum(axis=1)

        serial = np.concatenate(map_batches(fn, 37, 5))
        monkeypatch.setenv(WORKERS_ENV, "4")
        threaded = np.concatenate(map_batches(fn, 37, 5))
        np.testing.assert_array_equal(serial, threaded)
