from __future__ import annotations

import os
import tempfile

import numpy as np
import pytest

# keep test runs out of the repository log file
os.environ.setdefault("INTEGRABILITY_LAB_LOG_DIR", tempfile.mkdtemp(prefix="integrability-lab-logs-"))

from integrability_lab.dyadic import DyadicGrid  # noqa: E402
from integrability_lab.stochint import deterministic_process, random_step_process  # noqa: E402
from integrability_lab.streams import WORKERS_ENV  # noqa: E402


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "1")


@pytest.fixture
def unit_grid():
    return DyadicGrid(1.0, 6)


@pytest.fixture
def step_process(unit_grid):
    """Deterministic process in l^2_3 driven by a 2-dimensional Brownian motion."""
    return random_step_process(unit_grid, N=3, d=2, p=2.0, seed=11, instance=0)


@pytest.fixture
def constant_process(unit_grid):
    x = np.array([1.0, -2.0, 0.5])
    values = np.tile(x[:, None], (unit_grid.n_cells, 1, 1))
    return deterministic_process(unit_grid, values, 2.0)
