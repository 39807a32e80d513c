from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from integrability_lab import cli
from integrability_lab.dyadic import DyadicGrid, sample_function, to_csv
from integrability_lab.models import CheckedReport
from integrability_lab.streams import WORKERS_ENV


def _read_report(out, name):
    with open(out / f"{name}.json", encoding="utf-8") as fh:
        return json.load(fh)


class TestConfigResolution:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("p = 1.2\ngrid-level = 9\nN = 3\n", encoding="utf-8")
        args = cli.build_parser().parse_args(["counterexample", "--config", str(path), "--p", "1.4"])
        config = cli.resolve_config(args)
        assert config.p == 1.4
        assert config.grid_level == 9
        assert config.N == 3
        assert config.paths == 100_000

    def test_unknown_file_key_is_invalid(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("colour = red\n", encoding="utf-8")
        assert cli.main(["divergence", "--config", str(path), "--out", str(tmp_path)]) == cli.EXIT_INVALID

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["divergence", "--config", str(tmp_path / "nope.env")]) == cli.EXIT_INVALID

    def test_precondition_failure(self, tmp_path, capsys):
        assert cli.main(["equivalence", "--p", "1", "--out", str(tmp_path)]) == cli.EXIT_INVALID
        assert "UMD" in capsys.readouterr().err

    def test_flags_are_per_subcommand(self):
        with pytest.raises(SystemExit):
            cli.build_parser().parse_args(["divergence", "--paths", "10"])


class TestRuns:
    def test_divergence_writes_report_and_table(self, tmp_path):
        code = cli.main(
            ["divergence", "--p", "1.5", "--N-list", "2,4,8", "--holder-level", "6", "--out", str(tmp_path)]
        )
        assert code == cli.EXIT_OK
        report = _read_report(tmp_path, "divergence")
        assert report["config"]["N_list"] == [2, 4, 8]
        assert report["constants"]["version"] == cli.frozen_constants()["version"]
        assert report["result"]["slope"] == pytest.approx(1.0 / 1.5, abs=1e-12)
        with open(tmp_path / "divergence.csv", encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [row["N"] for row in rows] == ["2", "4", "8"]

    def test_besov_on_a_csv_function(self, tmp_path):
        source = to_csv(sample_function(np.sqrt, DyadicGrid(1.0, 6), 2.0), tmp_path / "f.csv")
        out = tmp_path / "out"
        assert cli.main(["besov", "--p", "2", "--input", str(source), "--out", str(out)]) == cli.EXIT_OK
        result = _read_report(out, "besov")["result"]
        assert result["alpha"] == 0.5
        assert result["params"]["s"] == 0.25

    def test_besov_on_psi(self, tmp_path):
        code = cli.main(["besov", "--N", "3", "--grid-level", "8", "--out", str(tmp_path)])
        assert code == cli.EXIT_OK

    def test_failed_check_exits_after_writing(self, tmp_path, monkeypatch):
        monkeypatch.setitem(cli.RUNNERS, "divergence", lambda c: CheckedReport(checks={"forced": False}))
        assert cli.main(["divergence", "--out", str(tmp_path)]) == cli.EXIT_ACCEPTANCE
        assert _read_report(tmp_path, "divergence")["result"]["checks"] == {"forced": False}

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("", encoding="utf-8")
        code = cli.main(["divergence", "--N-list", "2,4", "--holder-level", "4", "--out", str(blocker)])
        assert code == cli.EXIT_INVALID

    @pytest.mark.parametrize("workers", ["1", "2", "8"])
    def test_reports_identical_across_workers(self, tmp_path, monkeypatch, workers):
        argv = [
            "equivalence", "--p", "1.5", "--N", "2", "--d", "2", "--grid-level", "3",
            "--instances", "2", "--paths", "5000", "--seed", "5", "--out", str(tmp_path),
        ]
        assert cli.main(argv) == cli.EXIT_OK
        first = (tmp_path / "equivalence.json").read_bytes(), (tmp_path / "equivalence.csv").read_bytes()
        monkeypatch.setenv(WORKERS_ENV, workers)
        assert cli.main(argv) == cli.EXIT_OK
        second = (tmp_path / "equivalence.json").read_bytes(), (tmp_path / "equivalence.csv").read_bytes()
        assert first == second
