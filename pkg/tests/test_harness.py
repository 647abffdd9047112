import json
from pathlib import Path

import numpy as np
import pytest

from contagion.harness import (
    FAMILIES,
    TYPE3_TARGET_MEAN_DEGREE,
    TYPE_PARAMS,
    ExperimentSpec,
    capital_sweep,
    replication_seeds,
    resolve_workers,
    run_experiment,
    size_sweep,
    write_run_directory,
)

# Frozen fixture of the fifteen parameter rows (family x variant).
EXPECTED_TYPE_PARAMS = {
    ("GC", 0): (0.5625, 0.2500, 0.1875, 1.00, 3.00),
    ("S", 0): (0.3750, 0.2500, 0.3750, 2.00, 2.00),
    ("GD", 0): (0.1875, 0.2500, 0.5625, 3.00, 1.00),
    ("GC", 1): (0.1875, 0.7500, 0.0625, 1.00, 3.00),
    ("S", 1): (0.1250, 0.7500, 0.1250, 2.00, 2.00),
    ("GD", 1): (0.0625, 0.7500, 0.1875, 3.00, 1.00),
    ("GC", 2): (0.1875, 0.7500, 0.0625, 25.00, 75.00),
    ("S", 2): (0.1250, 0.7500, 0.1250, 50.00, 50.00),
    ("GD", 2): (0.0625, 0.7500, 0.1875, 75.00, 25.00),
    ("GC", 3): (0.5625, 0.2500, 0.1875, 1.00, 3.00),
    ("S", 3): (0.3750, 0.2500, 0.3750, 2.00, 2.00),
    ("GD", 3): (0.1875, 0.2500, 0.5625, 3.00, 1.00),
    ("GC", 4): (0.5625, 0.2500, 0.1875, 10.00, 30.00),
    ("S", 4): (0.3750, 0.2500, 0.3750, 20.00, 20.00),
    ("GD", 4): (0.1875, 0.2500, 0.5625, 30.00, 10.00),
}


class TestParameterTable:
    def test_rows_match_frozen_fixture(self):
        assert set(TYPE_PARAMS) == set(EXPECTED_TYPE_PARAMS)
        for key, row in EXPECTED_TYPE_PARAMS.items():
            assert TYPE_PARAMS[key] == pytest.approx(row, abs=1e-12), key

    def test_rows_are_valid_probability_mixes(self):
        for (family, variant), (a, b, g, din, dout) in TYPE_PARAMS.items():
            assert a + b + g == pytest.approx(1.0, abs=1e-12)
            assert family in FAMILIES and 0 <= variant <= 4


class TestSpecValidation:
    def test_json_round_trip(self, tmp_path):
        spec = ExperimentSpec("GD", 1, 500, 4, 0.05, 0.01, 2.0, 123)
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec.to_dict()))
        assert ExperimentSpec.from_json(path) == spec

    @pytest.mark.parametrize(
        "kwargs,match",
        [
            ({"network_family": "XX"}, "network_family"),
            ({"type_variant": 7}, "type_variant"),
            ({"n_nodes": 1}, "n_nodes"),
            ({"replications": 0}, "replications"),
            ({"lambda_min": 0.0}, "lambda_min"),
        ],
    )
    def test_invalid_specs(self, kwargs, match):
        base = dict(
            network_family="GC", type_variant=0, n_nodes=100,
            replications=1, master_seed=0,
        )
        base.update(kwargs)
        with pytest.raises(ValueError, match=match):
            ExperimentSpec(**base)


class TestSeedDerivation:
    def test_deterministic_and_distinct(self):
        a = replication_seeds(7, 0)
        b = replication_seeds(7, 0)
        c = replication_seeds(7, 1)
        d = replication_seeds(8, 0)
        assert a == b
        assert a != c and a != d
        assert len(set(a)) == 3

    def test_schedule_independent(self):
        # Seeds for replication 5 do not depend on whether 0..4 ran first.
        direct = replication_seeds(99, 5)
        after_others = [replication_seeds(99, r) for r in range(6)][5]
        assert direct == after_others


class TestRunExperiment:
    def test_small_experiment_shape(self):
        report = run_experiment(
            ExperimentSpec("S", 0, 120, 2, master_seed=5), workers=1
        )
        assert len(report.records) == 2
        assert report.records[0].summary.n == 120
        assert report.ranking_di is not None
        assert set(report.means) == set(report.stds)
        assert report.means["dc_aggregate"] >= 0.0

    def test_single_replication_has_no_spread(self):
        report = run_experiment(
            ExperimentSpec("S", 0, 100, 1, master_seed=5), workers=1
        )
        assert np.isnan(report.stds["di_aggregate"])
        assert report.ranking_di is None
        assert any("single replication" in w for w in report.warnings)

    def test_tiny_network_is_flagged(self):
        report = run_experiment(
            ExperimentSpec("S", 0, 2, 1, master_seed=5), workers=1
        )
        assert any("below minimum meaningful size" in w for w in report.warnings)

    def test_type3_hits_target_density(self):
        report = run_experiment(
            ExperimentSpec("GD", 3, 300, 2, master_seed=5), workers=1
        )
        assert report.means["mean_degree"] == pytest.approx(
            TYPE3_TARGET_MEAN_DEGREE, abs=2.0 / 300 + 1e-9
        )
        baseline = run_experiment(
            ExperimentSpec("GD", 0, 300, 2, master_seed=5), workers=1
        )
        assert report.means["gini_total"] < baseline.means["gini_total"]

    def test_reproducible_run_directories(self, tmp_path):
        spec = ExperimentSpec("GC", 0, 100, 2, master_seed=21)
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        write_run_directory(run_experiment(spec, workers=1), dir_a)
        write_run_directory(run_experiment(spec, workers=1), dir_b)
        for name in sorted(p.name for p in dir_a.glob("*.csv")):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_worker_count_does_not_change_results(self, tmp_path):
        spec = ExperimentSpec("GC", 0, 80, 2, master_seed=22)
        serial = tmp_path / "serial"
        pooled = tmp_path / "pooled"
        write_run_directory(run_experiment(spec, workers=1), serial)
        write_run_directory(run_experiment(spec, workers=2), pooled)
        csvs = sorted(p.name for p in serial.glob("*.csv"))
        assert csvs
        for name in csvs:
            assert (serial / name).read_bytes() == (pooled / name).read_bytes()


class TestRunDirectory:
    def test_artifact_set(self, tmp_path):
        spec = ExperimentSpec("S", 0, 90, 2, master_seed=13)
        report = run_experiment(spec, workers=1)
        out = write_run_directory(report, tmp_path / "run")
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "balances_0.csv", "balances_1.csv",
            "edges_0.csv", "edges_1.csv",
            "ranking_dc.csv", "ranking_di.csv",
            "report.json", "summary.csv",
        ]
        summary_lines = (out / "summary.csv").read_text().splitlines()
        assert summary_lines[0].startswith("rep,di_aggregate,dc_aggregate")
        assert len(summary_lines) == 3
        ranking = (out / "ranking_di.csv").read_text().splitlines()
        assert ranking[0] == "position,mean,std,cv"
        assert len(ranking) == 1 + 90
        payload = json.loads((out / "report.json").read_text())
        assert payload["spec"]["network_family"] == "S"
        assert "pearson_f_dc" in payload["correlation_means"]


class TestSweeps:
    def test_size_sweep_rows_and_flags(self):
        spec = ExperimentSpec("S", 0, 100, 1, master_seed=9)
        result = size_sweep(spec, [2, 100], workers=1)
        assert [row.value for row in result.rows] == [2.0, 100.0]
        assert result.rows[0].flag == "below_min_meaningful_size"
        assert result.rows[1].flag == ""

    def test_size_sweep_replication_override(self):
        spec = ExperimentSpec("S", 0, 100, 2, master_seed=9)
        result = size_sweep(
            spec, [100, 120], workers=1, replications_by_size={120: 1}
        )
        assert len(result.reports[100.0].records) == 2
        assert len(result.reports[120.0].records) == 1

    def test_capital_sweep_single_point_has_no_monotonicity(self):
        spec = ExperimentSpec("S", 0, 100, 1, master_seed=9)
        result = capital_sweep(spec, [0.05], workers=1)
        assert result.monotone_di is None
        assert result.relative_drop_dc is None

    def test_capital_sweep_two_points(self):
        spec = ExperimentSpec("GD", 0, 200, 2, master_seed=9)
        result = capital_sweep(spec, [0.01, 0.10], workers=1)
        assert result.monotone_di is not None
        ordered = sorted(result.rows, key=lambda r: r.value)
        assert ordered[0].dc_mean > ordered[1].dc_mean


class TestWorkerResolution:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv("CONTAGION_WORKERS", "7")
        assert resolve_workers(3) == 3

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("CONTAGION_WORKERS", "5")
        assert resolve_workers() == 5

    def test_invalid_env(self, monkeypatch):
        monkeypatch.setenv("CONTAGION_WORKERS", "0")
        with pytest.raises(ValueError, match="CONTAGION_WORKERS"):
            resolve_workers()

    def test_default_is_cpu_count(self, monkeypatch):
        monkeypatch.delenv("CONTAGION_WORKERS", raising=False)
        assert resolve_workers() >= 1
