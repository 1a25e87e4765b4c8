import os
import statistics

import pytest

from pecsim.experiments import (
    INVERTIBILITY_FIELDS,
    TABLE_FIELDS,
    ExperimentConfig,
    config_from_dict,
    metadata,
    run_fig3,
    run_fig4,
    run_invertibility_study,
)
from pecsim.serialization import write_records


SMALL = ExperimentConfig(layers=4, seeds=3, master_seed=7)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.n == 2 and cfg.layers == 20 and cfg.seeds == 20

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(rate=-0.1)
        with pytest.raises(ValueError):
            ExperimentConfig(seeds=0)
        with pytest.raises(ValueError):
            ExperimentConfig(method="sideways")
        with pytest.raises(ValueError):
            ExperimentConfig(fmt="xml")

    def test_from_dict(self):
        cfg = config_from_dict({"rate": 0.5, "seeds": 2, "shot_grid": [10, 100]})
        assert cfg.rate == 0.5 and cfg.shot_grid == (10, 100)
        with pytest.raises(ValueError):
            config_from_dict({"rates": 0.5})


class TestFig3:
    def test_row_count_and_sorting(self):
        rows = run_fig3(SMALL)
        assert len(rows) == 4 * 3 * 2 * 16
        keys = [(r["method"], r["layer"], r["seed"], r["pauli"]) for r in rows]
        assert keys == sorted(keys)

    def test_zero_rate_is_exact(self):
        rows = run_fig3(ExperimentConfig(rate=0.0, layers=3, seeds=2))
        for r in rows:
            assert r["bias"] < 1e-12
            assert r["cptp"]

    def test_chain_invariant_on_rows(self):
        for rate in (0.05, 0.5):
            rows = run_fig3(ExperimentConfig(rate=rate, layers=8, seeds=4, master_seed=42))
            for r in rows:
                assert r["bias"] <= r["p_distance"] + 1e-9
                assert r["bias"] <= r["bound_value"] + 1e-9
                if r["bound_name"] != "cptp_direct":
                    assert r["p_distance"] <= r["bound_value"] + 1e-9

    def test_determinism(self):
        a = write_records(run_fig3(SMALL), TABLE_FIELDS, None, "csv")
        b = write_records(run_fig3(SMALL), TABLE_FIELDS, None, "csv")
        assert a == b

    def test_determinism_under_worker_pool(self):
        baseline = run_fig3(SMALL)
        os.environ["PEC_SIM_THREADS"] = "2"
        try:
            pooled = run_fig3(SMALL)
        finally:
            del os.environ["PEC_SIM_THREADS"]
        assert baseline == pooled

    def test_single_method_config(self):
        rows = run_fig3(ExperimentConfig(layers=2, seeds=2, method="direct"))
        assert {r["method"] for r in rows} == {"direct"}


class TestFig4:
    def test_row_count(self):
        rows = run_fig4(SMALL)
        assert len(rows) == 4 * 3 * 2 * 16  # layers x seeds x regimes x paulis

    def test_zero_residual(self):
        rows = run_fig4(ExperimentConfig(residual=0.0, layers=2, seeds=1))
        assert all(r["bias"] < 1e-12 for r in rows)

    def test_under_regime_cptp_over_not(self):
        rows = run_fig4(ExperimentConfig(residual=0.05, layers=6, seeds=3, master_seed=1))
        for r in rows:
            if r["regime"] == "under":
                assert r["cptp"]
                assert abs(r["p_canceled"] - 1.0) < 1e-9
            else:
                assert r["p_canceled"] > 1.0 + 1e-9

    def test_chain_against_mitigation_bound(self):
        rows = run_fig4(ExperimentConfig(residual=0.05, layers=10, seeds=3, master_seed=2))
        for r in rows:
            assert r["bias"] <= r["p_distance"] + 1e-9
            assert r["p_distance"] <= r["bound_value"] + 1e-9

    def test_under_bound_value(self):
        import math

        rows = run_fig4(ExperimentConfig(residual=0.05, layers=10, seeds=1))
        under10 = [r for r in rows if r["regime"] == "under" and r["layer"] == 10]
        assert under10
        assert abs(under10[0]["bound_value"] - 2 * (1 - math.exp(-0.5))) < 1e-9


class TestInvertibility:
    def test_rows_and_fields(self):
        cfg = ExperimentConfig(seeds=3, shot_grid=(50, 500))
        rows = run_invertibility_study(cfg)
        assert len(rows) == 6
        assert set(rows[0]) == set(INVERTIBILITY_FIELDS)

    def test_threshold_shrinks_with_shots(self):
        cfg = ExperimentConfig(seeds=1, shot_grid=(100, 10000))
        rows = run_invertibility_study(cfg)
        assert rows[0]["threshold"] > rows[-1]["threshold"]

    def test_near_identity_map_always_passes_at_1e4(self):
        cfg = ExperimentConfig(rate=0.05, seeds=20, shot_grid=(10000,), master_seed=3)
        rows = run_invertibility_study(cfg)
        assert all(r["passes"] for r in rows)


class TestMetadata:
    def test_contents(self):
        meta = metadata(SMALL, "fig3")
        assert meta["experiment"] == "fig3"
        assert meta["config"]["seeds"] == 3
        assert "Dirichlet" in meta["rate_sampling"]


def test_fig3_median_ordering_direct_below_separate():
    rows = run_fig3(ExperimentConfig(rate=0.05, layers=6, seeds=8, master_seed=42))
    for layer in range(2, 7):
        med = {}
        for m in ("direct", "separate"):
            med[m] = statistics.median(
                r["bias"] for r in rows
                if r["method"] == m and r["layer"] == layer and r["pauli"] != "II"
            )
        assert med["direct"] < med["separate"]
