"""End-to-end cross-validated evaluation"""

import csv
import json

import pytest

from btcgp.config import Config
from btcgp.data.series import write_series_csv
from btcgp.models import REPORT_COLUMNS, ExperimentConfig, FitMode, MethodSpec, SyntheticSpec
from btcgp.output.audit import AuditLogger
from btcgp.sim.datasets import synthetic_dataset
from btcgp.sim.engine import run_experiment, summarise_sweep

pytestmark = pytest.mark.integration

UNIT = {"signal_var": 1.0, "lengthscale": 1.0, "noise_var": 0.1, "delta": 0.25}
CASE_A = {"signal_var": 5.0, "lengthscale": 1.0, "noise_var": 0.1, "delta": 0.2}


def smoke_config(tmp_path, **overrides):
    raw = dict(
        name="smoke",
        synthetic=SyntheticSpec(n=40, **UNIT),
        methods=[MethodSpec(kind="exact"), MethodSpec(kind="btc", k=[19, "theoretical"])],
        folds=2,
        seed=3,
        output_dir=str(tmp_path / "reports"),
        max_iters=30,
        workers=2,
    )
    raw.update(overrides)
    return ExperimentConfig(**raw)


@pytest.fixture
def settings(isolated_env):
    return Config()


def metrics(report):
    return [(r.fold, r.nmse, r.nlpd, r.nlpd_mean) for r in report.folds]


class TestRunExperiment:
    def test_reports_per_method(self, tmp_path, settings):
        reports = run_experiment(smoke_config(tmp_path), settings=settings)
        assert [report.method for report in reports] == ["exact", "btc-k19", "btc-theoretical"]
        for report in reports:
            assert report.n_folds == 2
            assert report.pd_valid_all
            assert all(record.nmse is not None and record.nlpd is not None for record in report.folds)

    def test_full_bandwidth_matches_exact(self, tmp_path, settings):
        # 20 training points per fold, so k = 19 is the full bandwidth
        exact, full, _ = run_experiment(smoke_config(tmp_path), settings=settings, write=False)
        for (fold, *expected), (_, *actual) in zip(metrics(exact), metrics(full)):
            assert actual == pytest.approx(expected, rel=1e-9)
        assert [r.k for r in full.folds] == [19, 19]
        assert [r.k for r in exact.folds] == [None, None]

    def test_theoretical_entry_records_resolved_bandwidth(self, tmp_path, settings):
        *_, theoretical = run_experiment(smoke_config(tmp_path), settings=settings, write=False)
        assert theoretical.k is None
        assert theoretical.k_policy == "theoretical"
        assert all(1 <= record.k <= 19 for record in theoretical.folds)

    def test_deterministic_metrics(self, tmp_path, settings):
        first = run_experiment(smoke_config(tmp_path), settings=settings, write=False)
        second = run_experiment(smoke_config(tmp_path, workers=1), settings=settings, write=False)
        assert [metrics(r) for r in first] == [metrics(r) for r in second]

    def test_writes_json_and_csv(self, tmp_path, settings):
        run_experiment(smoke_config(tmp_path), settings=settings)
        payload = json.loads((tmp_path / "reports" / "smoke_report.json").read_text())
        assert len(payload["results"]) == 6
        assert payload["meta"]["n"] == 40
        assert payload["meta"]["config"]["nlpd_variant"] == "noised"
        assert payload["meta"]["config"]["workers"] == 2
        with (tmp_path / "reports" / "smoke_report.csv").open() as fh:
            reader = csv.DictReader(fh)
            assert tuple(reader.fieldnames) == REPORT_COLUMNS
            assert len(list(reader)) == 6

    def test_indefinite_bandwidth_gives_invalid_rows(self, tmp_path, settings):
        config = smoke_config(
            tmp_path,
            synthetic=SyntheticSpec(n=60, **CASE_A),
            methods=[MethodSpec(kind="btc", k=[1])],
        )
        (report,) = run_experiment(config, settings=settings)
        assert report.pd_valid_folds == 0
        assert report.nmse_mean is None
        for record in report.folds:
            assert not record.pd_valid
            assert record.nmse is None and record.nlpd is None
            assert record.error.startswith("PdFailure")
            assert record.pd_violations >= 1

    def test_oversized_bandwidth_is_an_error_not_a_pd_loss(self, tmp_path, settings):
        config = smoke_config(tmp_path, methods=[MethodSpec(kind="btc", k=[30])])
        (report,) = run_experiment(config, settings=settings, write=False)
        assert report.pd_valid_all
        assert report.nmse_mean is None
        for record in report.folds:
            assert record.nmse is None and record.nlpd is None
            assert record.error.startswith("BandwidthOutOfRange")
            assert record.pd_violations == 0

    def test_unexpected_failure_stays_in_its_fold(self, tmp_path, settings, monkeypatch):
        import btcgp.sim.engine as engine

        real_fit = engine.fit

        def flaky_fit(data, config):
            if config.mode == FitMode.EXACT:
                raise RuntimeError("solver blew up")
            return real_fit(data, config)

        monkeypatch.setattr(engine, "fit", flaky_fit)
        exact, full, _ = run_experiment(smoke_config(tmp_path), settings=settings, write=False)
        for record in exact.folds:
            assert record.pd_valid
            assert record.nmse is None
            assert record.error == "RuntimeError: solver blew up"
        assert all(record.nmse is not None and record.error is None for record in full.folds)

    def test_folds_default_from_settings(self, tmp_path, isolated_env, monkeypatch):
        monkeypatch.setenv("BTCGP_DEFAULT_FOLDS", "4")
        config = ExperimentConfig(
            name="defaults",
            synthetic=SyntheticSpec(n=40, **UNIT),
            methods=[MethodSpec(kind="exact")],
            seed=3,
            max_iters=30,
            workers=1,
        )
        (report,) = run_experiment(config, settings=Config(), write=False)
        assert report.n_folds == 4
        assert [record.fold for record in report.folds] == [0, 1, 2, 3]

        explicit = smoke_config(tmp_path, methods=[MethodSpec(kind="exact")])
        (report,) = run_experiment(explicit, settings=Config(), write=False)
        assert report.n_folds == 2

    def test_csv_data_source(self, tmp_path, settings):
        data = synthetic_dataset(SyntheticSpec(n=30, **UNIT), seed=1)
        write_series_csv(data, tmp_path / "series.csv")
        config = smoke_config(tmp_path, synthetic=None, data_csv=str(tmp_path / "series.csv"),
                              methods=[MethodSpec(kind="exact")])
        (report,) = run_experiment(config, settings=settings, write=False)
        assert report.n_folds == 2
        assert report.pd_valid_all

    def test_audit_trail(self, tmp_path, settings):
        audit = AuditLogger(tmp_path / "audit")
        run_experiment(smoke_config(tmp_path), settings=settings, audit=audit)
        stats = audit.summarise()
        assert stats["event_counts"]["run_started"] == 1
        assert stats["total_runs"] == 1
        assert stats["total_folds"] == 6
        assert stats["invalid_folds"] == 0


def test_summarise_sweep(tmp_path, isolated_env):
    reports = run_experiment(smoke_config(tmp_path), settings=Config(), write=False)
    table = summarise_sweep(reports)
    assert list(table.columns) == ["method", "k", "nmse_mean", "nlpd_mean", "pd_valid_folds", "fit_s_mean"]
    assert list(table["method"]) == ["exact", "btc-k19", "btc-theoretical"]
    assert table.loc[1, "k"] == 19
