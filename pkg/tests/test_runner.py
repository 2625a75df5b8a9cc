import csv
import json
import logging

import numpy as np
import pytest

import drbench.modelselect as ms
from drbench import cli
from drbench.classifiers import CLASSIFIERS
from drbench.dataset import load_csv, make_folds
from drbench.dimreduce import fit_select
from drbench.modelselect import PipelineConfig, ReducerConfig, cross_validate
from drbench.runner import (CONFIG_FILE, FIGURE_DIR, REPORT_COLUMNS, REPORT_FILE,
                            ExperimentConfig, EvaluationReport, ReportRow, export_figure_data,
                            informative_columns, load_config, make_synthetic,
                            read_report_table, run_experiment)

FIXED = {"knn": {"k": 5}, "gnb": {}, "lda": {}, "ridge": {"alpha": 1.0},
         "svm_linear": {"C": 1.0}, "svm_rbf": {"gamma": 0.01, "C": 1.0}, "rf": {"n_trees": 16}}

# cheap sweep used by several tests
SMALL = dict(s_values=(2, 4), reducers=("anova", "pca"), classifiers=("gnb", "ridge"),
             objectives=("accuracy", "auc"))


def test_synthetic_shape_and_balance():
    data = make_synthetic()
    assert (data.n, data.d) == (150, 184)
    assert np.bincount(data.labels).tolist() == [75, 75]
    assert informative_columns(data).size == 10
    again = make_synthetic()
    np.testing.assert_array_equal(again.features, data.features)
    assert again.feature_names == data.feature_names
    with pytest.raises(ValueError):
        make_synthetic(d=5, n_informative=6)


def test_synthetic_strong_signal_recovered_by_anova():
    for seed in range(3):
        data = make_synthetic(class_separation=4.0, seed=seed)
        top = set(fit_select(data, 10).selected.tolist())
        assert len(top & set(informative_columns(data).tolist())) >= 9


def test_synthetic_no_signal_means_chance():
    data = make_synthetic(class_separation=0.0, seed=3)
    plan = make_folds(data.labels, 5, seed=3)
    for name in CLASSIFIERS:
        for rc in (ReducerConfig("anova", 12), ReducerConfig("none")):
            acc = cross_validate(data, plan, PipelineConfig(rc, name, FIXED[name]))
            auc = cross_validate(data, plan, PipelineConfig(rc, name, FIXED[name], "auc"))
            assert abs(acc.mean - 0.5) <= 0.1, (name, rc.method, acc.mean)
            assert auc.mean <= 0.65, (name, rc.method, auc.mean)


def test_run_experiment_rows_and_order(tmp_path):
    data = make_synthetic(n=40, d=8, n_informative=3, class_separation=1.5, seed=1)
    report = run_experiment(ExperimentConfig(**SMALL, out=str(tmp_path)), data)
    assert len(report.rows) == 2 * 2 * 2 * 2
    keys = [r.sort_key() for r in report.rows]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert not report.failures
    for r in report.rows:
        assert r.mean == np.mean(r.fold_scores)
    table = read_report_table(tmp_path / REPORT_FILE)
    assert list(table[0]) == REPORT_COLUMNS
    meta = json.loads((tmp_path / CONFIG_FILE).read_text())
    assert meta["grid_sizes"]["ridge"] == {"alpha": 3, "points": 3}
    assert meta["config"]["s_values"] == [2, 4]


def test_rejects_s_above_d():
    data = make_synthetic(n=40, d=8, n_informative=3, seed=1)
    with pytest.raises(ValueError, match="exceed"):
        run_experiment(ExperimentConfig(**{**SMALL, "s_values": (4, 9)}), data)


def test_config_validation():
    with pytest.raises(ValueError, match="unknown classifier"):
        ExperimentConfig(classifiers=("nope",))
    with pytest.raises(ValueError, match="at least one"):
        ExperimentConfig(objectives=())


def test_failure_becomes_error_row(monkeypatch):
    real = ms.fit_classifier

    def flaky(name, *a, **k):
        if name == "ridge":
            raise FloatingPointError("bad")
        return real(name, *a, **k)

    monkeypatch.setattr(ms, "fit_classifier", flaky)
    data = make_synthetic(n=40, d=8, n_informative=3, seed=2)
    report = run_experiment(ExperimentConfig(**SMALL), data)
    assert len(report.rows) == 16
    bad = report.failures
    assert len(bad) == 8 and all(r.classifier == "ridge" for r in bad)
    assert all(r.mean is None and "failed" in r.error for r in bad)


def test_figure_data_single_row(tmp_path):
    row = ReportRow("anova", 3, "gnb", "auc", 3, (0.5, 0.6, 0.7, 0.8, 0.9), 0.7)
    report = EvaluationReport([row], ExperimentConfig())
    paths = export_figure_data(report, tmp_path)
    assert [p.name for p in paths] == ["anova_auc.csv"]
    with paths[0].open() as fh:
        rows = list(csv.reader(fh))
    assert rows == [["s", "gnb"], ["3", repr(0.7)]]


def test_figure_cells_equal_report_means(tmp_path):
    data = make_synthetic(n=40, d=8, n_informative=3, class_separation=1.5, seed=4)
    report = run_experiment(ExperimentConfig(**SMALL, out=str(tmp_path)), data)
    files = sorted((tmp_path / FIGURE_DIR).glob("*.csv"))
    assert [f.name for f in files] == ["anova_accuracy.csv", "anova_auc.csv",
                                       "pca_accuracy.csv", "pca_auc.csv"]
    for f in files:
        reducer, objective = f.stem.split("_")
        with f.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["s", "gnb", "ridge"]
        assert len(rows) == 3
        for line in rows[1:]:
            for clf, cell in zip(rows[0][1:], line[1:]):
                match = [r for r in report.rows if (r.reducer, r.objective, r.classifier, r.s)
                         == (reducer, objective, clf, int(line[0]))]
                assert float(cell) == match[0].mean


def test_config_echo_round_trip(tmp_path):
    data = make_synthetic(n=40, d=8, n_informative=3, class_separation=1.5, seed=5)
    csv_path = tmp_path / "data.csv"
    from drbench.dataset import write_csv
    write_csv(data, csv_path)
    first = tmp_path / "a"
    run_experiment(ExperimentConfig(data=str(csv_path), out=str(first), **SMALL))
    cfg = load_config(first / CONFIG_FILE)
    cfg.out = str(tmp_path / "b")
    run_experiment(cfg)
    assert (first / REPORT_FILE).read_bytes() == (tmp_path / "b" / REPORT_FILE).read_bytes()


def test_cli_synth_run_figures(tmp_path, caplog):
    data_path = tmp_path / "synth.csv"
    assert cli.main(["synth", "--n", "40", "--d", "8", "--informative", "3",
                     "--separation", "1.5", "--seed", "1", "--out", str(data_path)]) == 0
    loaded = load_csv(data_path, "label")
    assert (loaded.n, loaded.d) == (40, 8)
    out = tmp_path / "res"
    with caplog.at_level(logging.INFO):
        code = cli.main(["-v", "run", "--data", str(data_path), "--s-values", "2,4",
                         "--classifiers", "gnb,knn", "--objectives", "auc", "--out", str(out)])
    assert code == 0
    assert "grid knn: {'k': 7} -> 7 evaluations per combination" in caplog.text
    assert len(read_report_table(out / REPORT_FILE)) == 2 * 2 * 2
    fig = tmp_path / "fig"
    assert cli.main(["figures", "--report", str(out / REPORT_FILE), "--out", str(fig)]) == 0
    for name in ("anova_auc.csv", "pca_auc.csv"):
        assert (fig / name).read_bytes() == (out / FIGURE_DIR / name).read_bytes()
    again = tmp_path / "again"
    assert cli.main(["run", "--config", str(out / CONFIG_FILE), "--out", str(again)]) == 0
    assert (again / REPORT_FILE).read_bytes() == (out / REPORT_FILE).read_bytes()


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    assert cli.main(["run", "--data", str(tmp_path / "missing.csv")]) == 1
    assert "drbench:" in capsys.readouterr().err
    assert cli.main(["run"]) == 1
    data_path = tmp_path / "d.csv"
    assert cli.main(["synth", "--n", "40", "--d", "6", "--informative", "2",
                     "--out", str(data_path)]) == 0
    assert cli.main(["synth", "--d", "6", "--out", str(tmp_path / "bad.csv")]) == 1
    assert cli.main(["run", "--data", str(data_path), "--s-values", "2,9",
                     "--out", str(tmp_path / "x")]) == 1
    real = ms.fit_classifier

    def flaky(name, *a, **k):
        if name == "knn":
            raise ValueError("broken")
        return real(name, *a, **k)

    monkeypatch.setattr(ms, "fit_classifier", flaky)
    code = cli.main(["run", "--data", str(data_path), "--s-values", "2",
                     "--classifiers", "gnb,knn", "--out", str(tmp_path / "y")])
    assert code == 2
    table = read_report_table(tmp_path / "y" / REPORT_FILE)
    assert {r["status"] for r in table if r["classifier"] == "knn"} == {"error"}
    assert {r["status"] for r in table if r["classifier"] == "gnb"} == {"ok"}
