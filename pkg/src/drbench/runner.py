"""Experiment sweeps over reducers x s x classifiers x objectives, and their outputs."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classifiers import CLASSIFIERS
from .dataset import Dataset, load_csv, make_folds, rng_stream
from .modelselect import (DEFAULT_GRIDS, OBJECTIVES, REDUCERS, ReducerConfig, grid_search,
                          prepare_folds)

log = logging.getLogger(__name__)

DEFAULT_S_VALUES = (3, 6, 12, 24, 48, 92, 184)
N_FOLDS = 5
WORKERS_ENV = "DRBENCH_WORKERS"
REPORT_FILE = "report.csv"
CONFIG_FILE = "config.json"
TIMINGS_FILE = "timings.csv"
FIGURE_DIR = "figures"

REPORT_COLUMNS = (
    ["reducer", "s", "s_used", "classifier", "objective"]
    + [f"fold_{t + 1}" for t in range(N_FOLDS)]
    + ["mean", "params", "grid_points", "unconverged", "status", "error"]
)


@dataclass
class ExperimentConfig:
    data: str | None = None
    label_col: str = "label"
    seed: int = 0
    s_values: tuple = DEFAULT_S_VALUES
    reducers: tuple = ("anova", "pca")
    classifiers: tuple = CLASSIFIERS
    objectives: tuple = OBJECTIVES
    standardize: bool = True
    leaky_reduction: bool = False
    out: str | None = None

    def __post_init__(self):
        self.s_values = tuple(int(s) for s in self.s_values)
        self.reducers = tuple(self.reducers)
        self.classifiers = tuple(self.classifiers)
        self.objectives = tuple(self.objectives)
        for axis, allowed, name in ((self.reducers, REDUCERS, "reducer"),
                                    (self.classifiers, CLASSIFIERS, "classifier"),
                                    (self.objectives, OBJECTIVES, "objective")):
            if not axis:
                raise ValueError(f"at least one {name} is required")
            bad = [v for v in axis if v not in allowed]
            if bad:
                raise ValueError(f"unknown {name}(s) {bad}; choose from {', '.join(allowed)}")
        if not self.s_values or min(self.s_values) < 1:
            raise ValueError("s_values must be positive integers")

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, doc):
        return cls(**{k: doc[k] for k in cls.__dataclass_fields__ if k in doc})


@dataclass
class ReportRow:
    reducer: str
    s: int
    classifier: str
    objective: str
    s_used: int | None = None
    fold_scores: tuple = ()
    mean: float | None = None
    params: dict = field(default_factory=dict)
    grid_points: int = 0
    unconverged: int = 0
    error: str = ""
    wall_ms: float = 0.0

    @property
    def status(self):
        return "error" if self.error else "ok"

    def sort_key(self):
        return (self.reducer, self.objective, self.classifier, self.s)

    def cells(self):
        folds = [repr(v) for v in self.fold_scores] or [""] * N_FOLDS
        return [self.reducer, str(self.s), "" if self.s_used is None else str(self.s_used),
                self.classifier, self.objective, *folds,
                "" if self.mean is None else repr(self.mean),
                json.dumps(self.params, sort_keys=True), str(self.grid_points),
                str(self.unconverged), self.status, self.error]


@dataclass
class EvaluationReport:
    rows: list
    config: ExperimentConfig
    version: str = __version__
    grid_sizes: dict = field(default_factory=dict)

    @property
    def failures(self):
        return [r for r in self.rows if r.error]

    def metadata(self):
        return {
            "toolkit_version": self.version,
            "config": self.config.to_dict(),
            "folds": N_FOLDS,
            "protocol": "non-nested: the best grid point's tuning score is the reported score",
            "grid_sizes": self.grid_sizes,
        }


def make_synthetic(n: int = 150, d: int = 184, n_informative: int = 10,
                   class_separation: float = 1.0, seed: int = 0) -> Dataset:
    """Balanced two-class Gaussian data with a few informative columns.

    Informative columns have unit variance and class means -sep/2 and +sep/2;
    the rest are standard normal noise. Rows and columns are shuffled, and
    column names keep their role ("informative_*" or "noise_*").
    """
    if n < 2 * N_FOLDS or d < 1 or not 0 <= n_informative <= d:
        raise ValueError(f"invalid sizes n={n}, d={d}, n_informative={n_informative}")
    rng = rng_stream(seed, "synthetic")
    y = np.zeros(n, dtype=np.int64)
    y[n // 2:] = 1
    X = rng.standard_normal((n, d))
    X[:, :n_informative] += np.where(y == 1, 0.5, -0.5)[:, None] * class_separation
    names = [f"informative_{j:03d}" for j in range(n_informative)]
    names += [f"noise_{j:03d}" for j in range(d - n_informative)]
    cols = rng.permutation(d)
    rows = rng.permutation(n)
    return Dataset(X[rows][:, cols], y[rows], [names[c] for c in cols])


def informative_columns(data: Dataset) -> np.ndarray:
    return np.array([j for j, name in enumerate(data.feature_names)
                     if name.startswith("informative_")], dtype=np.int64)


def grid_sizes(classifiers) -> dict:
    return {c: {**DEFAULT_GRIDS[c].shape(), "points": DEFAULT_GRIDS[c].size}
            for c in classifiers}


def _evaluate_unit(dataset, plan, cfg: ExperimentConfig, reducer, s, classifier):
    """All objectives for one (reducer, s, classifier); fits are shared across objectives."""
    rc = ReducerConfig(reducer, s, cfg.standardize, cfg.leaky_reduction)
    grid = DEFAULT_GRIDS[classifier]
    rows, cache, folds = [], {}, None
    for objective in cfg.objectives:
        row = ReportRow(reducer, s, classifier, objective, grid_points=grid.size)
        t0 = time.perf_counter()
        try:
            if folds is None:
                folds = prepare_folds(dataset, plan, rc)
            res = grid_search(dataset, plan, classifier, grid, rc, objective,
                              seed=cfg.seed, folds=folds, cache=cache)
            row.s_used, row.fold_scores, row.mean = res.s, res.fold_scores, res.mean
            row.params, row.unconverged = res.params, res.n_unconverged
        except Exception as e:
            log.error("%s s=%d %s %s failed: %s", reducer, s, classifier, objective, e)
            row.error = f"{type(e).__name__}: {e}".replace("\n", " ")
        row.wall_ms = (time.perf_counter() - t0) * 1e3
        rows.append(row)
    return rows


def _worker_count():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(config: ExperimentConfig, dataset: Dataset | None = None) -> EvaluationReport:
    """Run the whole sweep; write the report if `config.out` is set.

    A failing combination becomes an error row rather than stopping the sweep.
    """
    if dataset is None:
        if config.data is None:
            raise ValueError("no dataset given")
        dataset = load_csv(config.data, config.label_col)
    bad = [s for s in config.s_values if s > dataset.d]
    if bad:
        raise ValueError(f"s values {bad} exceed the {dataset.d} features")
    plan = make_folds(dataset.labels, N_FOLDS, config.seed)
    units = [(r, s, c) for r in config.reducers for s in config.s_values
             for c in config.classifiers]
    for c in config.classifiers:
        g = DEFAULT_GRIDS[c]
        log.info("grid %s: %s -> %d evaluations per combination", c, g.shape(), g.size)
    workers = min(_worker_count(), len(units))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_evaluate_unit, dataset, plan, config, *u) for u in units]
            chunks = [f.result() for f in futures]
    else:
        chunks = [_evaluate_unit(dataset, plan, config, *u) for u in units]
    rows = sorted((r for chunk in chunks for r in chunk), key=ReportRow.sort_key)
    report = EvaluationReport(rows, config, grid_sizes=grid_sizes(config.classifiers))
    if config.out:
        write_report(report, config.out)
    return report


def write_report(report: EvaluationReport, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / REPORT_FILE).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for row in report.rows:
            w.writerow(row.cells())
    (out / CONFIG_FILE).write_text(json.dumps(report.metadata(), indent=2, sort_keys=True) + "\n")
    # wall-clock times vary between runs, so they live outside the report
    with (out / TIMINGS_FILE).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["reducer", "s", "classifier", "objective", "wall_ms"])
        for row in report.rows:
            w.writerow([row.reducer, row.s, row.classifier, row.objective, f"{row.wall_ms:.1f}"])
    export_figure_data(read_report_table(out / REPORT_FILE), out / FIGURE_DIR)
    return out


def read_report_table(path) -> list:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def load_config(path) -> ExperimentConfig:
    doc = json.loads(Path(path).read_text())
    return ExperimentConfig.from_dict(doc.get("config", doc))


def export_figure_data(report, out) -> list:
    """One CSV per (reducer, objective): a row per s, a column per classifier, mean scores.

    `report` is an EvaluationReport or rows read back with `read_report_table`.
    Failed combinations leave an empty cell.
    """
    if isinstance(report, EvaluationReport):
        table = [dict(zip(REPORT_COLUMNS, r.cells())) for r in report.rows]
    else:
        table = list(report)
    if not table:
        raise ValueError("empty report")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    groups = {}
    for r in table:
        groups.setdefault((r["reducer"], r["objective"]), []).append(r)
    written = []
    for (reducer, objective), rows in sorted(groups.items()):
        present = {r["classifier"] for r in rows}
        clfs = [c for c in CLASSIFIERS if c in present] + sorted(present - set(CLASSIFIERS))
        s_vals = sorted({int(r["s"]) for r in rows})
        cell = {(int(r["s"]), r["classifier"]): r["mean"] for r in rows}
        path = out / f"{reducer}_{objective}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", *clfs])
            for s in s_vals:
                w.writerow([s, *(cell.get((s, c), "") for c in clfs)])
        written.append(path)
    return written
