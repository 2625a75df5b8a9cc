"""Cross-validated evaluation of reducer + classifier pipelines and grid search."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .classifiers import CLASSIFIERS, PARAMS, fit_classifier
from .dataset import Dataset, FoldPlan, fit_standardizer, rng_stream
from .dimreduce import apply_pca, apply_selector, fit_pca, fit_select, pca_max_components
from .metrics import accuracy, auc_score

log = logging.getLogger(__name__)

OBJECTIVES = ("accuracy", "auc")
REDUCERS = ("anova", "pca", "none")


@dataclass(frozen=True)
class GridSpec:
    """Named hyperparameter axes; grid points are their Cartesian product in declared order."""

    classifier: str
    axes: tuple = ()  # ((name, (v1, v2, ...)), ...)

    def __post_init__(self):
        if self.classifier not in PARAMS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        axes = tuple((str(name), tuple(vals)) for name, vals in self.axes)
        for name, vals in axes:
            if name not in PARAMS[self.classifier]:
                raise ValueError(f"{self.classifier} has no hyperparameter {name!r}")
            if not vals:
                raise ValueError(f"axis {name!r} is empty")
        object.__setattr__(self, "axes", axes)

    @property
    def size(self) -> int:
        return int(np.prod([len(v) for _, v in self.axes])) if self.axes else 1

    def points(self) -> list:
        names = [name for name, _ in self.axes]
        return [dict(zip(names, combo))
                for combo in itertools.product(*(vals for _, vals in self.axes))]

    def shape(self) -> dict:
        return {name: len(vals) for name, vals in self.axes}


def _powers(lo, hi):
    return tuple(10.0**e for e in range(lo, hi + 1))


DEFAULT_GRIDS = {
    "knn": GridSpec("knn", (("k", (3, 5, 7, 9, 11, 13, 15)),)),
    "gnb": GridSpec("gnb"),
    "lda": GridSpec("lda"),
    "ridge": GridSpec("ridge", (("alpha", (0.1, 1.0, 10.0)),)),
    "svm_linear": GridSpec("svm_linear", (("C", _powers(0, 8)),)),
    "svm_rbf": GridSpec("svm_rbf", (("gamma", _powers(-10, 2)), ("C", _powers(0, 8)))),
    "rf": GridSpec("rf", (("n_trees", (2, 4, 8, 16, 32)),)),
}


@dataclass(frozen=True)
class ReducerConfig:
    """How each fold's features are prepared before the classifier sees them.

    method "none" passes the (optionally standardized) features through.
    With `leaky` the standardizer and reducer are fitted once on all rows.
    """

    method: str = "anova"
    s: int | None = None
    standardize: bool = True
    leaky: bool = False

    def __post_init__(self):
        if self.method not in REDUCERS:
            raise ValueError(f"unknown reducer {self.method!r}")
        if self.method != "none" and (self.s is None or self.s < 1):
            raise ValueError(f"reducer {self.method} needs s >= 1, got {self.s}")


@dataclass(frozen=True)
class PipelineConfig:
    reducer: ReducerConfig
    classifier: str
    params: dict = field(default_factory=dict)
    objective: str = "accuracy"
    seed: int = 0

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")


@dataclass(frozen=True)
class FoldData:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    s: int  # number of columns actually passed on


@dataclass(frozen=True)
class CvResult:
    fold_scores: tuple
    mean: float
    params: dict
    objective: str
    n_unconverged: int = 0  # fits that stopped at an iteration cap
    s: int | None = None
    evaluated: tuple = ()  # (params, mean) for every grid point tried


class FoldError(RuntimeError):
    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")
        self.fold = fold


def _fit_reduce(reducer: ReducerConfig, X, y):
    """Fit standardizer and reducer on (X, y); return the transform and the kept width."""
    std = fit_standardizer(X) if reducer.standardize else None
    Z = std.transform(X) if std else X
    if reducer.method == "anova":
        s = min(reducer.s, X.shape[1])
        sel = fit_select(Dataset(Z, y), s)

        def reduce(A):
            return apply_selector(sel, A)
    elif reducer.method == "pca":
        s = min(reducer.s, pca_max_components(Z))
        pca = fit_pca(Z, s)

        def reduce(A):
            return apply_pca(pca, A)
    else:
        s = X.shape[1]

        def reduce(A):
            return np.asarray(A, dtype=np.float64)

    def transform(A):
        return reduce(std.transform(A) if std else A)

    return transform, s


def prepare_folds(dataset: Dataset, plan: FoldPlan, reducer: ReducerConfig) -> list:
    """Standardize and reduce every fold.

    Each fold's transforms are fitted on its training rows only, unless
    `reducer.leaky` asks for a single fit on the whole dataset.
    """
    X, y = dataset.features, dataset.labels
    if reducer.leaky:
        transform, s = _fit_reduce(reducer, X, y)
        Z = transform(X)
    folds = []
    for t, (tr, te) in enumerate(plan):
        try:
            if reducer.leaky:
                Ztr, Zte = Z[tr], Z[te]
            else:
                transform, s = _fit_reduce(reducer, X[tr], y[tr])
                Ztr, Zte = transform(X[tr]), transform(X[te])
        except Exception as e:
            raise FoldError(t, e) from e
        folds.append(FoldData(Ztr, y[tr], Zte, y[te], s))
    return folds


def fold_seed(seed: int, fold: int) -> int:
    return int(rng_stream(seed, f"classifier/fold{fold}").integers(0, 2**63))


def _param_key(classifier, params):
    return (classifier, tuple(sorted(params.items())))


def _score(objective, model, X, y):
    if objective == "accuracy":
        return accuracy(model.predict(X), y)
    return auc_score(model.decision_score(X), y)


def cross_validate(dataset: Dataset, plan: FoldPlan, config: PipelineConfig, *,
                   folds=None, cache=None, score_on_train: bool = False) -> CvResult:
    """Train on all folds but one, score on the held-out fold, average over folds.

    `folds` reuses output of `prepare_folds`. `cache` (a dict) keeps fitted
    models by hyperparameters so a second objective reuses the same fits.
    `score_on_train` scores each model on its own training rows; it exists
    to expose leakage in tests.
    """
    if folds is None:
        folds = prepare_folds(dataset, plan, config.reducer)
    key = _param_key(config.classifier, config.params)
    if cache is not None and key in cache:
        models = cache[key]
    else:
        models = []
        for t, fd in enumerate(folds):
            try:
                models.append(fit_classifier(config.classifier, fd.X_train, fd.y_train,
                                             config.params, seed=fold_seed(config.seed, t)))
            except Exception as e:
                raise FoldError(t, e) from e
        if cache is not None:
            cache[key] = models
    scores = []
    for t, (fd, model) in enumerate(zip(folds, models)):
        X, y = (fd.X_train, fd.y_train) if score_on_train else (fd.X_test, fd.y_test)
        try:
            scores.append(float(_score(config.objective, model, X, y)))
        except Exception as e:
            raise FoldError(t, e) from e
    unconverged = sum(1 for m in models if getattr(m, "converged", True) is False)
    return CvResult(tuple(scores), float(np.mean(scores)), dict(config.params),
                    config.objective, unconverged, folds[0].s)


def select_best(means) -> int:
    """Index of the largest mean; the earliest one wins ties."""
    best = None
    for i, m in enumerate(means):
        if best is None or m > means[best]:
            best = i
    return best


def grid_search(dataset: Dataset, plan: FoldPlan, classifier: str, grid: GridSpec,
                reducer: ReducerConfig, objective: str, *, seed: int = 0,
                folds=None, cache=None) -> CvResult:
    """Cross-validate every grid point and return the best one.

    The reported score of the winner is its own tuning score (no nested CV).
    Grid points that raise are skipped; if all of them fail the last error
    is re-raised.
    """
    if grid.classifier != classifier:
        raise ValueError(f"grid is for {grid.classifier}, not {classifier}")
    if folds is None:
        folds = prepare_folds(dataset, plan, reducer)
    log.info("grid search %s: %d points %s", classifier, grid.size, grid.shape())
    results, last_err = [], None
    for params in grid.points():
        cfg = PipelineConfig(reducer, classifier, params, objective, seed)
        try:
            results.append(cross_validate(dataset, plan, cfg, folds=folds, cache=cache))
        except Exception as e:
            log.warning("grid point %s failed: %s", params, e)
            last_err = e
    if not results:
        raise RuntimeError(f"all {grid.size} grid points failed for {classifier}") from last_err
    best = results[select_best([r.mean for r in results])]
    unconverged = sum(r.n_unconverged for r in results)
    if unconverged:
        log.warning("%s: %d fits stopped at the iteration cap", classifier, unconverged)
    evaluated = tuple((r.params, r.mean) for r in results)
    return CvResult(best.fold_scores, best.mean, best.params, objective, unconverged,
                    best.s, evaluated)
