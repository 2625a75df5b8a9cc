"""The seven binary classifiers behind one fit/predict/decision_score surface."""

from .base import FittedClassifier
from .forest import DecisionTree, ForestModel, forest_fit, grow_tree
from .knn import KnnModel, knn_fit
from .linear import LdaModel, RidgeModel, lda_fit, ridge_fit
from .naive_bayes import GnbModel, gnb_fit
from .svm import SvmModel, svm_fit

CLASSIFIERS = ("knn", "gnb", "lda", "ridge", "svm_linear", "svm_rbf", "rf")

# parameter names accepted by each classifier id
PARAMS = {
    "knn": ("k",),
    "gnb": (),
    "lda": (),
    "ridge": ("alpha",),
    "svm_linear": ("C",),
    "svm_rbf": ("gamma", "C"),
    "rf": ("n_trees",),
}


def fit_classifier(name: str, X, y, params=None, seed: int = 0) -> FittedClassifier:
    """Fit classifier `name` with hyperparameters `params`.

    `seed` is used only by the random forest.
    """
    params = dict(params or {})
    if name not in PARAMS:
        raise ValueError(f"unknown classifier {name!r}; choose from {', '.join(CLASSIFIERS)}")
    extra = set(params) - set(PARAMS[name])
    if extra:
        raise ValueError(f"{name} does not take {sorted(extra)}")
    if name == "knn":
        return knn_fit(X, y, **params)
    if name == "gnb":
        return gnb_fit(X, y)
    if name == "lda":
        return lda_fit(X, y)
    if name == "ridge":
        return ridge_fit(X, y, **params)
    if name == "svm_linear":
        return svm_fit(X, y, kernel="linear", **params)
    if name == "svm_rbf":
        return svm_fit(X, y, kernel="rbf", **params)
    return forest_fit(X, y, seed=seed, **params)


__all__ = [
    "CLASSIFIERS", "PARAMS", "fit_classifier", "FittedClassifier",
    "KnnModel", "knn_fit", "GnbModel", "gnb_fit", "LdaModel", "lda_fit",
    "RidgeModel", "ridge_fit", "SvmModel", "svm_fit",
    "ForestModel", "DecisionTree", "forest_fit", "grow_tree",
]
