from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .base import FittedClassifier, check_training_data

VAR_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class GnbModel(FittedClassifier):
    """Gaussian naive Bayes over two classes.

    priors[j], class_means[j] and class_variances[j] describe class j.
    """

    priors: np.ndarray
    class_means: np.ndarray
    class_variances: np.ndarray

    threshold = 0.5

    @property
    def n_features(self):
        return self.class_means.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        """log P(class j) + sum_i log N(x_i; mu_ij, var_ij), shape (n, 2)."""
        X = self._check(X)
        out = np.empty((X.shape[0], 2))
        for j in (0, 1):
            var = self.class_variances[j]
            norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            sq = ((X - self.class_means[j]) ** 2 / var).sum(axis=1)
            out[:, j] = np.log(self.priors[j]) + norm - 0.5 * sq
        return out

    def posterior(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        p1 = expit(jll[:, 1] - jll[:, 0])
        return np.column_stack([1.0 - p1, p1])

    def decision_score(self, X):
        jll = self.joint_log_likelihood(X)
        return expit(jll[:, 1] - jll[:, 0])

    def describe(self):
        return {"n_features": self.n_features, "priors": self.priors.tolist()}


def gnb_fit(X, y) -> GnbModel:
    X, y = check_training_data(X, y)
    counts = np.array([np.sum(y == 0), np.sum(y == 1)])
    if counts.min() < 2:
        raise ValueError(f"each class needs at least 2 samples, got {counts.tolist()}")
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    var = np.vstack([X[y == c].var(axis=0) for c in (0, 1)])
    top = X.var(axis=0).max()
    floor = VAR_FLOOR * top if top > 0 else VAR_FLOOR
    var = np.maximum(var, floor)
    priors = counts / counts.sum()
    for a in (means, var, priors):
        a.flags.writeable = False
    return GnbModel(priors, means, var)
