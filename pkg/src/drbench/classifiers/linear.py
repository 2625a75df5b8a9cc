"""Linear discriminant analysis and the ridge classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import FittedClassifier, check_training_data

LDA_SHRINK = 1e-6


@dataclass(frozen=True, eq=False)
class LinearModel(FittedClassifier):
    weights: np.ndarray
    bias: float

    @property
    def n_features(self):
        return self.weights.shape[0]

    def decision_score(self, X):
        return self._check(X) @ self.weights + self.bias


@dataclass(frozen=True, eq=False)
class LdaModel(LinearModel):
    class_means: np.ndarray = None
    pooled_covariance: np.ndarray = None
    priors: np.ndarray = None

    def describe(self):
        return {"n_features": self.n_features, "priors": self.priors.tolist()}


def lda_fit(X, y) -> LdaModel:
    """Two-class LDA with a shared (pooled) covariance matrix.

    The pooled covariance gets LDA_SHRINK * mean-eigenvalue added to its
    diagonal, so the solve succeeds even when d >= n. The boundary passes
    through the midpoint of the class means, shifted by the log prior ratio.
    """
    X, y = check_training_data(X, y)
    n, d = X.shape
    counts = np.array([np.sum(y == 0), np.sum(y == 1)])
    if counts.min() == 0:
        raise ValueError("LDA needs samples from both classes")
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    scatter = np.zeros((d, d))
    for c in (0, 1):
        R = X[y == c] - means[c]
        scatter += R.T @ R
    cov = scatter / max(n - 2, 1)
    ridge = np.trace(cov) / d
    if ridge <= 0:
        ridge = 1.0
    reg = cov + LDA_SHRINK * ridge * np.eye(d)
    w = np.linalg.solve(reg, means[1] - means[0])
    priors = counts / n
    b = -w @ (0.5 * (means[0] + means[1])) + (np.log(priors[1]) - np.log(priors[0]))
    for a in (w, means, cov, priors):
        a.flags.writeable = False
    return LdaModel(w, float(b), means, cov, priors)


@dataclass(frozen=True, eq=False)
class RidgeModel(LinearModel):
    alpha: float = 1.0

    def predict(self, X):
        # a score of exactly 0 goes to class 1
        return (self.decision_score(X) >= 0).astype(np.int64)

    def describe(self):
        return {"n_features": self.n_features, "alpha": self.alpha}


def ridge_fit(X, y, alpha: float = 1.0) -> RidgeModel:
    """Penalized least squares against targets -1/+1 with an unpenalized intercept."""
    X, y = check_training_data(X, y)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    t = 2.0 * y - 1.0
    x_mean = X.mean(axis=0)
    t_mean = t.mean()
    Xc = X - x_mean
    d = X.shape[1]
    w = np.linalg.solve(Xc.T @ Xc + alpha * np.eye(d), Xc.T @ (t - t_mean))
    b = t_mean - x_mean @ w
    w.flags.writeable = False
    return RidgeModel(w, float(b), float(alpha))
