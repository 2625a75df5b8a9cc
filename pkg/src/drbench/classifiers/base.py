from __future__ import annotations

import numpy as np


def check_training_data(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(np.int64).ravel()
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return X, y


class FittedClassifier:
    """Common surface of the fitted models.

    `decision_score` grows with confidence in class 1; `predict` thresholds
    it at `threshold` (0.5 for probability-like scores, 0 for margins).
    """

    threshold = 0.0
    n_features: int

    def decision_score(self, X) -> np.ndarray:
        raise NotImplementedError

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"model fitted on {self.n_features} features, got {X.shape[1]}")
        return X

    def predict(self, X) -> np.ndarray:
        return (self.decision_score(X) > self.threshold).astype(np.int64)

    def describe(self) -> dict:
        return {"n_features": self.n_features}
