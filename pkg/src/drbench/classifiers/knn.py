from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import FittedClassifier, check_training_data


@dataclass(frozen=True, eq=False)
class KnnModel(FittedClassifier):
    reference_points: np.ndarray
    reference_labels: np.ndarray
    k: int

    threshold = 0.5

    @property
    def n_features(self):
        return self.reference_points.shape[1]

    def neighbors(self, X) -> np.ndarray:
        """Row indices of the k nearest reference points, nearest first.

        Equal distances keep training-row order (stable sort).
        """
        X = self._check(X)
        diff = X[:, None, :] - self.reference_points[None, :, :]
        dist = np.einsum("ijk,ijk->ij", diff, diff)
        return np.argsort(dist, axis=1, kind="stable")[:, : self.k]

    def decision_score(self, X):
        return self.reference_labels[self.neighbors(X)].mean(axis=1)

    def describe(self):
        return {"n_features": self.n_features, "k": self.k,
                "n_reference": int(self.reference_points.shape[0])}


def knn_fit(X, y, k: int = 5) -> KnnModel:
    X, y = check_training_data(X, y)
    k = int(k)
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be a positive odd integer, got {k}")
    if k > X.shape[0]:
        raise ValueError(f"k={k} exceeds the {X.shape[0]} training samples")
    X = X.copy()
    X.flags.writeable = False
    y = y.astype(np.float64)
    y.flags.writeable = False
    return KnnModel(X, y, k)
