"""Accuracy, confusion counts and ROC/AUC. Class 1 is the positive class."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn)

    @property
    def fpr(self) -> float:
        return self.fp / (self.fp + self.tn)


def _binary_pair(predictions, truth):
    p = np.asarray(predictions).astype(np.int64).ravel()
    t = np.asarray(truth).astype(np.int64).ravel()
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.size} predictions vs {t.size} labels")
    if p.size == 0:
        raise ValueError("empty input")
    return p, t


def confusion(predictions, truth) -> ConfusionCounts:
    p, t = _binary_pair(predictions, truth)
    return ConfusionCounts(
        tp=int(np.sum((p == 1) & (t == 1))),
        tn=int(np.sum((p == 0) & (t == 0))),
        fp=int(np.sum((p == 1) & (t == 0))),
        fn=int(np.sum((p == 0) & (t == 1))),
    )


def accuracy(predictions, truth) -> float:
    c = confusion(predictions, truth)
    return (c.tp + c.tn) / (c.tp + c.fp + c.tn + c.fn)


@dataclass(frozen=True)
class RocCurve:
    points: tuple  # (fpr, tpr) pairs from (0, 0) to (1, 1)
    auc: float

    @property
    def fpr(self):
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self):
        return np.array([p[1] for p in self.points])

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["fpr", "tpr"])
            for f, t in self.points:
                w.writerow([repr(f), repr(t)])


def roc_auc(scores, truth) -> RocCurve:
    """ROC curve from a descending threshold sweep; area by the trapezoidal rule.

    Equal scores form one threshold step, so a block of tied positives and
    negatives becomes a single diagonal segment. The area is accumulated in
    integer counts and divided by P*N once at the end.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    t = np.asarray(truth).astype(np.int64).ravel()
    if s.shape != t.shape:
        raise ValueError(f"length mismatch: {s.size} scores vs {t.size} labels")
    n_pos = int(np.sum(t == 1))
    n_neg = int(t.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes in the ground truth")
    order = np.argsort(-s, kind="mergesort")
    s, t = s[order], t[order]
    # last index of each block of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tps = np.cumsum(t)[ends]
    fps = (ends + 1) - tps
    tps = np.r_[0, tps]
    fps = np.r_[0, fps]
    twice_area = int(np.sum(np.diff(fps) * (tps[1:] + tps[:-1])))
    auc = twice_area / (2 * n_pos * n_neg)
    points = tuple((int(f) / n_neg, int(p) / n_pos) for f, p in zip(fps, tps))
    return RocCurve(points, auc)


def auc_score(scores, truth) -> float:
    return roc_auc(scores, truth).auc
