"""ANOVA F-test feature selection and PCA, both fitted on training data only."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

FORMAT_VERSION = 1
# eigenvalues below this fraction of the largest count as numerical zero
RANK_RTOL = 1e-12


def anova_f_scores(data: Dataset) -> np.ndarray:
    """One-way ANOVA F-value of every feature with the two classes as groups.

    F = MS_between / MS_within where MS_between divides by (m - 1) and
    MS_within by (n - m), m = 2. A zero within-group mean square yields
    +inf when the group means differ and 0 when they do not.
    """
    X, y = data.features, data.labels
    n = X.shape[0]
    groups = [X[y == c] for c in (0, 1)]
    if any(g.shape[0] == 0 for g in groups):
        raise ValueError("ANOVA needs samples from both classes")
    m = len(groups)
    if n <= m:
        raise ValueError(f"ANOVA needs n > {m} samples, got {n}")
    grand = X.mean(axis=0)
    ss_between = np.zeros(X.shape[1])
    ss_within = np.zeros(X.shape[1])
    for g in groups:
        mu = g.mean(axis=0)
        ss_between += g.shape[0] * (mu - grand) ** 2
        ss_within += ((g - mu) ** 2).sum(axis=0)
    ms_b = ss_between / (m - 1)
    ms_w = ss_within / (n - m)
    f = np.zeros_like(ms_b)
    ok = ms_w > 0
    f[ok] = ms_b[ok] / ms_w[ok]
    f[~ok & (ms_b > 0)] = np.inf
    return f


@dataclass(frozen=True, eq=False)
class AnovaSelector:
    scores: np.ndarray
    selected: np.ndarray

    @property
    def s(self) -> int:
        return int(self.selected.size)

    @property
    def d(self) -> int:
        return int(self.scores.size)

    def transform(self, X):
        return apply_selector(self, X)

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "method": "anova",
            "s": self.s,
            "d": self.d,
            "selected": [int(i) for i in self.selected],
            # json has no inf
            "scores": [None if np.isinf(v) else float(v) for v in self.scores],
        }


def rank_scores(scores) -> np.ndarray:
    """Indices ordered by descending score, lower index first among equal scores."""
    scores = np.asarray(scores, dtype=np.float64)
    # lexsort sorts by the last key first; -inf for +inf keeps it on top
    return np.lexsort((np.arange(scores.size), -scores))


def fit_select(data: Dataset, s: int) -> AnovaSelector:
    scores = anova_f_scores(data)
    d = scores.size
    if not 1 <= s <= d:
        raise ValueError(f"s must be in [1, {d}], got {s}")
    top = np.sort(rank_scores(scores)[:s])
    top.flags.writeable = False
    scores.flags.writeable = False
    return AnovaSelector(scores, top)


def apply_selector(sel: AnovaSelector, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != sel.d:
        raise ValueError(f"selector fitted on {sel.d} columns, got shape {X.shape}")
    return X[:, sel.selected]


@dataclass(frozen=True, eq=False)
class PcaTransform:
    mean: np.ndarray
    components: np.ndarray  # s x d, rows are principal axes
    explained_variance: np.ndarray
    total_variance: float

    @property
    def s(self) -> int:
        return int(self.components.shape[0])

    def transform(self, X):
        return apply_pca(self, X)

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "method": "pca",
            "s": self.s,
            "d": int(self.mean.size),
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "total_variance": self.total_variance,
        }


def _spectrum(X):
    Xc = X - X.mean(axis=0)
    _, sv, vt = np.linalg.svd(Xc, full_matrices=False)
    return Xc, sv**2 / (X.shape[0] - 1), vt


def _numerical_rank(ev) -> int:
    if ev.size == 0 or ev[0] <= 0:
        return 0
    return int(np.count_nonzero(ev >= RANK_RTOL * ev[0]))


def pca_max_components(X) -> int:
    """Largest usable s for `X`: min(n - 1, d) capped at the numerical rank."""
    X = np.asarray(X, dtype=np.float64)
    _, ev, _ = _spectrum(X)
    return min(X.shape[0] - 1, X.shape[1], _numerical_rank(ev))


def fit_pca(X, s: int) -> PcaTransform:
    """Top-`s` principal axes of the sample covariance, via SVD of the centered data.

    Each axis is sign-fixed so its largest-magnitude entry is positive.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"PCA needs a matrix with at least 2 rows, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("PCA input contains non-finite values")
    n, d = X.shape
    _, ev, vt = _spectrum(X)
    usable = min(n - 1, d, _numerical_rank(ev))
    if not 1 <= s <= usable:
        raise ValueError(f"s must be in [1, {usable}] for this data, got {s}")
    comps = vt[:s].copy()
    lead = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(s), lead])
    comps *= signs[:, None]
    mean = X.mean(axis=0)
    for a in (mean, comps):
        a.flags.writeable = False
    ev_s = ev[:s].copy()
    ev_s.flags.writeable = False
    return PcaTransform(mean, comps, ev_s, float(ev.sum()))


def apply_pca(t: PcaTransform, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != t.mean.size:
        raise ValueError(f"PCA fitted on {t.mean.size} columns, got shape {X.shape}")
    return (X - t.mean) @ t.components.T


def reducer_to_json(reducer) -> str:
    return json.dumps(reducer.to_dict(), sort_keys=True)


def reducer_from_json(text: str):
    doc = json.loads(text)
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported reducer format version {doc.get('version')!r}")
    method = doc.get("method")
    if method == "anova":
        scores = np.array([np.inf if v is None else v for v in doc["scores"]], dtype=np.float64)
        sel = np.array(doc["selected"], dtype=np.int64)
        return AnovaSelector(scores, sel)
    if method == "pca":
        return PcaTransform(
            np.array(doc["mean"], dtype=np.float64),
            np.array(doc["components"], dtype=np.float64).reshape(doc["s"], doc["d"]),
            np.array(doc["explained_variance"], dtype=np.float64),
            float(doc["total_variance"]),
        )
    raise ValueError(f"unknown reducer method {method!r}")
