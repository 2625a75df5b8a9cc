"""Tabular datasets, z-score standardization, stratified folds and seeded RNG streams."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed or unusable input data."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (n samples x d features) with binary labels in {0, 1}."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        X = _frozen(self.features, np.float64)
        y = _frozen(self.labels, np.int64)
        if X.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 2 or d < 1:
            raise DatasetError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
        if y.shape != (n,):
            raise DatasetError(f"labels shape {y.shape} does not match {n} rows")
        if not np.isin(y, (0, 1)).all():
            raise DatasetError("labels must be 0 or 1")
        if not np.isfinite(X).all():
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise DatasetError(f"non-finite feature value at row {r}, column {c}")
        names = tuple(self.feature_names) or tuple(f"f{j}" for j in range(d))
        if len(names) != d:
            raise DatasetError(f"{len(names)} feature names for {d} columns")
        if len(set(names)) != d:
            raise DatasetError("feature names must be unique")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names)


def load_csv(path, label_column: str) -> Dataset:
    """Read a headered CSV file; every column other than `label_column` is a feature.

    The two distinct raw label values are mapped to 0 and 1 in lexicographic order.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if label_column not in header:
            raise DatasetError(f"{path}: label column {label_column!r} not in header")
        li = header.index(label_column)
        names = [h for j, h in enumerate(header) if j != li]
        rows, raw_labels = [], []
        # line 1 is the header
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise DatasetError(
                    f"{path}: row {lineno} has {len(rec)} cells, expected {len(header)}")
            vals = []
            for j, cell in enumerate(rec):
                if j == li:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(
                        f"{path}: unparseable value {cell!r} at row {lineno}, column {header[j]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DatasetError(
                        f"{path}: non-finite value {cell!r} at row {lineno}, column {header[j]!r}")
                vals.append(v)
            rows.append(vals)
            raw_labels.append(rec[li].strip())
    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise DatasetError(
            f"{path}: label column must hold exactly two distinct values, found {len(classes)}")
    y = [classes.index(v) for v in raw_labels]
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    return Dataset(X, y, names)


def write_csv(data: Dataset, path, label_column: str = "label") -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, label_column])
        for row, lab in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in row] + [str(int(lab))])


@dataclass(frozen=True, eq=False)
class Standardizer:
    means: np.ndarray
    std_devs: np.ndarray

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.means.shape[0]:
            raise ValueError(
                f"expected {self.means.shape[0]} columns, got {X.shape[-1]}")
        return (X - self.means) / self.std_devs


def fit_standardizer(train) -> Standardizer:
    """Column means and population standard deviations; constant columns get std 1.

    Accepts a Dataset or a plain matrix.
    """
    X = train.features if isinstance(train, Dataset) else np.asarray(train, dtype=np.float64)
    if X.shape[0] < 2:
        raise DatasetError("standardizer needs at least 2 rows")
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0.0] = 1.0
    return Standardizer(_frozen(mu, np.float64), _frozen(sd, np.float64))


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for `label` under a master `seed`.

    The label is hashed into the seed sequence, so streams with different
    labels never overlap and the same (seed, label) always replays.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class FoldPlan:
    fold_assignments: np.ndarray
    seed: int
    k: int = 5

    def test_indices(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignments == t)

    def train_indices(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignments != t)

    def __iter__(self):
        for t in range(self.k):
            yield self.train_indices(t), self.test_indices(t)


def make_folds(labels: Sequence[int], k: int = 5, seed: int = 0) -> FoldPlan:
    """Stratified k-way partition.

    Each class is shuffled on its own and dealt round-robin; the deal for the
    second class continues where the first stopped, which keeps total fold
    sizes within one of each other as well as per-class counts.
    """
    y = np.asarray(labels)
    if k < 2:
        raise DatasetError("k must be at least 2")
    rng = rng_stream(seed, "folds")
    assign = np.empty(y.shape[0], dtype=np.int64)
    pos = 0
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        if idx.size < k:
            raise DatasetError(f"class {c} has {idx.size} members, need at least {k}")
        idx = rng.permutation(idx)
        assign[idx] = (pos + np.arange(idx.size)) % k
        pos += idx.size
    return FoldPlan(_frozen(assign, np.int64), int(seed), k)
