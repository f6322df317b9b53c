"""Accuracy, rank-statistic AUC, seeded splits and k-fold cross-validation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .datasets import LabeledDataset


class MetricError(ValueError):
    pass


def _pairs(scores, labels):
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=np.int64)
    if s.shape != y.shape:
        raise MetricError("scores and labels differ in length")
    if s.size == 0:
        raise MetricError("no predictions")
    return s, y


def accuracy(scores, labels, threshold: float = 0.5) -> float:
    """Fraction of rows where ``score >= threshold`` agrees with the label."""
    s, y = _pairs(scores, labels)
    return float(np.mean((s >= threshold).astype(np.int64) == y))


def auc(scores, labels) -> float:
    """Mann-Whitney AUC; tied positive/negative pairs count one half."""
    s, y = _pairs(scores, labels)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs at least one positive and one negative")
    ranks = rankdata(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def train_test_split(data: LabeledDataset, train_fraction: float, seed: int):
    """Seeded shuffle, then the first ``floor(fraction * N)`` rows train."""
    if not 0.0 < train_fraction < 1.0:
        raise MetricError("train_fraction must lie in (0, 1)")
    n = len(data)
    n_train = int(np.floor(train_fraction * n))
    if n_train == 0 or n_train == n:
        raise MetricError(f"split of {n} rows at {train_fraction} leaves an empty part")
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(perm[:n_train]), data.subset(perm[n_train:])


def fold_indices(n: int, folds: int, seed: int) -> list:
    """Near-equal folds over a seeded permutation; earlier folds take the remainder."""
    if folds < 2:
        raise MetricError("need at least 2 folds")
    if folds > n:
        raise MetricError(f"{folds} folds requested for {n} rows")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, folds)
    out, pos = [], 0
    for k in range(folds):
        size = base + (1 if k < extra else 0)
        out.append(np.sort(perm[pos:pos + size]))
        pos += size
    return out


@dataclass
class CrossValResult:
    fold_auc: list
    fold_accuracy: list
    folds: list

    @property
    def mean_auc(self) -> float:
        vals = [a for a in self.fold_auc if not np.isnan(a)]
        return float(np.mean(vals)) if vals else float("nan")

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracy))


def cross_validate(data: LabeledDataset, folds: int, trainer, seed: int, threshold: float = 0.5) -> CrossValResult:
    """Train on all folds but one, score the held-out fold, for every fold.

    ``trainer(train_data)`` returns an object with ``predict_proba(x)``.
    Folds whose test rows hold a single class get AUC = nan and are left
    out of the mean AUC.
    """
    parts = fold_indices(len(data), folds, seed)
    all_idx = np.arange(len(data))
    aucs, accs = [], []
    for test_idx in parts:
        train_idx = np.setdiff1d(all_idx, test_idx, assume_unique=True)
        model = trainer(data.subset(train_idx))
        test = data.subset(test_idx)
        scores = np.array([model.predict_proba(x) for x in test.X])
        accs.append(accuracy(scores, test.y, threshold))
        try:
            aucs.append(auc(scores, test.y))
        except MetricError:
            aucs.append(float("nan"))
    return CrossValResult(aucs, accs, parts)
