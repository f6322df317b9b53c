"""Dataset containers, CSV ingestion, and seeded synthetic generators."""

from __future__ import annotations

import contextlib
import csv
import math
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    pass


@contextlib.contextmanager
def _text_out(target):
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="") as fh:
            yield fh


# ---------------------------------------------------------------------------
# repost data (alpha estimation)


@dataclass
class RepostDataset:
    post_ids: list
    reposts: np.ndarray
    outcomes: np.ndarray
    avg_friends: float
    p0: float

    def __post_init__(self):
        self.reposts = np.asarray(self.reposts, dtype=float)
        self.outcomes = np.asarray(self.outcomes, dtype=float)
        if not (len(self.post_ids) == len(self.reposts) == len(self.outcomes)):
            raise DatasetError("post_ids, reposts and outcomes differ in length")
        if self.avg_friends <= 0:
            raise DatasetError("average friend count must be positive")
        if not 0.0 <= self.p0 <= 1.0:
            raise DatasetError(f"p0={self.p0} outside [0, 1]")
        if np.any(self.reposts < 0):
            raise DatasetError("repost counts must be non-negative")
        if np.any((self.outcomes != 0) & (self.outcomes != 1)):
            raise DatasetError("outcomes must be 0 or 1")

    def __len__(self):
        return len(self.post_ids)

    @classmethod
    def empty(cls, avg_friends=1.0, p0=0.05):
        return cls([], np.zeros(0), np.zeros(0), avg_friends, p0)


def repost_link(alpha: float, reposts, avg_friends: float, p0: float) -> np.ndarray:
    """Click/repost probability per row: ``min(1, p0 + 1 - (1 - min(1, alpha*R/F))**F)``."""
    z = np.clip(alpha * np.asarray(reposts, dtype=float) / avg_friends, 0.0, 1.0)
    return np.minimum(1.0, p0 + (1.0 - (1.0 - z) ** avg_friends))


def read_repost_csv(path, avg_friends: float | None = None, p0: float = 0.05) -> RepostDataset:
    """Read ``post_id,reposts,outcome``; F defaults to the mean repost count."""
    ids, reposts, outcomes = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"post_id", "reposts", "outcome"} - set(reader.fieldnames or [])
        if missing:
            raise DatasetError(f"{path}: missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                ids.append(row["post_id"])
                reposts.append(int(row["reposts"]))
                outcomes.append(int(row["outcome"]))
            except ValueError:
                raise DatasetError(f"{path}: bad value on line {lineno}") from None
    if avg_friends is None:
        if not reposts:
            avg_friends = 1.0
        else:
            avg_friends = float(np.mean(reposts))
            if avg_friends <= 0:
                raise DatasetError("mean repost count is 0; pass the average friend count explicitly")
    return RepostDataset(ids, np.array(reposts), np.array(outcomes), avg_friends, p0)


def write_repost_csv(data: RepostDataset, path) -> None:
    with _text_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["post_id", "reposts", "outcome"])
        for pid, r, y in zip(data.post_ids, data.reposts, data.outcomes):
            w.writerow([pid, int(r), int(y)])


@dataclass(frozen=True)
class RepostSpec:
    size: int
    seed: int
    alpha: float = 1.5
    p0: float = 0.05
    avg_friends: float = 20.0
    mean_reposts: float = 1.0

    def __post_init__(self):
        if self.size < 1:
            raise DatasetError("size must be >= 1")
        if self.mean_reposts < 0:
            raise DatasetError("mean_reposts must be non-negative")


def generate_repost_data(spec: RepostSpec) -> RepostDataset:
    """Geometric repost counts (support 0, 1, ...) and Bernoulli outcomes at the true alpha."""
    rng = np.random.default_rng(spec.seed)
    reposts = rng.geometric(1.0 / (1.0 + spec.mean_reposts), size=spec.size) - 1
    p = repost_link(spec.alpha, reposts, spec.avg_friends, spec.p0)
    outcomes = (rng.random(spec.size) < p).astype(int)
    ids = [str(i + 1) for i in range(spec.size)]
    return RepostDataset(ids, reposts, outcomes, spec.avg_friends, spec.p0)


# ---------------------------------------------------------------------------
# labeled categorical data (p0 estimation)


@dataclass
class LabeledDataset:
    """Rows of category indices with binary labels.

    ``X[r, j]`` is a category index below ``feature_arity[j]``.
    """

    feature_names: list
    feature_arity: list
    X: np.ndarray
    y: np.ndarray
    categories: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.int64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            self.X = self.X.reshape(len(self.y), -1)
        if self.X.shape[0] != self.y.shape[0]:
            raise DatasetError("feature rows and labels differ in length")
        if self.X.shape[1] != len(self.feature_arity) or len(self.feature_names) != len(self.feature_arity):
            raise DatasetError("feature width does not match names/arity")
        if self.X.size and (self.X.min() < 0 or np.any(self.X >= np.asarray(self.feature_arity))):
            raise DatasetError("category index outside feature arity")
        if np.any((self.y != 0) & (self.y != 1)):
            raise DatasetError("labels must be binary")

    def __len__(self):
        return int(self.y.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.feature_arity)

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(self.feature_names, self.feature_arity, self.X[idx], self.y[idx],
                              self.categories)

    @classmethod
    def from_binary(cls, X, y, names=None) -> "LabeledDataset":
        X = np.asarray(X, dtype=np.int64)
        d = X.shape[1]
        names = names or [f"z{j}" for j in range(d)]
        return cls(list(names), [2] * d, X, y)


def read_labeled_csv(path, label_column: str = "label") -> LabeledDataset:
    """Nominal values become category indices in order of first appearance."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if label_column not in header:
            raise DatasetError(f"{path}: no label column {label_column!r}")
        li = header.index(label_column)
        names = [h for k, h in enumerate(header) if k != li]
        maps = [dict() for _ in names]
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise DatasetError(f"{path}: line {lineno} has {len(rec)} fields, expected {len(header)}")
            labels.append(rec[li])
            vals = [v for k, v in enumerate(rec) if k != li]
            rows.append([maps[j].setdefault(v, len(maps[j])) for j, v in enumerate(vals)])
    distinct = list(dict.fromkeys(labels))
    if set(distinct) <= {"0", "1"}:
        label_map = {"0": 0, "1": 1}
    elif len(distinct) <= 2:
        label_map = {v: k for k, v in enumerate(distinct)}
    else:
        raise DatasetError(f"{path}: label column has {len(distinct)} classes; only binary supported")
    y = [label_map[v] for v in labels]
    categories = {n: list(m) for n, m in zip(names, maps)}
    categories[label_column] = list(label_map)
    arity = [max(1, len(m)) for m in maps]
    X = np.array(rows, dtype=np.int64).reshape(len(rows), len(names))
    return LabeledDataset(names, arity, X, y, categories)


def write_labeled_csv(data: LabeledDataset, path, label_column: str = "label") -> None:
    """Write category indices (or original values when a category map is present)."""
    with _text_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(data.feature_names) + [label_column])
        for row, lab in zip(data.X, data.y):
            vals = []
            for name, v in zip(data.feature_names, row):
                cats = data.categories.get(name)
                vals.append(cats[v] if cats else int(v))
            labels = data.categories.get(label_column)
            vals.append(labels[lab] if labels else int(lab))
            w.writerow(vals)


def write_category_map(data: LabeledDataset, path) -> None:
    with _text_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["column", "value", "index"])
        for name, cats in data.categories.items():
            for k, v in enumerate(cats):
                w.writerow([name, v, k])


@dataclass(frozen=True)
class PlantedRuleSpec:
    size: int
    seed: int
    n_features: int = 10
    n_informative: int = 3
    noise: float = 0.1

    def __post_init__(self):
        if self.size < 1:
            raise DatasetError("size must be >= 1")
        if not 0.0 <= self.noise < 0.5:
            raise DatasetError("noise rate must lie in [0, 0.5)")
        if not 1 <= self.n_informative <= self.n_features:
            raise DatasetError("need 1 <= n_informative <= n_features")


def planted_rule(X: np.ndarray, n_informative: int) -> np.ndarray:
    """Noise-free label: majority vote of the first ``n_informative`` columns (ties -> 1)."""
    votes = np.asarray(X)[:, :n_informative].sum(axis=1)
    return (2 * votes >= n_informative).astype(np.int64)


def generate_planted_rule(spec: PlantedRuleSpec, return_flips: bool = False):
    """Uniform binary features; label is the planted majority flipped at the noise rate."""
    rng = np.random.default_rng(spec.seed)
    X = rng.integers(0, 2, size=(spec.size, spec.n_features))
    clean = planted_rule(X, spec.n_informative)
    flips = rng.random(spec.size) < spec.noise
    y = np.where(flips, 1 - clean, clean)
    data = LabeledDataset.from_binary(X, y)
    if return_flips:
        return data, flips
    return data


def planted_bayes_auc(n_informative: int, noise: float) -> float:
    """AUC of the Bayes-optimal scorer (the clean rule) on planted-rule data.

    The rule is a 0/1 score; ``P(clean=1) = q`` from the binomial majority.
    """
    k = n_informative
    q = sum(math.comb(k, v) for v in range(k + 1) if 2 * v >= k) / 2**k
    # P(score=1 | y=1), P(score=1 | y=0)
    p_y1 = q * (1 - noise) + (1 - q) * noise
    tpr = q * (1 - noise) / p_y1
    fpr = q * noise / (1 - p_y1)
    return 0.5 * (1 + tpr - fpr)
