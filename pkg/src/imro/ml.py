"""Categorical classifiers for estimating the base click probability.

Naive Bayes with additive smoothing, Gini decision trees over one-vs-rest
category tests, and bootstrap random forests that average leaf probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datasets import LabeledDataset


class TrainingError(ValueError):
    pass


class InputError(ValueError):
    pass


def _check_features(x, arity) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1 or x.shape[0] != len(arity):
        raise InputError(f"expected {len(arity)} features, got shape {x.shape}")
    if np.any(x < 0) or np.any(x >= np.asarray(arity)):
        raise InputError(f"category index outside training arity {list(arity)}: {x.tolist()}")
    return x


# ---------------------------------------------------------------------------
# naive Bayes


@dataclass
class NaiveBayesModel:
    priors: np.ndarray          # (2,)
    tables: list                # per feature, array (2, arity_j); rows sum to 1
    arity: list
    kind: str = "NBC"

    def log_joint(self, x) -> np.ndarray:
        x = _check_features(x, self.arity)
        with np.errstate(divide="ignore"):
            out = np.log(self.priors).copy()
            for j, v in enumerate(x):
                out += np.log(self.tables[j][:, v])
        return out

    def predict_proba(self, x) -> float:
        lj = self.log_joint(x)
        top = lj.max()
        if not np.isfinite(top):
            # every class has zero likelihood; fall back to the class prior
            return float(self.priors[1])
        w = np.exp(lj - top)
        return float(w[1] / w.sum())

    def to_dict(self) -> dict:
        return {"kind": self.kind, "priors": self.priors.tolist(),
                "tables": [t.tolist() for t in self.tables]}


def train_nbc(data: LabeledDataset, smoothing: float = 1.0) -> NaiveBayesModel:
    if len(data) == 0:
        raise TrainingError("cannot train on an empty dataset")
    if smoothing < 0:
        raise TrainingError("smoothing must be non-negative")
    N = len(data)
    counts = np.bincount(data.y, minlength=2).astype(float)
    priors = (counts + smoothing) / (N + 2 * smoothing)
    tables = []
    for j, a in enumerate(data.feature_arity):
        t = np.zeros((2, a))
        for c in (0, 1):
            col = data.X[data.y == c, j]
            num = np.bincount(col, minlength=a).astype(float) + smoothing
            den = counts[c] + a * smoothing
            t[c] = num / den if den > 0 else np.full(a, 1.0 / a)
        tables.append(t)
    return NaiveBayesModel(priors, tables, list(data.feature_arity))


# ---------------------------------------------------------------------------
# decision tree


@dataclass
class TreeNode:
    prob: float                  # class-1 fraction of training rows reaching the node
    n: int
    feature: Optional[int] = None
    category: Optional[int] = None   # rows with x[feature] == category go left
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"leaf": round(self.prob, 6), "n": self.n}
        return {"feature": self.feature, "equals": self.category, "n": self.n,
                "left": self.left.to_dict(), "right": self.right.to_dict()}


def _best_split(X, y, features, arity):
    """Lowest weighted Gini over one-vs-rest tests; ties go to lower (feature, category)."""
    n = len(y)
    best = None
    best_imp = math.inf
    pos_total = float(y.sum())
    for j in features:
        a = arity[j]
        n_v = np.bincount(X[:, j], minlength=a).astype(float)
        p_v = np.bincount(X[:, j], weights=y, minlength=a)
        n_r = n - n_v
        p_r = pos_total - p_v
        valid = (n_v > 0) & (n_r > 0)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gl = 1.0 - (p_v / n_v) ** 2 - (1.0 - p_v / n_v) ** 2
            gr = 1.0 - (p_r / n_r) ** 2 - (1.0 - p_r / n_r) ** 2
            imp = (n_v * gl + n_r * gr) / n
        for v in np.flatnonzero(valid):
            if imp[v] < best_imp - 1e-12:
                best_imp, best = float(imp[v]), (int(j), int(v))
    return best


def _grow(X, y, depth, max_depth, arity, rng, max_features):
    n = len(y)
    node = TreeNode(prob=float(y.mean()), n=n)
    if depth >= max_depth or y.min() == y.max():
        return node
    d = len(arity)
    if max_features is None or max_features >= d:
        features = range(d)
    else:
        features = np.sort(rng.choice(d, size=max_features, replace=False))
    split = _best_split(X, y, features, arity)
    if split is None:
        return node
    j, v = split
    mask = X[:, j] == v
    node.feature, node.category = j, v
    node.left = _grow(X[mask], y[mask], depth + 1, max_depth, arity, rng, max_features)
    node.right = _grow(X[~mask], y[~mask], depth + 1, max_depth, arity, rng, max_features)
    return node


@dataclass
class DecisionTreeModel:
    root: TreeNode
    arity: list
    max_depth: int
    kind: str = "DTC"

    def leaf(self, x) -> TreeNode:
        x = _check_features(x, self.arity)
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] == node.category else node.right
        return node

    def predict_proba(self, x) -> float:
        return self.leaf(x).prob

    def depth(self) -> int:
        return self.root.depth()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "max_depth": self.max_depth, "tree": self.root.to_dict()}


def train_dtc(data: LabeledDataset, max_depth: int = 5) -> DecisionTreeModel:
    """Greedy Gini tree.

    Impure nodes keep splitting while some test separates their rows, even at
    zero impurity gain (XOR-style targets need a gainless first split).
    """
    if len(data) == 0:
        raise TrainingError("cannot train on an empty dataset")
    if max_depth < 1:
        raise TrainingError("max_depth must be positive")
    root = _grow(data.X, data.y.astype(float), 0, max_depth, list(data.feature_arity), None, None)
    return DecisionTreeModel(root, list(data.feature_arity), max_depth)


# ---------------------------------------------------------------------------
# random forest


@dataclass
class RandomForestModel:
    trees: list
    arity: list
    hard_vote: bool = False
    kind: str = "RFC"

    def predict_proba(self, x) -> float:
        x = _check_features(x, self.arity)
        if self.hard_vote:
            return float(np.mean([t.predict_proba(x) >= 0.5 for t in self.trees]))
        return float(np.mean([t.predict_proba(x) for t in self.trees]))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n_trees": len(self.trees), "hard_vote": self.hard_vote,
                "trees": [t.to_dict()["tree"] for t in self.trees]}


def train_rfc(data: LabeledDataset, n_trees: int = 20, max_depth: int = 5, seed: int = 0,
              max_features="sqrt", bootstrap: bool = True, hard_vote: bool = False) -> RandomForestModel:
    """Forest of Gini trees; tree ``t`` draws from ``default_rng(seed + t)``.

    ``max_features="sqrt"`` samples ceil(sqrt(D)) candidate features at each node;
    ``None`` uses all features.
    """
    if len(data) == 0:
        raise TrainingError("cannot train on an empty dataset")
    if n_trees < 1:
        raise TrainingError("n_trees must be positive")
    d = data.n_features
    m = math.ceil(math.sqrt(d)) if max_features == "sqrt" else max_features
    arity = list(data.feature_arity)
    N = len(data)
    y = data.y.astype(float)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(seed + t)
        idx = rng.integers(0, N, size=N) if bootstrap else np.arange(N)
        root = _grow(data.X[idx], y[idx], 0, max_depth, arity, rng, m)
        trees.append(DecisionTreeModel(root, arity, max_depth))
    return RandomForestModel(trees, arity, hard_vote)


# ---------------------------------------------------------------------------


def predict_proba(model, features) -> float:
    return model.predict_proba(features)


def predict_many(model, X) -> np.ndarray:
    return np.array([model.predict_proba(x) for x in np.asarray(X)])


def estimate_p0(model, samples) -> float:
    """Mean predicted class-1 probability over the samples."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise InputError("no samples to estimate p0 from")
    if samples.ndim == 1:
        samples = samples[None, :]
    return float(predict_many(model, samples).mean())


TRAINERS = {
    "nbc": lambda data, seed=0: train_nbc(data),
    "dtc": lambda data, seed=0: train_dtc(data, max_depth=5),
    "rfc": lambda data, seed=0: train_rfc(data, n_trees=20, max_depth=5, seed=seed),
}
