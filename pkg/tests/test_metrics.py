import numpy as np
import pytest

from imro.datasets import LabeledDataset, PlantedRuleSpec, generate_planted_rule
from imro.metrics import MetricError, accuracy, auc, cross_validate, fold_indices, train_test_split
from imro.ml import train_nbc

from oracles import pairwise_auc, trapezoid_roc_auc


def test_accuracy():
    assert accuracy([0.9, 0.1], [1, 0]) == 1.0
    assert accuracy([0.9, 0.2, 0.7], [1, 0, 0], 0.5) == pytest.approx(2 / 3)
    assert accuracy([0.0] * 5, [0] * 5) == 1.0
    with pytest.raises(MetricError):
        accuracy([], [])


def test_auc_examples():
    assert auc([0.9, 0.8, 0.3, 0.4], [1, 1, 0, 0]) == 1.0
    assert auc([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0]) == 0.75
    assert auc([0.5] * 6, [1, 0, 1, 0, 1, 0]) == 0.5
    with pytest.raises(MetricError):
        auc([0.1, 0.2], [1, 1])


@pytest.mark.parametrize("seed", range(10))
def test_auc_oracles(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 201))
    scores = np.round(rng.random(n), 2)  # rounding forces ties
    labels = rng.integers(0, 2, n)
    labels[0], labels[1] = 0, 1
    a = auc(scores, labels)
    assert a == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)
    assert a == pytest.approx(trapezoid_roc_auc(scores, labels), abs=1e-12)
    # invariant under strictly increasing transforms
    assert auc(np.exp(3 * scores) - 7, labels) == pytest.approx(a, abs=1e-12)


def test_auc_label_flip():
    rng = np.random.default_rng(3)
    s = rng.random(80)
    y = rng.integers(0, 2, 80)
    assert auc(s, 1 - y) == pytest.approx(1 - auc(s, y), abs=1e-12)


def small(n):
    rng = np.random.default_rng(n)
    return LabeledDataset.from_binary(rng.integers(0, 2, (n, 3)), rng.integers(0, 2, n))


def test_split_sizes():
    tr, te = train_test_split(small(10), 0.5, 1)
    assert (len(tr), len(te)) == (5, 5)
    tr, te = train_test_split(small(447), 0.1, 1)
    assert (len(tr), len(te)) == (44, 403)
    with pytest.raises(MetricError):
        train_test_split(small(5), 0.1, 1)


def test_split_disjoint():
    d = small(50)
    d.X[:, 0] = np.arange(50) % 2  # rows stay distinguishable via index bookkeeping
    perm = np.random.default_rng(4).permutation(50)
    tr, te = train_test_split(d, 0.3, 4)
    assert set(perm[:15]).isdisjoint(perm[15:])
    assert len(tr) + len(te) == 50


def test_folds_partition():
    for n, k in [(10, 3), (23, 5), (5, 5)]:
        parts = fold_indices(n, k, 0)
        sizes = [len(p) for p in parts]
        assert max(sizes) - min(sizes) <= 1
        assert sizes == sorted(sizes, reverse=True)
        allidx = np.concatenate(parts)
        assert sorted(allidx.tolist()) == list(range(n))
    with pytest.raises(MetricError):
        fold_indices(3, 4, 0)


def test_leave_one_out():
    d = small(12)
    res = cross_validate(d, 12, train_nbc, seed=2)
    assert all(len(f) == 1 for f in res.folds)
    assert len(res.fold_accuracy) == 12


class Constant:
    def __init__(self, p):
        self.p = p

    def predict_proba(self, x):
        return self.p


def test_constant_trainer_majority_fraction():
    d = generate_planted_rule(PlantedRuleSpec(203, 5, noise=0.3))
    majority = max(d.y.mean(), 1 - d.y.mean())
    guess = 1.0 if d.y.mean() >= 0.5 else 0.0
    res = cross_validate(d, 5, lambda tr: Constant(guess), seed=1)
    assert res.mean_accuracy == pytest.approx(majority, abs=0.01)
    assert res.mean_auc == pytest.approx(0.5)


def test_crossval_deterministic():
    d = generate_planted_rule(PlantedRuleSpec(100, 2))
    a = cross_validate(d, 5, train_nbc, seed=9)
    b = cross_validate(d, 5, train_nbc, seed=9)
    assert a.fold_auc == b.fold_auc and a.fold_accuracy == b.fold_accuracy
    assert all(np.array_equal(x, y) for x, y in zip(a.folds, b.folds))
