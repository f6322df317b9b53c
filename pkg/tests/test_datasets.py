import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from imro.datasets import (DatasetError, LabeledDataset, PlantedRuleSpec, RepostDataset, RepostSpec,
                           generate_planted_rule, generate_repost_data, planted_bayes_auc, planted_rule,
                           read_labeled_csv, read_repost_csv, repost_link, write_category_map,
                           write_labeled_csv, write_repost_csv)


def test_size_zero_forbidden():
    with pytest.raises(DatasetError):
        RepostSpec(0, 1)
    with pytest.raises(DatasetError):
        PlantedRuleSpec(0, 1)
    with pytest.raises(DatasetError):
        PlantedRuleSpec(10, 1, noise=0.5)


def test_repost_mean_matches_link():
    d = generate_repost_data(RepostSpec(50, 7, alpha=1.5, p0=0.05, avg_friends=20))
    analytic = repost_link(1.5, d.reposts, 20, 0.05).mean()
    assert abs(d.outcomes.mean() - analytic) <= 0.15


def test_repost_deterministic():
    a = generate_repost_data(RepostSpec(40, 3))
    b = generate_repost_data(RepostSpec(40, 3))
    assert np.array_equal(a.reposts, b.reposts) and np.array_equal(a.outcomes, b.outcomes)


def test_repost_roundtrip(tmp_path):
    d = generate_repost_data(RepostSpec(30, 1))
    p = tmp_path / "r.csv"
    write_repost_csv(d, p)
    e = read_repost_csv(p, avg_friends=d.avg_friends, p0=d.p0)
    assert e.post_ids == d.post_ids
    assert np.array_equal(e.reposts, d.reposts)
    assert np.array_equal(e.outcomes, d.outcomes)


def test_repost_default_friends_is_mean(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("post_id,reposts,outcome\na,2,1\nb,4,0\n")
    assert read_repost_csv(p).avg_friends == 3.0


def test_repost_validation(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("post_id,reposts,outcome\na,2,3\n")
    with pytest.raises(DatasetError):
        read_repost_csv(p)
    p.write_text("post_id,count\n")
    with pytest.raises(DatasetError, match="missing"):
        read_repost_csv(p)


def test_planted_noise_free_is_function():
    d = generate_planted_rule(PlantedRuleSpec(500, 3, noise=0.0))
    assert np.array_equal(d.y, planted_rule(d.X, 3))


def test_planted_flip_count_binomial():
    d, flips = generate_planted_rule(PlantedRuleSpec(1000, 42, noise=0.1), return_flips=True)
    mean, sd = 100, math.sqrt(1000 * 0.1 * 0.9)
    assert abs(int(flips.sum()) - mean) <= 4 * sd
    assert int((d.y != planted_rule(d.X, 3)).sum()) == int(flips.sum())


def test_uninformative_columns_independent():
    d = generate_planted_rule(PlantedRuleSpec(1000, 42))
    for j in range(3, 10):
        table = np.zeros((2, 2))
        for v, lab in zip(d.X[:, j], d.y):
            table[v, lab] += 1
        assert chi2_contingency(table)[1] > 0.001
    # the informative ones are strongly dependent
    table = np.zeros((2, 2))
    for v, lab in zip(d.X[:, 0], d.y):
        table[v, lab] += 1
    assert chi2_contingency(table)[1] < 1e-6


def test_bayes_auc_formula():
    assert planted_bayes_auc(3, 0.1) == pytest.approx(0.9)
    assert planted_bayes_auc(3, 0.0) == pytest.approx(1.0)


def test_labeled_roundtrip(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("colour,size,label\nred,S,yes\nblue,S,no\nred,L,no\ngreen,M,yes\n")
    d = read_labeled_csv(p)
    assert d.feature_arity == [3, 3]
    assert d.X.tolist() == [[0, 0], [1, 0], [0, 1], [2, 2]]
    assert d.y.tolist() == [0, 1, 1, 0]
    q = tmp_path / "l2.csv"
    write_labeled_csv(d, q)
    assert q.read_text() == p.read_text()
    e = read_labeled_csv(q)
    assert e.X.tolist() == d.X.tolist() and e.y.tolist() == d.y.tolist()
    assert e.categories == d.categories
    m = tmp_path / "map.csv"
    write_category_map(d, m)
    assert "colour,green,2" in m.read_text()


def test_labeled_binary_labels_kept(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("a,label\nx,1\ny,0\n")
    assert read_labeled_csv(p).y.tolist() == [1, 0]


def test_labeled_rejects_multiclass(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("a,label\nx,u\ny,v\nz,w\n")
    with pytest.raises(DatasetError):
        read_labeled_csv(p)


def test_labeled_invariants():
    with pytest.raises(DatasetError):
        LabeledDataset(["a"], [2], [[2]], [0])
    with pytest.raises(DatasetError):
        LabeledDataset(["a"], [2], [[1]], [3])
