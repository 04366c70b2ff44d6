import numpy as np
import pytest

from relnet.crossval import cross_validate, stratified_folds
from relnet.dataset import DatasetError, RawDataset
from relnet.synthetic import make_separable
from relnet.trainer import TrainConfig

TINY = TrainConfig(n_run=2, n_gen=2, n_sol=2, folds=5, master_seed=9)


def test_folds_partition_100():
    labels = ["+1"] * 60 + ["-1"] * 40
    fold_of = stratified_folds(labels, 10, seed=1)
    sizes = np.bincount(fold_of, minlength=10)
    assert list(sizes) == [10] * 10
    labels = np.array(labels)
    for f in range(10):
        assert (labels[fold_of == f] == "+1").sum() == 6


@pytest.mark.parametrize("n_pos, n_neg, k", [(37, 13, 10), (7, 5, 3), (101, 99, 7)])
def test_folds_stratified(n_pos, n_neg, k):
    labels = np.array(["p"] * n_pos + ["n"] * n_neg)
    fold_of = stratified_folds(labels, k, seed=4)
    assert set(fold_of) == set(range(k))
    for lab, count in (("p", n_pos), ("n", n_neg)):
        per_fold = np.bincount(fold_of[labels == lab], minlength=k)
        assert per_fold.max() - per_fold.min() <= 1
        assert per_fold.sum() == count


def test_folds_seeded():
    labels = ["a"] * 20 + ["b"] * 10
    np.testing.assert_array_equal(stratified_folds(labels, 5, 3), stratified_folds(labels, 5, 3))
    assert not np.array_equal(stratified_folds(labels, 5, 3), stratified_folds(labels, 5, 4))


def test_cross_validate_report():
    raw = make_separable(50, 3, 0.6, seed=2)
    res = cross_validate(raw, TINY, compare_full_mcs=True)
    assert len(res.folds) == 5
    assert sum(f.n_test for f in res.folds) == 50
    assert res.aggregate["test_accuracy"] == pytest.approx(np.mean([f.test_accuracy for f in res.folds]))
    for f in res.folds:
        assert 0 <= f.test_accuracy <= 1 and 0 <= f.train_accuracy <= 1
        assert 0 < f.sims_fraction <= 1
        assert f.sims_fraction == pytest.approx(f.mean_sims / 2000)
        assert len(f.run_fitness) == 2
        assert sum(f.confusion.values()) == f.n_test
        assert 0 <= f.agreement <= 1
    d = res.to_dict()
    assert "wall_time" not in d["folds"][0] and "wall_time" not in d["aggregate"]


def test_cross_validate_deterministic():
    raw = make_separable(30, 2, 0.6, seed=1)
    cfg = TrainConfig(n_run=1, n_gen=2, n_sol=2, folds=3, master_seed=5)
    assert cross_validate(raw, cfg).to_dict() == cross_validate(raw, cfg).to_dict()


def test_errors():
    raw = make_separable(20, 2, 0.6, seed=1)
    with pytest.raises(DatasetError):
        cross_validate(raw, TrainConfig(folds=1))
    with pytest.raises(DatasetError):
        cross_validate(raw.subset(range(5)), TrainConfig(folds=10))
    single = RawDataset(np.zeros((12, 2)), ["x"] * 12)
    with pytest.raises(DatasetError):
        cross_validate(single, TrainConfig(folds=3))
    lone_minority = RawDataset(np.arange(12.0).reshape(6, 2), ["x"] * 5 + ["y"])
    with pytest.raises(DatasetError, match="single class"):
        cross_validate(lone_minority, TrainConfig(n_run=1, n_gen=1, n_sol=1, folds=3))
