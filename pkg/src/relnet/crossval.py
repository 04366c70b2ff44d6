"""Stratified k-fold cross-validation and the per-fold report rows."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import streams
from .dataset import DatasetError, RawDataset, fit_transform, map_classes
from .trainer import TrainConfig, predict_many, run_many, with_seed
from .ubcn import build_topology

logger = logging.getLogger(__name__)


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per instance.

    Each class is shuffled with a seeded stream, the classes are concatenated
    (sorted by label) and dealt round-robin, so every fold gets within one
    instance of its share of each class and fold sizes differ by at most one.
    """
    labels = np.asarray(labels)
    rng = streams.stream(seed, streams.SHUFFLE)
    order = []
    for lab in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == lab)
        order.append(rng.permutation(idx))
    order = np.concatenate(order)
    fold_of = np.empty(len(labels), dtype=int)
    fold_of[order] = np.arange(len(order)) % folds
    return fold_of


@dataclass
class FoldReport:
    fold: int
    n_train: int
    n_test: int
    train_accuracy: float
    test_accuracy: float
    mean_sims: float  # per test instance, iMCS
    sims_fraction: float  # mean_sims / n_sim
    train_mean_sims: float  # per iMCS call over all training runs
    confusion: dict  # keyed by "<true>-><predicted>" original labels
    run_fitness: list
    wall_time: float = 0.0
    mcs_test_accuracy: Optional[float] = None
    agreement: Optional[float] = None


@dataclass
class CrossValResult:
    folds: list
    aggregate: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        rows = []
        for f in self.folds:
            d = asdict(f)
            if not timing:
                d.pop("wall_time")
            rows.append(d)
        agg = dict(self.aggregate)
        if not timing:
            agg.pop("wall_time", None)
        return {"folds": rows, "aggregate": agg}


_AVERAGED = ("train_accuracy", "test_accuracy", "mean_sims", "sims_fraction", "train_mean_sims",
             "wall_time", "mcs_test_accuracy", "agreement")


def aggregate(reports) -> dict:
    out = {}
    for key in _AVERAGED:
        vals = [getattr(r, key) for r in reports]
        if all(v is not None for v in vals):
            out[key] = float(np.mean(vals))
    return out


def cross_validate(raw: RawDataset, config: TrainConfig, compare_full_mcs: bool = False) -> CrossValResult:
    """k-fold CV; class map and transform are fit on each training portion only.

    With ``compare_full_mcs`` every test instance is also classified by a
    full-length MCS on the same stream, and the agreement rate is reported.
    """
    k = config.folds
    if k < 2:
        raise DatasetError("cross-validation needs at least 2 folds")
    if len(raw) < k:
        raise DatasetError(f"{len(raw)} instances cannot fill {k} folds")
    if len(set(raw.labels)) < 2:
        raise DatasetError("cross-validation needs both classes present")
    fold_of = stratified_folds(raw.labels, k, config.master_seed)
    topology = build_topology(raw.n_attributes)
    n_sim = config.sim.n_sim
    reports = []
    for f in range(k):
        t0 = time.perf_counter()
        train_idx = np.flatnonzero(fold_of != f)
        test_idx = np.flatnonzero(fold_of == f)
        train_raw = raw.subset(train_idx)
        if len(set(train_raw.labels)) < 2:
            raise DatasetError(f"fold {f + 1}: training portion has a single class")
        cmap = map_classes(train_raw)
        _, data = fit_transform(train_raw, cmap)
        fold_cfg = with_seed(config, streams.derive_seed(config.master_seed, streams.FOLD, f))
        model, records = run_many(data, topology, fold_cfg)
        X_test = raw.instances[test_idx]
        truth = [raw.labels[i] for i in test_idx]
        labels, classes, sims = predict_many(model, X_test, key=(f,), workers=config.workers)
        correct = np.array([a == b for a, b in zip(labels, truth)])
        confusion = {}
        for a, b in zip(truth, labels):
            confusion[f"{a}->{b}"] = confusion.get(f"{a}->{b}", 0) + 1
        mcs_acc = agreement = None
        if compare_full_mcs:
            full_labels, full_classes, _ = predict_many(model, X_test, key=(f,), workers=config.workers,
                                                        early_stop=False)
            mcs_acc = float(np.mean([a == b for a, b in zip(full_labels, truth)]))
            agreement = float(np.mean(full_classes == classes))
        mean_sims = float(sims.mean())
        rep = FoldReport(
            fold=f + 1,
            n_train=len(train_idx),
            n_test=len(test_idx),
            train_accuracy=float(model.fitness),
            test_accuracy=float(correct.mean()),
            mean_sims=mean_sims,
            sims_fraction=float(sims.sum()) / (len(test_idx) * n_sim),
            train_mean_sims=float(np.mean([r.mean_sims for r in records])),
            confusion=dict(sorted(confusion.items())),
            run_fitness=[r.fitness for r in records],
            wall_time=time.perf_counter() - t0,
            mcs_test_accuracy=mcs_acc,
            agreement=agreement,
        )
        logger.info("fold %d/%d: test accuracy %.4f, sims %.2f", f + 1, k, rep.test_accuracy, mean_sims)
        reports.append(rep)
    return CrossValResult(reports, aggregate(reports))
