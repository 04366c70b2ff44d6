"""Two-class dataset loading, class mapping and the correlation-signed normalization.

Attribute values are turned into node reliabilities in [0, 1].  Each column is
min-max scaled over the training instances and flipped when its Spearman
correlation with the 0/1 class is negative, so that a larger value always
leans towards class 1.
"""

from __future__ import annotations

import csv
import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

logger = logging.getLogger(__name__)

FORMATS = ("csv", "libsvm")
CLASS_POSITIONS = ("last_column", "libsvm_leading")


class DatasetError(ValueError):
    """Raised for unreadable, malformed or out-of-scope data."""


class SingleClassWarning(UserWarning):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RawDataset:
    instances: np.ndarray  # (n_instances, n_attributes)
    labels: tuple
    name: str = ""

    def __post_init__(self):
        inst = _frozen(self.instances)
        if inst.ndim != 2:
            raise DatasetError("instances must form a 2-d table")
        if inst.shape[0] == 0:
            raise DatasetError("dataset has zero instances")
        if len(self.labels) != inst.shape[0]:
            raise DatasetError("label count does not match instance count")
        object.__setattr__(self, "instances", inst)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        if len(set(self.labels)) > 2:
            raise DatasetError(f"more than two classes: {sorted(set(self.labels))}")

    @property
    def n_attributes(self) -> int:
        return self.instances.shape[1]

    def __len__(self) -> int:
        return self.instances.shape[0]

    def subset(self, idx) -> "RawDataset":
        idx = np.asarray(idx, dtype=int)
        return RawDataset(self.instances[idx], tuple(self.labels[i] for i in idx), self.name)


def _parse_float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise DatasetError(f"line {lineno}: cannot parse {tok!r} as a number") from None


def _read_libsvm(path: Path, labeled: bool, n_attributes: Optional[int]):
    rows, labels = [], []
    max_idx = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if labeled:
                labels.append(parts[0])
                parts = parts[1:]
            entries = {}
            for tok in parts:
                idx, sep, val = tok.partition(":")
                if not sep:
                    raise DatasetError(f"line {lineno}: expected index:value, got {tok!r}")
                try:
                    j = int(idx)
                except ValueError:
                    raise DatasetError(f"line {lineno}: bad feature index {idx!r}") from None
                if j < 1:
                    raise DatasetError(f"line {lineno}: feature index must be >= 1")
                entries[j] = _parse_float(val, lineno)
                max_idx = max(max_idx, j)
            rows.append(entries)
    if not rows:
        raise DatasetError(f"{path}: zero instances")
    n = max_idx if n_attributes is None else n_attributes
    if max_idx > n:
        raise DatasetError(f"{path}: feature index {max_idx} exceeds expected {n} attributes")
    X = np.zeros((len(rows), n))
    for i, entries in enumerate(rows):
        for j, v in entries.items():
            X[i, j - 1] = v
    return X, labels


def _read_csv(path: Path, labeled: bool, n_attributes: Optional[int]):
    with open(path, newline="") as fh:
        records = [(i, r) for i, r in enumerate(csv.reader(fh), 1) if any(c.strip() for c in r)]
    if not records:
        raise DatasetError(f"{path}: zero instances")

    def numeric(cells):
        try:
            [float(c) for c in cells]
            return True
        except ValueError:
            return False

    first = records[0][1]
    if not numeric(first[:-1] if labeled else first):
        records = records[1:]
        if not records:
            raise DatasetError(f"{path}: zero instances")
    width = len(records[0][1])
    rows, labels = [], []
    for lineno, rec in records:
        if len(rec) != width:
            raise DatasetError(f"line {lineno}: expected {width} fields, got {len(rec)}")
        vals = rec[:-1] if labeled else rec
        rows.append([_parse_float(c.strip(), lineno) for c in vals])
        if labeled:
            labels.append(rec[-1].strip())
    X = np.array(rows, dtype=float).reshape(len(rows), -1)
    if n_attributes is not None and X.shape[1] != n_attributes:
        raise DatasetError(f"{path}: has {X.shape[1]} attributes, expected {n_attributes}")
    return X, labels


def load_dataset(
    path,
    format: str = "libsvm",
    class_position: Optional[str] = None,
    *,
    labeled: bool = True,
    n_attributes: Optional[int] = None,
) -> RawDataset:
    """Read a two-class dataset from a CSV or LIBSVM file.

    LIBSVM entries missing from a line are zero.  ``n_attributes`` pins the
    attribute count (used when reading data for an existing model); otherwise
    it is the largest feature index seen.  With ``labeled=False`` every CSV
    column is an attribute, LIBSVM lines carry no leading label, and the
    returned labels are empty strings.
    """
    path = Path(path)
    if format not in FORMATS:
        raise DatasetError(f"unknown format {format!r}")
    expected = "last_column" if format == "csv" else "libsvm_leading"
    if class_position is not None and class_position != expected:
        raise DatasetError(f"class position {class_position!r} is not supported for {format}")
    if not path.is_file():
        raise DatasetError(f"cannot read {path}")
    reader = _read_csv if format == "csv" else _read_libsvm
    X, labels = reader(path, labeled, n_attributes)
    if not labeled:
        labels = [""] * X.shape[0]
    logger.debug("loaded %s: %d instances, %d attributes", path, *X.shape)
    return RawDataset(X, tuple(labels), path.stem)


@dataclass(frozen=True)
class ClassMap:
    label_for_one: str
    label_for_zero: Optional[str]
    n_one: int
    n_total: int

    @property
    def theta(self) -> float:
        return self.n_one / self.n_total

    def encode(self, labels: Sequence[str]) -> np.ndarray:
        out = np.empty(len(labels), dtype=np.int8)
        for i, lab in enumerate(labels):
            if lab == self.label_for_one:
                out[i] = 1
            elif lab == self.label_for_zero:
                out[i] = 0
            else:
                raise DatasetError(f"label {lab!r} is not one of the mapped classes")
        return out

    def decode(self, y: int) -> str:
        if y == 1:
            return self.label_for_one
        # single-class training data has no label for class 0
        return self.label_for_zero if self.label_for_zero is not None else ""


def map_classes(raw: RawDataset) -> ClassMap:
    """Majority label becomes class 1; ties go to the byte-wise larger label."""
    counts = Counter(raw.labels)
    if len(counts) == 1:
        (label, n), = counts.items()
        warnings.warn(f"only one class ({label!r}) present; theta = 1", SingleClassWarning, stacklevel=2)
        return ClassMap(label, None, n, n)
    (a, na), (b, nb) = sorted(counts.items(), key=lambda kv: (kv[1], kv[0].encode()), reverse=True)
    return ClassMap(a, b, na, na + nb)


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman correlation with average ranks; 0 when either side is constant."""
    rx = rankdata(x)
    ry = rankdata(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = np.sqrt((rx @ rx) * (ry @ ry))
    if denom == 0:
        return 0.0
    return float((rx @ ry) / denom)


@dataclass(frozen=True)
class TransformSpec:
    mins: np.ndarray
    maxs: np.ndarray
    flips: np.ndarray
    r_s: np.ndarray
    class_map: ClassMap

    def __post_init__(self):
        for name in ("mins", "maxs", "r_s"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        flips = np.array(self.flips, dtype=bool)
        flips.setflags(write=False)
        object.__setattr__(self, "flips", flips)

    @property
    def n_attributes(self) -> int:
        return len(self.mins)

    @property
    def theta(self) -> float:
        return self.class_map.theta

    def transform(self, X) -> np.ndarray:
        """Map a table (or a single row) of attribute values to node reliabilities."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.n_attributes:
            raise DatasetError(f"expected {self.n_attributes} attributes, got {X.shape[1]}")
        span = self.maxs - self.mins
        constant = span == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = (X - self.mins) / np.where(constant, 1.0, span)
        scaled = np.clip(scaled, 0.0, 1.0)
        scaled = np.where(self.flips, 1.0 - scaled, scaled)
        scaled = np.where(constant, 0.5, scaled)
        return scaled[0] if single else scaled


@dataclass(frozen=True)
class TransformedDataset:
    node_rel: np.ndarray  # (n_instances, n_attributes), values in [0, 1]
    y01: np.ndarray
    spec: TransformSpec = field(repr=False)

    @property
    def theta(self) -> float:
        return self.spec.theta

    def __len__(self) -> int:
        return len(self.y01)

    def subset(self, idx) -> "TransformedDataset":
        idx = np.asarray(idx, dtype=int)
        return TransformedDataset(self.node_rel[idx], self.y01[idx], self.spec)


def fit_transform(raw: RawDataset, cmap: ClassMap) -> tuple[TransformSpec, TransformedDataset]:
    y01 = cmap.encode(raw.labels)
    X = raw.instances
    r_s = np.array([spearman(X[:, j], y01) for j in range(X.shape[1])])
    spec = TransformSpec(X.min(axis=0), X.max(axis=0), r_s < 0, r_s, cmap)
    node_rel = spec.transform(X)
    node_rel.setflags(write=False)
    y01.setflags(write=False)
    return spec, TransformedDataset(node_rel, y01, spec)


def apply_transform(spec: TransformSpec, instance) -> np.ndarray:
    instance = np.asarray(instance, dtype=float)
    if instance.ndim != 1:
        raise DatasetError("apply_transform takes a single attribute vector")
    return spec.transform(instance)
