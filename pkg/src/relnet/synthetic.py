"""Seeded synthetic two-class data for demos and tests."""

import numpy as np

from .dataset import RawDataset


def make_separable(n_instances: int = 200, n_attributes: int = 4, majority: float = 0.6,
                   noise: float = 0.1, seed: int = 0) -> RawDataset:
    """Every attribute equals the 0/1 class plus Gaussian noise.

    Exactly ``round(majority * n_instances)`` instances carry label "+1".
    """
    rng = np.random.default_rng(seed)
    n_one = int(round(majority * n_instances))
    y = np.zeros(n_instances, dtype=int)
    y[:n_one] = 1
    rng.shuffle(y)
    X = y[:, None] + noise * rng.standard_normal((n_instances, n_attributes))
    labels = tuple("+1" if v else "-1" for v in y)
    return RawDataset(X, labels, "separable")
