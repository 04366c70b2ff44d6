"""Simplified swarm optimization over arc-reliability vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SsoParams:
    c_g: float = 0.4
    c_p: float = 0.2
    c_w: float = 0.1

    def __post_init__(self):
        for c in (self.c_g, self.c_p, self.c_w):
            if not 0 <= c <= 1:
                raise ValueError("SSO probabilities must lie in [0, 1]")
        if self.c_g + self.c_p + self.c_w > 1 + 1e-12:
            raise ValueError("c_g + c_p + c_w must not exceed 1")

    @property
    def cuts(self) -> tuple:
        # rounded so that 0.4 + 0.2 lands on 0.6 exactly
        return self.c_g, round(self.c_g + self.c_p, 12), round(self.c_g + self.c_p + self.c_w, 12)


@dataclass
class Swarm:
    """Solutions X, personal bests P and the global best G with recorded fitness."""

    X: np.ndarray
    P: np.ndarray
    G: np.ndarray
    fX: np.ndarray
    fP: np.ndarray
    fG: float = float("nan")

    @property
    def n_sol(self) -> int:
        return self.X.shape[0]

    @property
    def n_var(self) -> int:
        return self.X.shape[1]


def init_swarm(n_sol: int, n_var: int, rng: np.random.Generator) -> Swarm:
    if n_sol < 1 or n_var < 1:
        raise ValueError("swarm needs n_sol >= 1 and n_var >= 1")
    X = rng.random((n_sol, n_var))
    nan = np.full(n_sol, np.nan)
    return Swarm(X, X.copy(), X[0].copy(), nan, nan.copy())


def update_solution(x, p, g, params: SsoParams, rng: np.random.Generator,
                    rho: Optional[np.ndarray] = None) -> np.ndarray:
    """Step-function update: per variable copy g, p, keep x, or draw afresh.

    ``rho`` overrides the per-variable uniform draws (for testing); fresh
    replacement values always come from ``rng``.
    """
    x, p, g = (np.asarray(v, dtype=float) for v in (x, p, g))
    if not x.shape == p.shape == g.shape:
        raise ValueError("x, p and g must have the same length")
    if rho is None:
        rho = rng.random(x.shape)
    rho = np.asarray(rho, dtype=float)
    a, b, c = params.cuts
    out = np.where(rho < a, g, np.where(rho < b, p, x))
    fresh = rho >= c
    out[fresh] = rng.random(int(fresh.sum()))
    return out
