"""Monte Carlo reliability estimation and the early-stopping classifier (iMCS).

Replications are grouped into intervals of ``delta_n_sim``.  After interval i
the running success count is compared against

    LB_i = N_i * (theta - delta_i),   UB_i = N_i * (theta + delta_i)
    delta_i = z * (sqrt(p(1-p) / N_i) - sqrt(p(1-p) / N_sim))

and the instance is classified 0 / 1 as soon as it falls outside [LB_i, UB_i].
At the final interval delta is 0 and the decision is forced, with
omega == N_sim * theta resolved to class 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from .ubcn import ReliabilityAssignment, Topology, connected_batch, sample_block


def z_for_alpha(alpha: float) -> float:
    """Upper alpha/2 normal quantile rounded to 4 decimals (2.5758 for alpha=0.01)."""
    return round(float(norm.isf(alpha / 2)), 4)


def min_replications(eps: float, p_eps: float = 0.9, alpha: float = 0.01) -> int:
    """Smallest replication count meeting relative error ``eps`` at confidence 1 - alpha."""
    z = z_for_alpha(alpha)
    return math.ceil(z * z * p_eps * (1 - p_eps) / (eps * eps))


@dataclass(frozen=True)
class SimParams:
    n_sim: int = 2000
    delta_n_sim: int = 100
    alpha: float = 0.01
    p_eps: float = 0.90
    z_half_alpha: Optional[float] = None

    def __post_init__(self):
        if self.z_half_alpha is None:
            object.__setattr__(self, "z_half_alpha", z_for_alpha(self.alpha))
        if self.n_sim < 1 or self.delta_n_sim < 1 or self.n_sim % self.delta_n_sim:
            raise ValueError("n_sim must be a positive multiple of delta_n_sim")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.p_eps < 1:
            raise ValueError("p_eps must lie in (0, 1)")
        if not self.z_half_alpha > 0:
            raise ValueError("z_half_alpha must be positive")

    @property
    def n_intervals(self) -> int:
        return self.n_sim // self.delta_n_sim


@dataclass(frozen=True)
class BoundsTable:
    theta: float
    params: SimParams
    n_sim_i: np.ndarray
    delta: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __len__(self) -> int:
        return len(self.delta)


def build_bounds(theta: float, params: SimParams = SimParams()) -> BoundsTable:
    if not 0 <= theta <= 1:
        raise ValueError("theta must lie in [0, 1]")
    v = params.p_eps * (1 - params.p_eps)
    n_i = params.delta_n_sim * np.arange(1, params.n_intervals + 1)
    tail = math.sqrt(v / params.n_sim)
    delta = np.array([params.z_half_alpha * (math.sqrt(v / int(k)) - tail) for k in n_i])
    lb = n_i * (theta - delta)
    ub = n_i * (theta + delta)
    for a in (n_i, delta, lb, ub):
        a.setflags(write=False)
    return BoundsTable(theta, params, n_i, delta, lb, ub)


@dataclass(frozen=True)
class ImcsOutcome:
    predicted_class: int
    sims_used: int
    omega_at_stop: int
    tie: bool = False


def mcs_estimate(topology: Topology, assign: ReliabilityAssignment, n_sim: int, rng: np.random.Generator,
                 block: int = 1000) -> float:
    """Plain MCS: fraction of ``n_sim`` sampled states connecting source and sink."""
    if n_sim < 1:
        raise ValueError("n_sim must be >= 1")
    assign.check(topology)
    hits = 0
    done = 0
    while done < n_sim:
        k = min(block, n_sim - done)
        arc_up, node_up = sample_block(topology, assign, rng, k)
        hits += int(connected_batch(topology, arc_up, node_up).sum())
        done += k
    return hits / n_sim


def imcs_batch(
    topology: Topology,
    arc_rel: np.ndarray,
    node_rel: np.ndarray,
    bounds: BoundsTable,
    rngs: Sequence[np.random.Generator],
    early_stop: bool = True,
):
    """Classify many instances at once, each with its own random stream.

    ``node_rel`` is (N, n).  Instance k draws its blocks from ``rngs[k]`` in
    the same order a lone :func:`imcs_classify` call would, so results do not
    depend on how instances are batched.  Returns arrays
    (classes, sims_used, omega, tie).  With ``early_stop=False`` every
    instance runs the full ``n_sim`` replications.
    """
    node_rel = np.atleast_2d(node_rel)
    N = node_rel.shape[0]
    if len(rngs) != N:
        raise ValueError("need one random stream per instance")
    delta = bounds.params.delta_n_sim
    n_var, k = topology.n_var, topology.n_components
    arc_rel = np.asarray(arc_rel, dtype=float)
    classes = np.zeros(N, dtype=np.int8)
    sims = np.zeros(N, dtype=np.int64)
    omega = np.zeros(N, dtype=np.int64)
    tie = np.zeros(N, dtype=bool)
    active = np.arange(N)
    last = len(bounds) - 1
    for i in range(len(bounds)):
        if active.size == 0:
            break
        u = np.stack([rngs[j].random((delta, k)) for j in active])
        arc_up = u[..., :n_var] < arc_rel
        node_up = u[..., n_var:] < node_rel[active][:, None, :]
        hits = connected_batch(topology, arc_up.reshape(-1, n_var), node_up.reshape(-1, topology.n))
        omega[active] += hits.reshape(active.size, delta).sum(axis=1)
        sims[active] += delta
        w = omega[active]
        if i == last:
            classes[active] = w >= bounds.ub[i]
            tie[active] = w == bounds.ub[i]
            break
        if not early_stop:
            continue
        zero = w <= bounds.lb[i]
        one = ~zero & (w >= bounds.ub[i])
        classes[active[one]] = 1
        active = active[~(zero | one)]
    return classes, sims, omega, tie


def imcs_classify(topology: Topology, arc_rel, node_rel, bounds: BoundsTable,
                  rng: np.random.Generator) -> ImcsOutcome:
    ReliabilityAssignment(arc_rel, node_rel).check(topology)
    c, s, w, t = imcs_batch(topology, arc_rel, np.asarray(node_rel, dtype=float)[None, :], bounds, [rng])
    return ImcsOutcome(int(c[0]), int(s[0]), int(w[0]), bool(t[0]))


def mcs_classify(topology: Topology, arc_rel, node_rel, bounds: BoundsTable,
                 rng: np.random.Generator) -> ImcsOutcome:
    """Full-length MCS decision (R* >= theta -> 1) on the same stream layout as iMCS."""
    ReliabilityAssignment(arc_rel, node_rel).check(topology)
    c, s, w, t = imcs_batch(topology, arc_rel, np.asarray(node_rel, dtype=float)[None, :], bounds, [rng],
                            early_stop=False)
    return ImcsOutcome(int(c[0]), int(s[0]), int(w[0]), bool(t[0]))
