"""Unreliable binary-state complete network (UBCN).

Node ids: 0 is the source, 1..n are attribute nodes, n + 1 is the sink.
Arcs are undirected and held in one canonical order: every attribute pair
(j < k), then source -> j for j = 1..n, then j -> sink for j = 1..n.  Source
and sink never fail and are not joined directly.

Component states are sampled with one uniform draw per component, arcs first
then attribute nodes, so a block of ``k`` samples consumes exactly
``k * (n_var + n)`` draws from the stream.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ARC_ORDERING = "pairs-source-sink/v1"
MAX_EXACT_N = 5
_CHUNK_BITS = 18


@dataclass(frozen=True)
class Topology:
    n: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("a UBCN needs at least one attribute node")

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.n + 1

    @property
    def n_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def n_var(self) -> int:
        return self.n_pairs + 2 * self.n

    @property
    def n_components(self) -> int:
        return self.n_var + self.n

    @cached_property
    def arcs(self) -> tuple:
        n = self.n
        pairs = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
        return tuple(pairs + [(0, j) for j in range(1, n + 1)] + [(j, n + 1) for j in range(1, n + 1)])

    @cached_property
    def _pair_index(self):
        j, k = np.triu_indices(self.n, 1)
        return j, k


def build_topology(n: int) -> Topology:
    return Topology(int(n))


@dataclass(frozen=True)
class ComponentState:
    arc_up: np.ndarray
    node_up: np.ndarray


@dataclass(frozen=True)
class ReliabilityAssignment:
    arc_rel: np.ndarray
    node_rel: np.ndarray

    def __post_init__(self):
        for name in ("arc_rel", "node_rel"):
            a = np.array(getattr(self, name), dtype=float).ravel()
            if np.any((a < 0) | (a > 1)) or np.any(np.isnan(a)):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def check(self, topology: Topology) -> None:
        if len(self.arc_rel) != topology.n_var or len(self.node_rel) != topology.n:
            raise ValueError(
                f"assignment sized ({len(self.arc_rel)}, {len(self.node_rel)}), "
                f"topology needs ({topology.n_var}, {topology.n})"
            )


def is_connected(topology: Topology, state: ComponentState) -> bool:
    """Breadth-first search from source to sink over working arcs and nodes."""
    n = topology.n
    adj = [[] for _ in range(n + 2)]
    for up, (u, v) in zip(state.arc_up, topology.arcs):
        if up:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * (n + 2)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if seen[v]:
                continue
            if v == n + 1:
                return True
            if not state.node_up[v - 1]:
                continue
            seen[v] = True
            queue.append(v)
    return False


def connected_batch(topology: Topology, arc_up: np.ndarray, node_up: np.ndarray) -> np.ndarray:
    """Vectorized source-sink connectivity for many states at once.

    ``arc_up`` is (S, n_var) and ``node_up`` is (S, n); returns (S,) bools.
    Reachability is propagated over attribute pairs until it stops growing.
    """
    n, m = topology.n, topology.n_pairs
    # component-major rows keep the per-arc operations contiguous
    A = np.ascontiguousarray(arc_up.T)
    V = np.ascontiguousarray(node_up.T)
    reach = A[m:m + n] & V
    if m:
        J, K = topology._pair_index
        tmp = np.empty(A.shape[1], dtype=bool)
        for _ in range(n - 1):
            new = reach.copy()
            for e in range(m):
                np.bitwise_and(reach[J[e]], A[e], out=tmp)
                new[K[e]] |= tmp
                np.bitwise_and(reach[K[e]], A[e], out=tmp)
                new[J[e]] |= tmp
            new &= V
            if np.array_equal(new, reach):
                break
            reach = new
    return (reach & A[m + n:]).any(axis=0)


def sample_block(topology: Topology, assign: ReliabilityAssignment, rng: np.random.Generator, count: int):
    """Draw ``count`` component states; returns (arc_up, node_up) arrays."""
    u = rng.random((count, topology.n_components))
    return u[:, :topology.n_var] < assign.arc_rel, u[:, topology.n_var:] < assign.node_rel


def sample_state(topology: Topology, assign: ReliabilityAssignment, rng: np.random.Generator) -> ComponentState:
    assign.check(topology)
    u = rng.random(topology.n_components)
    return ComponentState(u[:topology.n_var] < assign.arc_rel, u[topology.n_var:] < assign.node_rel)


def _endpoint_mask(topology: Topology) -> np.ndarray:
    """(n_var, n) bool: which attribute nodes each arc touches."""
    m = np.zeros((topology.n_var, topology.n), dtype=bool)
    for e, (u, v) in enumerate(topology.arcs):
        for w in (u, v):
            if 1 <= w <= topology.n:
                m[e, w - 1] = True
    return m


def exact_reliability(topology: Topology, assign: ReliabilityAssignment) -> float:
    """Exact two-terminal reliability by state enumeration.

    Node states are enumerated outright; for each, arcs touching a failed
    node cannot matter and are summed out, and the remaining arcs are
    enumerated in full.
    """
    if topology.n > MAX_EXACT_N:
        raise ValueError(f"exact enumeration is limited to n <= {MAX_EXACT_N}")
    assign.check(topology)
    n, n_var = topology.n, topology.n_var
    touches = _endpoint_mask(topology)
    total = 0.0
    for code in range(1 << n):
        node_up = np.array([(code >> j) & 1 for j in range(n)], dtype=bool)
        w_nodes = np.prod(np.where(node_up, assign.node_rel, 1.0 - assign.node_rel))
        if w_nodes == 0:
            continue
        live = np.flatnonzero(~(touches & ~node_up).any(axis=1))
        p = assign.arc_rel[live]
        k = len(live)
        shifts = np.arange(k, dtype=np.int64)
        chunk = 1 << min(k, _CHUNK_BITS)
        for start in range(0, 1 << k, chunk):
            codes = np.arange(start, start + chunk, dtype=np.int64)
            bits = ((codes[:, None] >> shifts) & 1).astype(bool)
            arc_up = np.zeros((chunk, n_var), dtype=bool)
            arc_up[:, live] = bits
            ok = connected_batch(topology, arc_up, np.broadcast_to(node_up, (chunk, n)))
            if ok.any():
                total += w_nodes * np.where(bits[ok], p, 1.0 - p).prod(axis=1).sum()
    return float(min(max(total, 0.0), 1.0))
