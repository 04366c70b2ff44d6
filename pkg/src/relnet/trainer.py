"""Fitness evaluation, iMCS-SSO training, prediction and model persistence."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import streams
from .dataset import ClassMap, DatasetError, TransformSpec, TransformedDataset, apply_transform
from .reliability import BoundsTable, ImcsOutcome, SimParams, build_bounds, imcs_batch
from .sso import SsoParams, init_swarm, update_solution
from .ubcn import ARC_ORDERING, Topology, build_topology

logger = logging.getLogger(__name__)

MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    n_run: int = 30
    n_gen: int = 50
    n_sol: int = 10
    sim: SimParams = SimParams()
    sso: SsoParams = SsoParams()
    master_seed: int = streams.DEFAULT_SEED
    folds: int = 10
    # excluded from the digest: results are identical for any worker count
    workers: int = 1

    def __post_init__(self):
        for name in ("n_run", "n_gen", "n_sol", "folds", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "sim" in d:
            d["sim"] = SimParams(**d["sim"])
        if "sso" in d:
            d["sso"] = SsoParams(**d["sso"])
        return cls(**d)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Model:
    topology: Topology
    arc_rel: np.ndarray
    transform: TransformSpec
    bounds: BoundsTable
    fitness: float
    config: TrainConfig
    run: int = 0
    best_at: tuple = (1, 0)  # (generation, solution) whose evaluation set fitness
    history: list = field(default_factory=list)  # recorded F(G) after each generation
    sims_total: int = 0
    sims_calls: int = 0

    def __post_init__(self):
        self.arc_rel = np.asarray(self.arc_rel, dtype=float)
        if self.arc_rel.shape != (self.topology.n_var,):
            raise ValueError("arc_rel length must equal topology.n_var")
        if np.any((self.arc_rel < 0) | (self.arc_rel > 1)):
            raise ValueError("arc reliabilities must lie in [0, 1]")

    @property
    def class_map(self) -> ClassMap:
        return self.transform.class_map

    @property
    def mean_sims(self) -> float:
        return self.sims_total / self.sims_calls if self.sims_calls else 0.0


@dataclass(frozen=True)
class RunRecord:
    run: int
    fitness: float
    mean_sims: float


def _evaluate(solution, node_rel, topology, bounds, rngs, workers=1, early_stop=True):
    """Batch iMCS over instances, optionally split across threads."""
    N = node_rel.shape[0]
    if workers <= 1 or N < 2 * workers:
        return imcs_batch(topology, solution, node_rel, bounds, rngs, early_stop)
    parts = np.array_split(np.arange(N), workers)
    with ThreadPoolExecutor(workers) as ex:
        res = list(ex.map(
            lambda ix: imcs_batch(topology, solution, node_rel[ix], bounds, [rngs[i] for i in ix], early_stop),
            parts))
    return tuple(np.concatenate(cols) for cols in zip(*res))


def fitness(solution, data: TransformedDataset, topology: Topology, bounds: BoundsTable,
            rng, workers: int = 1, return_sims: bool = False):
    """Fraction of instances whose iMCS class matches their 0/1 label.

    ``rng`` is either one Generator (split into per-instance streams) or a
    sequence of per-instance Generators.
    """
    N = len(data)
    if N == 0:
        raise ValueError("fitness of an empty dataset is undefined")
    rngs = rng.spawn(N) if isinstance(rng, np.random.Generator) else list(rng)
    classes, sims, _, _ = _evaluate(np.asarray(solution, dtype=float), data.node_rel, topology, bounds,
                                    rngs, workers)
    f = int((classes == data.y01).sum()) / N
    if return_sims:
        return f, sims
    return f


def _fitness_streams(seed: int, run: int, gen: int, sol: int, n: int):
    return [streams.stream(seed, streams.FITNESS, run, gen, sol, k) for k in range(n)]


def train(data: TransformedDataset, topology: Topology, config: TrainConfig, run: int = 0,
          callback=None) -> Model:
    """One iMCS-SSO run, following the pseudo code step by step.

    ``callback(gen, swarm)`` is invoked after every generation.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    if data.node_rel.shape[1] != topology.n:
        raise ValueError("dataset attribute count does not match topology")
    seed = config.master_seed
    bounds = build_bounds(data.theta, config.sim)
    N = len(data)
    sims_total = 0

    def evaluate(x, gen, sol):
        nonlocal sims_total
        f, sims = fitness(x, data, topology, bounds, _fitness_streams(seed, run, gen, sol, N),
                          config.workers, return_sims=True)
        sims_total += int(sims.sum())
        return f

    swarm = init_swarm(config.n_sol, topology.n_var, streams.stream(seed, streams.INIT, run))
    for sol in range(config.n_sol):
        swarm.fX[sol] = evaluate(swarm.X[sol], 1, sol)
    swarm.P = swarm.X.copy()
    swarm.fP = swarm.fX.copy()
    k = int(np.argmax(swarm.fX))
    swarm.G = swarm.X[k].copy()
    swarm.fG = float(swarm.fX[k])
    best_at = (1, k)
    history = [swarm.fG]
    if callback:
        callback(1, swarm)

    for gen in range(2, config.n_gen + 1):
        for sol in range(config.n_sol):
            rng = streams.stream(seed, streams.UPDATE, run, gen, sol)
            swarm.X[sol] = update_solution(swarm.X[sol], swarm.P[sol], swarm.G, config.sso, rng)
            f = evaluate(swarm.X[sol], gen, sol)
            swarm.fX[sol] = f
            if not f > swarm.fP[sol]:
                continue
            swarm.P[sol] = swarm.X[sol]
            swarm.fP[sol] = f
            if f > swarm.fG:
                swarm.G = swarm.X[sol].copy()
                swarm.fG = f
                best_at = (gen, sol)
        history.append(swarm.fG)
        if callback:
            callback(gen, swarm)
        logger.debug("run %d gen %d: F(G)=%.4f", run, gen, swarm.fG)

    return Model(topology, swarm.G.copy(), data.spec, bounds, swarm.fG, config, run, best_at, history,
                 sims_total, config.n_gen * config.n_sol * N)


def run_many(data: TransformedDataset, topology: Topology, config: TrainConfig):
    """``n_run`` independent trainings; the best by training fitness wins (earliest on ties)."""
    best, records = None, []
    for run in range(config.n_run):
        m = train(data, topology, config, run)
        records.append(RunRecord(run, m.fitness, m.mean_sims))
        logger.info("run %d/%d: fitness %.4f", run + 1, config.n_run, m.fitness)
        if best is None or m.fitness > best.fitness:
            best = m
    return best, records


def predict(model: Model, raw_instance, rng: Optional[np.random.Generator] = None):
    """Classify one raw attribute vector; returns (original label, ImcsOutcome)."""
    raw_instance = np.asarray(raw_instance, dtype=float)
    if raw_instance.shape != (model.topology.n,):
        raise DatasetError(f"expected {model.topology.n} attributes, got {raw_instance.size}")
    if rng is None:
        rng = streams.stream(model.config.master_seed, streams.PREDICT, 0)
    node_rel = apply_transform(model.transform, raw_instance)
    c, s, w, t = imcs_batch(model.topology, model.arc_rel, node_rel[None, :], model.bounds, [rng])
    out = ImcsOutcome(int(c[0]), int(s[0]), int(w[0]), bool(t[0]))
    return model.class_map.decode(out.predicted_class), out


def predict_many(model: Model, X, key: Sequence[int] = (), workers: int = 1, early_stop: bool = True):
    """Classify rows of ``X``; row k uses the stream (seed, PREDICT, *key, k).

    Returns (labels, classes, sims_used).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.topology.n:
        raise DatasetError(f"expected {model.topology.n} attributes, got {X.shape[1]}")
    node_rel = model.transform.transform(X)
    rngs = [streams.stream(model.config.master_seed, streams.PREDICT, *key, k) for k in range(X.shape[0])]
    classes, sims, _, _ = _evaluate(model.arc_rel, node_rel, model.topology, model.bounds, rngs, workers,
                                    early_stop)
    labels = [model.class_map.decode(int(c)) for c in classes]
    return labels, classes, sims


# -- persistence ------------------------------------------------------------

def _floats(a) -> list:
    return [float(v) for v in a]


def model_to_dict(model: Model) -> dict:
    t = model.transform
    cm = t.class_map
    return {
        "version": MODEL_VERSION,
        "n": model.topology.n,
        "arc_ordering": ARC_ORDERING,
        "arc_rel": _floats(model.arc_rel),
        "transform": {
            "min": _floats(t.mins),
            "max": _floats(t.maxs),
            "flip": [bool(f) for f in t.flips],
            "r_s": _floats(t.r_s),
            "class_map": {
                "label_for_one": cm.label_for_one,
                "label_for_zero": cm.label_for_zero,
                "n_one": cm.n_one,
                "n_total": cm.n_total,
            },
            "theta": cm.theta,
        },
        "sim": asdict(model.config.sim),
        "fitness": model.fitness,
        "seed": model.config.master_seed,
        "run": model.run,
        "best_at": list(model.best_at),
        "config": model.config.to_dict(),
        "config_digest": model.config.digest(),
        "training": {
            "history": _floats(model.history),
            "sims_total": model.sims_total,
            "sims_calls": model.sims_calls,
        },
    }


def model_from_dict(d: dict) -> Model:
    try:
        if d["version"] != MODEL_VERSION:
            raise DatasetError(f"unsupported model version {d['version']}")
        if d["arc_ordering"] != ARC_ORDERING:
            raise DatasetError(f"unknown arc ordering {d['arc_ordering']!r}")
        tr = d["transform"]
        cm = ClassMap(**tr["class_map"])
        spec = TransformSpec(tr["min"], tr["max"], tr["flip"], tr["r_s"], cm)
        topology = build_topology(d["n"])
        if spec.n_attributes != topology.n:
            raise DatasetError("transform and topology disagree on attribute count")
        config = TrainConfig.from_dict(d["config"])
        bounds = build_bounds(cm.theta, config.sim)
        training = d.get("training", {})
        return Model(topology, d["arc_rel"], spec, bounds, d["fitness"], config, d.get("run", 0),
                     tuple(d.get("best_at", (1, 0))), list(training.get("history", [])),
                     training.get("sims_total", 0), training.get("sims_calls", 0))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DatasetError):
            raise
        raise DatasetError(f"model schema mismatch: {exc}") from exc


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> Model:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"cannot read model {path}: {exc}") from exc
    return model_from_dict(d)


def with_seed(config: TrainConfig, seed: int) -> TrainConfig:
    return replace(config, master_seed=int(seed))
