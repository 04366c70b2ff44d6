"""Command-line interface: inspect, train, predict, crossval, bench-sims.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import streams
from .crossval import cross_validate
from .dataset import DatasetError, fit_transform, load_dataset, map_classes
from .reliability import SimParams
from .sso import SsoParams
from .trainer import TrainConfig, load_model, predict_many, run_many, save_model
from .ubcn import build_topology

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="dataset file (CSV or LIBSVM)")
    p.add_argument("--format", choices=("auto", "csv", "libsvm"), default="auto",
                   help="file format; auto picks csv for *.csv, libsvm otherwise")


def _add_training(p):
    g = p.add_argument_group("training")
    g.add_argument("--config", help="JSON file mirroring TrainConfig")
    g.add_argument("--runs", type=int, dest="n_run")
    g.add_argument("--gens", type=int, dest="n_gen")
    g.add_argument("--sols", type=int, dest="n_sol")
    g.add_argument("--nsim", type=int, dest="n_sim")
    g.add_argument("--delta", type=int, dest="delta_n_sim", help="interval length")
    g.add_argument("--alpha", type=float)
    g.add_argument("--p-eps", type=float, dest="p_eps")
    g.add_argument("--cg", type=float, dest="c_g")
    g.add_argument("--cp", type=float, dest="c_p")
    g.add_argument("--cw", type=float, dest="c_w")
    g.add_argument("--seed", type=int, dest="master_seed",
                   help=f"master seed (default {streams.DEFAULT_SEED})")
    g.add_argument("--workers", type=int, help="threads per fitness evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relnet", description="Network-reliability two-class classifier.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("inspect", help="show class map, theta and per-attribute correlation")
    _add_data(p)

    p = sub.add_parser("train", help="train and write a model JSON")
    _add_data(p)
    _add_training(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="classify instances with a saved model")
    p.add_argument("--model", required=True)
    _add_data(p)
    p.add_argument("--unlabeled", action="store_true", help="the data file carries no class labels")
    p.add_argument("--out", help="write predicted labels here, one per line (default: stdout)")

    for name, helptext in (("crossval", "k-fold cross-validation report"),
                           ("bench-sims", "cross-validation comparing iMCS with full-length MCS")):
        p = sub.add_parser(name, help=helptext)
        _add_data(p)
        _add_training(p)
        p.add_argument("--folds", type=int)
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--timing", action="store_true", help="include wall times in the JSON report")
    return parser


def _format(args) -> str:
    if args.format != "auto":
        return args.format
    return "csv" if Path(args.data).suffix.lower() == ".csv" else "libsvm"


def resolve_config(args) -> TrainConfig:
    """Defaults, then the config file, then command-line flags."""
    cfg = TrainConfig()
    if getattr(args, "config", None):
        try:
            cfg = TrainConfig.from_dict(json.loads(Path(args.config).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise UsageError(f"bad config {args.config}: {exc}") from exc
    top = {k: getattr(args, k, None) for k in ("n_run", "n_gen", "n_sol", "master_seed", "workers", "folds")}
    sim = {k: getattr(args, k, None) for k in ("n_sim", "delta_n_sim", "alpha", "p_eps")}
    sso = {k: getattr(args, k, None) for k in ("c_g", "c_p", "c_w")}
    try:
        sim_d = {**asdict(cfg.sim), **{k: v for k, v in sim.items() if v is not None}}
        if sim["alpha"] is not None:
            # z follows a changed alpha
            sim_d["z_half_alpha"] = None
        return replace(
            cfg,
            sim=SimParams(**sim_d),
            sso=SsoParams(**{**asdict(cfg.sso), **{k: v for k, v in sso.items() if v is not None}}),
            **{k: v for k, v in top.items() if v is not None},
        )
    except ValueError as exc:
        raise UsageError(f"invalid parameters: {exc}") from exc


def _pct(x: float) -> str:
    return f"{100 * x:.2f}%"


def format_table(report: dict, n_sim: int) -> str:
    has_mcs = report["aggregate"].get("agreement") is not None
    head = f"{'Fold':>5} {'Train acc':>10} {'Test acc':>10} {'Sims':>18}"
    if has_mcs:
        head += f" {'MCS acc':>10} {'Agree':>8}"
    lines = [head, "-" * len(head)]

    def row(name, d):
        s = f"{name:>5} {_pct(d['train_accuracy']):>10} {_pct(d['test_accuracy']):>10} " \
            f"{d['mean_sims']:>8.2f} ({_pct(d['sims_fraction']):>7})"
        if has_mcs:
            s += f" {_pct(d['mcs_test_accuracy']):>10} {_pct(d['agreement']):>8}"
        return s

    for f in report["folds"]:
        lines.append(row(str(f["fold"]), f))
    lines.append(row("Avg.", report["aggregate"]))
    lines.append(f"(sims out of N_sim = {n_sim})")
    return "\n".join(lines)


def cmd_inspect(args) -> int:
    raw = load_dataset(args.data, _format(args))
    cmap = map_classes(raw)
    spec, _ = fit_transform(raw, cmap)
    print(f"dataset: {raw.name}  instances: {len(raw)}  attributes: {raw.n_attributes}")
    print(f"class 1: {cmap.label_for_one!r}  class 0: {cmap.label_for_zero!r}  "
          f"theta = {cmap.n_one}/{cmap.n_total} = {cmap.theta:.6f}")
    print(f"{'attr':>5} {'min':>12} {'max':>12} {'r_s':>9} flip")
    for j in range(spec.n_attributes):
        print(f"{j + 1:>5} {spec.mins[j]:>12.6g} {spec.maxs[j]:>12.6g} {spec.r_s[j]:>9.4f} "
              f"{'yes' if spec.flips[j] else 'no'}")
    return 0


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    raw = load_dataset(args.data, _format(args))
    cmap = map_classes(raw)
    _, data = fit_transform(raw, cmap)
    model, records = run_many(data, build_topology(raw.n_attributes), cfg)
    save_model(model, args.out)
    print(f"best run {model.run + 1}/{cfg.n_run}: training accuracy {_pct(model.fitness)}, "
          f"mean sims {model.mean_sims:.2f} ({_pct(model.mean_sims / cfg.sim.n_sim)})")
    print(f"model written to {args.out}")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    raw = load_dataset(args.data, _format(args), labeled=not args.unlabeled, n_attributes=model.topology.n)
    labels, _, sims = predict_many(model, raw.instances)
    text = "\n".join(labels) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not args.unlabeled:
        acc = np.mean([a == b for a, b in zip(labels, raw.labels)])
        print(f"accuracy {_pct(acc)} over {len(raw)} instances, mean sims {sims.mean():.2f}", file=sys.stderr)
    return 0


def _crossval(args, compare: bool) -> int:
    cfg = resolve_config(args)
    raw = load_dataset(args.data, _format(args))
    t0 = time.perf_counter()
    result = cross_validate(raw, cfg, compare_full_mcs=compare)
    report = {"dataset": raw.name, "seed": cfg.master_seed, "config": cfg.to_dict(),
              **result.to_dict(timing=args.timing)}
    if args.timing:
        report["timing"] = {"total_seconds": time.perf_counter() - t0}
    print(format_table(report, cfg.sim.n_sim))
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


COMMANDS = {
    "inspect": cmd_inspect,
    "train": cmd_train,
    "predict": cmd_predict,
    "crossval": lambda a: _crossval(a, False),
    "bench-sims": lambda a: _crossval(a, True),
}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, OSError) as exc:
        print(f"relnet: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run_cli())
