"""Command-line entry point: ``ethphish <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .errors import EthPhishError
from .graph import TransactionGraph
from .harness import report as reporting
from .harness.config import resolve_config
from .harness.experiments import AXES, run_experiment_grid
from .harness.training import cross_validate, evaluate, prepare_all, train
from .ingest import build_graph, parse_labels, parse_transactions
from .lightweight import RescaleConfig, lighten
from .nn import ChebNetClassifier
from .nn.spectral import DegradedEstimateWarning
from .sampler import SamplingStrategy, build_dataset, compute_k, load_dataset, save_dataset

log = logging.getLogger("ethphish")


def _emit(obj: dict, path: str | None) -> None:
    if path:
        reporting.write_json(path, obj)
    else:
        sys.stdout.write(reporting.dumps(obj))


def _graph_stats(g: TransactionGraph) -> dict:
    return {"n_nodes": g.n_nodes, "n_edges": g.n_edges, "n_phishing": int(g.phishing.sum())}


def cmd_ingest(args) -> dict:
    with open(args.transactions, "rb") as fh:
        records = parse_transactions(fh, delimiter=args.delimiter)
    labels = frozenset()
    if args.labels:
        with open(args.labels, "rb") as fh:
            labels = parse_labels(fh)
    g = build_graph(records, labels)
    g.save(args.out)
    return {"command": "ingest", "records": len(records), "labels": len(labels),
            "graph": _graph_stats(g), "output": args.out}


def cmd_lighten(args) -> dict:
    g = TransactionGraph.load(args.graph)
    cfg = None if args.scale is None else RescaleConfig(args.scale, args.seed, args.start)
    out = lighten(g, cfg)
    out.save(args.out)
    return {"command": "lighten", "input": _graph_stats(g), "graph": _graph_stats(out),
            "scale": args.scale, "seed": args.seed, "start": args.start, "output": args.out}


def cmd_sample(args) -> dict:
    g = TransactionGraph.load(args.graph)
    strategy = SamplingStrategy(args.rank, args.weight, args.hops, args.direction)
    k = compute_k(g) if args.k is None else args.k
    data = build_dataset(g, strategy, seed=args.seed, k=k)
    save_dataset(args.out, data, strategy, k, {"seed": args.seed})
    return {"command": "sample", "strategy": strategy.name, "k": k,
            "direction_mode": strategy.direction_mode, "hops": strategy.hops,
            "n_subgraphs": len(data), "n_positive": sum(s.label for s in data),
            "output": args.out}


_TRAIN_FLAGS = ("epochs", "batch_size", "folds", "repeats", "hidden", "cheb_order", "pooling",
                "lr", "threshold", "seed", "amount_transform", "standardize")


def _train_config(args, strategy: SamplingStrategy | None = None, **extra):
    overrides = {name: getattr(args, name, None) for name in _TRAIN_FLAGS}
    if strategy is not None:
        overrides.update(rank=strategy.rank_attribute, weight=strategy.weight_attribute,
                         hops=strategy.hops, direction=strategy.direction_mode)
    overrides.update(extra)
    return resolve_config(args.config, overrides)


def cmd_train(args) -> dict:
    data, strategy, meta = load_dataset(args.dataset)
    cfg = _train_config(args, strategy)
    graphs = prepare_all(data, cfg)
    out = {"command": "train", "dataset": {"strategy": meta["strategy"], "k": meta["k"],
                                           "n_subgraphs": len(data)}}
    if not args.skip_cv:
        out.update(reporting.cv_report(cross_validate(graphs, cfg)))
    else:
        out["config"] = cfg.as_dict()
    final = train(graphs, cfg)
    ev = evaluate(final.model, graphs, cfg.threshold)
    out["final_model"] = {"loss_history": final.loss_history,
                          "train_metrics": ev.metrics.as_dict()}
    final.model.save(args.checkpoint, {"strategy": strategy.name, "threshold": cfg.threshold,
                                       "amount_transform": cfg.amount_transform})
    if args.summary and "aggregate" in out:
        Path(args.summary).write_text(reporting.summary_table(out["aggregate"], "ChebNet"),
                                      encoding="utf-8")
    return out


def cmd_evaluate(args) -> dict:
    model, meta = ChebNetClassifier.load(args.checkpoint)
    data, strategy, _ = load_dataset(args.dataset)
    threshold = meta.get("threshold", 0.5) if args.threshold is None else args.threshold
    cfg = resolve_config(None, {"amount_transform": meta.get("amount_transform", "log1p")})
    ev = evaluate(model, prepare_all(data, cfg), threshold)
    c = ev.counts
    return {"command": "evaluate", "strategy": strategy.name, "threshold": threshold,
            "counts": {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn},
            "metrics": ev.metrics.as_dict()}


def cmd_experiment(args) -> dict:
    g = TransactionGraph.load(args.graph)
    cfg = _train_config(args, None, rank=args.rank, weight=args.weight, hops=args.hops,
                        direction=args.direction)
    values = None
    if args.values:
        values = [int(v) if args.axis == "hidden_dim" else v for v in args.values.split(",")]
    rows = run_experiment_grid(g, cfg, args.axis, values)
    if args.summary:
        Path(args.summary).write_text(reporting.grid_table(rows), encoding="utf-8")
    return {"command": "experiment", "axis": args.axis, "config": cfg.as_dict(), "rows": rows}


def _add_train_flags(p):
    p.add_argument("--config", help="flat key = value config file; flags override it")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--cheb-order", dest="cheb_order", type=int)
    p.add_argument("--pooling", choices=["average", "max"])
    p.add_argument("--lr", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--amount-transform", dest="amount_transform", choices=["log1p", "raw"])
    p.add_argument("--standardize", dest="standardize", action=argparse.BooleanOptionalAction,
                   default=None)


def _add_strategy_flags(p, defaults: bool):
    p.add_argument("--rank", choices=["a", "t"], default="t" if defaults else None)
    p.add_argument("--weight", choices=["a", "t"], default="t" if defaults else None)
    p.add_argument("--hops", type=int, default=2 if defaults else None)
    p.add_argument("--direction", choices=["directed", "undirected"],
                   default="undirected" if defaults else None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ethphish", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="transactions + labels -> graph snapshot")
    p.add_argument("--transactions", required=True)
    p.add_argument("--labels")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("lighten", help="one-hop extraction, largest WCC, random-walk rescale")
    p.add_argument("graph")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=int, help="target node count (omit to skip rescaling)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", help="account to start the walk from")
    p.add_argument("--report")
    p.set_defaults(func=cmd_lighten)

    p = sub.add_parser("sample", help="graph snapshot -> subgraph dataset")
    p.add_argument("graph")
    p.add_argument("--out", required=True)
    _add_strategy_flags(p, defaults=True)
    p.add_argument("--k", type=int, help="override the adaptive neighbour budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train", help="dataset -> checkpoint + cross-validation report")
    p.add_argument("dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--report")
    p.add_argument("--summary", help="write a plain-text metrics table here")
    p.add_argument("--skip-cv", action="store_true")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="checkpoint + dataset -> metrics report")
    p.add_argument("checkpoint")
    p.add_argument("dataset")
    p.add_argument("--threshold", type=float)
    p.add_argument("--report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="parameter study along one axis")
    p.add_argument("graph")
    p.add_argument("--axis", required=True, choices=sorted(AXES))
    p.add_argument("--values", help="comma-separated axis values (default: full sweep)")
    p.add_argument("--report")
    p.add_argument("--summary")
    _add_strategy_flags(p, defaults=False)
    _add_train_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    if args.verbose == 0:
        warnings.simplefilter("ignore", DegradedEstimateWarning)
    try:
        result = args.func(args)
    except (EthPhishError, OSError, KeyError) as exc:
        print(f"ethphish {args.command}: error: {exc}", file=sys.stderr)
        return 1
    _emit(result, args.report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
