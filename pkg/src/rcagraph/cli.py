"""Command-line front end.

Exit codes: 0 success, 2 input or usage error, 3 no knowledge to classify with.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .evaluation import (
    PROFILES,
    PipelineParams,
    ScenarioConfig,
    export_dataset,
    generate_dataset,
    report_table,
    run_experiment,
    scenario_taxonomy,
)
from .ingestion import BuildParams, build_graph, load_node_logs, load_topology, read_metrics_csv
from .kb import KnowledgeBase, LabeledGraph, NoKnowledgeError, classify
from .logs import EmbeddingModel, parse_timestamp, read_log_file, train_embedding, window_corpus
from .matching import MatchConfig
from .model import Taxonomy, dump_json, load_graph, save_graph, validate_graph
from .similarity import SimilarityConfig
from .weighting import load_catalog

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_KNOWLEDGE = 3

log = logging.getLogger("rcagraph")


class InputError(Exception):
    pass


def _existing(path: Optional[str], what: str) -> Optional[Path]:
    if path is None:
        return None
    p = Path(path)
    if not p.exists():
        raise InputError(f"{what} not found: {p}")
    return p


def _taxonomy(path: Optional[str]) -> Taxonomy:
    p = _existing(path, "taxonomy")
    return Taxonomy.load(p) if p else scenario_taxonomy()


def _time(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return parse_timestamp(text)


def _match_config(args) -> MatchConfig:
    return MatchConfig(alpha=args.alpha, restarts=args.restarts, seed=args.seed)


# -- commands ---------------------------------------------------------------


def cmd_train_embedding(args) -> int:
    log_dir = _existing(args.logs, "log directory")
    files = sorted(log_dir.rglob("*.log")) if log_dir.is_dir() else [log_dir]
    corpus: List[List[str]] = []
    for f in files:
        corpus.extend(window_corpus(read_log_file(f)))
    model = train_embedding(
        corpus,
        dimension=args.dim,
        epochs=args.epochs,
        context_radius=args.context_radius,
        negative_samples=args.negative,
        seed=args.seed,
        corpus_id=log_dir.name,
    )
    model.save(args.out)
    log.info("model with %d tokens written to %s", len(model.vocabulary), args.out)
    return EXIT_OK


def cmd_build_graph(args) -> int:
    topo = load_topology(_existing(args.topology, "topology"))
    metrics = read_metrics_csv(_existing(args.metrics, "metrics"))
    logs = load_node_logs(topo, _existing(args.logs, "log directory"))
    model = EmbeddingModel.load(_existing(args.model, "model")) if args.model else None
    dists = load_catalog(_existing(args.dists, "distribution catalog")) if args.dists else None
    params = BuildParams(context_len=args.context_len, event_len=args.event_len, metrics_window=args.metrics_window)
    warnings: List[str] = []
    g = build_graph(
        topo, metrics, logs, _time(args.trigger), model, params, dists, _taxonomy(args.taxonomy), warnings, args.trigger
    )
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    save_graph(g, args.out)
    return EXIT_OK


def cmd_kb_add(args) -> int:
    g = load_graph(_existing(args.graph, "graph"))
    system = args.system if args.system is not None else str(g.metadata.get("system", ""))
    captured = args.captured_at
    if captured is None:
        captured = float(g.metadata.get("captured_at", 0.0) or 0.0)
    eid = KnowledgeBase(args.kb).add(LabeledGraph(g, args.cause, system, captured))
    print(eid)
    return EXIT_OK


def cmd_kb_list(args) -> int:
    kb = KnowledgeBase(_existing(args.kb, "knowledge base"))
    for eid, lg in kb:
        print(f"{eid}\t{lg.root_cause}\t{lg.source_system}\t{lg.captured_at:.3f}")
    return EXIT_OK


def cmd_classify(args) -> int:
    g = load_graph(_existing(args.graph, "graph"))
    kb_dir = Path(args.kb)
    kb = KnowledgeBase(kb_dir if kb_dir.exists() else None)
    cross = args.source_system is not None and g.metadata.get("system") not in (None, args.source_system)
    cfg = SimilarityConfig(vector_metric=args.vector_metric, cross_distribution=cross)
    res = classify(kb, g, _taxonomy(args.taxonomy), cfg, _match_config(args), args.source_system)
    text = json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _scenario(args) -> tuple:
    data = {}
    if args.scenario:
        data = json.loads(_existing(args.scenario, "scenario").read_text(encoding="utf-8"))
    query = data.pop("query_profile", None)
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    return ScenarioConfig.from_dict(data), query


def cmd_evaluate(args) -> int:
    cfg, query = _scenario(args)
    query = args.query_profile or query
    params = PipelineParams(mode=args.mode, auto_weights=not args.no_auto_weights, dimension=args.dim)
    report = run_experiment(cfg, params, query)
    if not args.timing:
        report.pop("timing")
    dump_json(report, args.out)
    if args.table:
        print(report_table(report))
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg, _ = _scenario(args)
    out = export_dataset(generate_dataset(cfg), args.out)
    log.info("dataset written to %s", out)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate_graph(load_graph(_existing(args.graph, "graph")))
    for v in report:
        print(f"{v.kind}\t{v.subject}\t{v.detail}")
    return EXIT_OK if not report else EXIT_INPUT


# -- parser -----------------------------------------------------------------


def _add_match_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.8, help="node-term weight in the graph score")
    p.add_argument("--restarts", type=int, default=MatchConfig.restarts)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--taxonomy", help="taxonomy JSON (default: built-in equipment taxonomy)")
    p.add_argument("--vector-metric", default="cosine", choices=["cosine", "inverse_euclidean", "minkowski"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcagraph", description="Graph-based root-cause classification.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-embedding", help="train a log word embedding")
    p.add_argument("--logs", required=True, help="directory of *.log files (searched recursively) or one file")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--context-radius", type=int, default=2)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_embedding)

    p = sub.add_parser("build-graph", help="build a state graph from raw monitoring data")
    p.add_argument("--topology", required=True)
    p.add_argument("--metrics", required=True)
    p.add_argument("--logs")
    p.add_argument("--trigger", required=True, help="UTC seconds or ISO 8601 timestamp")
    p.add_argument("--model")
    p.add_argument("--dists", help="metric distribution catalog; enables auto-weighting")
    p.add_argument("--taxonomy")
    p.add_argument("--context-len", type=float, default=30.0)
    p.add_argument("--event-len", type=float, default=10.0)
    p.add_argument("--metrics-window", type=float, default=120.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_graph)

    kb = sub.add_parser("kb", help="manage a knowledge base").add_subparsers(dest="kb_command", required=True)
    p = kb.add_parser("add", help="store a labeled graph")
    p.add_argument("--kb", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--cause", required=True)
    p.add_argument("--system", help="source system (default: graph metadata)")
    p.add_argument("--captured-at", type=float)
    p.set_defaults(func=cmd_kb_add)
    p = kb.add_parser("list", help="list stored exemplars")
    p.add_argument("--kb", required=True)
    p.set_defaults(func=cmd_kb_list)

    p = sub.add_parser("classify", help="rank root causes for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--source-system", help="only use exemplars from this system")
    p.add_argument("--out")
    _add_match_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="run a synthetic classification experiment")
    p.add_argument("--scenario", help="scenario JSON (ScenarioConfig fields plus optional query_profile)")
    p.add_argument("--query-profile", choices=PROFILES)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", default="full", choices=["full", "logs_only", "metrics_only"])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--no-auto-weights", action="store_true")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte reproducibility)")
    p.add_argument("--table", action="store_true", help="also print a plain-text summary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="export a synthetic dataset in ingestion formats")
    p.add_argument("--scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a graph file for structural violations")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NoKnowledgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_KNOWLEDGE
    except (InputError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
