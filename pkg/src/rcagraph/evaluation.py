"""Synthetic fault-injection scenarios and classification scoring.

A scenario is a set of failure injections on one of two system profiles: a
master/slave cluster behind a switch, or a broker cluster with a coordinator,
producers and consumers. Every injection yields raw monitoring data (metric
samples every 5 s, per-node logs) that is turned into a state graph through
the regular ingestion path, so generated scenarios double as ingestion
fixtures.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .ingestion import (
    LOG_CONTEXT,
    LOG_EVENT,
    TYPE_ATTRIBUTE,
    BuildParams,
    MetricSample,
    NodeSpec,
    TopologySpec,
    build_graph,
    write_metrics_csv,
)
from .kb import KnowledgeBase, LabeledGraph, classify
from .logs import EmbeddingModel, LogEntry, Severity, format_log_line, train_embedding, window_corpus
from .matching import MatchConfig
from .model import Attribute, SystemGraph, Taxonomy, dump_json
from .similarity import SimilarityConfig
from .weighting import MetricDistribution, distribution_catalog, save_catalog

MASTER_SLAVE = "master_slave_cluster"
BROKER = "broker_producer_consumer"
PROFILES = (MASTER_SLAVE, BROKER)

HIGH_CPU = "high_cpu"
HIGH_DISK = "high_disk"
HIGH_NETWORK = "high_network"
NODE_DOWN = "node_down"
NETWORK_DISCONNECT = "network_disconnect"
FAILURE_CLASSES = (HIGH_CPU, HIGH_DISK, HIGH_NETWORK, NODE_DOWN, NETWORK_DISCONNECT)

HOST_METRICS = (
    "cpu_idle", "cpu_iowait", "cpu_softirq", "cpu_system", "cpu_user",
    "disk_bytes_read", "disk_bytes_write", "disk_io_read", "disk_io_write",
    "mem_buffer_cache", "mem_free", "mem_map", "mem_used",
    "net_recv_bytes", "net_recv_packets", "net_send_bytes", "net_send_packets",
    "load5", "load10", "load15", "procs_running", "power",
)  # fmt: skip
NETWORK_METRICS = ("net_recv_bytes", "net_recv_packets", "net_send_bytes", "net_send_packets")
METRIC_BOUNDS = (0.0, 100.0)
PROBE_PERIOD = 5

# signature metric -> relative direction/strength of the excursion
SIGNATURES: Dict[str, Dict[str, float]] = {
    HIGH_CPU: {
        "cpu_user": 1.0, "cpu_system": 0.8, "cpu_idle": -1.0, "load5": 1.0,
        "load10": 0.9, "load15": 0.8, "procs_running": 0.9, "power": 0.6,
    },
    HIGH_DISK: {
        "disk_bytes_read": 1.0, "disk_bytes_write": 1.0, "disk_io_read": 0.9,
        "disk_io_write": 0.9, "cpu_iowait": 1.0, "mem_buffer_cache": 0.7,
    },
    HIGH_NETWORK: {
        "net_recv_bytes": 1.0, "net_recv_packets": 0.9, "net_send_bytes": 1.0,
        "net_send_packets": 0.9, "cpu_softirq": 0.8,
    },
}  # fmt: skip
# cluster-wide background workload phases (confounders, scaled by noise)
WORKLOADS: Dict[str, Tuple[str, ...]] = {
    "idle": (),
    "compute": ("cpu_user", "cpu_system", "load5", "load10", "load15", "procs_running"),
    "sort": ("disk_bytes_read", "disk_bytes_write", "disk_io_read", "disk_io_write", "cpu_iowait"),
    "shuffle": NETWORK_METRICS + ("cpu_softirq",),
}
SWITCH_POWER_SHIFT = {HIGH_NETWORK: 1.0, HIGH_DISK: -0.5, NODE_DOWN: -0.6, NETWORK_DISCONNECT: -0.8}

BACKGROUND_LOGS = {
    MASTER_SLAVE: (
        "block report received from datanode node",
        "task request completed successfully in container",
        "heartbeat received from node manager",
        "container allocated on node for application request",
        "fetch request finished for map output",
        "checkpoint written to storage",
    ),
    BROKER: (
        "produce request completed successfully for client application",
        "heartbeat received from consumer group",
        "log segment written to storage",
        "fetch request finished for partition replica",
        "session heartbeat received from node",
        "offset commit request completed for consumer group",
    ),
}
NOISE_WARNINGS = (
    "garbage collection pause longer than expected",
    "slow request detected in handler queue",
    "retrying request after transient failure",
)

# (severity, text) templates; the failure vocabulary is shared across profiles
FAILURE_LOGS: Dict[str, Dict[str, Tuple[Tuple[str, str], ...]]] = {
    MASTER_SLAVE: {
        HIGH_CPU: (
            ("WARN", "task processing slow cpu load high thread starved"),
            ("WARN", "executor heartbeat delayed cpu overloaded"),
            ("ERROR", "task attempt timed out cpu saturated scheduler lagging"),
        ),
        HIGH_DISK: (
            ("WARN", "slow block write disk latency high io wait"),
            ("ERROR", "failed to flush block to disk io error"),
            ("WARN", "datanode disk io queue full write stalled"),
        ),
        HIGH_NETWORK: (
            ("WARN", "network throughput saturated packet retransmission"),
            ("WARN", "slow transfer bandwidth exceeded for block replication"),
            ("ERROR", "shuffle transfer stalled network congestion"),
        ),
        NETWORK_DISCONNECT: (
            ("ERROR", "network interface down link lost"),
            ("ERROR", "no route to host peer network unreachable"),
        ),
    },
    BROKER: {
        HIGH_CPU: (
            ("WARN", "request handler slow cpu load high thread starved"),
            ("WARN", "processing delayed cpu overloaded queue growing"),
            ("ERROR", "request timed out cpu saturated handler lagging"),
        ),
        HIGH_DISK: (
            ("WARN", "slow log segment write disk latency high io wait"),
            ("ERROR", "failed to flush segment to disk io error"),
            ("WARN", "disk io queue full append stalled"),
        ),
        HIGH_NETWORK: (
            ("WARN", "network throughput saturated packet retransmission"),
            ("WARN", "slow replication bandwidth exceeded for partition"),
            ("ERROR", "replica fetch stalled network congestion"),
        ),
        NETWORK_DISCONNECT: (
            ("ERROR", "network interface down link lost"),
            ("ERROR", "no route to host peer network unreachable"),
        ),
    },
}
NEIGHBOUR_LOGS = {
    NODE_DOWN: (
        ("WARN", "lost heartbeat from peer node marking dead"),
        ("ERROR", "connection refused peer node unreachable"),
    ),
    NETWORK_DISCONNECT: (
        ("WARN", "connection timeout to peer socket timeout"),
        ("ERROR", "no route to host peer connection timeout"),
    ),
}


def scenario_taxonomy() -> Taxonomy:
    """Equipment taxonomy extended with the broker profile's roles."""
    return Taxonomy(
        "Equipment",
        {
            "Equipment": ["Server", "Switch"],
            "Server": ["Master", "Slave", "Client"],
            "Master": ["Coordinator"],
            "Slave": ["Broker"],
            "Client": ["Producer", "Consumer"],
        },
    )


def profile_topology(profile: str) -> TopologySpec:
    bounds = {m: METRIC_BOUNDS for m in HOST_METRICS}
    if profile == MASTER_SLAVE:
        nodes = [NodeSpec("master", "Master", {"software": "namenode"}, bounds, "master.log")]
        nodes += [NodeSpec(f"slave-{i}", "Slave", {"software": "datanode"}, bounds, f"slave-{i}.log") for i in (1, 2, 3)]
        nodes.append(NodeSpec("switch", "Switch", {}, {"power": METRIC_BOUNDS}, None))
        links = [(n.id, "switch") for n in nodes[:-1]]
        links += [("master", f"slave-{i}") for i in (1, 2, 3)]
    elif profile == BROKER:
        nodes = [NodeSpec("coordinator", "Coordinator", {"software": "zookeeper"}, bounds, "coordinator.log")]
        nodes += [NodeSpec(f"broker-{i}", "Broker", {"software": "kafka"}, bounds, f"broker-{i}.log") for i in (1, 2, 3)]
        nodes.append(NodeSpec("producer", "Producer", {"software": "producer"}, bounds, "producer.log"))
        nodes.append(NodeSpec("consumer", "Consumer", {"software": "consumer"}, bounds, "consumer.log"))
        # clients talk to every partition leader, so brokers are interchangeable
        links = [(c, f"broker-{i}") for c in ("coordinator", "producer", "consumer") for i in (1, 2, 3)]
    else:
        raise ValueError(f"unknown system profile {profile!r}")
    return TopologySpec(profile, tuple(nodes), tuple(links))


def profile_baseline(profile: str) -> Dict[str, Tuple[float, float]]:
    """Normal-operation (mu, sigma) of every metric; fixed per profile."""
    rng = np.random.default_rng(list(profile.encode()))
    out = {}
    for m in HOST_METRICS:
        mu = float(rng.uniform(15.0, 40.0))
        sigma = float(rng.uniform(2.0, 5.0))
        out[m] = (round(mu, 3), round(sigma, 3))
    return out


# ---------------------------------------------------------------------------
# scenario generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioConfig:
    profile: str = MASTER_SLAVE
    failure_classes: Tuple[str, ...] = FAILURE_CLASSES
    injections_per_class: int = 6
    seed: int = 0
    noise: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "failure_classes", tuple(self.failure_classes))
        if self.profile not in PROFILES:
            raise ValueError(f"unknown system profile {self.profile!r}")
        if len(set(self.failure_classes)) < 2:
            raise ValueError("a scenario needs at least 2 distinct failure classes")
        unknown = set(self.failure_classes) - set(FAILURE_CLASSES)
        if unknown:
            raise ValueError(f"unknown failure classes: {sorted(unknown)}")
        if self.injections_per_class < 1:
            raise ValueError("injections_per_class must be >= 1")
        if not self.noise >= 0:
            raise ValueError("noise must be >= 0")

    @classmethod
    def from_dict(cls, d: Mapping[str, object]) -> "ScenarioConfig":
        d = dict(d)
        if "failure_classes" in d:
            d["failure_classes"] = tuple(d["failure_classes"])
        return cls(**d)


@dataclass(frozen=True)
class Injection:
    index: int
    label: str
    target: str
    trigger_time: float
    topology: TopologySpec
    metrics: Tuple[MetricSample, ...]
    logs: Mapping[str, Tuple[LogEntry, ...]]
    role: str  # "kb" or "query"


@dataclass(frozen=True)
class Dataset:
    config: ScenarioConfig
    history: Mapping[str, Tuple[float, ...]]
    injections: Tuple[Injection, ...]

    @property
    def kb_part(self) -> List[Injection]:
        return [i for i in self.injections if i.role == "kb"]

    @property
    def query_part(self) -> List[Injection]:
        return [i for i in self.injections if i.role == "query"]

    def catalog(self) -> Dict[str, MetricDistribution]:
        return distribution_catalog(self.history)


HISTORY_SAMPLES = 400
BASE_TIME = 1_600_000_000
INJECTION_SPACING = 3600
TRIGGER_DELAY = 120
FAILURE_DURATION = 180


def generate_dataset(cfg: ScenarioConfig) -> Dataset:
    """Raw monitoring data for ``2 * injections_per_class`` injections per class.

    Injections alternate between the knowledge-base half and the query half.
    """
    baseline = profile_baseline(cfg.profile)
    hist_rng = np.random.default_rng([cfg.seed, _profile_code(cfg.profile), 0])
    history = {
        m: tuple(float(x) for x in np.round(mu + sigma * hist_rng.standard_normal(HISTORY_SAMPLES), 6))
        for m, (mu, sigma) in sorted(baseline.items())
    }
    injections = []
    k = 0
    for rep in range(2 * cfg.injections_per_class):
        for label in cfg.failure_classes:
            rng = np.random.default_rng([cfg.seed, _profile_code(cfg.profile), 1, k])
            role = "kb" if rep % 2 == 0 else "query"
            injections.append(_inject(cfg, baseline, label, k, role, rng))
            k += 1
    return Dataset(cfg, history, tuple(injections))


def _profile_code(profile: str) -> int:
    return PROFILES.index(profile) + 1


def _inject(cfg: ScenarioConfig, baseline, label: str, k: int, role: str, rng) -> Injection:
    topo = profile_topology(cfg.profile)
    hosts = [n.id for n in topo.nodes if n.type != "Switch"]
    target = hosts[int(rng.integers(len(hosts)))]
    t_inj = BASE_TIME + k * INJECTION_SPACING
    trigger = t_inj + TRIGGER_DELAY
    t_end = t_inj + FAILURE_DURATION
    magnitude = float(rng.uniform(3.0, 6.0))
    workload = sorted(WORKLOADS)[int(rng.integers(len(WORKLOADS)))]
    load_level = cfg.noise * float(rng.uniform(0.5, 1.5))

    samples = []
    start = trigger - 150
    for ns in topo.nodes:
        for metric in sorted(ns.metrics):
            mu, sigma = baseline[metric]
            offset = float(rng.standard_normal())
            shift = 0.0
            if ns.id == target and metric in SIGNATURES.get(label, {}):
                shift = SIGNATURES[label][metric] * magnitude * sigma
            if ns.type == "Switch" and label in SWITCH_POWER_SHIFT:
                shift = SWITCH_POWER_SHIFT[label] * magnitude * sigma
            background = load_level * sigma if metric in WORKLOADS[workload] else 0.0
            zeroed = ns.id == target and (
                label == NODE_DOWN or (label == NETWORK_DISCONNECT and metric in NETWORK_METRICS)
            )
            for ts in range(start, trigger + 31, PROBE_PERIOD):
                active = t_inj <= ts <= t_end
                if zeroed and active:
                    value = 0.0
                else:
                    eps = float(rng.standard_normal())
                    value = mu + background + cfg.noise * sigma * (0.6 * offset + 0.8 * eps)
                    value += shift if active else 0.0
                    value = round(min(METRIC_BOUNDS[1], max(METRIC_BOUNDS[0], value)), 6)
                samples.append(MetricSample(ns.id, metric, float(ts), value))

    logs = {}
    for ns in topo.nodes:
        if ns.log is None:
            continue
        logs[ns.id] = tuple(_node_logs(cfg, ns.id, target, label, topo, t_inj, t_end, rng))

    if label == NETWORK_DISCONNECT:
        topo = replace(topo, links=tuple(l for l in topo.links if target not in l))
    return Injection(k, label, target, float(trigger), topo, tuple(samples), logs, role)


def _neighbours(topo: TopologySpec, node: str) -> List[str]:
    out = []
    for a, b in topo.links:
        if a == node:
            out.append(b)
        elif b == node:
            out.append(a)
    return out


def _node_logs(cfg, node, target, label, topo, t_inj, t_end, rng) -> List[LogEntry]:
    background = BACKGROUND_LOGS[cfg.profile]
    lo, hi = t_inj - 60, t_end + 30
    silent = label == NODE_DOWN and node == target
    entries = []
    t = lo + int(rng.integers(0, 5))
    while t <= hi:
        if not (silent and t_inj <= t <= t_end):
            sev = Severity.INFO if rng.random() < 0.8 else Severity.DEBUG
            entries.append(LogEntry(float(t), sev, background[int(rng.integers(len(background)))]))
        t += int(rng.integers(3, 8))

    templates: Tuple[Tuple[str, str], ...] = ()
    if node == target and label in FAILURE_LOGS[cfg.profile]:
        templates = FAILURE_LOGS[cfg.profile][label]
    elif label in NEIGHBOUR_LOGS and node in _neighbours(topo, target):
        templates = NEIGHBOUR_LOGS[label]
    if templates:
        t = t_inj + int(rng.integers(1, 6))
        while t <= t_end:
            sev, text = templates[int(rng.integers(len(templates)))]
            entries.append(LogEntry(float(t), Severity.parse(sev), text))
            t += int(rng.integers(6, 13))

    if node != target and cfg.noise > 0 and rng.random() < min(1.0, 0.15 * cfg.noise):
        t = t_inj + TRIGGER_DELAY - int(rng.integers(0, 25))
        entries.append(LogEntry(float(t), Severity.WARN, NOISE_WARNINGS[int(rng.integers(len(NOISE_WARNINGS)))]))
    entries.sort(key=lambda e: e.timestamp)
    return entries


# ---------------------------------------------------------------------------
# graphs from a dataset
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineParams:
    dimension: int = 3
    epochs: int = 5
    context_radius: int = 2
    negative_samples: int = 5
    build: BuildParams = BuildParams()
    match: MatchConfig = MatchConfig()
    auto_weights: bool = True
    vector_metric: str = "cosine"
    mode: str = "full"  # full | logs_only | metrics_only

    def __post_init__(self):
        if self.mode not in ("full", "logs_only", "metrics_only"):
            raise ValueError(f"unknown mode {self.mode!r}")


def training_corpus(injections: Sequence[Injection], params: PipelineParams) -> List[List[str]]:
    """Log sentences around each trigger, used to train the word embedding."""
    span = params.build.context_len
    corpus = []
    for inj in injections:
        for node in sorted(inj.logs):
            near = [e for e in inj.logs[node] if inj.trigger_time - span <= e.timestamp <= inj.trigger_time + span]
            corpus.extend(window_corpus(near))
    return corpus


def train_scenario_model(injections: Sequence[Injection], params: PipelineParams, seed: int) -> EmbeddingModel:
    return train_embedding(
        training_corpus(injections, params),
        dimension=params.dimension,
        epochs=params.epochs,
        context_radius=params.context_radius,
        negative_samples=params.negative_samples,
        seed=seed,
    )


def injection_graph(
    inj: Injection,
    model: EmbeddingModel,
    params: PipelineParams,
    dists: Optional[Mapping[str, MetricDistribution]],
    taxonomy: Optional[Taxonomy] = None,
) -> SystemGraph:
    g = build_graph(
        inj.topology,
        inj.metrics,
        inj.logs,
        inj.trigger_time,
        model,
        params.build,
        dists if params.auto_weights else None,
        taxonomy,
        warnings=[],
        trigger=f"injection {inj.index}",
    )
    return _restrict(g, params.mode)


def _restrict(g: SystemGraph, mode: str) -> SystemGraph:
    if mode == "full":
        return g
    keep_logs = mode == "logs_only"
    nodes = []
    for n in g.nodes:
        attrs = tuple(
            a for a in n.attributes if (a.name in (LOG_CONTEXT, LOG_EVENT)) == keep_logs or a.name == TYPE_ATTRIBUTE
        )
        nodes.append(replace(n, attributes=attrs))
    return SystemGraph(tuple(nodes), g.edges, g.metadata)


def generate_scenario(
    cfg: ScenarioConfig, params: PipelineParams = PipelineParams()
) -> Tuple[List[LabeledGraph], List[Tuple[SystemGraph, str]]]:
    """Labeled knowledge-base graphs and query graphs with their hidden truth."""
    ds = generate_dataset(cfg)
    model = train_scenario_model(ds.kb_part, params, cfg.seed)
    dists = ds.catalog()
    tax = scenario_taxonomy()
    labeled = [
        LabeledGraph(injection_graph(i, model, params, dists, tax), i.label, cfg.profile, i.trigger_time)
        for i in ds.kb_part
    ]
    queries = [(injection_graph(i, model, params, dists, tax), i.label) for i in ds.query_part]
    return labeled, queries


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------


@dataclass
class ConfusionMatrix:
    """Rows are true labels, columns predicted labels."""

    labels: List[str]
    counts: List[List[int]]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError("confusion matrix dimensions must match the label count")

    @classmethod
    def from_pairs(cls, truth: Sequence[str], predicted: Sequence[str]) -> "ConfusionMatrix":
        labels = sorted(set(truth) | set(predicted))
        idx = {l: i for i, l in enumerate(labels)}
        counts = [[0] * len(labels) for _ in labels]
        for t, p in zip(truth, predicted):
            counts[idx[t]][idx[p]] += 1
        return cls(labels, counts)

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))


def _require_nonempty(cm: ConfusionMatrix) -> None:
    if not cm.labels or cm.total == 0:
        raise ValueError("empty confusion matrix")


def precision_recall(cm: ConfusionMatrix, label: str) -> Tuple[Optional[float], Optional[float]]:
    i = cm.labels.index(label)
    tp = cm.counts[i][i]
    predicted = sum(row[i] for row in cm.counts)
    actual = sum(cm.counts[i])
    return (tp / predicted if predicted else None, tp / actual if actual else None)


def f1_score(cm: ConfusionMatrix, label: str) -> float:
    _require_nonempty(cm)
    if label not in cm.labels:
        raise ValueError(f"label {label!r} not in confusion matrix")
    p, r = precision_recall(cm, label)
    if not p or not r:
        return 0.0
    return 2.0 * p * r / (p + r)


def macro_f1(cm: ConfusionMatrix) -> float:
    _require_nonempty(cm)
    return sum(f1_score(cm, l) for l in cm.labels) / len(cm.labels)


def accuracy(cm: ConfusionMatrix) -> float:
    _require_nonempty(cm)
    return sum(cm.counts[i][i] for i in range(len(cm.labels))) / cm.total


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def run_experiment(
    cfg: ScenarioConfig,
    params: PipelineParams = PipelineParams(),
    query_profile: Optional[str] = None,
) -> Dict[str, object]:
    """Build a KB from ``cfg``'s knowledge half, classify queries, score.

    With ``query_profile`` set to another profile, queries come from that
    system (same classes, seed and noise) and are diagnosed against the
    source-system KB using the source-trained embedding; each system's metric
    distributions are fitted from its own history.
    """
    t0 = time.perf_counter()
    source = generate_dataset(cfg)
    target_profile = query_profile or cfg.profile
    cross = target_profile != cfg.profile
    target = generate_dataset(replace(cfg, profile=target_profile)) if cross else source

    model = train_scenario_model(source.kb_part, params, cfg.seed)
    tax = scenario_taxonomy()
    kb = KnowledgeBase()
    src_dists = source.catalog()
    for inj in source.kb_part:
        g = injection_graph(inj, model, params, src_dists, tax)
        kb.add(LabeledGraph(g, inj.label, cfg.profile, inj.trigger_time))
    tgt_dists = target.catalog() if cross else src_dists
    queries = [(injection_graph(i, model, params, tgt_dists, tax), i.label) for i in target.query_part]
    t_build = time.perf_counter()

    sim_cfg = SimilarityConfig(vector_metric=params.vector_metric, cross_distribution=cross)
    truth, predicted, scores = [], [], []
    for g, label in queries:
        res = classify(kb, g, tax, sim_cfg, params.match, source_system=cfg.profile)
        truth.append(label)
        predicted.append(res.chosen)
        scores.append(res.ranked[0].similarity)
    t_classify = time.perf_counter()

    cm = ConfusionMatrix.from_pairs(truth, predicted)
    return {
        "source_system": cfg.profile,
        "target_system": target_profile,
        "scenario": _config_dict(cfg),
        "pipeline": {
            "dimension": params.dimension,
            "epochs": params.epochs,
            "mode": params.mode,
            "auto_weights": params.auto_weights,
            "vector_metric": params.vector_metric,
            "alpha": params.match.alpha,
            "restarts": params.match.restarts,
            "context_len": params.build.context_len,
            "event_len": params.build.event_len,
            "metrics_window": params.build.metrics_window,
        },
        "n_exemplars": len(kb),
        "n_queries": len(queries),
        "labels": cm.labels,
        "confusion_matrix": cm.counts,
        "per_class_f1": {l: f1_score(cm, l) for l in cm.labels},
        "macro_f1": macro_f1(cm),
        "accuracy": accuracy(cm),
        "predictions": [
            {"truth": t, "predicted": p, "similarity": s} for t, p, s in zip(truth, predicted, scores)
        ],
        "timing": {"build_s": t_build - t0, "classify_s": t_classify - t_build},
    }


def _config_dict(cfg: ScenarioConfig) -> Dict[str, object]:
    d = asdict(cfg)
    d["failure_classes"] = list(cfg.failure_classes)
    return d


def report_table(report: Mapping[str, object]) -> str:
    lines = [
        f"source={report['source_system']} target={report['target_system']} "
        f"exemplars={report['n_exemplars']} queries={report['n_queries']}",
        f"{'class':<20} {'f1':>6}",
    ]
    for label, f1 in report["per_class_f1"].items():
        lines.append(f"{label:<20} {f1:>6.3f}")
    lines.append(f"{'macro f1':<20} {report['macro_f1']:>6.3f}")
    lines.append(f"{'accuracy':<20} {report['accuracy']:>6.3f}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# export in ingestion formats
# ---------------------------------------------------------------------------


def export_dataset(ds: Dataset, outdir: Union[str, Path]) -> Path:
    """Write a dataset as ingestion inputs.

    Layout: ``taxonomy.json``, ``dists.json``, ``manifest.json`` and one
    ``inj-NNN/`` directory per injection holding ``topology.json``,
    ``metrics.csv`` and ``logs/<node>.log``.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(scenario_taxonomy().to_dict(), out / "taxonomy.json")
    save_catalog(ds.catalog(), out / "dists.json")
    manifest = []
    for inj in ds.injections:
        d = out / f"inj-{inj.index:03d}"
        (d / "logs").mkdir(parents=True, exist_ok=True)
        dump_json(inj.topology.to_dict(), d / "topology.json")
        write_metrics_csv(inj.metrics, d / "metrics.csv")
        for node, entries in sorted(inj.logs.items()):
            text = "".join(format_log_line(e) + "\n" for e in entries)
            (d / "logs" / f"{node}.log").write_text(text, encoding="utf-8")
        manifest.append(
            {
                "dir": d.name,
                "label": inj.label,
                "target": inj.target,
                "trigger_time": inj.trigger_time,
                "role": inj.role,
                "system": ds.config.profile,
            }
        )
    dump_json({"scenario": _config_dict(ds.config), "injections": manifest}, out / "manifest.json")
    return out
