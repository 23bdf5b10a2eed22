"""Build system-state graphs from topology, metric samples and logs."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .logs import (
    DEFAULT_CONTEXT_LEN,
    DEFAULT_EVENT_LEN,
    EmbeddingModel,
    LogEntry,
    Severity,
    extract_windows,
    parse_timestamp,
    read_log_file,
    vectorize_window,
)
from .model import Attribute, Categorical, Edge, Node, Numerical, SystemGraph, Taxonomy, TaxonomyType, Vector
from .weighting import DEFAULT_FLOOR, MetricDistribution, apply_auto_weights, to_distribution_attr

log = logging.getLogger(__name__)

TYPE_ATTRIBUTE = "type"
LOG_CONTEXT = "log_context"
LOG_EVENT = "log_event"
DEFAULT_METRICS_WINDOW = 120.0


class IngestionError(ValueError):
    pass


@dataclass(frozen=True)
class NodeSpec:
    id: str
    type: str
    categorical: Mapping[str, str] = field(default_factory=dict)
    metrics: Mapping[str, Tuple[float, float]] = field(default_factory=dict)
    log: Optional[str] = None


@dataclass(frozen=True)
class TopologySpec:
    system: str
    nodes: Tuple[NodeSpec, ...]
    links: Tuple[Tuple[str, str], ...] = ()

    def check(self, taxonomy: Optional[Taxonomy] = None) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise IngestionError("topology has duplicate node ids")
        seen = set()
        for a, b in self.links:
            if a not in ids or b not in ids:
                raise IngestionError(f"link {a}--{b} references an unknown node")
            if a == b or frozenset((a, b)) in seen:
                raise IngestionError(f"link {a}--{b} is a self-loop or duplicate")
            seen.add(frozenset((a, b)))
        if taxonomy is not None:
            for n in self.nodes:
                if n.type not in taxonomy:
                    raise IngestionError(f"node {n.id!r}: type {n.type!r} not in taxonomy")

    def to_dict(self) -> Dict[str, object]:
        return {
            "system": self.system,
            "nodes": [
                {
                    "id": n.id,
                    "type": n.type,
                    "attributes": dict(n.categorical),
                    "metrics": {k: list(v) for k, v in n.metrics.items()},
                    **({"log": n.log} if n.log else {}),
                }
                for n in self.nodes
            ],
            "links": [list(link) for link in self.links],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, object]) -> "TopologySpec":
        nodes = tuple(
            NodeSpec(
                str(n["id"]),
                str(n["type"]),
                {str(k): str(v) for k, v in n.get("attributes", {}).items()},
                {str(k): (float(v[0]), float(v[1])) for k, v in n.get("metrics", {}).items()},
                n.get("log"),
            )
            for n in d["nodes"]
        )
        links = tuple((str(a), str(b)) for a, b in d.get("links", []))
        return cls(str(d.get("system", "")), nodes, links)


def load_topology(path: Union[str, Path]) -> TopologySpec:
    return TopologySpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class MetricSample:
    node: str
    metric: str
    timestamp: float
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("metric value must be finite")


@dataclass(frozen=True)
class BuildParams:
    context_len: float = DEFAULT_CONTEXT_LEN
    event_len: float = DEFAULT_EVENT_LEN
    metrics_window: float = DEFAULT_METRICS_WINDOW
    type_weight: float = 1.0
    categorical_weight: float = 1.0
    metric_weight: float = 1.0
    log_weight: float = 1.0
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if not (self.context_len >= self.event_len > 0 and self.metrics_window > 0):
            raise ValueError("window lengths must be positive with context_len >= event_len")


METRIC_COLUMNS = ("timestamp", "node", "metric", "value")


def read_metrics_csv(path: Union[str, Path]) -> List[MetricSample]:
    """Read ``timestamp,node,metric,value`` rows; timestamps are seconds or ISO 8601."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read metrics file {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(METRIC_COLUMNS) <= set(reader.fieldnames):
            raise IngestionError(f"{path}: missing header, expected columns {','.join(METRIC_COLUMNS)}")
        samples, errors = [], []
        for row in reader:
            line = reader.line_num
            try:
                samples.append(
                    MetricSample(row["node"], row["metric"], _parse_time(row["timestamp"]), float(row["value"]))
                )
            except (TypeError, ValueError) as exc:
                errors.append(f"line {line}: {exc}")
    if errors:
        raise IngestionError(f"{path}: bad metric rows: " + "; ".join(errors))
    return samples


def _parse_time(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return parse_timestamp(text)


def write_metrics_csv(samples: Sequence[MetricSample], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for s in samples:
            w.writerow((repr(s.timestamp), s.node, s.metric, repr(s.value)))


def _mean(values: Sequence[float]) -> float:
    # anchored at the first value so a constant series is reproduced exactly
    v0 = values[0]
    return v0 + math.fsum(v - v0 for v in values) / len(values)


def build_graph(
    spec: TopologySpec,
    metrics: Sequence[MetricSample],
    logs: Mapping[str, Sequence[LogEntry]],
    trigger_time: float,
    model: Optional[EmbeddingModel],
    params: BuildParams = BuildParams(),
    dists: Optional[Mapping[str, MetricDistribution]] = None,
    taxonomy: Optional[Taxonomy] = None,
    warnings: Optional[List[str]] = None,
    trigger: str = "",
) -> SystemGraph:
    """Assemble the state graph at ``trigger_time``.

    Metrics become the mean of their samples over
    ``[trigger_time - metrics_window, trigger_time]``. Log vectors come from
    the window pair opened by the first WARN+ entry in
    ``[trigger_time - context_len, trigger_time + context_len]``.
    Missing data is reported through ``warnings`` and the module logger.
    """
    spec.check(taxonomy)
    notes: List[str] = warnings if warnings is not None else []

    def warn(msg: str) -> None:
        notes.append(msg)
        log.info(msg)

    lo = trigger_time - params.metrics_window
    series: Dict[Tuple[str, str], List[float]] = {}
    for s in sorted(metrics, key=lambda s: (s.node, s.metric, s.timestamp)):
        if lo <= s.timestamp <= trigger_time:
            series.setdefault((s.node, s.metric), []).append(s.value)

    nodes = []
    for ns in spec.nodes:
        attrs = [Attribute(TYPE_ATTRIBUTE, TaxonomyType(ns.type), params.type_weight)]
        for name, label in sorted(ns.categorical.items()):
            attrs.append(Attribute(name, Categorical(label), params.categorical_weight))
        for name, (mn, mx) in sorted(ns.metrics.items()):
            values = series.get((ns.id, name))
            if not values:
                warn(f"{ns.id}: no samples for metric {name!r} in metrics window; attribute omitted")
                continue
            value = Numerical(_mean(values), mn, mx)
            if dists is not None and name in dists:
                value = to_distribution_attr(value, dists[name])
            attrs.append(Attribute(name, value, params.metric_weight))
        if ns.id in logs or ns.log:
            attrs.extend(_log_attributes(ns.id, logs.get(ns.id, ()), trigger_time, model, params, warn))
        nodes.append(Node(ns.id, tuple(attrs), 1.0))

    edges = tuple(Edge(a, b, 1.0) for a, b in spec.links)
    meta = {"system": spec.system, "captured_at": repr(float(trigger_time))}
    if trigger:
        meta["trigger"] = trigger
    g = SystemGraph(tuple(nodes), edges, meta)
    if dists is not None:
        g = apply_auto_weights(g, dists, params.floor)
    return g


def _log_attributes(node_id, entries, trigger_time, model, params, warn) -> List[Attribute]:
    if model is None:
        warn(f"{node_id}: no embedding model; log attributes omitted")
        return []
    lo = trigger_time - params.context_len
    hi = trigger_time + params.context_len
    nearby = [e for e in entries if e.timestamp >= lo]
    pairs = [
        p for p in extract_windows(nearby, params.context_len, params.event_len, Severity.WARN) if p[0].start <= hi
    ]
    if pairs:
        context, event = pairs[0]
        vc, ve = vectorize_window(context, model), vectorize_window(event, model)
    else:
        warn(f"{node_id}: no WARN+ log entry near trigger; zero log vectors")
        vc = ve = Vector((0.0,) * model.dimension)
    return [Attribute(LOG_CONTEXT, vc, params.log_weight), Attribute(LOG_EVENT, ve, params.log_weight)]


def load_node_logs(spec: TopologySpec, log_dir: Union[str, Path, None]) -> Dict[str, List[LogEntry]]:
    """Read per-node log files: the node's ``log`` path, else ``<log_dir>/<node>.log``."""
    out: Dict[str, List[LogEntry]] = {}
    base = Path(log_dir) if log_dir is not None else None
    for ns in spec.nodes:
        candidates = []
        if ns.log:
            p = Path(ns.log)
            candidates.append(p if p.is_absolute() or base is None else base / p)
        if base is not None:
            candidates.append(base / f"{ns.id}.log")
        for p in candidates:
            if p.exists():
                out[ns.id] = read_log_file(p)
                break
    return out
