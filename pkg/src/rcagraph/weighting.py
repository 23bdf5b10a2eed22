"""Per-metric historical distributions and deviation-based attribute weights."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Mapping, Sequence, Union

from .model import DistributionNumerical, Numerical, SystemGraph

DEFAULT_FLOOR = 0.05


class DegenerateMetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricDistribution:
    name: str
    mu: float
    sigma: float
    sample_count: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2")


def fit_distribution(samples: Sequence[float], name: str) -> MetricDistribution:
    if len(samples) < 2:
        raise DegenerateMetricError(f"degenerate metric history for {name!r}: fewer than 2 samples")
    sigma = statistics.stdev(samples)
    if sigma == 0:
        raise DegenerateMetricError(f"degenerate metric history for {name!r}: zero variance")
    return MetricDistribution(name, statistics.fmean(samples), sigma, len(samples))


def attribute_weight(a: float, d: MetricDistribution) -> float:
    return abs(a - d.mu) / d.sigma


def to_distribution_attr(a: Numerical, d: MetricDistribution) -> DistributionNumerical:
    return DistributionNumerical(a.value, d.mu, d.sigma)


def apply_auto_weights(
    g: SystemGraph, dists: Mapping[str, MetricDistribution], floor: float = DEFAULT_FLOOR
) -> SystemGraph:
    """Weight metric attributes by their deviation, then normalize per node.

    Numerical and distribution attributes whose name has a fitted
    distribution get ``max(floor, |a - mu| / sigma)``; every other attribute
    keeps its weight. When anything was reweighted, every node's attribute
    weights are then scaled to sum to 1.
    """
    if not floor > 0:
        raise ValueError("floor must be positive")
    reweighted = []
    changed = False
    for node in g.nodes:
        attrs = []
        for a in node.attributes:
            d = dists.get(a.name)
            if d is not None and isinstance(a.value, (Numerical, DistributionNumerical)):
                attrs.append(replace(a, weight=max(floor, attribute_weight(a.value.value, d))))
                changed = True
            else:
                attrs.append(a)
        reweighted.append((node, attrs))
    if not changed:
        return g
    nodes = []
    for node, attrs in reweighted:
        total = math.fsum(a.weight for a in attrs)
        if total > 0:
            attrs = [replace(a, weight=a.weight / total) for a in attrs]
        nodes.append(replace(node, attributes=tuple(attrs)))
    return SystemGraph(tuple(nodes), g.edges, g.metadata)


def distribution_catalog(history: Mapping[str, Sequence[float]]) -> Dict[str, MetricDistribution]:
    return {name: fit_distribution(values, name) for name, values in sorted(history.items())}


def save_catalog(dists: Mapping[str, MetricDistribution], path: Union[str, Path]) -> None:
    data = {"metrics": {k: {"mu": d.mu, "sigma": d.sigma, "n": d.sample_count} for k, d in sorted(dists.items())}}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_catalog(path: Union[str, Path]) -> Dict[str, MetricDistribution]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {
        k: MetricDistribution(k, float(v["mu"]), float(v["sigma"]), int(v["n"]))
        for k, v in data["metrics"].items()
    }
