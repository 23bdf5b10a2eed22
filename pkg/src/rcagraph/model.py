"""Graph representation of a system state, attribute values and the type taxonomy."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union


class GraphError(ValueError):
    pass


class TaxonomyError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "label not in taxonomy"


# ---------------------------------------------------------------------------
# attribute values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Numerical:
    value: float
    min: float
    max: float

    def __post_init__(self):
        if not self.min < self.max:
            raise ValueError(f"numerical bounds must satisfy min < max, got [{self.min}, {self.max}]")


@dataclass(frozen=True)
class Vector:
    components: Tuple[float, ...]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if not comps:
            raise ValueError("vector attribute must be non-empty")
        if not all(math.isfinite(c) for c in comps):
            raise ValueError("vector components must be finite")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class Categorical:
    label: str


@dataclass(frozen=True)
class TaxonomyType:
    label: str


@dataclass(frozen=True)
class DistributionNumerical:
    value: float
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"distribution sigma must be positive, got {self.sigma}")


AttributeValue = Union[Numerical, Vector, Categorical, TaxonomyType, DistributionNumerical]

_TYPE_NAMES = {
    Numerical: "numerical",
    Vector: "vector",
    Categorical: "categorical",
    TaxonomyType: "taxonomy",
    DistributionNumerical: "distribution",
}


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Attribute:
    name: str
    value: AttributeValue
    weight: float = 1.0


@dataclass(frozen=True)
class Node:
    id: str
    attributes: Tuple[Attribute, ...] = ()
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))

    def attribute_map(self) -> Dict[str, Attribute]:
        return {a.name: a for a in self.attributes}

    def get(self, name: str) -> Optional[Attribute]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: float = 1.0

    def key(self) -> frozenset:
        return frozenset((self.source, self.target))


@dataclass(frozen=True)
class SystemGraph:
    """One immutable snapshot of a system state.

    Construction does not enforce the structural invariants so that broken
    graphs can still be loaded and reported on; use :func:`validate_graph`
    (or :meth:`checked`) before computing similarities.
    """

    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...] = ()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "metadata", dict(self.metadata))

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def node_ids(self) -> List[str]:
        return [n.id for n in self.nodes]

    def checked(self) -> "SystemGraph":
        report = validate_graph(self)
        if report:
            raise GraphError("invalid graph: " + "; ".join(str(v) for v in report))
        return self


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} [{self.subject}]: {self.detail}"


def validate_graph(g: SystemGraph) -> List[Violation]:
    """Return every structural invariant violation of ``g``; empty means valid.

    Order is deterministic: graph-level, then nodes in declaration order, then
    edges in declaration order.
    """
    report: List[Violation] = []
    if not g.nodes:
        report.append(Violation("empty-graph", "", "graph has no nodes"))

    seen = set()
    for n in g.nodes:
        if n.id in seen:
            report.append(Violation("duplicate-node-id", n.id, "node identifier is not unique"))
        seen.add(n.id)
        if not (n.weight >= 0 and math.isfinite(n.weight)):
            report.append(Violation("negative-weight", n.id, f"node weight {n.weight}"))
        names = set()
        for a in n.attributes:
            if a.name in names:
                report.append(Violation("duplicate-attribute", n.id, f"attribute {a.name!r} repeated"))
            names.add(a.name)
            if not (a.weight >= 0 and math.isfinite(a.weight)):
                report.append(Violation("negative-weight", n.id, f"attribute {a.name!r} weight {a.weight}"))

    pairs = set()
    for e in g.edges:
        label = f"{e.source}--{e.target}"
        for end in (e.source, e.target):
            if end not in seen:
                report.append(Violation("dangling-edge", label, f"endpoint {end!r} is not a node"))
        if e.source == e.target:
            report.append(Violation("self-loop", label, "edge endpoints are equal"))
        elif e.key() in pairs:
            report.append(Violation("duplicate-edge", label, "more than one edge for this node pair"))
        pairs.add(e.key())
        if not (e.weight >= 0 and math.isfinite(e.weight)):
            report.append(Violation("negative-weight", label, f"edge weight {e.weight}"))
    return report


# ---------------------------------------------------------------------------
# taxonomy
# ---------------------------------------------------------------------------


class Taxonomy:
    """Rooted concept tree; the root sits at depth 1."""

    def __init__(self, root: str, children: Optional[Mapping[str, List[str]]] = None):
        self.root = root
        self.children: Dict[str, List[str]] = {k: list(v) for k, v in (children or {}).items()}
        self._parent: Dict[str, Optional[str]] = {root: None}
        self._depth: Dict[str, int] = {root: 1}

        stack = [root]
        while stack:
            label = stack.pop()
            for child in self.children.get(label, []):
                if child in self._parent:
                    raise ValueError(f"taxonomy is not a tree: {child!r} reached twice")
                self._parent[child] = label
                self._depth[child] = self._depth[label] + 1
                stack.append(child)
        orphans = set(self.children) - set(self._parent)
        if orphans:
            raise ValueError(f"taxonomy labels unreachable from root: {sorted(orphans)}")

    def __contains__(self, label: str) -> bool:
        return label in self._depth

    @property
    def labels(self) -> List[str]:
        return sorted(self._depth)

    def parent(self, label: str) -> Optional[str]:
        self._require(label)
        return self._parent[label]

    def depth(self, label: str) -> int:
        self._require(label)
        return self._depth[label]

    def ancestors(self, label: str) -> List[str]:
        """``label`` followed by its ancestors up to the root."""
        self._require(label)
        chain = []
        cur: Optional[str] = label
        while cur is not None:
            chain.append(cur)
            cur = self._parent[cur]
        return chain

    def _require(self, label: str) -> None:
        if label not in self._depth:
            raise TaxonomyError(f"label not in taxonomy: {label!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {"root": self.root, "children": {k: list(v) for k, v in sorted(self.children.items())}}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Taxonomy":
        return cls(data["root"], data.get("children", {}))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Taxonomy":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def taxonomy_depth(t: Taxonomy, label: str) -> int:
    return t.depth(label)


def lowest_common_ancestor(t: Taxonomy, c1: str, c2: str) -> str:
    up = set(t.ancestors(c1))
    for label in t.ancestors(c2):
        if label in up:
            return label
    raise AssertionError("taxonomy without common root")  # unreachable for a tree


def equipment_taxonomy() -> Taxonomy:
    """Equipment taxonomy with servers (master/slave) and switches."""
    return Taxonomy("Equipment", {"Equipment": ["Server", "Switch"], "Server": ["Master", "Slave"]})


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def attribute_to_dict(a: Attribute) -> Dict[str, Any]:
    v = a.value
    out: Dict[str, Any] = {"name": a.name, "weight": a.weight, "type": _TYPE_NAMES[type(v)]}
    if isinstance(v, Numerical):
        out.update(value=v.value, min=v.min, max=v.max)
    elif isinstance(v, Vector):
        out["value"] = list(v.components)
    elif isinstance(v, (Categorical, TaxonomyType)):
        out["value"] = v.label
    elif isinstance(v, DistributionNumerical):
        out.update(value=v.value, mu=v.mu, sigma=v.sigma)
    return out


def attribute_from_dict(d: Mapping[str, Any]) -> Attribute:
    kind = d["type"]
    if kind == "numerical":
        value: AttributeValue = Numerical(float(d["value"]), float(d["min"]), float(d["max"]))
    elif kind == "vector":
        value = Vector(tuple(d["value"]))
    elif kind == "categorical":
        value = Categorical(str(d["value"]))
    elif kind == "taxonomy":
        value = TaxonomyType(str(d["value"]))
    elif kind == "distribution":
        value = DistributionNumerical(float(d["value"]), float(d["mu"]), float(d["sigma"]))
    else:
        raise ValueError(f"unknown attribute type {kind!r}")
    return Attribute(d["name"], value, float(d.get("weight", 1.0)))


def graph_to_dict(g: SystemGraph) -> Dict[str, Any]:
    return {
        "metadata": dict(sorted(g.metadata.items())),
        "nodes": [
            {"id": n.id, "weight": n.weight, "attributes": [attribute_to_dict(a) for a in n.attributes]}
            for n in g.nodes
        ],
        "edges": [{"from": e.source, "to": e.target, "weight": e.weight} for e in g.edges],
    }


def graph_from_dict(d: Mapping[str, Any]) -> SystemGraph:
    nodes = [
        Node(
            str(n["id"]),
            tuple(attribute_from_dict(a) for a in n.get("attributes", [])),
            float(n.get("weight", 1.0)),
        )
        for n in d.get("nodes", [])
    ]
    edges = [Edge(str(e["from"]), str(e["to"]), float(e.get("weight", 1.0))) for e in d.get("edges", [])]
    meta = {str(k): str(v) for k, v in d.get("metadata", {}).items()}
    return SystemGraph(tuple(nodes), tuple(edges), meta)


def dump_json(data: Any, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def save_graph(g: SystemGraph, path: Union[str, Path]) -> None:
    dump_json(graph_to_dict(g), path)


def load_graph(path: Union[str, Path]) -> SystemGraph:
    return graph_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
