"""Labeled anomalous graphs and nearest-exemplar root-cause classification."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .matching import MatchConfig, best_matching_hill_climb
from .model import GraphError, SystemGraph, Taxonomy, dump_json, graph_from_dict, graph_to_dict, validate_graph
from .similarity import DEFAULT_CONFIG, SimilarityConfig


class NoKnowledgeError(LookupError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "no knowledge"


@dataclass(frozen=True)
class LabeledGraph:
    graph: SystemGraph
    root_cause: str
    source_system: str = ""
    captured_at: float = 0.0

    def __post_init__(self):
        if not self.root_cause:
            raise ValueError("root_cause must be non-empty")


@dataclass(frozen=True)
class RankedCause:
    root_cause: str
    similarity: float
    exemplar_id: str


@dataclass(frozen=True)
class DiagnosisResult:
    ranked: Tuple[RankedCause, ...]

    @property
    def chosen(self) -> str:
        return self.ranked[0].root_cause

    def to_dict(self) -> Dict[str, object]:
        return {
            "chosen": self.chosen,
            "ranked": [
                {"root_cause": r.root_cause, "similarity": r.similarity, "exemplar_id": r.exemplar_id}
                for r in self.ranked
            ],
        }


class KnowledgeBase:
    """Collection of labeled graphs, optionally persisted to a directory.

    Layout: ``index.json`` listing the exemplars plus one ``<id>.json`` per
    exemplar holding the graph and its label fields. A single writer is
    assumed.
    """

    def __init__(self, directory: Union[str, Path, None] = None):
        self.directory = Path(directory) if directory is not None else None
        self._items: Dict[str, LabeledGraph] = {}
        self._next = 1
        if self.directory is not None and (self.directory / "index.json").exists():
            self._load()

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Tuple[str, LabeledGraph]]:
        return iter(sorted(self._items.items()))

    def get(self, exemplar_id: str) -> LabeledGraph:
        return self._items[exemplar_id]

    def add(self, lg: LabeledGraph) -> str:
        report = validate_graph(lg.graph)
        if report:
            raise GraphError("invalid graph: " + "; ".join(str(v) for v in report))
        eid = f"ex-{self._next:06d}"
        self._next += 1
        self._items[eid] = lg
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            dump_json(_exemplar_to_dict(eid, lg), self.directory / f"{eid}.json")
            self._write_index()
        return eid

    def systems(self) -> List[str]:
        return sorted({lg.source_system for lg in self._items.values()})

    def _write_index(self) -> None:
        index = {
            "next": self._next,
            "exemplars": [
                {"id": eid, "root_cause": lg.root_cause, "source_system": lg.source_system, "captured_at": lg.captured_at}
                for eid, lg in sorted(self._items.items())
            ],
        }
        tmp = self.directory / "index.json.tmp"
        dump_json(index, tmp)
        os.replace(tmp, self.directory / "index.json")

    def _load(self) -> None:
        index = json.loads((self.directory / "index.json").read_text(encoding="utf-8"))
        for entry in index["exemplars"]:
            data = json.loads((self.directory / f"{entry['id']}.json").read_text(encoding="utf-8"))
            self._items[entry["id"]] = _exemplar_from_dict(data)
        self._next = int(index.get("next", len(self._items) + 1))


def _exemplar_to_dict(eid: str, lg: LabeledGraph) -> Dict[str, object]:
    d = graph_to_dict(lg.graph)
    d.update(id=eid, root_cause=lg.root_cause, source_system=lg.source_system, captured_at=lg.captured_at)
    return d


def _exemplar_from_dict(d: Dict[str, object]) -> LabeledGraph:
    return LabeledGraph(
        graph_from_dict(d),
        str(d["root_cause"]),
        str(d.get("source_system", "")),
        float(d.get("captured_at", 0.0)),
    )


def classify(
    kb: KnowledgeBase,
    query: SystemGraph,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    mc: MatchConfig = MatchConfig(),
    source_system: Optional[str] = None,
) -> DiagnosisResult:
    """Rank root causes by the best exemplar similarity for each cause."""
    best: Dict[str, Tuple[float, float, str]] = {}
    seen = False
    for eid, lg in kb:
        if source_system is not None and lg.source_system != source_system:
            continue
        seen = True
        _, sim = best_matching_hill_climb(query, lg.graph, t, cfg, mc)
        cur = best.get(lg.root_cause)
        # higher similarity wins; ties go to the earlier capture
        if cur is None or sim > cur[0] or (sim == cur[0] and lg.captured_at < cur[1]):
            best[lg.root_cause] = (sim, lg.captured_at, eid)
    if not seen:
        where = f" for source system {source_system!r}" if source_system is not None else ""
        raise NoKnowledgeError(f"no knowledge: knowledge base has no exemplars{where}")
    order = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[1][1], kv[0]))
    return DiagnosisResult(tuple(RankedCause(cause, v[0], v[2]) for cause, v in order))


def cross_classify(
    kb: KnowledgeBase,
    query: SystemGraph,
    source_system: str,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    mc: MatchConfig = MatchConfig(),
) -> DiagnosisResult:
    """Diagnose a target-system query using only ``source_system`` exemplars."""
    target = query.metadata.get("system")
    if target is not None and target == source_system:
        raise ValueError(f"query already belongs to source system {source_system!r}")
    return classify(kb, query, t, cfg, mc, source_system=source_system)
