"""Maximum-similarity node matching between two system graphs.

A matching is an injective partial map between the node sets covering
``min(|V1|, |V2|)`` nodes. Its score blends a weighted node term with a
preserved-edge term::

    alpha * N + (1 - alpha) * E

``N`` is the pair-weighted mean node similarity, with the weight of nodes left
unmatched on the larger graph added to the denominator. ``E`` is the mean of
the two directed fractions of edge weight whose endpoints map onto an edge of
the other graph (a graph without edges contributes 1).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .model import Node, SystemGraph, Taxonomy, TaxonomyType
from .similarity import DEFAULT_CONFIG, SimilarityConfig, sim_attribute

ORACLE_LIMIT = 8


class UnweightedNodeError(ValueError):
    pass


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class MatchConfig:
    alpha: float = 0.8
    restarts: int = 24
    max_plateau_steps: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.restarts < 1 or self.max_plateau_steps < 1:
            raise ValueError("restarts and max_plateau_steps must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class NodeMatching:
    pairs: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(tuple(p) for p in self.pairs)))

    def as_dict(self) -> Dict[str, str]:
        return dict(self.pairs)

    def inverse(self) -> "NodeMatching":
        return NodeMatching(tuple((b, a) for a, b in self.pairs))


def node_similarity(
    n1: Node, n2: Node, t: Optional[Taxonomy] = None, cfg: SimilarityConfig = DEFAULT_CONFIG
) -> float:
    """Weighted mean attribute similarity.

    Shared attributes are weighted by the mean of both sides' weights;
    attributes present on one side only count with their own weight and
    similarity 0.
    """
    m1 = n1.attribute_map()
    m2 = n2.attribute_map()
    num = 0.0
    den = 0.0
    for name in sorted(m1.keys() | m2.keys()):
        a1 = m1.get(name)
        a2 = m2.get(name)
        if a1 is None or a2 is None:
            den += (a1 or a2).weight
            continue
        w = 0.5 * (a1.weight + a2.weight)
        if w == 0.0:
            continue
        num += w * sim_attribute(a1.value, a2.value, t, cfg)
        den += w
    if den <= 0.0:
        raise UnweightedNodeError(f"unweighted node: {n1.id!r} vs {n2.id!r} have no positive attribute weight")
    return min(1.0, num / den)


def _type_label(n: Node) -> Optional[str]:
    for a in n.attributes:
        if isinstance(a.value, TaxonomyType):
            return a.value.label
    return None


class _Problem:
    """Precomputed node similarities and adjacency for one graph pair."""

    def __init__(self, g1: SystemGraph, g2: SystemGraph, t, cfg, alpha: float):
        self.ids1 = g1.node_ids
        self.ids2 = g2.node_ids
        self.n1, self.n2 = len(self.ids1), len(self.ids2)
        self.alpha = alpha
        self.sim = [[node_similarity(a, b, t, cfg) for b in g2.nodes] for a in g1.nodes]
        w1 = [n.weight for n in g1.nodes]
        w2 = [n.weight for n in g2.nodes]
        self.w1, self.w2 = w1, w2
        self.pw = [[0.5 * (a + b) for b in w2] for a in w1]
        self.types1 = [_type_label(n) for n in g1.nodes]
        self.types2 = [_type_label(n) for n in g2.nodes]
        idx1 = {nid: i for i, nid in enumerate(self.ids1)}
        idx2 = {nid: i for i, nid in enumerate(self.ids2)}
        self.idx1, self.idx2 = idx1, idx2
        self.edges1 = [(idx1[e.source], idx1[e.target], e.weight) for e in g1.edges]
        self.edges2 = [(idx2[e.source], idx2[e.target], e.weight) for e in g2.edges]
        self.adj1 = {frozenset((u, v)) for u, v, _ in self.edges1}
        self.adj2 = {frozenset((u, v)) for u, v, _ in self.edges2}
        self.ew1 = math.fsum(w for _, _, w in self.edges1)
        self.ew2 = math.fsum(w for _, _, w in self.edges2)
        if math.fsum(w1) + math.fsum(w2) <= 0.0:
            raise UnweightedNodeError("unweighted graph: all node weights are zero")

    def score(self, fwd: Dict[int, int]) -> float:
        """Score a matching given as g1-index -> g2-index."""
        num = 0.0
        den = 0.0
        for i, j in fwd.items():
            pw = self.pw[i][j]
            num += pw * self.sim[i][j]
            den += pw
        if self.n1 > self.n2:
            den += sum(self.w1[i] for i in range(self.n1) if i not in fwd)
        elif self.n2 > self.n1:
            used = set(fwd.values())
            den += sum(self.w2[j] for j in range(self.n2) if j not in used)
        node_term = num / den if den > 0 else 0.0

        if self.ew1 > 0:
            kept = 0.0
            for u, v, w in self.edges1:
                iu, iv = fwd.get(u), fwd.get(v)
                if iu is not None and iv is not None and frozenset((iu, iv)) in self.adj2:
                    kept += w
            e12 = kept / self.ew1
        else:
            e12 = 1.0
        if self.ew2 > 0:
            inv = {j: i for i, j in fwd.items()}
            kept = 0.0
            for u, v, w in self.edges2:
                iu, iv = inv.get(u), inv.get(v)
                if iu is not None and iv is not None and frozenset((iu, iv)) in self.adj1:
                    kept += w
            e21 = kept / self.ew2
        else:
            e21 = 1.0
        value = self.alpha * node_term + (1.0 - self.alpha) * 0.5 * (e12 + e21)
        return min(1.0, max(0.0, value))

    def to_matching(self, fwd: Dict[int, int]) -> NodeMatching:
        return NodeMatching(tuple((self.ids1[i], self.ids2[j]) for i, j in fwd.items()))


def _check_matching(g1: SystemGraph, g2: SystemGraph, m: NodeMatching) -> None:
    ids1, ids2 = set(g1.node_ids), set(g2.node_ids)
    left = [a for a, _ in m.pairs]
    right = [b for _, b in m.pairs]
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise ValueError("invalid matching: not injective")
    if not set(left) <= ids1 or not set(right) <= ids2:
        raise ValueError("invalid matching: unknown node id")
    if len(m.pairs) != min(len(ids1), len(ids2)):
        raise ValueError("invalid matching: must cover min(|V1|, |V2|) nodes")


def graph_similarity(
    g1: SystemGraph,
    g2: SystemGraph,
    m: NodeMatching,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    mc: MatchConfig = MatchConfig(),
) -> float:
    """Score the fixed matching ``m`` between ``g1`` and ``g2``."""
    _check_matching(g1, g2, m)
    prob = _Problem(g1, g2, t, cfg, mc.alpha)
    return prob.score({prob.idx1[a]: prob.idx2[b] for a, b in m.pairs})


# ---------------------------------------------------------------------------
# hill climbing
# ---------------------------------------------------------------------------


def _greedy(prob: _Problem, rng: Optional[random.Random]) -> Dict[int, int]:
    cands = []
    for i in range(prob.n1):
        for j in range(prob.n2):
            t1, t2 = prob.types1[i], prob.types2[j]
            same_type = 1 if (t1 is not None and t1 == t2) else 0
            jitter = rng.random() if rng is not None else 0.0
            cands.append((-same_type, -prob.sim[i][j], jitter, i, j))
    cands.sort()
    fwd: Dict[int, int] = {}
    used = set()
    k = min(prob.n1, prob.n2)
    for _, _, _, i, j in cands:
        if i in fwd or j in used:
            continue
        fwd[i] = j
        used.add(j)
        if len(fwd) == k:
            break
    return fwd


def _random_matching(prob: _Problem, rng: random.Random) -> Dict[int, int]:
    k = min(prob.n1, prob.n2)
    left = rng.sample(range(prob.n1), k)
    right = rng.sample(range(prob.n2), k)
    return dict(zip(left, right))


def _neighbours(prob: _Problem, fwd: Dict[int, int]):
    items = sorted(fwd.items())
    free1 = [i for i in range(prob.n1) if i not in fwd]
    used = set(fwd.values())
    free2 = [j for j in range(prob.n2) if j not in used]
    for a in range(len(items)):
        ia, ja = items[a]
        for b in range(a + 1, len(items)):
            ib, jb = items[b]
            nxt = dict(fwd)
            nxt[ia], nxt[ib] = jb, ja
            yield nxt
        for j in free2:
            nxt = dict(fwd)
            nxt[ia] = j
            yield nxt
        for i in free1:
            nxt = dict(fwd)
            del nxt[ia]
            nxt[i] = ja
            yield nxt


def _climb(prob: _Problem, fwd: Dict[int, int], max_steps: int) -> Tuple[Dict[int, int], float]:
    best = prob.score(fwd)
    for _ in range(max_steps):
        step_best, step_val = None, best
        for cand in _neighbours(prob, fwd):
            v = prob.score(cand)
            if v > step_val + 1e-12:
                step_best, step_val = cand, v
        if step_best is None:
            break
        fwd, best = step_best, step_val
    return fwd, best


def best_matching_hill_climb(
    g1: SystemGraph,
    g2: SystemGraph,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    mc: MatchConfig = MatchConfig(),
) -> Tuple[NodeMatching, float]:
    """Steepest-ascent search over matchings with seeded restarts.

    Restart 0 starts from the type-aware greedy assignment, odd restarts from
    greedy with random tie-breaking, the others from a random matching.
    Each restart draws from its own stream seeded by ``(seed, restart)``.
    """
    prob = _Problem(g1, g2, t, cfg, mc.alpha)
    best_fwd: Optional[Dict[int, int]] = None
    best_val = -1.0
    for r in range(mc.restarts):
        rng = random.Random(f"{mc.seed}:{r}")
        if r == 0:
            start = _greedy(prob, None)
        elif r % 2 == 1:
            start = _greedy(prob, rng)
        else:
            start = _random_matching(prob, rng)
        fwd, val = _climb(prob, start, mc.max_plateau_steps)
        if val > best_val + 1e-12:
            best_fwd, best_val = fwd, val
    return prob.to_matching(best_fwd), best_val


def best_matching_brute_force(
    g1: SystemGraph,
    g2: SystemGraph,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
    alpha: float = MatchConfig.alpha,
) -> Tuple[NodeMatching, float]:
    """Exact maximum over every injective matching (small graphs only)."""
    n1, n2 = len(g1.nodes), len(g2.nodes)
    if min(n1, n2) > ORACLE_LIMIT:
        raise OracleLimitError(f"oracle limit: min(|V1|, |V2|) = {min(n1, n2)} > {ORACLE_LIMIT}")
    prob = _Problem(g1, g2, t, cfg, alpha)
    best: Optional[Tuple[float, Tuple]] = None
    best_fwd: Dict[int, int] = {}
    for fwd in _all_matchings(n1, n2):
        v = prob.score(fwd)
        key = tuple(sorted((prob.ids1[i], prob.ids2[j]) for i, j in fwd.items()))
        if best is None or v > best[0] or (v == best[0] and key < best[1]):
            best = (v, key)
            best_fwd = fwd
    return prob.to_matching(best_fwd), best[0]


def _all_matchings(n1: int, n2: int):
    if n1 <= n2:
        for perm in itertools.permutations(range(n2), n1):
            yield dict(enumerate(perm))
    else:
        for perm in itertools.permutations(range(n1), n2):
            yield {i: j for j, i in enumerate(perm)}


def similarity_matrix(
    g1: SystemGraph, g2: SystemGraph, t: Optional[Taxonomy] = None, cfg: SimilarityConfig = DEFAULT_CONFIG
) -> List[List[float]]:
    return [[node_similarity(a, b, t, cfg) for b in g2.nodes] for a in g1.nodes]

