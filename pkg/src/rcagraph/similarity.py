"""Per-attribute similarity functions; every function returns a value in [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import (
    AttributeValue,
    Categorical,
    DistributionNumerical,
    Numerical,
    Taxonomy,
    TaxonomyType,
    Vector,
    lowest_common_ancestor,
)

COSINE = "cosine"
INVERSE_EUCLIDEAN = "inverse_euclidean"
MINKOWSKI = "minkowski"


class IncomparableError(ValueError):
    pass


@dataclass(frozen=True)
class SimilarityConfig:
    vector_metric: str = COSINE
    p: float = 2.0
    # Compare distribution attributes captured under different (mu, sigma),
    # each through its own CDF. Needed when graphs come from different systems.
    cross_distribution: bool = False

    def __post_init__(self):
        if self.vector_metric not in (COSINE, INVERSE_EUCLIDEAN, MINKOWSKI):
            raise ValueError(f"unknown vector metric {self.vector_metric!r}")
        if self.vector_metric == MINKOWSKI and not self.p >= 1:
            raise ValueError("minkowski p must be >= 1")


DEFAULT_CONFIG = SimilarityConfig()


def normal_cdf(x: float, mu: float = 0.0, sigma: float = 1.0) -> float:
    return 0.5 * math.erfc(-(x - mu) / (sigma * math.sqrt(2.0)))


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def sim_numerical(a1: Numerical, a2: Numerical) -> float:
    if (a1.min, a1.max) != (a2.min, a2.max):
        raise IncomparableError("incomparable numerical attributes: bounds differ")
    return _clamp(1.0 - abs(a1.value - a2.value) / abs(a1.max - a1.min))


def sim_vector(v1: Vector, v2: Vector, cfg: SimilarityConfig = DEFAULT_CONFIG) -> float:
    x, y = v1.components, v2.components
    if len(x) != len(y):
        raise IncomparableError(f"vector dimension mismatch: {len(x)} vs {len(y)}")
    if cfg.vector_metric == COSINE:
        sx = math.fsum(a * a for a in x)
        sy = math.fsum(b * b for b in y)
        if sx == 0.0 or sy == 0.0:
            raise IncomparableError("undefined angle: zero vector under cosine similarity")
        # one sqrt of the product: exactly symmetric, and exactly 1 for v against itself
        cos = math.fsum(a * b for a, b in zip(x, y)) / math.sqrt(sx * sy)
        return _clamp(cos)
    p = 2.0 if cfg.vector_metric == INVERSE_EUCLIDEAN else cfg.p
    d = math.fsum(abs(a - b) ** p for a, b in zip(x, y)) ** (1.0 / p)
    return 1.0 / (1.0 + d)


def sim_categorical(c1: Categorical, c2: Categorical) -> float:
    return 1.0 if c1.label == c2.label else 0.0


def sim_taxonomy(t: Taxonomy, c1: str, c2: str) -> float:
    """Wu-Palmer similarity with the root at depth 1."""
    lca = lowest_common_ancestor(t, c1, c2)
    return 2.0 * t.depth(lca) / (t.depth(c1) + t.depth(c2))


def sim_distribution(
    a1: DistributionNumerical, a2: DistributionNumerical, cfg: SimilarityConfig = DEFAULT_CONFIG
) -> float:
    if (a1.mu, a1.sigma) != (a2.mu, a2.sigma) and not cfg.cross_distribution:
        raise IncomparableError("incomparable distributions: (mu, sigma) differ")
    p1 = normal_cdf(a1.value, a1.mu, a1.sigma)
    p2 = normal_cdf(a2.value, a2.mu, a2.sigma)
    return _clamp(1.0 - abs(p1 - p2))


def sim_attribute(
    a1: AttributeValue,
    a2: AttributeValue,
    t: Optional[Taxonomy] = None,
    cfg: SimilarityConfig = DEFAULT_CONFIG,
) -> float:
    """Dispatch on the attribute kind; different kinds are maximally dissimilar.

    Under cosine, two all-zero vectors (e.g. two silent log windows) count as
    identical and a zero vector against a non-zero one scores 0.
    """
    if type(a1) is not type(a2):
        return 0.0
    if isinstance(a1, Numerical):
        return sim_numerical(a1, a2)
    if isinstance(a1, Vector):
        if cfg.vector_metric == COSINE and len(a1) == len(a2):
            z1 = not any(a1.components)
            z2 = not any(a2.components)
            if z1 or z2:
                return 1.0 if z1 and z2 else 0.0
        return sim_vector(a1, a2, cfg)
    if isinstance(a1, Categorical):
        return sim_categorical(a1, a2)
    if isinstance(a1, TaxonomyType):
        if t is None:
            return 1.0 if a1.label == a2.label else 0.0
        return sim_taxonomy(t, a1.label, a2.label)
    if isinstance(a1, DistributionNumerical):
        return sim_distribution(a1, a2, cfg)
    raise TypeError(f"unsupported attribute value {a1!r}")
