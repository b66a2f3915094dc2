"""Feature extraction and candidate-graph ranking.

Each candidate graph gets a small deterministic feature vector; the shipped
ranker is a linear scorer over normalized features with documented default
weights, plus an optional pairwise-logistic trainer as a desk-scale
stand-in for a learned ranker.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import EmptyTrainingSet
from .graphs import CvtShape, QueryGraph
from .store import KnowledgeBase

FEATURE_NAMES = (
    "entity_match",
    "property_score",
    "constraint_count",
    "constraint_coverage",
    "token_coverage",
    "inference_penalty",
    "shape_is_cvt",
)

# Counts are capped and divided so every normalized feature sits in [0, 1]
# and training gradients stay bounded.
_CONSTRAINT_COUNT_CAP = 4


@dataclass(frozen=True)
class FeatureVector:
    entity_match: float
    property_score: float
    constraint_count: int
    constraint_coverage: float
    token_coverage: float
    inference_penalty: int
    shape_is_cvt: int

    def as_array(self) -> list[float]:
        """Normalized values in FEATURE_NAMES order (used by scoring and training)."""
        return [
            self.entity_match,
            self.property_score,
            min(self.constraint_count, _CONSTRAINT_COUNT_CAP) / _CONSTRAINT_COUNT_CAP,
            self.constraint_coverage,
            self.token_coverage,
            float(self.inference_penalty),
            float(self.shape_is_cvt),
        ]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


@dataclass(frozen=True)
class RankWeights:
    """One weight per feature; inference_penalty is conventionally <= 0."""

    entity_match: float = 1.0
    property_score: float = 2.0
    constraint_count: float = 0.25
    constraint_coverage: float = 1.5
    token_coverage: float = 1.0
    inference_penalty: float = -0.25
    shape_is_cvt: float = 0.0

    def as_array(self) -> list[float]:
        return [getattr(self, name) for name in FEATURE_NAMES]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    @classmethod
    def from_dict(cls, doc: dict) -> "RankWeights":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown weight names: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in doc.items()})

    @classmethod
    def load(cls, path: str | Path) -> "RankWeights":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def extract_features(
    question: str,
    graph: QueryGraph,
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> FeatureVector:
    """Deterministic per-graph features; characters counted as Unicode scalars."""
    entity = kb.entities[graph.topic_entity]
    surfaces = [entity.name, *entity.aliases]
    longest = max(len(s) for s in surfaces) if surfaces else 1
    entity_match = min(len(graph.provenance.topic_mention.surface) / longest, 1.0) if longest else 0.0

    constraints = graph.constraints
    if isinstance(graph.shape, CvtShape):
        leaf = kb.properties[graph.leaf_property_id]
        schema = kb.cvt_schemas[leaf.range.cvt_schema]
        condition_count = len(schema.condition_columns)
        coverage = len(constraints) / condition_count if condition_count else 1.0
        shape_is_cvt = 1
    else:
        coverage = 1.0
        shape_is_cvt = 0

    explained: set[int] = set()
    spans = [graph.provenance.topic_mention.span]
    spans.extend(c.source_mention.span for c in constraints)
    for start, end in spans:
        explained.update(range(start, end))
    content = [i for i, ch in enumerate(question) if ch not in config.stop_chars]
    token_coverage = (
        sum(1 for i in content if i in explained) / len(content) if content else 1.0
    )

    return FeatureVector(
        entity_match=entity_match,
        property_score=graph.provenance.property_score.score,
        constraint_count=len(constraints),
        constraint_coverage=coverage,
        token_coverage=token_coverage,
        inference_penalty=1 if graph.inference_hops else 0,
        shape_is_cvt=shape_is_cvt,
    )


def score(fv: FeatureVector, weights: RankWeights) -> float:
    """Dot product of the normalized feature array with the weight vector."""
    return sum(f * w for f, w in zip(fv.as_array(), weights.as_array()))


@dataclass(frozen=True)
class RankedGraph:
    graph: QueryGraph
    score: float
    features: FeatureVector


def rank(
    question: str,
    graphs: Sequence[QueryGraph],
    weights: RankWeights,
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> list[RankedGraph]:
    """Score descending; ties break on (fewer inference hops, more bound
    constraints, lexicographic graph key) so the order is fully deterministic."""
    if not graphs:
        raise ValueError("rank requires at least one graph")
    ranked = [
        RankedGraph(g, score(fv := extract_features(question, g, kb, config), weights), fv)
        for g in graphs
    ]
    ranked.sort(
        key=lambda r: (
            -r.score,
            r.graph.inference_hops,
            -len(r.graph.constraints),
            r.graph.sort_key(),
        )
    )
    return ranked


# --- pairwise trainer ---

FeaturePair = tuple[Sequence[float], Sequence[float]]  # (preferred, rejected)


def pairwise_loss(weights_vec: Sequence[float], pairs: Sequence[FeaturePair]) -> float:
    """Mean logistic loss log(1 + exp(-(s_pref - s_rej))) over the pairs."""
    total = 0.0
    for preferred, rejected in pairs:
        margin = sum(w * (p - r) for w, p, r in zip(weights_vec, preferred, rejected))
        # log1p(exp(-m)) computed stably for both signs of the margin.
        total += math.log1p(math.exp(-abs(margin))) + max(-margin, 0.0)
    return total / len(pairs)


def pairwise_gradient(
    weights_vec: Sequence[float], pairs: Sequence[FeaturePair]
) -> list[float]:
    """Analytic gradient of pairwise_loss with respect to the weights."""
    grad = [0.0] * len(weights_vec)
    for preferred, rejected in pairs:
        diff = [p - r for p, r in zip(preferred, rejected)]
        margin = sum(w * d for w, d in zip(weights_vec, diff))
        coeff = -1.0 / (1.0 + math.exp(margin))  # -sigmoid(-margin)
        for i, d in enumerate(diff):
            grad[i] += coeff * d
    return [g / len(pairs) for g in grad]


def pairwise_accuracy(weights: RankWeights, pairs: Sequence[FeaturePair]) -> float:
    """Fraction of pairs scored strictly in the preferred order."""
    w = weights.as_array()
    correct = sum(
        1
        for preferred, rejected in pairs
        if sum(wi * (p - r) for wi, p, r in zip(w, preferred, rejected)) > 0
    )
    return correct / len(pairs) if pairs else 0.0


def feature_pairs(
    examples: Sequence[tuple[str, QueryGraph, QueryGraph]],
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> list[FeaturePair]:
    return [
        (
            extract_features(q, preferred, kb, config).as_array(),
            extract_features(q, rejected, kb, config).as_array(),
        )
        for q, preferred, rejected in examples
    ]


def train_pairwise(
    examples: Sequence[tuple[str, QueryGraph, QueryGraph]],
    initial: RankWeights,
    epochs: int,
    learning_rate: float,
    *,
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> RankWeights:
    """Full-batch gradient descent on the pairwise logistic loss.

    With learning_rate <= 0.1 over the normalized features the training
    loss is non-increasing epoch over epoch.
    """
    if not examples:
        raise EmptyTrainingSet("train_pairwise needs at least one example pair")
    pairs = feature_pairs(examples, kb, config)
    w = initial.as_array()
    for _ in range(epochs):
        grad = pairwise_gradient(w, pairs)
        w = [wi - learning_rate * gi for wi, gi in zip(w, grad)]
    return RankWeights(**dict(zip(FEATURE_NAMES, w)))
