"""Query graph generation and constraint binding.

A question becomes a set of candidate graphs: a topic entity plus a
property chain, either plain (the chain ends in a simple or key-value
range) or with a CVT node whose answer column is queried and whose
condition columns can be bound to constraints recognized in the question.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence, Union

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import AmbiguousAncestor, NoGraphs, NoReifyingAncestor
from .model import (
    Cell,
    CvtSchema,
    CvtTable,
    PropertyChain,
    ValueDomain,
    ValueKind,
    chain_key,
)
from .reasoning import generalize, generalize_to_cells
from .store import KnowledgeBase
from .trie import MentionKind
from .understanding import Mention, PropertyScore


@dataclass(frozen=True)
class Constraint:
    """Equality constraint bound to one CVT condition column."""

    column: str
    value: Cell
    source_mention: Mention
    relation: str = "="

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "relation": self.relation,
            "value": self.value,
            "surface": self.source_mention.surface,
        }


@dataclass(frozen=True)
class BasicShape:
    kind = "basic"


@dataclass(frozen=True)
class CvtShape:
    answer_column: str
    constraints: tuple[Constraint, ...] = ()
    kind = "cvt"


@dataclass(frozen=True)
class Provenance:
    topic_mention: Mention
    property_score: PropertyScore


@dataclass(frozen=True)
class QueryGraph:
    """One candidate interpretation of a question."""

    topic_entity: str
    chain: PropertyChain
    shape: Union[BasicShape, CvtShape]
    provenance: Provenance
    inferred_domain: tuple[str, str] | None = None  # (original, generalized)
    inferred_range: tuple[str, str] | None = None

    @property
    def leaf_property_id(self) -> str:
        return self.chain[-1]

    @property
    def is_cvt(self) -> bool:
        return isinstance(self.shape, CvtShape)

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return self.shape.constraints if isinstance(self.shape, CvtShape) else ()

    @property
    def inference_hops(self) -> int:
        return (self.inferred_domain is not None) + (self.inferred_range is not None)

    def sort_key(self) -> str:
        constraints = ",".join(
            f"{c.column}={c.value}" for c in self.constraints
        )
        return f"{self.topic_entity}|{chain_key(self.chain)}|{self.shape.kind}|{constraints}"

    def to_dict(self) -> dict:
        return {
            "topic_entity": self.topic_entity,
            "chain": list(self.chain),
            "shape": self.shape.kind,
            "constraints": [c.to_dict() for c in self.constraints],
            "inferred_domain": list(self.inferred_domain) if self.inferred_domain else None,
            "inferred_range": list(self.inferred_range) if self.inferred_range else None,
            "property_score": self.provenance.property_score.score,
        }


def validate_graph(graph: QueryGraph, kb: KnowledgeBase) -> None:
    """Assert the shape invariants; used by tests on every generated graph."""
    leaf = kb.properties[graph.leaf_property_id]
    assert leaf.range is not None, "chain must end at a leaf"
    if leaf.range.kind is ValueKind.CVT:
        assert isinstance(graph.shape, CvtShape), "CVT-ranged leaf needs a CVT shape"
        schema = kb.cvt_schemas[leaf.range.cvt_schema]
        assert graph.shape.answer_column == schema.answer_column
        condition_names = [c.column_name for c in schema.condition_columns]
        bound = [c.column for c in graph.shape.constraints]
        assert len(bound) == len(set(bound)), "one constraint per column"
        assert all(name in condition_names for name in bound), "constraints bind condition columns"
    else:
        assert isinstance(graph.shape, BasicShape), "non-CVT leaf must be basic"


def generate(
    question: str,
    mentions: Sequence[Mention],
    property_scores: Sequence[PropertyScore],
    kb: KnowledgeBase,
) -> list[QueryGraph]:
    """All (topic entity, scored chain) graphs whose domains line up.

    A chain qualifies for an entity when its tree belongs to the entity's
    class, or to the class of a member_of target one hop away (the graph
    then carries the inferred-domain annotation). Deduplicated on
    (entity, chain, shape); raises NoGraphs when nothing qualifies.
    """
    del question  # graphs derive from recognition output only
    graphs: list[QueryGraph] = []
    seen: set[tuple] = set()
    for mention in mentions:
        for entity_id in mention.entity_ids:
            entity = kb.entities.get(entity_id)
            if entity is None:
                continue
            for score in property_scores:
                chain = score.property_chain
                domain_class = kb.properties[chain[0]].domain_class
                inferred: tuple[str, str] | None = None
                if domain_class != entity.instance_of:
                    hop = next(
                        (
                            parent_id
                            for parent_id in entity.member_of
                            if (parent := kb.entities.get(parent_id)) is not None
                            and parent.instance_of == domain_class
                        ),
                        None,
                    )
                    if hop is None:
                        continue
                    inferred = (entity_id, hop)
                leaf = kb.properties[chain[-1]]
                if leaf.range is None:
                    continue
                if leaf.range.kind is ValueKind.CVT:
                    schema = kb.cvt_schemas[leaf.range.cvt_schema]
                    shape: Union[BasicShape, CvtShape] = CvtShape(schema.answer_column)
                else:
                    shape = BasicShape()
                key = (entity_id, chain, shape.kind, ())
                if key in seen:
                    continue
                seen.add(key)
                graphs.append(
                    QueryGraph(
                        topic_entity=entity_id,
                        chain=chain,
                        shape=shape,
                        provenance=Provenance(mention, score),
                        inferred_domain=inferred,
                    )
                )
    if not graphs:
        raise NoGraphs("no query graph could be generated")
    return graphs


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over Unicode scalars."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ch_a != ch_b),
                )
            )
        previous = current
    return previous[-1]


def string_similarity(a: str, b: str) -> float:
    """1 - editDistance/max length; 1.0 for two empty strings."""
    if not a and not b:
        return 1.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


@dataclass(frozen=True)
class _Candidate:
    tier: int  # 0 exact rule, 1 generalized rule, 2 similarity
    similarity: float
    position: int
    constraint: Constraint
    generalized: tuple[str, str] | None = None


def resolve_cvt_table(
    graph: QueryGraph, kb: KnowledgeBase, max_depth: int = 3
) -> tuple[str, list[tuple[str, str]], CvtTable, CvtSchema]:
    """Locate the CVT table for a graph's topic, generalizing when needed."""
    leaf = kb.properties[graph.leaf_property_id]
    resolved, hops = generalize(graph.topic_entity, graph.leaf_property_id, kb, max_depth)
    value = kb.reified_values[(resolved, graph.leaf_property_id)]
    table = value.value
    if not isinstance(table, CvtTable):
        raise NoReifyingAncestor(
            f"{resolved}/{graph.leaf_property_id} does not hold a CVT table"
        )
    return resolved, hops, table, kb.cvt_schemas[leaf.range.cvt_schema]


def bind_constraints(
    graph: QueryGraph,
    question: str,
    mentions: Sequence[Mention],
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> QueryGraph:
    """Attach at most one equality constraint per CVT condition column.

    The rule pass binds recognized mentions whose target is a cell value of
    the column (or, for entity columns, generalizes to one over member_of);
    the similarity pass scans question substrings against distinct cell
    values at the configured edit-similarity threshold. Rule bindings
    outrank similarity bindings; within a pass the highest similarity wins.
    Binding is idempotent and zero bound constraints is a valid outcome.
    """
    if not isinstance(graph.shape, CvtShape):
        raise ValueError("bind_constraints requires a CVT-shaped graph")
    _, _, table, schema = resolve_cvt_table(graph, kb, config.max_generalization_depth)
    topic_span = graph.provenance.topic_mention.span

    constraints: list[Constraint] = []
    inferred_range = graph.inferred_range
    for column in schema.condition_columns:
        cells = table.column_values(column.column_name)
        cell_set = set(cells)
        candidates: list[_Candidate] = []
        for mention in mentions:
            if mention.span == topic_span:
                continue
            candidates.extend(
                _rule_candidates(mention, column, cell_set, kb, config)
            )
        candidates.extend(
            _similarity_candidates(question, topic_span, column, cells, kb, config)
        )
        if not candidates:
            continue
        best = min(
            candidates,
            key=lambda c: (c.tier, -c.similarity, c.position, str(c.constraint.value)),
        )
        constraints.append(best.constraint)
        if best.generalized is not None and inferred_range is None:
            inferred_range = best.generalized

    return dataclasses.replace(
        graph,
        shape=CvtShape(graph.shape.answer_column, tuple(constraints)),
        inferred_range=inferred_range,
    )


def _rule_candidates(mention, column, cell_set, kb, config):
    out: list[_Candidate] = []
    position = mention.span[0]
    if column.value_domain is ValueDomain.ENTITY_REF:
        for entity_id in mention.entity_ids + mention.constraint_targets:
            if entity_id not in kb.entities:
                continue
            if entity_id in cell_set:
                out.append(
                    _Candidate(0, 1.0, position, Constraint(column.column_name, entity_id, mention))
                )
                break
            try:
                resolved, _hops = generalize_to_cells(
                    entity_id, cell_set, kb, config.max_generalization_depth
                )
            except (NoReifyingAncestor, AmbiguousAncestor):
                continue
            out.append(
                _Candidate(
                    1,
                    1.0,
                    position,
                    Constraint(column.column_name, entity_id, mention),
                    generalized=(entity_id, resolved),
                )
            )
            break
    else:
        for literal in mention.constraint_targets:
            typed = _typed_literal(literal, column)
            if typed is not None and typed in cell_set:
                out.append(
                    _Candidate(0, 1.0, position, Constraint(column.column_name, typed, mention))
                )
                break
    return out


def _typed_literal(literal: str, column) -> Cell | None:
    if column.value_domain is ValueDomain.TEXT:
        return literal
    if column.value_domain is ValueDomain.INTEGER:
        try:
            return int(literal)
        except ValueError:
            return None
    if column.value_domain is ValueDomain.BOOLEAN:
        if literal in ("true", "false"):
            return literal == "true"
        return None
    return literal


def _similarity_candidates(question, topic_span, column, cells, kb, config):
    """Substring scan against distinct cell display values."""
    out: list[_Candidate] = []
    threshold = config.similarity_threshold
    n = len(question)
    for cell in cells:
        display = kb.cell_display(column, cell)
        if not display:
            continue
        # |len(a)-len(b)| <= editDistance, so length differences beyond the
        # threshold budget cannot reach it.
        max_len = len(display) / threshold if threshold > 0 else n
        best: tuple[float, int, str] | None = None
        for start in range(n):
            for end in range(start + 1, n + 1):
                length = end - start
                if length > max_len:
                    break
                if start < topic_span[1] and end > topic_span[0]:
                    continue  # overlaps the topic mention
                if length < len(display) * threshold:
                    continue
                sim = string_similarity(question[start:end], display)
                if sim >= threshold and (best is None or sim > best[0]):
                    best = (sim, start, question[start:end])
        if best is not None:
            sim, start, surface = best
            mention = Mention(
                surface=surface,
                span=(start, start + len(surface)),
                targets=((MentionKind.CONSTRAINT_LITERAL, str(cell)),),
            )
            out.append(
                _Candidate(2, sim, start, Constraint(column.column_name, cell, mention))
            )
    return out
