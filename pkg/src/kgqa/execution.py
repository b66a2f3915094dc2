"""Executing a query graph against the KB snapshot.

Resolves the topic entity (generalizing over member_of when it does not
carry the value itself), aligns entity-valued constraints with the CVT
condition columns the same way, applies declared column defaults, filters
the table, and assembles an answer with human-readable explanation steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Union

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import DanglingGraph, NoReifyingAncestor, UnknownLocale
from .graphs import CvtShape, QueryGraph
from .model import (
    Cell,
    CvtSchema,
    CvtTable,
    KeyValueDoc,
    SimpleValue,
    ValueDomain,
)
from .reasoning import generalize, generalize_to_cells
from .store import KnowledgeBase


class StepKind(str, Enum):
    GENERALIZATION = "generalization"
    TABLE_LOOKUP = "table_lookup"
    DIRECT_VALUE = "direct_value"


@dataclass(frozen=True)
class ExplanationStep:
    step_kind: StepKind
    text: str
    bindings: dict[str, str]

    def to_dict(self) -> dict:
        return {"step_kind": self.step_kind.value, "text": self.text, "bindings": self.bindings}


@dataclass(frozen=True)
class SimpleText:
    text: str
    kind = "simple_text"

    def to_dict(self, kb: KnowledgeBase) -> dict:
        return {"kind": self.kind, "text": self.text}


@dataclass(frozen=True)
class KeyValueTabs:
    entries: tuple[tuple[str, str], ...]
    kind = "key_value_tabs"

    def to_dict(self, kb: KnowledgeBase) -> dict:
        return {
            "kind": self.kind,
            "tabs": [{"key": k, "body": b} for k, b in self.entries],
        }


@dataclass(frozen=True)
class TableAnswer:
    schema_id: str
    columns: tuple[str, ...]
    rows: tuple[dict[str, Cell], ...]  # surviving rows, raw cell values
    answer_column: str
    highlighted_cell: tuple[int, str] | None  # (row index, answer column)
    missing_conditions: tuple[str, ...]
    kind = "table"

    def to_dict(self, kb: KnowledgeBase) -> dict:
        schema = kb.cvt_schemas[self.schema_id]
        display_rows = [
            {name: kb.cell_display(schema.column(name), row[name]) for name in self.columns}
            for row in self.rows
        ]
        return {
            "kind": self.kind,
            "schema_id": self.schema_id,
            "columns": list(self.columns),
            "rows": display_rows,
            "answer_column": self.answer_column,
            "highlighted_cell": (
                {"row": self.highlighted_cell[0], "column": self.highlighted_cell[1]}
                if self.highlighted_cell
                else None
            ),
            "missing_conditions": list(self.missing_conditions),
        }


@dataclass(frozen=True)
class NoAnswerBody:
    reason: str
    kind = "no_answer"

    def to_dict(self, kb: KnowledgeBase) -> dict:
        return {"kind": self.kind, "reason": self.reason}


AnswerBody = Union[SimpleText, KeyValueTabs, TableAnswer, NoAnswerBody]


@dataclass(frozen=True)
class Answer:
    body: AnswerBody
    explanation: tuple[ExplanationStep, ...] = ()
    tips: str | None = None

    @property
    def kind(self) -> str:
        return self.body.kind

    def to_dict(self, kb: KnowledgeBase) -> dict:
        doc = self.body.to_dict(kb)
        doc["explanation"] = [step.to_dict() for step in self.explanation]
        doc["tips"] = self.tips
        return doc


# --- explanation templates ---


def _load_templates(locale: str) -> dict[str, str]:
    try:
        raw = resources.files("kgqa.templates").joinpath(f"{locale}.json").read_text("utf-8")
    except FileNotFoundError:
        raise UnknownLocale(locale) from None
    return json.loads(raw)


_TEMPLATE_CACHE: dict[str, dict[str, str]] = {}


def templates_for(locale: str) -> dict[str, str]:
    if locale not in _TEMPLATE_CACHE:
        _TEMPLATE_CACHE[locale] = _load_templates(locale)
    return _TEMPLATE_CACHE[locale]


def _step(kind: StepKind, bindings: dict[str, str], locale: str) -> ExplanationStep:
    template = templates_for(locale)[kind.value]
    return ExplanationStep(kind, template.format(**bindings), dict(bindings))


def render_explanation(steps: list[ExplanationStep] | tuple[ExplanationStep, ...], locale: str) -> str:
    """One sentence per step from the locale's templates, joined in order."""
    tmpl = templates_for(locale)
    return " ".join(tmpl[s.step_kind.value].format(**s.bindings) for s in steps)


# --- execution ---


def execute(
    graph: QueryGraph,
    kb: KnowledgeBase,
    locale: str = DEFAULT_CONFIG.locale,
    config: EngineConfig = DEFAULT_CONFIG,
) -> Answer:
    """Run one validated graph read-only against the snapshot."""
    if graph.topic_entity not in kb.entities:
        raise DanglingGraph(f"unknown topic entity {graph.topic_entity!r}")
    leaf = kb.properties.get(graph.leaf_property_id)
    if leaf is None or leaf.range is None:
        raise DanglingGraph(f"unknown leaf property {graph.leaf_property_id!r}")
    templates_for(locale)  # fail fast on unknown locale

    if isinstance(graph.shape, CvtShape):
        return _execute_cvt(graph, kb, locale, config)
    return _execute_basic(graph, kb, locale, config)


def _resolve_topic(graph, kb, steps, locale, config):
    try:
        resolved, hops = generalize(
            graph.topic_entity, graph.leaf_property_id, kb, config.max_generalization_depth
        )
    except NoReifyingAncestor:
        return None
    for source, target in hops:
        steps.append(
            _step(
                StepKind.GENERALIZATION,
                {"source": kb.entity_display(source), "target": kb.entity_display(target)},
                locale,
            )
        )
    return resolved


def _execute_basic(graph, kb, locale, config):
    steps: list[ExplanationStep] = []
    leaf = kb.properties[graph.leaf_property_id]
    resolved = _resolve_topic(graph, kb, steps, locale, config)
    if resolved is None:
        return Answer(
            NoAnswerBody(f"no value for {kb.entity_display(graph.topic_entity)}/{leaf.name}"),
            tuple(steps),
        )
    reified = kb.reified_values[(resolved, graph.leaf_property_id)]
    payload = reified.value
    if isinstance(payload, CvtTable):
        raise DanglingGraph("basic graph over a CVT-valued property")
    if isinstance(payload, SimpleValue):
        value_text = str(payload.value)
        steps.append(
            _step(
                StepKind.DIRECT_VALUE,
                {"entity": kb.entity_display(resolved), "property": leaf.name, "value": value_text},
                locale,
            )
        )
        return Answer(SimpleText(value_text), tuple(steps), tips=reified.tips)
    assert isinstance(payload, KeyValueDoc)
    steps.append(
        _step(
            StepKind.DIRECT_VALUE,
            {
                "entity": kb.entity_display(resolved),
                "property": leaf.name,
                "value": "/".join(k for k, _ in payload.entries),
            },
            locale,
        )
    )
    return Answer(KeyValueTabs(payload.entries), tuple(steps), tips=reified.tips)


def _execute_cvt(graph, kb, locale, config):
    steps: list[ExplanationStep] = []
    leaf = kb.properties[graph.leaf_property_id]
    schema: CvtSchema = kb.cvt_schemas[leaf.range.cvt_schema]
    for constraint in graph.constraints:
        if constraint.column not in {c.column_name for c in schema.condition_columns}:
            raise DanglingGraph(f"constraint column {constraint.column!r} not in schema")

    resolved = _resolve_topic(graph, kb, steps, locale, config)
    if resolved is None:
        return Answer(
            NoAnswerBody(f"no table for {kb.entity_display(graph.topic_entity)}/{leaf.name}"),
            tuple(steps),
        )
    reified = kb.reified_values[(resolved, graph.leaf_property_id)]
    table = reified.value
    if not isinstance(table, CvtTable):
        raise DanglingGraph("CVT graph over a non-table value")

    # Effective constraints: bound ones (entity values aligned with the
    # column over member_of when absent from it), then declared defaults
    # for columns left unbound.
    effective: list[tuple[str, Cell]] = []
    failed: str | None = None
    bound_columns = set()
    for constraint in graph.constraints:
        bound_columns.add(constraint.column)
        column = schema.column(constraint.column)
        value = constraint.value
        if (
            column.value_domain is ValueDomain.ENTITY_REF
            and isinstance(value, str)
            and value not in table.column_values(constraint.column)
        ):
            try:
                generalized, hops = generalize_to_cells(
                    value,
                    set(table.column_values(constraint.column)),
                    kb,
                    config.max_generalization_depth,
                )
            except NoReifyingAncestor:
                failed = constraint.column
                effective.append((constraint.column, value))
                continue
            for source, target in hops:
                steps.append(
                    _step(
                        StepKind.GENERALIZATION,
                        {"source": kb.entity_display(source), "target": kb.entity_display(target)},
                        locale,
                    )
                )
            value = generalized
        effective.append((constraint.column, value))
    for column in schema.condition_columns:
        if column.default is not None and column.column_name not in bound_columns:
            effective.append((column.column_name, column.default))

    table_label = leaf.name
    for column_name, value in effective:
        steps.append(
            _step(
                StepKind.TABLE_LOOKUP,
                {
                    "table": table_label,
                    "column": column_name,
                    "value": kb.cell_display(schema.column(column_name), value),
                },
                locale,
            )
        )

    surviving = [
        dict(row.cells)
        for row in table.rows
        if all(row.cells.get(col) == value for col, value in effective)
    ]
    if not surviving:
        reason_col = failed or (effective[0][0] if effective else schema.answer_column)
        return Answer(
            NoAnswerBody(f"no row matches the {reason_col!r} filter"),
            tuple(steps),
            tips=reified.tips,
        )

    columns = tuple(c.column_name for c in schema.columns)
    effective_columns = {col for col, _ in effective}
    missing = tuple(
        c.column_name
        for c in schema.condition_columns
        if c.column_name not in effective_columns
    )
    body = TableAnswer(
        schema_id=schema.id,
        columns=columns,
        rows=tuple(surviving),
        answer_column=schema.answer_column,
        highlighted_cell=(0, schema.answer_column) if len(surviving) == 1 else None,
        missing_conditions=missing if len(surviving) > 1 else (),
    )
    return Answer(body, tuple(steps), tips=reified.tips)
