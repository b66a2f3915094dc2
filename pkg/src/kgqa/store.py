"""Knowledge base loading, validation, indexing, metrics, and reload.

A KB lives in one directory of UTF-8 JSON documents: classes.json,
properties.json, entities.json, values.json, cvt_schemas.json and meta.json
(which carries the legacy qa_count). Loading produces an immutable snapshot;
reload builds a fresh snapshot and publishes it with a single reference swap
so in-flight readers keep a consistent view.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import EmptyInput, ParseError, ValidationError, Violation
from .model import (
    Builtin,
    Cell,
    ClassDef,
    ColumnRole,
    CvtColumn,
    CvtRow,
    CvtSchema,
    CvtTable,
    Entity,
    KeyValueDoc,
    PropertyChain,
    PropertyDef,
    ReifiedValue,
    SimpleValue,
    ValueDomain,
    ValueKind,
    ValueTypeSpec,
    leaves_under,
    property_chain_of,
)
from .trie import MentionKind, MentionTrie

KB_FILES = (
    "classes.json",
    "properties.json",
    "entities.json",
    "values.json",
    "cvt_schemas.json",
    "meta.json",
)


@dataclass(frozen=True)
class KnowledgeBase:
    """Validated, indexed, immutable KB snapshot."""

    classes: dict[str, ClassDef]
    properties: dict[str, PropertyDef]
    entities: dict[str, Entity]
    cvt_schemas: dict[str, CvtSchema]
    reified_values: dict[tuple[str, str], ReifiedValue]
    qa_count: int
    version: int
    mention_index: MentionTrie
    children: dict[str, tuple[str, ...]]
    leaf_chains_by_class: dict[str, tuple[PropertyChain, ...]]

    def chain_of(self, leaf_property_id: str) -> PropertyChain:
        return property_chain_of(leaf_property_id, self.properties)

    def leaf_chains(self, class_id: str) -> tuple[PropertyChain, ...]:
        return self.leaf_chains_by_class.get(class_id, ())

    def all_leaf_chains(self) -> list[PropertyChain]:
        out: list[PropertyChain] = []
        for class_id in self.classes:
            out.extend(self.leaf_chains_by_class.get(class_id, ()))
        return out

    def reified(self, entity_id: str, leaf_property_id: str) -> ReifiedValue | None:
        return self.reified_values.get((entity_id, leaf_property_id))

    def entity_display(self, entity_id: str) -> str:
        ent = self.entities.get(entity_id)
        return ent.name if ent else entity_id

    def cell_display(self, column: CvtColumn, cell: Cell) -> str:
        if column.value_domain is ValueDomain.ENTITY_REF and isinstance(cell, str):
            return self.entity_display(cell)
        if isinstance(cell, bool):
            return "true" if cell else "false"
        return str(cell)

    def to_documents(self) -> dict[str, Any]:
        """Serialize back to the on-disk file format (bit-exact contract)."""
        return {
            "classes.json": [
                {
                    "id": c.id,
                    "name": c.name,
                    "root_property_ids": list(c.root_property_ids),
                }
                for c in self.classes.values()
            ],
            "properties.json": [_property_doc(p) for p in self.properties.values()],
            "entities.json": [
                {
                    "id": e.id,
                    "name": e.name,
                    "aliases": list(e.aliases),
                    "instance_of": e.instance_of,
                    "member_of": list(e.member_of),
                    "is_class_representative": e.is_class_representative,
                }
                for e in self.entities.values()
            ],
            "values.json": [_value_doc(v) for v in self.reified_values.values()],
            "cvt_schemas.json": [
                {"id": s.id, "columns": [_column_doc(c) for c in s.columns]}
                for s in self.cvt_schemas.values()
            ],
            "meta.json": {"qa_count": self.qa_count},
        }

    def content_fingerprint(self) -> str:
        """Stable hash of the snapshot content (version excluded)."""
        payload = json.dumps(
            self.to_documents(), sort_keys=True, ensure_ascii=False
        ).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


# --- parsing ---


def _require(doc: Mapping[str, Any], key: str, location: str) -> Any:
    if key not in doc:
        raise ParseError(location, f"missing field {key!r}")
    return doc[key]


def _parse_str(value: Any, location: str, key: str) -> str:
    if not isinstance(value, str):
        raise ParseError(location, f"field {key!r} must be a string")
    return value


def _parse_range(doc: Any, location: str) -> ValueTypeSpec | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise ParseError(location, "range must be an object or null")
    kind = _require(doc, "kind", location)
    if kind == "simple":
        builtin = _require(doc, "builtin", location)
        try:
            return ValueTypeSpec.simple(Builtin(builtin))
        except ValueError:
            raise ParseError(location, f"unknown builtin {builtin!r}") from None
    if kind == "key_value":
        return ValueTypeSpec.key_value()
    if kind == "cvt":
        return ValueTypeSpec.cvt(_parse_str(_require(doc, "schema", location), location, "schema"))
    raise ParseError(location, f"unknown range kind {kind!r}")


def _parse_payload(doc: Any, location: str):
    if not isinstance(doc, dict):
        raise ParseError(location, "value must be an object")
    kind = _require(doc, "kind", location)
    if kind == "simple":
        value = _require(doc, "value", location)
        if not isinstance(value, (str, int, float, bool)):
            raise ParseError(location, "simple value must be a scalar")
        return SimpleValue(value)
    if kind == "key_value":
        entries = _require(doc, "entries", location)
        if not isinstance(entries, list):
            raise ParseError(location, "entries must be an array")
        parsed = []
        for i, entry in enumerate(entries):
            if not isinstance(entry, dict):
                raise ParseError(f"{location}.entries[{i}]", "entry must be an object")
            parsed.append(
                (
                    _parse_str(_require(entry, "key", location), location, "key"),
                    _parse_str(_require(entry, "body", location), location, "body"),
                )
            )
        return KeyValueDoc(tuple(parsed))
    if kind == "cvt":
        schema_id = _parse_str(_require(doc, "schema_id", location), location, "schema_id")
        rows_doc = _require(doc, "rows", location)
        if not isinstance(rows_doc, list):
            raise ParseError(location, "rows must be an array")
        rows = []
        for i, row in enumerate(rows_doc):
            if not isinstance(row, dict):
                raise ParseError(f"{location}.rows[{i}]", "row must be an object")
            for cell in row.values():
                if not isinstance(cell, (str, int, bool)):
                    raise ParseError(f"{location}.rows[{i}]", "cells must be scalars")
            rows.append(CvtRow(dict(row)))
        return CvtTable(schema_id, tuple(rows))
    raise ParseError(location, f"unknown value kind {kind!r}")


def _property_doc(p: PropertyDef) -> dict[str, Any]:
    range_doc: Any = None
    if p.range is not None:
        if p.range.kind is ValueKind.SIMPLE:
            range_doc = {"kind": "simple", "builtin": p.range.builtin.value}
        elif p.range.kind is ValueKind.KEY_VALUE:
            range_doc = {"kind": "key_value"}
        else:
            range_doc = {"kind": "cvt", "schema": p.range.cvt_schema}
    return {
        "id": p.id,
        "name": p.name,
        "domain_class": p.domain_class,
        "parent": p.parent,
        "range": range_doc,
        "infer_domain": p.infer_domain,
        "infer_range": p.infer_range,
        "trigger_utterances": list(p.trigger_utterances),
    }


def _value_doc(v: ReifiedValue) -> dict[str, Any]:
    payload = v.value
    if isinstance(payload, SimpleValue):
        value_doc: dict[str, Any] = {"kind": "simple", "value": payload.value}
    elif isinstance(payload, KeyValueDoc):
        value_doc = {
            "kind": "key_value",
            "entries": [{"key": k, "body": b} for k, b in payload.entries],
        }
    else:
        value_doc = {
            "kind": "cvt",
            "schema_id": payload.schema_id,
            "rows": [dict(r.cells) for r in payload.rows],
        }
    doc = {
        "entity_id": v.entity_id,
        "leaf_property_id": v.leaf_property_id,
        "value": value_doc,
    }
    if v.tips is not None:
        doc["tips"] = v.tips
    return doc


def _column_doc(c: CvtColumn) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "column_name": c.column_name,
        "role": c.role.value,
        "value_domain": c.value_domain.value,
    }
    if c.default is not None:
        doc["default"] = c.default
    return doc


def read_documents(kb_dir: str | Path) -> dict[str, Any]:
    """Read the KB file set from a directory; absent files read as empty."""
    kb_dir = Path(kb_dir)
    docs: dict[str, Any] = {}
    for name in KB_FILES:
        path = kb_dir / name
        if not path.exists():
            docs[name] = {} if name == "meta.json" else []
            continue
        try:
            docs[name] = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(str(path), str(exc)) from exc
    return docs


def save_kb(kb: KnowledgeBase, kb_dir: str | Path) -> None:
    """Write the snapshot back out in the on-disk file format."""
    kb_dir = Path(kb_dir)
    kb_dir.mkdir(parents=True, exist_ok=True)
    for name, doc in kb.to_documents().items():
        (kb_dir / name).write_text(
            json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )


# --- validation ---


def _check_payload_shape(
    value: ReifiedValue,
    spec: ValueTypeSpec,
    schemas: Mapping[str, CvtSchema],
    entities: Mapping[str, Entity],
    out: list[Violation],
) -> None:
    loc = f"values[{value.entity_id}/{value.leaf_property_id}]"
    payload = value.value
    if spec.kind is ValueKind.SIMPLE:
        if not isinstance(payload, SimpleValue):
            out.append(Violation("shape_mismatch", loc, "expected a simple value"))
            return
        expected = spec.builtin
        v = payload.value
        ok = (
            (expected is Builtin.TEXT and isinstance(v, str))
            or (expected is Builtin.BOOLEAN and isinstance(v, bool))
            or (expected is Builtin.INTEGER and isinstance(v, int) and not isinstance(v, bool))
            or (expected is Builtin.DECIMAL and isinstance(v, (int, float)) and not isinstance(v, bool))
        )
        if not ok:
            out.append(
                Violation("shape_mismatch", loc, f"value does not fit builtin {expected.value}")
            )
    elif spec.kind is ValueKind.KEY_VALUE:
        if not isinstance(payload, KeyValueDoc):
            out.append(Violation("shape_mismatch", loc, "expected a key-value document"))
            return
        keys = [k for k, _ in payload.entries]
        if len(keys) != len(set(keys)):
            out.append(Violation("duplicate_key", loc, "key-value keys must be unique"))
    else:
        if not isinstance(payload, CvtTable):
            out.append(Violation("shape_mismatch", loc, "expected a CVT table"))
            return
        if payload.schema_id != spec.cvt_schema:
            out.append(
                Violation(
                    "shape_mismatch",
                    loc,
                    f"table schema {payload.schema_id!r} != range schema {spec.cvt_schema!r}",
                )
            )
        schema = schemas.get(payload.schema_id)
        if schema is None:
            out.append(Violation("dangling_reference", loc, f"unknown schema {payload.schema_id!r}"))
            return
        names = [c.column_name for c in schema.columns]
        for i, row in enumerate(payload.rows):
            row_loc = f"{loc}.rows[{i}]"
            for name in names:
                if name not in row.cells:
                    out.append(Violation("missing_cell", row_loc, f"column {name!r} absent"))
            for name in row.cells:
                if name not in names:
                    out.append(Violation("unknown_column", row_loc, f"column {name!r} not in schema"))
            for col in schema.columns:
                if col.column_name not in row.cells:
                    continue
                _check_cell(row.cells[col.column_name], col, entities, row_loc, out)


def _check_cell(
    cell: Cell,
    col: CvtColumn,
    entities: Mapping[str, Entity],
    location: str,
    out: list[Violation],
) -> None:
    domain = col.value_domain
    if domain is ValueDomain.TEXT and not isinstance(cell, str):
        out.append(Violation("shape_mismatch", location, f"{col.column_name}: expected text"))
    elif domain is ValueDomain.BOOLEAN and not isinstance(cell, bool):
        out.append(Violation("shape_mismatch", location, f"{col.column_name}: expected boolean"))
    elif domain is ValueDomain.INTEGER and (isinstance(cell, bool) or not isinstance(cell, int)):
        out.append(Violation("shape_mismatch", location, f"{col.column_name}: expected integer"))
    elif domain is ValueDomain.ENTITY_REF:
        if not isinstance(cell, str):
            out.append(Violation("shape_mismatch", location, f"{col.column_name}: expected entity id"))
        elif cell not in entities:
            out.append(
                Violation("dangling_reference", location, f"{col.column_name}: unknown entity {cell!r}")
            )


def validate(
    classes: dict[str, ClassDef],
    properties: dict[str, PropertyDef],
    entities: dict[str, Entity],
    cvt_schemas: dict[str, CvtSchema],
    reified_values: dict[tuple[str, str], ReifiedValue],
) -> list[Violation]:
    """All structural violations in a parsed KB, empty when valid."""
    out: list[Violation] = []

    for schema in cvt_schemas.values():
        loc = f"cvt_schemas[{schema.id}]"
        names = [c.column_name for c in schema.columns]
        if len(names) != len(set(names)):
            out.append(Violation("duplicate_id", loc, "column names must be unique"))
        answers = [c for c in schema.columns if c.role is ColumnRole.ANSWER]
        if len(answers) != 1:
            out.append(
                Violation(
                    "multiple_answer_columns" if len(answers) > 1 else "missing_answer_column",
                    loc,
                    f"{len(answers)} answer columns",
                )
            )
        for col in schema.columns:
            if col.default is None:
                continue
            if col.role is not ColumnRole.CONDITION:
                out.append(Violation("shape_mismatch", loc, "default on a non-condition column"))
            else:
                _check_cell(col.default, col, entities, f"{loc}.default", out)

    # Property forest: parents exist, no cycles, one domain class per tree,
    # exactly the leaves carry a range.
    children: dict[str, list[str]] = {pid: [] for pid in properties}
    for prop in properties.values():
        loc = f"properties[{prop.id}]"
        if prop.domain_class not in classes:
            out.append(Violation("dangling_reference", loc, f"unknown class {prop.domain_class!r}"))
        if prop.parent is not None:
            parent = properties.get(prop.parent)
            if parent is None:
                out.append(Violation("dangling_reference", loc, f"unknown parent {prop.parent!r}"))
            else:
                children[prop.parent].append(prop.id)
                if parent.domain_class != prop.domain_class:
                    out.append(
                        Violation(
                            "domain_mismatch",
                            loc,
                            "sub-property domain class differs from its parent's",
                        )
                    )
    for prop in properties.values():
        seen = {prop.id}
        node = prop
        while node.parent is not None:
            if node.parent in seen or node.parent not in properties:
                if node.parent in seen:
                    out.append(
                        Violation("cycle", f"properties[{prop.id}]", f"parent cycle at {node.parent!r}")
                    )
                break
            seen.add(node.parent)
            node = properties[node.parent]
    cyclic = {v.location.split("[")[1].rstrip("]") for v in out if v.kind == "cycle"}
    for prop in properties.values():
        if prop.id in cyclic:
            continue
        loc = f"properties[{prop.id}]"
        is_leaf = not children.get(prop.id)
        if is_leaf and prop.range is None:
            out.append(Violation("missing_range", loc, "leaf property has no value type"))
        if not is_leaf and prop.range is not None:
            out.append(Violation("unexpected_range", loc, "internal property carries a value type"))
        if prop.range is not None and prop.range.kind is ValueKind.CVT:
            if prop.range.cvt_schema not in cvt_schemas:
                out.append(
                    Violation("dangling_reference", loc, f"unknown schema {prop.range.cvt_schema!r}")
                )

    for cls in classes.values():
        loc = f"classes[{cls.id}]"
        for pid in cls.root_property_ids:
            prop = properties.get(pid)
            if prop is None:
                out.append(Violation("dangling_reference", loc, f"unknown root property {pid!r}"))
            elif prop.parent is not None:
                out.append(Violation("not_a_root", loc, f"property {pid!r} has a parent"))
            elif prop.domain_class != cls.id:
                out.append(Violation("domain_mismatch", loc, f"root {pid!r} belongs to another class"))

    for ent in entities.values():
        loc = f"entities[{ent.id}]"
        if ent.instance_of not in classes:
            out.append(Violation("dangling_reference", loc, f"unknown class {ent.instance_of!r}"))
        for target_id in ent.member_of:
            target = entities.get(target_id)
            if target is None:
                out.append(Violation("dangling_reference", loc, f"unknown member_of {target_id!r}"))
            elif not target.is_class_representative:
                out.append(
                    Violation(
                        "member_target_not_representative",
                        loc,
                        f"member_of target {target_id!r} is not a class representative",
                    )
                )
        if ent.is_class_representative:
            cls = classes.get(ent.instance_of)
            if cls is not None and cls.name != ent.name:
                out.append(
                    Violation(
                        "representative_name_mismatch",
                        loc,
                        "class-representative name must equal its class's name",
                    )
                )

    for (entity_id, leaf_id), value in reified_values.items():
        loc = f"values[{entity_id}/{leaf_id}]"
        ent = entities.get(entity_id)
        prop = properties.get(leaf_id)
        if ent is None:
            out.append(Violation("dangling_reference", loc, f"unknown entity {entity_id!r}"))
        if prop is None:
            out.append(Violation("dangling_reference", loc, f"unknown property {leaf_id!r}"))
        if ent is None or prop is None:
            continue
        if children.get(leaf_id):
            out.append(Violation("not_a_leaf", loc, "reified property is not a leaf"))
            continue
        owns = ent.instance_of == prop.domain_class
        represents = ent.is_class_representative and ent.instance_of == prop.domain_class
        if not (owns or represents):
            out.append(
                Violation("wrong_owner", loc, "entity's class does not own the property's tree")
            )
        if prop.range is not None:
            _check_payload_shape(value, prop.range, cvt_schemas, entities, out)

    return out


# --- loading ---


def _load_sections(docs: Mapping[str, Any]):
    def as_list(name: str) -> list:
        doc = docs.get(name, [])
        if not isinstance(doc, list):
            raise ParseError(name, "expected a JSON array")
        return doc

    violations: list[Violation] = []

    classes: dict[str, ClassDef] = {}
    for i, doc in enumerate(as_list("classes.json")):
        loc = f"classes.json[{i}]"
        cls = ClassDef(
            id=_parse_str(_require(doc, "id", loc), loc, "id"),
            name=_parse_str(_require(doc, "name", loc), loc, "name"),
            root_property_ids=tuple(doc.get("root_property_ids", [])),
        )
        if cls.id in classes:
            violations.append(Violation("duplicate_id", loc, f"class {cls.id!r} already defined"))
        classes[cls.id] = cls

    properties: dict[str, PropertyDef] = {}
    for i, doc in enumerate(as_list("properties.json")):
        loc = f"properties.json[{i}]"
        prop = PropertyDef(
            id=_parse_str(_require(doc, "id", loc), loc, "id"),
            name=_parse_str(_require(doc, "name", loc), loc, "name"),
            domain_class=_parse_str(_require(doc, "domain_class", loc), loc, "domain_class"),
            parent=doc.get("parent"),
            range=_parse_range(doc.get("range"), loc),
            infer_domain=bool(doc.get("infer_domain", False)),
            infer_range=bool(doc.get("infer_range", False)),
            trigger_utterances=tuple(doc.get("trigger_utterances", [])),
        )
        if prop.id in properties:
            violations.append(Violation("duplicate_id", loc, f"property {prop.id!r} already defined"))
        properties[prop.id] = prop

    entities: dict[str, Entity] = {}
    for i, doc in enumerate(as_list("entities.json")):
        loc = f"entities.json[{i}]"
        ent = Entity(
            id=_parse_str(_require(doc, "id", loc), loc, "id"),
            name=_parse_str(_require(doc, "name", loc), loc, "name"),
            instance_of=_parse_str(_require(doc, "instance_of", loc), loc, "instance_of"),
            aliases=tuple(doc.get("aliases", [])),
            member_of=tuple(doc.get("member_of", [])),
            is_class_representative=bool(doc.get("is_class_representative", False)),
        )
        if ent.id in entities:
            violations.append(Violation("duplicate_id", loc, f"entity {ent.id!r} already defined"))
        entities[ent.id] = ent

    cvt_schemas: dict[str, CvtSchema] = {}
    for i, doc in enumerate(as_list("cvt_schemas.json")):
        loc = f"cvt_schemas.json[{i}]"
        columns = []
        for j, col_doc in enumerate(doc.get("columns", [])):
            col_loc = f"{loc}.columns[{j}]"
            try:
                role = ColumnRole(_require(col_doc, "role", col_loc))
                domain = ValueDomain(_require(col_doc, "value_domain", col_loc))
            except ValueError as exc:
                raise ParseError(col_loc, str(exc)) from None
            columns.append(
                CvtColumn(
                    column_name=_parse_str(
                        _require(col_doc, "column_name", col_loc), col_loc, "column_name"
                    ),
                    role=role,
                    value_domain=domain,
                    default=col_doc.get("default"),
                )
            )
        schema = CvtSchema(id=_parse_str(_require(doc, "id", loc), loc, "id"), columns=tuple(columns))
        if schema.id in cvt_schemas:
            violations.append(Violation("duplicate_id", loc, f"schema {schema.id!r} already defined"))
        cvt_schemas[schema.id] = schema

    reified_values: dict[tuple[str, str], ReifiedValue] = {}
    for i, doc in enumerate(as_list("values.json")):
        loc = f"values.json[{i}]"
        value = ReifiedValue(
            entity_id=_parse_str(_require(doc, "entity_id", loc), loc, "entity_id"),
            leaf_property_id=_parse_str(
                _require(doc, "leaf_property_id", loc), loc, "leaf_property_id"
            ),
            value=_parse_payload(_require(doc, "value", loc), loc),
            tips=doc.get("tips"),
        )
        key = (value.entity_id, value.leaf_property_id)
        if key in reified_values:
            violations.append(
                Violation("duplicate_reified", loc, f"second value for {key}")
            )
        reified_values[key] = value

    meta = docs.get("meta.json", {})
    if not isinstance(meta, dict):
        raise ParseError("meta.json", "expected a JSON object")
    qa_count = meta.get("qa_count", 0)
    if not isinstance(qa_count, int) or isinstance(qa_count, bool) or qa_count < 0:
        raise ParseError("meta.json", "qa_count must be a non-negative integer")

    return classes, properties, entities, cvt_schemas, reified_values, qa_count, violations


def _build_index(
    entities: Mapping[str, Entity],
    cvt_schemas: Mapping[str, CvtSchema],
    reified_values: Mapping[tuple[str, str], ReifiedValue],
) -> MentionTrie:
    trie = MentionTrie()
    for ent in entities.values():
        trie.insert(ent.name, MentionKind.ENTITY, ent.id)
        for alias in ent.aliases:
            trie.insert(alias, MentionKind.ENTITY, ent.id)
    for value in reified_values.values():
        table = value.value
        if not isinstance(table, CvtTable):
            continue
        schema = cvt_schemas.get(table.schema_id)
        if schema is None:
            continue
        for col in schema.condition_columns:
            for row in table.rows:
                cell = row.cells.get(col.column_name)
                if cell is None:
                    continue
                if col.value_domain is ValueDomain.ENTITY_REF:
                    target = entities.get(str(cell))
                    if target is not None:
                        trie.insert(target.name, MentionKind.CONSTRAINT_LITERAL, target.id)
                        for alias in target.aliases:
                            trie.insert(alias, MentionKind.CONSTRAINT_LITERAL, target.id)
                elif isinstance(cell, bool):
                    trie.insert("true" if cell else "false", MentionKind.CONSTRAINT_LITERAL, str(cell).lower())
                else:
                    trie.insert(str(cell), MentionKind.CONSTRAINT_LITERAL, str(cell))
    return trie


def build_mention_index(kb: KnowledgeBase) -> MentionTrie:
    """Trie over entity names, aliases, and CVT condition-column literals."""
    return _build_index(kb.entities, kb.cvt_schemas, kb.reified_values)


def load_kb(source: str | Path | Mapping[str, Any], *, version: int = 1) -> KnowledgeBase:
    """Load, validate, and index a KB from a directory or a document mapping.

    Raises ParseError on malformed documents and ValidationError listing
    every structural violation found.
    """
    docs = read_documents(source) if isinstance(source, (str, Path)) else source
    classes, properties, entities, cvt_schemas, reified_values, qa_count, violations = (
        _load_sections(docs)
    )
    violations.extend(validate(classes, properties, entities, cvt_schemas, reified_values))
    if violations:
        raise ValidationError(violations)

    children = {pid: tuple(kids) for pid, kids in _children_of(properties).items()}
    leaf_chains: dict[str, tuple[PropertyChain, ...]] = {}
    for cls in classes.values():
        chains: list[PropertyChain] = []
        for root_id in cls.root_property_ids:
            for leaf_id in leaves_under(root_id, properties):
                chains.append(property_chain_of(leaf_id, properties))
        leaf_chains[cls.id] = tuple(chains)

    return KnowledgeBase(
        classes=classes,
        properties=properties,
        entities=entities,
        cvt_schemas=cvt_schemas,
        reified_values=reified_values,
        qa_count=qa_count,
        version=version,
        mention_index=_build_index(entities, cvt_schemas, reified_values),
        children=children,
        leaf_chains_by_class=leaf_chains,
    )


def _children_of(properties: Mapping[str, PropertyDef]) -> dict[str, list[str]]:
    children: dict[str, list[str]] = {pid: [] for pid in properties}
    for prop in properties.values():
        if prop.parent is not None and prop.parent in children:
            children[prop.parent].append(prop.id)
    return children


def collect_violations(source: str | Path | Mapping[str, Any]) -> list[Violation]:
    """Parse a KB and return every violation instead of raising."""
    docs = read_documents(source) if isinstance(source, (str, Path)) else source
    classes, properties, entities, cvt_schemas, reified_values, _, violations = (
        _load_sections(docs)
    )
    violations.extend(validate(classes, properties, entities, cvt_schemas, reified_values))
    return violations


class SnapshotHolder:
    """Publishes KB snapshots; readers always see one complete version."""

    def __init__(self, kb_dir: str | Path):
        self._kb_dir = Path(kb_dir)
        self._load_lock = threading.Lock()
        self._kb: KnowledgeBase | None = None

    @property
    def kb_dir(self) -> Path:
        return self._kb_dir

    @property
    def current(self) -> KnowledgeBase | None:
        return self._kb

    def load(self) -> KnowledgeBase:
        with self._load_lock:
            version = self._kb.version + 1 if self._kb is not None else 1
            kb = load_kb(self._kb_dir, version=version)
            self._kb = kb  # single reference swap publishes the snapshot
            return kb


# --- metrics ---


def round_half_up(ratio: Fraction, places: int = 2) -> Decimal:
    """Exact half-up rounding of a non-negative rational."""
    scaled = ratio * Fraction(10**places)
    quotient = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    return Decimal(quotient).scaleb(-places)


@dataclass(frozen=True)
class KbStats:
    """Knowledge-management metrics over a snapshot.

    Ratios are exact rationals; None means the denominator was zero and the
    ratio is undefined (not zero). Rounded presentation is half-up to two
    places, with cvt_ratio shown as a percentage.
    """

    qa_count: int
    entity_count: int
    property_count: int
    cvt_property_count: int
    compr1: Fraction | None
    compr2: Fraction | None
    cvt_ratio: Fraction | None

    @property
    def compr1_rounded(self) -> Decimal | None:
        return None if self.compr1 is None else round_half_up(self.compr1)

    @property
    def compr2_rounded(self) -> Decimal | None:
        return None if self.compr2 is None else round_half_up(self.compr2)

    @property
    def cvt_ratio_percent(self) -> Decimal | None:
        return None if self.cvt_ratio is None else round_half_up(self.cvt_ratio * 100)

    def to_dict(self) -> dict[str, Any]:
        def frac(r: Fraction | None) -> list[int] | None:
            return None if r is None else [r.numerator, r.denominator]

        return {
            "qa_count": self.qa_count,
            "entity_count": self.entity_count,
            "property_count": self.property_count,
            "cvt_property_count": self.cvt_property_count,
            "compr1": None if self.compr1 is None else str(self.compr1_rounded),
            "compr2": None if self.compr2 is None else str(self.compr2_rounded),
            "cvt_ratio": None if self.cvt_ratio is None else f"{self.cvt_ratio_percent}%",
            "exact": {
                "compr1": frac(self.compr1),
                "compr2": frac(self.compr2),
                "cvt_ratio": frac(self.cvt_ratio),
            },
        }


def compute_stats(kb: KnowledgeBase, qa_count: int | None = None) -> KbStats:
    """Compression ratios and CVT share for a snapshot.

    qa_count is the legacy QA-pair count being replaced; it defaults to the
    value recorded in the KB's meta document.
    """
    if qa_count is None:
        qa_count = kb.qa_count
    if qa_count < 0:
        raise ValueError("qa_count must be >= 0")
    leaf_ids = [pid for pid, kids in kb.children.items() if not kids]
    property_count = len(leaf_ids)
    cvt_property_count = sum(
        1
        for pid in leaf_ids
        if kb.properties[pid].range is not None
        and kb.properties[pid].range.kind is ValueKind.CVT
    )
    entity_count = len(kb.entities)
    compr1 = Fraction(qa_count, property_count) if property_count else None
    compr2 = (
        Fraction(qa_count, entity_count + property_count)
        if entity_count + property_count
        else None
    )
    cvt_ratio = Fraction(cvt_property_count, property_count) if property_count else None
    return KbStats(
        qa_count=qa_count,
        entity_count=entity_count,
        property_count=property_count,
        cvt_property_count=cvt_property_count,
        compr1=compr1,
        compr2=compr2,
        cvt_ratio=cvt_ratio,
    )


@dataclass(frozen=True)
class SessionRecord:
    """Outcome flags of one served session."""

    session_id: str
    disliked: bool = False
    no_answer: bool = False
    requested_staff: bool = False

    @property
    def unsolved(self) -> bool:
        return self.disliked or self.no_answer or self.requested_staff


def resolution_rate(sessions: Iterable[SessionRecord]) -> Fraction:
    """1 - unsolved/total over the given sessions."""
    sessions = list(sessions)
    if not sessions:
        raise EmptyInput("resolution_rate needs at least one session")
    unsolved = sum(1 for s in sessions if s.unsolved)
    return 1 - Fraction(unsolved, len(sessions))


def regulation_compression(
    kinds_per_class: list[int], regulation_pairs: int | None = None
) -> tuple[int, int]:
    """QA-pair count vs structured-item count for a class-level regulation.

    Enumerating the regulation as QA pairs needs (sum of kinds)^2 entries;
    structured, it is one property, one regulation cell per ordered class
    pair, and one instance/member tuple per kind. regulation_pairs defaults
    to the full classes-squared grid.
    """
    if not kinds_per_class:
        raise ValueError("kinds_per_class must be non-empty")
    if any(k < 0 for k in kinds_per_class):
        raise ValueError("kind counts must be >= 0")
    total_kinds = sum(kinds_per_class)
    if regulation_pairs is None:
        regulation_pairs = len(kinds_per_class) ** 2
    qa_pair_count = total_kinds**2
    structured_item_count = 1 + regulation_pairs + total_kinds
    return qa_pair_count, structured_item_count
