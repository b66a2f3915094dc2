"""Core ontology: classes, hierarchical properties, value types, entities.

Properties form forests. Each tree belongs to one class; inner nodes group
sub-properties, leaves carry a value type and are the answerable units. A
root-to-leaf path is a property chain, the unit a question is mapped to.
Values may be simple literals, key-value documents, or compound value type
(CVT) tables with exactly one answer column.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union

from .errors import NotALeaf, UnknownProperty

# Ordered property ids from root to leaf.
PropertyChain = tuple[str, ...]


def chain_key(chain: PropertyChain) -> str:
    """Canonical string id of a chain, used for deterministic tie-breaking."""
    return "/".join(chain)


class Builtin(str, Enum):
    TEXT = "text"
    INTEGER = "integer"
    DECIMAL = "decimal"
    BOOLEAN = "boolean"


class ValueKind(str, Enum):
    SIMPLE = "simple"
    KEY_VALUE = "key_value"
    CVT = "cvt"


class ColumnRole(str, Enum):
    ANSWER = "answer"
    CONDITION = "condition"


class ValueDomain(str, Enum):
    """Cell types allowed in CVT columns."""

    TEXT = "text"
    INTEGER = "integer"
    BOOLEAN = "boolean"
    ENTITY_REF = "entity_ref"


@dataclass(frozen=True)
class ValueTypeSpec:
    """Range of a leaf property: a builtin, a key-value doc, or a CVT."""

    kind: ValueKind
    builtin: Builtin | None = None
    cvt_schema: str | None = None

    @classmethod
    def simple(cls, builtin: Builtin) -> "ValueTypeSpec":
        return cls(ValueKind.SIMPLE, builtin=builtin)

    @classmethod
    def key_value(cls) -> "ValueTypeSpec":
        return cls(ValueKind.KEY_VALUE)

    @classmethod
    def cvt(cls, schema_id: str) -> "ValueTypeSpec":
        return cls(ValueKind.CVT, cvt_schema=schema_id)


@dataclass(frozen=True)
class ClassDef:
    id: str
    name: str
    root_property_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class PropertyDef:
    id: str
    name: str
    domain_class: str
    parent: str | None = None
    range: ValueTypeSpec | None = None  # leaves only
    infer_domain: bool = False
    infer_range: bool = False
    trigger_utterances: tuple[str, ...] = ()


@dataclass(frozen=True)
class CvtColumn:
    column_name: str
    role: ColumnRole
    value_domain: ValueDomain
    default: Union[str, int, bool, None] = None  # condition columns only


@dataclass(frozen=True)
class CvtSchema:
    id: str
    columns: tuple[CvtColumn, ...]

    @property
    def answer_column(self) -> str:
        for col in self.columns:
            if col.role is ColumnRole.ANSWER:
                return col.column_name
        raise ValueError(f"schema {self.id} has no answer column")

    @property
    def condition_columns(self) -> tuple[CvtColumn, ...]:
        return tuple(c for c in self.columns if c.role is ColumnRole.CONDITION)

    def column(self, name: str) -> CvtColumn:
        for col in self.columns:
            if col.column_name == name:
                return col
        raise KeyError(name)


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    instance_of: str
    aliases: tuple[str, ...] = ()
    member_of: tuple[str, ...] = ()
    is_class_representative: bool = False


Cell = Union[str, int, bool]


@dataclass(frozen=True)
class CvtRow:
    cells: Mapping[str, Cell]

    def __getitem__(self, column_name: str) -> Cell:
        return self.cells[column_name]


@dataclass(frozen=True)
class SimpleValue:
    value: Union[str, int, float, bool]


@dataclass(frozen=True)
class KeyValueDoc:
    """Segmented long-text answer; entry order is the authored tab order."""

    entries: tuple[tuple[str, str], ...]  # (key, body)


@dataclass(frozen=True)
class CvtTable:
    schema_id: str
    rows: tuple[CvtRow, ...]

    def column_values(self, column_name: str) -> list[Cell]:
        """Distinct cell values of one column, in row order."""
        seen: list[Cell] = []
        for row in self.rows:
            v = row.cells[column_name]
            if v not in seen:
                seen.append(v)
        return seen


ReifiedPayload = Union[SimpleValue, KeyValueDoc, CvtTable]


@dataclass(frozen=True)
class ReifiedValue:
    entity_id: str
    leaf_property_id: str
    value: ReifiedPayload
    tips: str | None = None


def _children_map(properties: Mapping[str, PropertyDef]) -> dict[str, list[str]]:
    children: dict[str, list[str]] = {pid: [] for pid in properties}
    for prop in properties.values():
        if prop.parent is not None and prop.parent in children:
            children[prop.parent].append(prop.id)
    return children


def property_chain_of(
    leaf_property_id: str, properties: Mapping[str, PropertyDef]
) -> PropertyChain:
    """Unique root-to-leaf path of property ids ending at the given leaf.

    Raises UnknownProperty for an id not in the model and NotALeaf when the
    property has children.
    """
    if leaf_property_id not in properties:
        raise UnknownProperty(leaf_property_id)
    children = _children_map(properties)
    if children[leaf_property_id]:
        raise NotALeaf(leaf_property_id)
    chain: list[str] = []
    current: str | None = leaf_property_id
    seen: set[str] = set()
    while current is not None:
        if current in seen:
            raise UnknownProperty(f"parent cycle at {current}")
        seen.add(current)
        chain.append(current)
        current = properties[current].parent
    chain.reverse()
    return tuple(chain)


def leaves_under(
    property_id: str, properties: Mapping[str, PropertyDef]
) -> list[str]:
    """All leaf descendants in pre-order; a leaf returns itself."""
    if property_id not in properties:
        raise UnknownProperty(property_id)
    children = _children_map(properties)
    leaves: list[str] = []
    stack = [property_id]
    while stack:
        pid = stack.pop()
        kids = children[pid]
        if not kids:
            leaves.append(pid)
        else:
            stack.extend(reversed(kids))
    return leaves
