"""Seeded random KB + planted-question generator for oracle suites.

All mention surfaces (entity names, aliases, text condition literals) are
distinct fixed-length strings over one CJK character pool, and question
filler comes from a disjoint pool, so the expected mention set of a planted
question is exactly the planted names: equal-length distinct surfaces can
never contain one another, and filler between mentions prevents windows
spanning two of them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from kgqa import load_kb

NAME_CHARS = "猫狗虎兔龙蛇马羊猴鸡豚鼠牛梅兰竹菊松柏桃李杏梨枫桂荷莲"
FILLER_CHARS = "abcdwxyz019的吗呢了"
NAME_LEN = 3


class NamePool:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used: set[str] = set()

    def fresh(self) -> str:
        while True:
            name = "".join(self.rng.choice(NAME_CHARS) for _ in range(NAME_LEN))
            if name not in self.used:
                self.used.add(name)
                return name


@dataclass
class GeneratedKb:
    kb: object
    docs: dict
    entity_names: dict[str, str]  # entity id -> name
    rep_by_class: dict[str, str]  # class id -> representative entity id


def gen_kb(
    rng: random.Random,
    max_classes: int = 3,
    max_members: int = 3,
    max_leaves: int = 8,
    max_rows: int = 12,
) -> GeneratedKb:
    pool = NamePool(rng)
    n_classes = rng.randint(1, max_classes)
    classes = []
    properties = []
    entities = []
    values = []
    schemas = []
    entity_names: dict[str, str] = {}
    rep_by_class: dict[str, str] = {}

    class_ids = [f"class_{i}" for i in range(n_classes)]
    rep_ids = {cid: f"rep_{i}" for i, cid in enumerate(class_ids)}
    class_names = {cid: pool.fresh() for cid in class_ids}

    leaf_budget = rng.randint(1, max_leaves)
    leaf_counter = 0
    for ci, cid in enumerate(class_ids):
        roots: list[str] = []
        n_props = max(1, leaf_budget // n_classes)
        for pi in range(n_props):
            leaf_counter += 1
            pid = f"p_{ci}_{pi}"
            kind = rng.choice(["simple", "simple", "kv", "cvt", "tree"])
            if kind == "tree":
                # internal root with two simple leaves
                roots.append(pid)
                properties.append(_prop(pid, pool.fresh(), cid, None, None))
                for li in range(2):
                    leaf_id = f"{pid}_leaf{li}"
                    properties.append(
                        _prop(
                            leaf_id,
                            pool.fresh(),
                            cid,
                            pid,
                            {"kind": "simple", "builtin": "text"},
                        )
                    )
            elif kind == "cvt":
                schema_id = f"schema_{pid}"
                n_conditions = rng.randint(1, 2)
                columns = [
                    {
                        "column_name": f"cond{k}",
                        "role": "condition",
                        "value_domain": rng.choice(["text", "entity_ref"]),
                    }
                    for k in range(n_conditions)
                ]
                columns.append(
                    {"column_name": "answer", "role": "answer", "value_domain": "text"}
                )
                schemas.append({"id": schema_id, "columns": columns})
                roots.append(pid)
                properties.append(
                    _prop(
                        pid,
                        pool.fresh(),
                        cid,
                        None,
                        {"kind": "cvt", "schema": schema_id},
                        infer=True,
                    )
                )
            elif kind == "kv":
                roots.append(pid)
                properties.append(_prop(pid, pool.fresh(), cid, None, {"kind": "key_value"}))
            else:
                roots.append(pid)
                properties.append(
                    _prop(pid, pool.fresh(), cid, None, {"kind": "simple", "builtin": "text"})
                )
        classes.append({"id": cid, "name": class_names[cid], "root_property_ids": roots})

        rep_id = rep_ids[cid]
        entities.append(_entity(rep_id, class_names[cid], cid, [], True))
        entity_names[rep_id] = class_names[cid]
        rep_by_class[cid] = rep_id
        for mi in range(rng.randint(1, max_members)):
            member_id = f"e_{ci}_{mi}"
            name = pool.fresh()
            entities.append(_entity(member_id, name, cid, [rep_id], False))
            entity_names[member_id] = name

    # Reify: representatives carry CVT tables (class-level knowledge),
    # members carry simple/kv values with some probability.
    all_rep_ids = list(rep_by_class.values())
    for prop in properties:
        if prop["range"] is None:
            continue
        cid = prop["domain_class"]
        rep_id = rep_by_class[cid]
        if prop["range"]["kind"] == "cvt":
            schema = next(s for s in schemas if s["id"] == prop["range"]["schema"])
            rows = []
            for _ in range(rng.randint(1, max_rows)):
                row = {}
                for col in schema["columns"]:
                    if col["role"] == "answer":
                        row["answer"] = pool.fresh()
                    elif col["value_domain"] == "entity_ref":
                        row[col["column_name"]] = rng.choice(all_rep_ids)
                    else:
                        row[col["column_name"]] = pool.fresh()
                rows.append(row)
            values.append(
                {
                    "entity_id": rep_id,
                    "leaf_property_id": prop["id"],
                    "value": {"kind": "cvt", "schema_id": prop["range"]["schema"], "rows": rows},
                }
            )
        else:
            owners = [e for e in entities if e["instance_of"] == cid and not e["is_class_representative"]]
            for owner in owners:
                if rng.random() < 0.7:
                    if prop["range"]["kind"] == "key_value":
                        payload = {
                            "kind": "key_value",
                            "entries": [
                                {"key": pool.fresh(), "body": pool.fresh()}
                                for _ in range(rng.randint(1, 3))
                            ],
                        }
                    else:
                        payload = {"kind": "simple", "value": pool.fresh()}
                    values.append(
                        {
                            "entity_id": owner["id"],
                            "leaf_property_id": prop["id"],
                            "value": payload,
                        }
                    )

    docs = {
        "classes.json": classes,
        "properties.json": properties,
        "entities.json": entities,
        "values.json": values,
        "cvt_schemas.json": schemas,
        "meta.json": {"qa_count": rng.randint(0, 500)},
    }
    return GeneratedKb(
        kb=load_kb(docs), docs=docs, entity_names=entity_names, rep_by_class=rep_by_class
    )


def _prop(pid, name, cid, parent, rng_doc, infer=False):
    return {
        "id": pid,
        "name": name,
        "domain_class": cid,
        "parent": parent,
        "range": rng_doc,
        "infer_domain": infer,
        "infer_range": infer,
        "trigger_utterances": [],
    }


def _entity(eid, name, cid, member_of, rep):
    return {
        "id": eid,
        "name": name,
        "aliases": [],
        "instance_of": cid,
        "member_of": member_of,
        "is_class_representative": rep,
    }


def filler(rng: random.Random, low: int = 1, high: int = 3) -> str:
    return "".join(rng.choice(FILLER_CHARS) for _ in range(rng.randint(low, high)))


def plant_question(
    rng: random.Random, surfaces: list[str]
) -> tuple[str, list[tuple[int, int, str]]]:
    """Concatenate surfaces with filler; returns (question, expected spans)."""
    parts = [filler(rng)]
    expected = []
    for surface in surfaces:
        start = sum(len(p) for p in parts)
        expected.append((start, start + len(surface), surface))
        parts.append(surface)
        parts.append(filler(rng))
    return "".join(parts), expected
