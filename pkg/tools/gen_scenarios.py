#!/usr/bin/env python3
"""Generate the synthetic scenario fixtures used by the stats CLI examples.

Only the counts matter for the compression metrics: number of entities,
leaf properties, CVT-ranged leaf properties, plus the legacy qa_count in
meta.json. Content is placeholder text.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

SCENARIOS = {
    # name: (qa_count, entities, properties, cvt_properties)
    "scenario1": (232, 35, 78, 9),
    "scenario2": (776, 111, 73, 27),
    "scenario3": (870, 367, 72, 45),
}


def build(qa_count: int, entities: int, properties: int, cvt_properties: int) -> dict:
    prop_ids = [f"prop_{i:03d}" for i in range(1, properties + 1)]
    props = []
    for i, pid in enumerate(prop_ids):
        if i < cvt_properties:
            rng = {"kind": "cvt", "schema": "generic_cvt"}
        else:
            rng = {"kind": "simple", "builtin": "text"}
        props.append(
            {
                "id": pid,
                "name": f"属性{i + 1:03d}",
                "domain_class": "scenario_class",
                "parent": None,
                "range": rng,
                "infer_domain": False,
                "infer_range": False,
                "trigger_utterances": [],
            }
        )
    ents = [
        {
            "id": f"entity_{i:03d}",
            "name": f"实体{i:03d}",
            "aliases": [],
            "instance_of": "scenario_class",
            "member_of": [],
            "is_class_representative": False,
        }
        for i in range(1, entities + 1)
    ]
    return {
        "classes.json": [
            {"id": "scenario_class", "name": "业务场景", "root_property_ids": prop_ids}
        ],
        "properties.json": props,
        "entities.json": ents,
        "values.json": [],
        "cvt_schemas.json": [
            {
                "id": "generic_cvt",
                "columns": [
                    {"column_name": "condition", "role": "condition", "value_domain": "text"},
                    {"column_name": "answer", "role": "answer", "value_domain": "text"},
                ],
            }
        ],
        "meta.json": {"qa_count": qa_count},
    }


def main(out_root: str) -> None:
    root = Path(out_root)
    for name, params in SCENARIOS.items():
        target = root / name
        target.mkdir(parents=True, exist_ok=True)
        for filename, doc in build(*params).items():
            (target / filename).write_text(
                json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
            )
        print(f"wrote {target}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
