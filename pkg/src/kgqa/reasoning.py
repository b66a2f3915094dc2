"""Type generalization over member_of edges.

A specific entity (Coupon) that does not carry a value for a class-level
property is generalized to the class-representative entity (In-store
Discount) that does, by a breadth-first walk over member_of links.
"""

from __future__ import annotations

from typing import Container

from .errors import AmbiguousAncestor, NoReifyingAncestor
from .store import KnowledgeBase

# One hop: (from entity id, to entity id).
Hop = tuple[str, str]


def _bfs(
    entity_id: str,
    kb: KnowledgeBase,
    accepts,
    max_depth: int,
    what: str,
) -> tuple[str, list[Hop]]:
    if accepts(entity_id):
        return entity_id, []
    paths: dict[str, list[Hop]] = {entity_id: []}
    frontier = [entity_id]
    for _ in range(max_depth):
        next_frontier: list[str] = []
        found: list[str] = []
        for current in frontier:
            entity = kb.entities.get(current)
            if entity is None:
                continue
            for parent_id in entity.member_of:
                if parent_id in paths:
                    continue
                paths[parent_id] = paths[current] + [(current, parent_id)]
                next_frontier.append(parent_id)
                if accepts(parent_id):
                    found.append(parent_id)
        if len(found) > 1:
            raise AmbiguousAncestor(
                f"{entity_id}: {sorted(found)} both satisfy {what} at the same depth"
            )
        if found:
            return found[0], paths[found[0]]
        frontier = next_frontier
        if not frontier:
            break
    raise NoReifyingAncestor(f"{entity_id}: nothing within {max_depth} member_of hops {what}")


def generalize(
    entity_id: str,
    leaf_property_id: str,
    kb: KnowledgeBase,
    max_depth: int = 3,
) -> tuple[str, list[Hop]]:
    """Nearest entity over member_of edges that reifies the leaf property.

    Returns the resolved entity id and the hop path (empty when the entity
    reifies the property itself). Raises NoReifyingAncestor when nothing
    within max_depth reifies it, AmbiguousAncestor when two entities at the
    same depth do.
    """

    def reifies(candidate: str) -> bool:
        return (candidate, leaf_property_id) in kb.reified_values

    return _bfs(entity_id, kb, reifies, max_depth, f"reifies {leaf_property_id!r}")


def generalize_to_cells(
    entity_id: str,
    cells: Container[str],
    kb: KnowledgeBase,
    max_depth: int = 3,
) -> tuple[str, list[Hop]]:
    """Like generalize, but terminates at an entity present in a cell set.

    Used to align an entity-valued constraint with a CVT condition column
    whose cells hold the class-representative entities.
    """
    return _bfs(entity_id, kb, lambda c: c in cells, max_depth, "appears in the column")
