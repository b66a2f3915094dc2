"""Character trie for longest-match mention lookup.

Matching is over Unicode scalar values. Keys and queries are folded with a
length-preserving lowercase so cased scripts match case-insensitively while
CJK text matches exactly.
"""

from __future__ import annotations

from enum import Enum


class MentionKind(str, Enum):
    ENTITY = "entity"
    CONSTRAINT_LITERAL = "constraint_literal"


def fold_char(ch: str) -> str:
    low = ch.lower()
    # A few code points lowercase to more than one char; keep the original
    # there so spans in the source text stay aligned.
    return low if len(low) == 1 else ch


def fold(text: str) -> str:
    return "".join(fold_char(ch) for ch in text)


class _Node:
    __slots__ = ("children", "targets")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.targets: list[tuple[MentionKind, str]] | None = None


class MentionTrie:
    """Maps mention surfaces to (kind, target id) pairs in insertion order."""

    def __init__(self):
        self._root = _Node()
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def insert(self, surface: str, kind: MentionKind, target: str) -> None:
        if not surface:
            return
        node = self._root
        for ch in fold(surface):
            node = node.children.setdefault(ch, _Node())
        if node.targets is None:
            node.targets = []
            self._size += 1
        if (kind, target) not in node.targets:
            node.targets.append((kind, target))

    def lookup(self, surface: str) -> list[tuple[MentionKind, str]]:
        """Targets for an exact surface, empty when absent."""
        node = self._root
        for ch in fold(surface):
            node = node.children.get(ch)
            if node is None:
                return []
        return list(node.targets or [])

    def longest_match(
        self, folded_text: str, start: int
    ) -> tuple[int, list[tuple[MentionKind, str]]] | None:
        """Longest key matching folded_text at start; returns (end, targets)."""
        node = self._root
        best: tuple[int, list[tuple[MentionKind, str]]] | None = None
        i = start
        n = len(folded_text)
        while i < n:
            node = node.children.get(folded_text[i])
            if node is None:
                break
            i += 1
            if node.targets is not None:
                best = (i, node.targets)
        return best
