"""Question understanding: mention recognition, masking, classification.

Entities are found by greedy leftmost-longest matching over the mention
trie; no disambiguation is attempted, ambiguous surfaces keep all their
targets. Entity mentions are masked before the masked question is scored
against each candidate property chain by a pluggable classifier. The
shipped classifier is purely lexical so results are deterministic and the
engine has no model dependencies.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .config import MASK_TOKEN, DEFAULT_CONFIG, EngineConfig
from .errors import NoCandidates, SpanMismatch
from .model import PropertyChain, chain_key
from .store import KnowledgeBase
from .trie import MentionKind, fold


@dataclass(frozen=True)
class Mention:
    """One recognized surface span; targets keep their insertion order."""

    surface: str
    span: tuple[int, int]  # [start, end) in Unicode scalar offsets
    targets: tuple[tuple[MentionKind, str], ...]

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(t for k, t in self.targets if k is MentionKind.ENTITY)

    @property
    def constraint_targets(self) -> tuple[str, ...]:
        return tuple(t for k, t in self.targets if k is MentionKind.CONSTRAINT_LITERAL)

    @property
    def is_entity(self) -> bool:
        return bool(self.entity_ids)

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "span": list(self.span),
            "targets": [{"kind": k.value, "target": t} for k, t in self.targets],
        }


@dataclass(frozen=True)
class MaskedQuestion:
    text: str
    mention_order: tuple[int, ...]  # indexes of masked mentions, in text order


@dataclass(frozen=True)
class PropertyScore:
    property_chain: PropertyChain
    score: float

    @property
    def key(self) -> str:
        return chain_key(self.property_chain)


def recognize(question: str, kb: KnowledgeBase) -> list[Mention]:
    """Greedy leftmost-longest non-overlapping mention scan."""
    folded = fold(question)
    mentions: list[Mention] = []
    i = 0
    n = len(folded)
    while i < n:
        hit = kb.mention_index.longest_match(folded, i)
        if hit is None:
            i += 1
            continue
        end, targets = hit
        mentions.append(
            Mention(surface=question[i:end], span=(i, end), targets=tuple(targets))
        )
        i = end
    return mentions


def mask(question: str, mentions: Sequence[Mention]) -> MaskedQuestion:
    """Replace entity mentions with the mask token; literals stay in place."""
    parts: list[str] = []
    order: list[int] = []
    cursor = 0
    for idx, mention in enumerate(mentions):
        start, end = mention.span
        if question[start:end] != mention.surface:
            raise SpanMismatch(f"mention {mention.surface!r} does not match span {mention.span}")
        if not mention.is_entity:
            continue
        parts.append(question[cursor:start])
        parts.append(MASK_TOKEN)
        order.append(idx)
        cursor = end
    parts.append(question[cursor:])
    return MaskedQuestion(text="".join(parts), mention_order=tuple(order))


def unmask(masked: MaskedQuestion, mentions: Sequence[Mention]) -> str:
    """Inverse of mask, used to check byte-exact round-trips."""
    text = masked.text
    for idx in masked.mention_order:
        text = text.replace(MASK_TOKEN, mentions[idx].surface, 1)
    return text


def candidate_chains(mentions: Sequence[Mention], kb: KnowledgeBase) -> list[PropertyChain]:
    """Leaf chains of the recognized entities' classes, one member_of hop included."""
    seen: set[PropertyChain] = set()
    out: list[PropertyChain] = []
    for mention in mentions:
        for entity_id in mention.entity_ids:
            entity = kb.entities.get(entity_id)
            if entity is None:
                continue
            class_ids = [entity.instance_of]
            for parent_id in entity.member_of:
                parent = kb.entities.get(parent_id)
                if parent is not None and parent.instance_of not in class_ids:
                    class_ids.append(parent.instance_of)
            for class_id in class_ids:
                for chain in kb.leaf_chains(class_id):
                    if chain not in seen:
                        seen.add(chain)
                        out.append(chain)
    return out


# --- lexical classifier ---


def _strip_mask(text: str) -> str:
    return text.replace(MASK_TOKEN, "")


def ngram_profile(text: str) -> Counter:
    """Character bigram+trigram counts over Unicode scalars, mask removed."""
    stripped = _strip_mask(text)
    profile: Counter = Counter()
    for n in (2, 3):
        for i in range(len(stripped) - n + 1):
            profile[stripped[i : i + n]] += 1
    return profile


def cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(count * b[gram] for gram, count in a.items())
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return dot / (norm_a * norm_b)


class Classifier(Protocol):
    def __call__(
        self,
        masked: MaskedQuestion,
        candidates: Sequence[PropertyChain],
        kb: KnowledgeBase,
        config: EngineConfig,
    ) -> list[PropertyScore]: ...


def lexical_classifier(
    masked: MaskedQuestion,
    candidates: Sequence[PropertyChain],
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
) -> list[PropertyScore]:
    """Score chains by n-gram cosine against trigger utterances.

    The leaf's display name acts as an implicit trigger, and a bonus is
    added when any property name on the chain occurs verbatim in the masked
    question. Scores are clamped to [0, 1].
    """
    question_profile = ngram_profile(masked.text)
    question_fold = fold(masked.text)
    scores: list[PropertyScore] = []
    for chain in candidates:
        leaf = kb.properties[chain[-1]]
        best = 0.0
        for utterance in (*leaf.trigger_utterances, leaf.name):
            best = max(best, cosine(question_profile, ngram_profile(utterance)))
        if any(fold(kb.properties[pid].name) in question_fold for pid in chain):
            best += config.keyword_bonus
        scores.append(PropertyScore(chain, min(best, 1.0)))
    scores.sort(key=lambda s: (-s.score, s.key))
    return scores


_CLASSIFIERS: dict[str, Classifier] = {"lexical": lexical_classifier}


def get_classifier(name: str) -> Classifier:
    try:
        return _CLASSIFIERS[name]
    except KeyError:
        raise KeyError(f"unknown classifier {name!r}; built-ins: {sorted(_CLASSIFIERS)}") from None


def register_classifier(name: str, classifier: Classifier) -> None:
    _CLASSIFIERS[name] = classifier


def classify(
    masked: MaskedQuestion,
    candidates: Sequence[PropertyChain],
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
    classifier: Classifier | Callable | None = None,
) -> list[PropertyScore]:
    """Score every candidate chain, sorted by descending score then chain id.

    Raises NoCandidates when the candidate set is empty (vague question).
    """
    if not candidates:
        raise NoCandidates("no candidate property chains")
    scorer = classifier or get_classifier(config.classifier)
    return scorer(masked, candidates, kb, config)
