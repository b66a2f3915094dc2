"""Tunable engine parameters with their shipped defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

# Placeholder substituted for entity mentions before classification.
MASK_TOKEN = "<E>"

# Characters ignored when computing token coverage: particles, punctuation
# and whitespace that carry no constraint information.
DEFAULT_STOP_CHARS = frozenset(
    "的地得了吗呢吧啊呀哦嘛么"
    "，。？！、；：,.?!;: \t\n\r"
    "\"'“”‘’()（）《》[]【】"
)


@dataclass(frozen=True)
class EngineConfig:
    """Knobs for the QA pipeline.

    similarity_threshold: minimum normalized edit similarity for a question
        substring to bind to a CVT condition value (tolerates roughly one
        edit in a five-character mention).
    min_property_score: classifier score below which a chain does not count
        as recognized; questions with no chain above it take the
        recommendation path.
    keyword_bonus: added to a chain's score when one of its property names
        occurs verbatim in the masked question; deliberately above
        min_property_score so an explicitly named property is always
        recognized.
    """

    similarity_threshold: float = 0.8
    max_generalization_depth: int = 3
    min_property_score: float = 0.25
    keyword_bonus: float = 0.3
    classifier: str = "lexical"
    locale: str = "zh"
    top_k_recommend: int = 3
    session_ttl_seconds: float = 30 * 60.0
    stop_chars: frozenset[str] = field(default_factory=lambda: DEFAULT_STOP_CHARS)


DEFAULT_CONFIG = EngineConfig()
