"""End-to-end question answering and vague-question guidance.

The pipeline is recognize -> mask -> classify -> generate -> bind -> rank
-> execute. Questions that do not yield a query graph (no entity, no
recognized property, or incompatible ones) fall through to top-3
recommendations built from the knowledge structure and the session
context. Every recommendation payload, asked back verbatim, answers.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import (
    AmbiguousAncestor,
    InternalError,
    NoGraphs,
    NoReifyingAncestor,
)
from .execution import Answer, execute, templates_for
from .graphs import QueryGraph, bind_constraints, generate
from .model import CvtTable, Entity, PropertyChain
from .ranking import RankWeights, RankedGraph, rank
from .reasoning import generalize
from .store import KnowledgeBase, SnapshotHolder
from .understanding import (
    Mention,
    PropertyScore,
    candidate_chains,
    classify,
    mask,
    recognize,
)


class Status(str, Enum):
    ANSWERED = "answered"
    RECOMMENDED = "recommended"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class AskRequest:
    question: str
    session_id: str | None = None
    top_k_override: int | None = None
    debug: bool = False


@dataclass(frozen=True)
class Recommendation:
    display: str
    payload: str

    def to_dict(self) -> dict:
        return {"display": self.display, "payload": self.payload}


@dataclass(frozen=True)
class AskResponse:
    status: Status
    answer: Answer | None = None
    recommendations: tuple[Recommendation, ...] = ()
    debug: dict | None = None

    def to_dict(self, kb: KnowledgeBase) -> dict:
        return {
            "status": self.status.value,
            "answer": self.answer.to_dict(kb) if self.answer else None,
            "recommendations": [r.to_dict() for r in self.recommendations],
            "debug": self.debug,
        }


@dataclass
class SessionContext:
    session_id: str
    last_entities: list[str] = field(default_factory=list)  # most recent first
    last_class: str | None = None
    expires_at: float = 0.0


class SessionStore:
    """Concurrent map of session contexts with per-entry expiry."""

    MAX_ENTITIES = 5

    def __init__(self, ttl_seconds: float = DEFAULT_CONFIG.session_ttl_seconds, clock=time.time):
        self._ttl = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._contexts: dict[str, SessionContext] = {}

    def get(self, session_id: str | None) -> SessionContext | None:
        if not session_id:
            return None
        with self._lock:
            ctx = self._contexts.get(session_id)
            if ctx is None:
                return None
            if ctx.expires_at <= self._clock():
                del self._contexts[session_id]
                return None
            return ctx

    def touch(
        self, session_id: str, entity_ids: list[str], last_class: str | None
    ) -> None:
        now = self._clock()
        with self._lock:
            ctx = self._contexts.get(session_id)
            if ctx is None or ctx.expires_at <= now:
                ctx = SessionContext(session_id)
                self._contexts[session_id] = ctx
            merged = list(entity_ids)
            for known in ctx.last_entities:
                if known not in merged:
                    merged.append(known)
            ctx.last_entities = merged[: self.MAX_ENTITIES]
            if last_class is not None:
                ctx.last_class = last_class
            ctx.expires_at = now + self._ttl


def _entity_chains(entity: Entity, kb: KnowledgeBase) -> list[PropertyChain]:
    """Leaf chains reachable from an entity: its class plus one member_of hop."""
    chains = list(kb.leaf_chains(entity.instance_of))
    for parent_id in entity.member_of:
        parent = kb.entities.get(parent_id)
        if parent is None:
            continue
        for chain in kb.leaf_chains(parent.instance_of):
            if chain not in chains:
                chains.append(chain)
    return chains


def _answerable(entity_id: str, chain: PropertyChain, kb: KnowledgeBase, config: EngineConfig) -> bool:
    """Would the templated question about (entity, chain) execute to a value?"""
    leaf_id = chain[-1]
    try:
        resolved, _ = generalize(entity_id, leaf_id, kb, config.max_generalization_depth)
    except (NoReifyingAncestor, AmbiguousAncestor):
        return False
    value = kb.reified_values[(resolved, leaf_id)].value
    if isinstance(value, CvtTable) and not value.rows:
        return False
    return True


def recommendation_payload(entity: Entity, leaf_name: str, locale: str) -> str:
    template = templates_for(locale)["recommended_question"]
    return template.format(entity=entity.name, property=leaf_name)


def recommend(
    question: str,
    mentions: list[Mention],
    scores: list[PropertyScore],
    session: SessionContext | None,
    kb: KnowledgeBase,
    config: EngineConfig = DEFAULT_CONFIG,
    k: int = 3,
) -> list[Recommendation]:
    """Up to k templated questions the engine can definitely answer.

    Entity-only questions get the entity's leaf chains; property-only
    questions get entities of the property's domain class (session entities
    first); otherwise entities from the session then authoring order.
    """
    del question
    k = max(1, min(k, 3))
    entity_mentions = [m for m in mentions if m.is_entity]
    items: list[Recommendation] = []
    seen: set[str] = set()

    def add(entity: Entity, chain: PropertyChain) -> None:
        if len(items) >= k or not _answerable(entity.id, chain, kb, config):
            return
        leaf = kb.properties[chain[-1]]
        payload = recommendation_payload(entity, leaf.name, config.locale)
        if payload in seen:
            return
        seen.add(payload)
        items.append(Recommendation(display=payload, payload=payload))

    if entity_mentions:
        for mention in entity_mentions:
            for entity_id in mention.entity_ids:
                entity = kb.entities.get(entity_id)
                if entity is None:
                    continue
                for chain in _entity_chains(entity, kb):
                    add(entity, chain)
    elif scores:
        chain = scores[0].property_chain
        domain_class = kb.properties[chain[0]].domain_class
        ordered: list[str] = []
        if session is not None:
            ordered.extend(
                e
                for e in session.last_entities
                if (ent := kb.entities.get(e)) is not None and ent.instance_of == domain_class
            )
        ordered.extend(
            e for e in kb.entities if kb.entities[e].instance_of == domain_class and e not in ordered
        )
        for entity_id in ordered:
            add(kb.entities[entity_id], chain)
    else:
        ordered = list(session.last_entities) if session is not None else []
        ordered.extend(e for e in kb.entities if e not in ordered)
        for entity_id in ordered:
            entity = kb.entities.get(entity_id)
            if entity is None:
                continue
            for chain in _entity_chains(entity, kb):
                if len(items) >= k:
                    break
                add(entity, chain)

    return items[:k]


def answer(
    req: AskRequest,
    kb: KnowledgeBase,
    weights: RankWeights | None = None,
    sessions: SessionStore | None = None,
    config: EngineConfig = DEFAULT_CONFIG,
) -> AskResponse:
    """Run the full pipeline for one request.

    Raises ValueError for a question that is empty after trimming and
    InternalError (tagged with the failing stage) for unexpected failures.
    """
    question = req.question.strip()
    if not question:
        raise ValueError("question must be non-empty after trimming")
    weights = weights or RankWeights()
    session = sessions.get(req.session_id) if sessions is not None else None

    stage = "recognition"
    answered: Answer | None = None
    ranked: list[RankedGraph] = []
    mentions: list[Mention] = []
    strong: list[PropertyScore] = []
    try:
        mentions = recognize(question, kb)
        masked = mask(question, mentions)
        entity_mentions = [m for m in mentions if m.is_entity]

        stage = "classification"
        if entity_mentions:
            chains = candidate_chains(mentions, kb)
        else:
            chains = kb.all_leaf_chains()
        scores = classify(masked, chains, kb, config) if chains else []
        strong = [s for s in scores if s.score >= config.min_property_score]

        if entity_mentions and strong:
            stage = "generation"
            try:
                graphs: list[QueryGraph] | None = generate(question, mentions, strong, kb)
            except NoGraphs:
                graphs = None
            if graphs is not None:
                stage = "binding"
                bound = []
                for graph in graphs:
                    if graph.is_cvt:
                        try:
                            graph = bind_constraints(graph, question, mentions, kb, config)
                        except (NoReifyingAncestor, AmbiguousAncestor):
                            pass  # no table in reach; the graph stays unconstrained
                    bound.append(graph)
                stage = "ranking"
                ranked = rank(question, bound, weights, kb, config)
                stage = "execution"
                answered = execute(ranked[0].graph, kb, config.locale, config)
    except Exception as exc:
        raise InternalError(stage, exc) from exc

    recognized_entities: list[str] = []
    for mention in mentions:
        for entity_id in mention.entity_ids:
            if entity_id not in recognized_entities:
                recognized_entities.append(entity_id)
    if sessions is not None and req.session_id:
        if answered is not None and ranked:
            last_class = kb.entities[ranked[0].graph.topic_entity].instance_of
        elif recognized_entities:
            last_class = kb.entities[recognized_entities[0]].instance_of
        else:
            last_class = None
        sessions.touch(req.session_id, recognized_entities[:5], last_class)

    debug = None
    if req.debug:
        debug = {
            "kb_version": kb.version,
            "mentions": [m.to_dict() for m in mentions],
            "graphs": [
                {**r.graph.to_dict(), "score": r.score, "features": r.features.to_dict()}
                for r in ranked
            ],
        }

    if answered is not None:
        return AskResponse(Status.ANSWERED, answer=answered, debug=debug)

    k = req.top_k_override if req.top_k_override else config.top_k_recommend
    recommendations = recommend(question, mentions, strong, session, kb, config, k=k)
    if recommendations:
        return AskResponse(
            Status.RECOMMENDED, recommendations=tuple(recommendations), debug=debug
        )
    return AskResponse(Status.NO_MATCH, debug=debug)


class DialogService:
    """Binds a snapshot holder, weights, config, and a session store."""

    def __init__(
        self,
        holder: SnapshotHolder,
        weights: RankWeights | None = None,
        config: EngineConfig = DEFAULT_CONFIG,
    ):
        self.holder = holder
        self.weights = weights or RankWeights()
        self.config = config
        self.sessions = SessionStore(config.session_ttl_seconds)

    def snapshot(self) -> KnowledgeBase:
        kb = self.holder.current
        if kb is None:
            raise RuntimeError("knowledge base not loaded yet")
        return kb

    def ask(self, req: AskRequest) -> tuple[AskResponse, KnowledgeBase]:
        kb = self.snapshot()
        return answer(req, kb, self.weights, self.sessions, self.config), kb

    def ask_dict(self, req: AskRequest) -> dict[str, Any]:
        response, kb = self.ask(req)
        return response.to_dict(kb)

    @staticmethod
    def new_session_id() -> str:
        return uuid.uuid4().hex
