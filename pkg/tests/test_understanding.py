import random

import pytest

from kgqa import (
    MaskedQuestion,
    NoCandidates,
    SpanMismatch,
    classify,
    load_kb,
    lexical_classifier,
    mask,
    ngram_profile,
    recognize,
    unmask,
)
from kgqa.understanding import cosine

from kbgen import gen_kb, plant_question


def test_recognize_program_question(kb_programs):
    mentions = recognize("怎么参加淘抢购的双十一", kb_programs)
    assert [m.surface for m in mentions] == ["淘抢购", "双十一"]
    assert all(m.is_entity for m in mentions)
    # spans are non-overlapping and in text order
    spans = [m.span for m in mentions]
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))


def test_recognize_no_mentions(kb_programs):
    assert recognize("今天天气怎么样", kb_programs) == []


def test_recognize_planted_questions_match_ground_truth():
    rng = random.Random(71)
    total = 0
    for _ in range(25):
        generated = gen_kb(rng)
        names = list(generated.entity_names.values())
        for _ in range(20):
            planted = rng.sample(names, k=min(len(names), rng.randint(1, 3)))
            question, expected = plant_question(rng, planted)
            mentions = recognize(question, generated.kb)
            got = [(m.span[0], m.span[1], m.surface) for m in mentions]
            assert got == expected
            total += 1
    assert total == 500


def test_mask_discount_question(kb_discounts):
    question = "优惠券和单品宝能不能一起使用"
    masked = mask(question, recognize(question, kb_discounts))
    assert masked.text == "<E>和<E>能不能一起使用"
    assert len(masked.mention_order) == 2


def test_mask_without_mentions_is_identity(kb_discounts):
    masked = mask("没有提到什么", [])
    assert masked.text == "没有提到什么"
    assert masked.mention_order == ()


def test_mask_counts_equal_mention_order(kb_programs):
    question = "怎么参加淘抢购的双十一"
    masked = mask(question, recognize(question, kb_programs))
    assert masked.text.count("<E>") == len(masked.mention_order)


def test_mask_rejects_span_mismatch(kb_programs):
    mentions = recognize("怎么参加淘抢购的双十一", kb_programs)
    with pytest.raises(SpanMismatch):
        mask("完全不同的问题哦哦哦哦", mentions)


def test_mask_round_trips_byte_exactly():
    rng = random.Random(73)
    for _ in range(20):
        generated = gen_kb(rng)
        names = list(generated.entity_names.values())
        for _ in range(10):
            planted = rng.sample(names, k=min(len(names), 2))
            question, _ = plant_question(rng, planted)
            mentions = recognize(question, generated.kb)
            masked = mask(question, mentions)
            restored = unmask(masked, mentions)
            assert restored == question
            assert restored.encode("utf-8") == question.encode("utf-8")


def test_constraint_literals_survive_masking(kb_programs):
    # "是" is a condition-column literal, not an entity; it stays in place
    question = "淘抢购是否计入双十一最低价"
    mentions = recognize(question, kb_programs)
    literal_only = [m for m in mentions if not m.is_entity]
    assert [m.surface for m in literal_only] == ["是", "否"]
    masked = mask(question, mentions)
    assert masked.text == "<E>是否计入<E>最低价"


# --- classification ---


def test_classify_prefers_registration(kb_programs):
    question = "怎么参加淘抢购的双十一"
    masked = mask(question, recognize(question, kb_programs))
    candidates = [("registration_process",), ("charge_regulation",)]
    scores = classify(masked, candidates, kb_programs)
    assert scores[0].property_chain == ("registration_process",)
    assert scores[0].score > scores[1].score


def test_classify_verbatim_trigger_scores_one(kb_discounts):
    masked = MaskedQuestion("<E>和<E>能不能一起使用", (0, 1))
    scores = classify(masked, [("use_in_conjunction_in_store",)], kb_discounts)
    assert scores[0].score == pytest.approx(1.0)


def test_classify_raises_on_empty_candidates(kb_programs):
    with pytest.raises(NoCandidates):
        classify(MaskedQuestion("<E>", (0,)), [], kb_programs)


def _token_corpus(rng, n_chains=50, n_utterances=5):
    """Chains with disjoint token inventories so nearest-utterance is unambiguous."""
    pool = "춘하추동매란국죽송백도리행풍계하운월설화조어산천"  # hangul+CJK, 2-char tokens below
    chars = [a + b for a in pool for b in pool]
    rng.shuffle(chars)
    properties = []
    utterances = {}
    take = 0
    for i in range(n_chains):
        tokens = chars[take : take + 6]
        take += 6
        us = []
        for _ in range(n_utterances):
            us.append("".join(rng.sample(tokens, k=4)))
        pid = f"p{i:02d}"
        properties.append(
            {
                "id": pid,
                "name": pid,
                "domain_class": "c",
                "parent": None,
                "range": {"kind": "simple", "builtin": "text"},
                "infer_domain": False,
                "infer_range": False,
                "trigger_utterances": us,
            }
        )
        utterances[(pid,)] = us
    docs = {
        "classes.json": [{"id": "c", "name": "corpus", "root_property_ids": [p["id"] for p in properties]}],
        "properties.json": properties,
    }
    return load_kb(docs), utterances


def test_classify_top1_matches_nearest_utterance_oracle():
    rng = random.Random(79)
    kb, utterances = _token_corpus(rng)
    chains = list(utterances)
    correct = 0
    trials = 0
    for chain, us in utterances.items():
        source = rng.choice(us)
        tokens = [source[i : i + 2] for i in range(0, len(source), 2)]
        rng.shuffle(tokens)
        query = "".join(tokens)
        # oracle: brute-force max cosine over every utterance of every chain
        best_chain, best_sim = None, -1.0
        query_profile = ngram_profile(query)
        for other_chain, other_us in utterances.items():
            for utterance in other_us:
                sim = cosine(query_profile, ngram_profile(utterance))
                if sim > best_sim:
                    best_chain, best_sim = other_chain, sim
        top = classify(MaskedQuestion(query, ()), chains, kb)[0]
        trials += 1
        if top.property_chain == best_chain:
            correct += 1
    assert correct == trials  # 100% top-1 agreement by construction


def test_classify_is_pure_and_sorted(kb_guidance):
    masked = MaskedQuestion("<E>的报名流程?", (0,))
    chains = kb_guidance.all_leaf_chains()
    first = classify(masked, chains, kb_guidance)
    second = classify(masked, chains, kb_guidance)
    assert first == second
    assert [s.score for s in first] == sorted((s.score for s in first), reverse=True)


def test_classify_scores_bounded_and_monotone_under_duplication(fixtures_dir):
    import copy

    from kgqa.store import read_documents

    docs = copy.deepcopy(read_documents(fixtures_dir / "guidance"))
    kb = load_kb(docs)
    masked = MaskedQuestion("<E>怎么玩的攻略", (0,))
    baseline = classify(masked, kb.all_leaf_chains(), kb)
    assert all(0.0 <= s.score <= 1.0 for s in baseline)

    for prop in docs["properties.json"]:
        prop["trigger_utterances"] = prop["trigger_utterances"] * 2
    duplicated = classify(masked, kb.all_leaf_chains(), load_kb(docs))
    assert [(s.property_chain, s.score) for s in duplicated] == [
        (s.property_chain, s.score) for s in baseline
    ]


def test_lexical_classifier_tie_break_is_chain_key(kb_discounts):
    masked = MaskedQuestion("<E>和<E>能不能一起使用", (0, 1))
    chains = [("use_in_conjunction_sku",), ("use_in_conjunction_in_store",)]
    scores = lexical_classifier(masked, chains, kb_discounts)
    assert scores[0].score == scores[1].score
    assert scores[0].property_chain == ("use_in_conjunction_in_store",)
