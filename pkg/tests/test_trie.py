import random

from kgqa import MentionKind, MentionTrie, fold, recognize

from kbgen import FILLER_CHARS, NAME_CHARS


def quadratic_leftmost_longest(text: str, keys: set[str]) -> list[tuple[int, int]]:
    """Oracle: O(n^2) scan trying every substring, greedy leftmost-longest."""
    folded = fold(text)
    spans = []
    i = 0
    while i < len(folded):
        best = None
        for j in range(len(folded), i, -1):
            if folded[i:j] in keys:
                best = (i, j)
                break
        if best is None:
            i += 1
        else:
            spans.append(best)
            i = best[1]
    return spans


def test_insert_and_exact_lookup():
    trie = MentionTrie()
    trie.insert("双十一", MentionKind.ENTITY, "double_11")
    trie.insert("双11", MentionKind.ENTITY, "double_11")
    assert trie.lookup("双十一") == [(MentionKind.ENTITY, "double_11")]
    assert trie.lookup("双十") == []
    assert trie.lookup("missing") == []
    assert len(trie) == 2


def test_duplicate_surfaces_keep_targets_in_insertion_order():
    trie = MentionTrie()
    trie.insert("promo", MentionKind.ENTITY, "a")
    trie.insert("promo", MentionKind.CONSTRAINT_LITERAL, "b")
    trie.insert("promo", MentionKind.ENTITY, "a")  # exact duplicate collapses
    assert trie.lookup("promo") == [
        (MentionKind.ENTITY, "a"),
        (MentionKind.CONSTRAINT_LITERAL, "b"),
    ]


def test_case_insensitive_for_cased_scripts_exact_for_cjk():
    trie = MentionTrie()
    trie.insert("Store-Bao", MentionKind.ENTITY, "store_bao")
    trie.insert("店铺宝", MentionKind.ENTITY, "store_bao")
    assert trie.lookup("STORE-BAO") == [(MentionKind.ENTITY, "store_bao")]
    assert trie.lookup("store-bao") == [(MentionKind.ENTITY, "store_bao")]
    assert trie.lookup("店铺宝") == [(MentionKind.ENTITY, "store_bao")]


def test_longest_match_prefers_longer_key():
    trie = MentionTrie()
    trie.insert("科技", MentionKind.ENTITY, "short")
    trie.insert("科技公司", MentionKind.ENTITY, "long")
    end, targets = trie.longest_match(fold("科技公司真好"), 0)
    assert end == 4
    assert targets == [(MentionKind.ENTITY, "long")]


def test_empty_trie_matches_nothing():
    trie = MentionTrie()
    assert trie.longest_match("anything", 0) is None


def test_random_names_retrievable_and_nothing_else():
    rng = random.Random(23)
    names = set()
    while len(names) < 200:
        names.add("".join(rng.choice(NAME_CHARS) for _ in range(rng.randint(2, 5))))
    trie = MentionTrie()
    for name in names:
        trie.insert(name, MentionKind.ENTITY, name)
    for name in names:
        assert trie.lookup(name) == [(MentionKind.ENTITY, name)]  # oracle: set membership
    for _ in range(300):
        probe = "".join(rng.choice(NAME_CHARS) for _ in range(rng.randint(2, 5)))
        assert (trie.lookup(probe) != []) == (probe in names)


def test_leftmost_longest_matches_quadratic_oracle():
    rng = random.Random(31)
    vocab = set()
    while len(vocab) < 40:
        vocab.add("".join(rng.choice(NAME_CHARS) for _ in range(rng.randint(2, 4))))
    latin = {"promo", "sale", "vip"}
    keys = {fold(k) for k in vocab | latin}
    trie = MentionTrie()
    for key in vocab | latin:
        trie.insert(key, MentionKind.ENTITY, key)

    alphabet = NAME_CHARS + FILLER_CHARS + "PromoSALE "
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        folded = fold(text)
        spans = []
        i = 0
        while i < len(folded):
            hit = trie.longest_match(folded, i)
            if hit is None:
                i += 1
                continue
            spans.append((i, hit[0]))
            i = hit[0]
        assert spans == quadratic_leftmost_longest(text, keys)


def test_recognize_uses_leftmost_longest(kb_programs):
    mentions = recognize("怎么参加淘抢购的双十一", kb_programs)
    assert [(m.surface, m.span) for m in mentions] == [("淘抢购", (4, 7)), ("双十一", (8, 11))]
