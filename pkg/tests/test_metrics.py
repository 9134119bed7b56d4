from __future__ import annotations

import math

import pytest

from svagen.embedding import HashEmbeddingProvider
from svagen.errors import EmptyRankings, EmptyText
from svagen.metrics import (
    bleu,
    mrr_at_n,
    ndcg_at_n,
    recall_at_n,
    semantic_similarity,
    tokenize_text,
)


def test_recall_closed_forms():
    rankings = [
        (["a", "b", "c"], "a"),  # hit at 1
        (["x", "y", "z"], "z"),  # hit at 3
        (["p", "q", "r"], "w"),  # miss
    ]
    assert recall_at_n(rankings, 1) == pytest.approx(1 / 3)
    assert recall_at_n(rankings, 3) == pytest.approx(2 / 3)
    assert mrr_at_n(rankings, 3) == pytest.approx((1.0 + 1 / 3 + 0.0) / 3)
    assert ndcg_at_n(rankings, 3) == pytest.approx((1.0 + 1 / math.log2(4) + 0.0) / 3)


def test_rank_two_closed_form():
    rankings = [(["other", "target"], "target")]
    assert mrr_at_n(rankings, 10) == pytest.approx(0.5)
    assert ndcg_at_n(rankings, 10) == pytest.approx(1 / math.log2(3), abs=1e-12)


def test_relevant_as_set():
    rankings = [(["a", "b"], {"b", "q"})]
    assert recall_at_n(rankings, 2) == 1.0
    assert mrr_at_n(rankings, 2) == 0.5


def test_multiple_relevant_ndcg_uses_ideal_dcg():
    # two relevant docs, both retrieved at ranks 1 and 3: dcg = 1 + 1/log2(4),
    # ideal dcg = 1 + 1/log2(3)
    rankings = [(["r1", "x", "r2"], {"r1", "r2"})]
    expected = (1.0 + 1 / math.log2(4)) / (1.0 + 1 / math.log2(3))
    assert ndcg_at_n(rankings, 3) == pytest.approx(expected, abs=1e-12)


def test_metrics_monotone_in_n():
    rankings = [
        ([f"d{i}" for i in range(10)], f"d{i}") for i in range(10)
    ]
    for metric in (recall_at_n, mrr_at_n, ndcg_at_n):
        values = [metric(rankings, n) for n in range(1, 11)]
        assert all(b >= a for a, b in zip(values, values[1:])), metric.__name__


def test_ranking_metric_validation():
    for metric in (recall_at_n, mrr_at_n, ndcg_at_n):
        with pytest.raises(EmptyRankings):
            metric([], 5)
        with pytest.raises(ValueError):
            metric([(["a"], "a")], 0)


def test_tokenizer_keeps_operators_whole():
    toks = tokenize_text("(a |-> b) |=> c != ##1 $past(d)")
    assert "|->" in toks
    assert "|=>" in toks
    assert "!=" in toks
    assert "##" in toks
    assert "$past" in toks
    assert "|" not in toks  # never split the implication arrow


def test_bleu_identity():
    texts = [
        "a |-> b",  # 3 tokens, below the top order
        "ab",
        "property p; (a && b) |-> ##1 c; endproperty",
        "one two three four five six",
    ]
    for text in texts:
        assert bleu(text, text) == pytest.approx(1.0, abs=1e-12)


def test_bleu_hand_computed_case():
    # candidate "a |-> b" vs reference "a |-> c": unigrams 2/3, bigrams 1/2,
    # trigrams eps (no match), 4-grams absent; equal length so no brevity
    expected = (2 / 3 * 1 / 2 * 1e-9) ** (1 / 4)
    assert bleu("a |-> b", "a |-> c") == pytest.approx(expected, rel=1e-12)


def test_bleu_brevity_penalty():
    # candidate strictly shorter than the reference gets exp(1 - r/c); the
    # empty 4-gram order is skipped (neutral), not epsilon-smoothed, so the
    # three populated orders are all exact matches here
    cand = "a b c"
    ref = "a b c d e f"
    assert bleu(cand, ref) == pytest.approx(math.exp(1 - 6 / 3), rel=1e-12)
    assert bleu(cand, ref) < bleu(ref, ref)


def test_bleu_empty_inputs():
    with pytest.raises(EmptyText):
        bleu("", "a b")
    with pytest.raises(EmptyText):
        bleu("a b", "   ")


def test_semantic_similarity_identity_and_symmetry():
    a = "always @(posedge clk) q <= d;"
    b = "property p; x |-> y; endproperty"
    assert semantic_similarity(a, a) == pytest.approx(1.0, abs=1e-6)
    assert semantic_similarity(a, b) == pytest.approx(semantic_similarity(b, a), abs=1e-7)
    with pytest.raises(EmptyText):
        semantic_similarity("", a)


def test_semantic_similarity_custom_provider():
    provider = HashEmbeddingProvider(dim=32)
    value = semantic_similarity("abc def", "abc xyz", provider=provider)
    assert -1.0 <= value <= 1.0
