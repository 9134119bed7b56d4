"""Retrieval and text-similarity metrics.

Rankings are (retrieved ids, relevant) pairs where relevant is a single id
or a set of ids. All three ranking metrics are monotonically non-decreasing
in n.
"""

from __future__ import annotations

import math
import re
from typing import AbstractSet, List, Optional, Sequence, Tuple, Union

from .embedding import EmbeddingProvider, HashEmbeddingProvider, cosine
from .errors import EmptyRankings, EmptyText

Relevant = Union[str, AbstractSet[str], Sequence[str]]
Ranking = Tuple[Sequence[str], Relevant]

BLEU_ORDER = 4
_EPSILON = 1e-9

_TOKEN_RE = re.compile(
    r"\|->|\|=>|===|!==|##|&&|\|\||==|!=|<=|>=|<<|>>|\$?\w+|\S"
)


def _relevant_set(relevant: Relevant) -> frozenset:
    if isinstance(relevant, str):
        return frozenset((relevant,))
    return frozenset(relevant)


def _check(rankings: Sequence[Ranking], n: int) -> None:
    if not rankings:
        raise EmptyRankings("no rankings to aggregate")
    if n < 1:
        raise ValueError("n must be >= 1")


def recall_at_n(rankings: Sequence[Ranking], n: int) -> float:
    """Fraction of queries with a relevant id anywhere in the top n."""
    _check(rankings, n)
    hits = 0
    for retrieved, relevant in rankings:
        rel = _relevant_set(relevant)
        if any(r in rel for r in retrieved[:n]):
            hits += 1
    return hits / len(rankings)


def mrr_at_n(rankings: Sequence[Ranking], n: int) -> float:
    """Mean reciprocal rank of the first relevant id, 0 when absent."""
    _check(rankings, n)
    total = 0.0
    for retrieved, relevant in rankings:
        rel = _relevant_set(relevant)
        for rank, r in enumerate(retrieved[:n], start=1):
            if r in rel:
                total += 1.0 / rank
                break
    return total / len(rankings)


def ndcg_at_n(rankings: Sequence[Ranking], n: int) -> float:
    """nDCG with unit gain per relevant id and 1/log2(rank+1) discount."""
    _check(rankings, n)
    total = 0.0
    for retrieved, relevant in rankings:
        rel = _relevant_set(relevant)
        dcg = sum(
            1.0 / math.log2(rank + 1)
            for rank, r in enumerate(retrieved[:n], start=1)
            if r in rel
        )
        ideal_hits = min(len(rel), n)
        idcg = sum(1.0 / math.log2(rank + 1) for rank in range(1, ideal_hits + 1))
        total += dcg / idcg if idcg > 0 else 0.0
    return total / len(rankings)


def tokenize_text(text: str) -> List[str]:
    """Whitespace/punctuation split with multi-character operators intact."""
    return _TOKEN_RE.findall(text)


def _ngram_counts(tokens: Sequence[str], n: int) -> dict:
    counts: dict = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i : i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def bleu(candidate: str, reference: str) -> float:
    """BLEU-4 with uniform weights, brevity penalty, add-epsilon smoothing.

    Orders the candidate is too short to populate are scored a neutral 1.0,
    so bleu(x, x) = 1 even for texts under four tokens.
    """
    cand = tokenize_text(candidate)
    ref = tokenize_text(reference)
    if not cand:
        raise EmptyText("candidate has no tokens")
    if not ref:
        raise EmptyText("reference has no tokens")

    log_sum = 0.0
    for n in range(1, BLEU_ORDER + 1):
        cand_counts = _ngram_counts(cand, n)
        total = sum(cand_counts.values())
        if total == 0:
            continue
        ref_counts = _ngram_counts(ref, n)
        matched = sum(
            min(count, ref_counts.get(gram, 0))
            for gram, count in cand_counts.items()
        )
        p_n = matched / total if matched > 0 else _EPSILON
        log_sum += math.log(p_n) / BLEU_ORDER

    if len(cand) >= len(ref):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref) / len(cand))
    return brevity * math.exp(log_sum)


def semantic_similarity(
    candidate: str,
    reference: str,
    provider: Optional[EmbeddingProvider] = None,
) -> float:
    """Cosine similarity of provider embeddings of the two texts."""
    if not candidate.strip():
        raise EmptyText("candidate is blank")
    if not reference.strip():
        raise EmptyText("reference is blank")
    if provider is None:
        provider = HashEmbeddingProvider()
    a, b = provider.embed_batch([candidate, reference])
    return cosine(a, b)
