"""Evaluation harness: retrieval quality under identifier renaming,
generation quality through the full prompt/complete/parse loop, fingerprint
collision accounting, and the query-latency sweep.
"""

from __future__ import annotations

import json
import math
import random
import time
import zlib
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import metrics
from .corpus import generate_distinct_blocks
from .embedding import HashEmbeddingProvider, hash_embed
from .errors import EmptyInput
from .fingerprint import fingerprint
from .index import (
    DEFAULT_TAG_PENALTY,
    ExactIndex,
    IndexEntry,
    build_approx,
    build_exact,
    search_rawstring,
)
from .kb import KbEntry, parse_rtl_block
from .llm import GenerationConfig, LlmProvider
from .llm import complete as llm_complete
from .coverage import path_coverage
from .prompting import build_prompt, parse_llm_output
from .rtl import (
    AlwaysBlock,
    Binary,
    Block,
    BlockingAssign,
    Case,
    CaseItem,
    Concat,
    Expr,
    Ident,
    If,
    Index,
    Literal,
    NonBlockingAssign,
    RtlBlock,
    SensEntry,
    SensitivityList,
    Slice,
    Stmt,
    Ternary,
    Unary,
    block_from_always,
    block_identifiers,
    parse_always,
    render_always,
)
from .sva import check_sva_syntax

RETRIEVERS = ("structural", "semantic_baseline")


# ---- identifier renaming ----


def _rename_expr(expr: Expr, mapping: Mapping[str, str]) -> Expr:
    if isinstance(expr, Ident):
        return Ident(mapping.get(expr.name, expr.name))
    if isinstance(expr, Literal):
        return expr
    if isinstance(expr, Unary):
        return Unary(expr.op, _rename_expr(expr.operand, mapping))
    if isinstance(expr, Binary):
        return Binary(
            expr.op,
            _rename_expr(expr.left, mapping),
            _rename_expr(expr.right, mapping),
        )
    if isinstance(expr, Ternary):
        return Ternary(
            _rename_expr(expr.cond, mapping),
            _rename_expr(expr.then_val, mapping),
            _rename_expr(expr.else_val, mapping),
        )
    if isinstance(expr, Concat):
        return Concat(tuple(_rename_expr(p, mapping) for p in expr.parts))
    if isinstance(expr, Index):
        return Index(
            _rename_expr(expr.base, mapping), _rename_expr(expr.index, mapping)
        )
    if isinstance(expr, Slice):
        return Slice(
            _rename_expr(expr.base, mapping),
            _rename_expr(expr.high, mapping),
            _rename_expr(expr.low, mapping),
        )
    raise TypeError(type(expr).__name__)  # pragma: no cover


def _rename_stmt(stmt: Stmt, mapping: Mapping[str, str]) -> Stmt:
    if isinstance(stmt, BlockingAssign):
        return BlockingAssign(
            _rename_expr(stmt.lhs, mapping), _rename_expr(stmt.rhs, mapping)
        )
    if isinstance(stmt, NonBlockingAssign):
        return NonBlockingAssign(
            _rename_expr(stmt.lhs, mapping), _rename_expr(stmt.rhs, mapping)
        )
    if isinstance(stmt, Block):
        return Block(tuple(_rename_stmt(s, mapping) for s in stmt.statements))
    if isinstance(stmt, If):
        return If(
            _rename_expr(stmt.cond, mapping),
            _rename_stmt(stmt.then_stmt, mapping),
            None if stmt.else_stmt is None else _rename_stmt(stmt.else_stmt, mapping),
        )
    if isinstance(stmt, Case):
        return Case(
            stmt.kind,
            _rename_expr(stmt.subject, mapping),
            tuple(
                CaseItem(
                    tuple(_rename_expr(l, mapping) for l in item.labels),
                    _rename_stmt(item.body, mapping),
                )
                for item in stmt.items
            ),
            None if stmt.default is None else _rename_stmt(stmt.default, mapping),
        )
    raise TypeError(type(stmt).__name__)  # pragma: no cover


def rename_identifiers(block: RtlBlock, fraction: float, seed: int = 0) -> RtlBlock:
    """Rename ⌈fraction·n⌉ of the block's identifiers to fresh names.

    The chosen identifiers are replaced consistently across the sensitivity
    list and body; the result re-parses and fingerprints identically.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    names = sorted(set(block_identifiers(block.block)))
    count = math.ceil(fraction * len(names))
    if count == 0:
        return block
    rng = random.Random(seed)
    chosen = rng.sample(names, count)

    taken = set(names)
    mapping: Dict[str, str] = {}
    serial = 0
    for old in chosen:
        fresh = f"rn{serial}"
        while fresh in taken:
            serial += 1
            fresh = f"rn{serial}"
        mapping[old] = fresh
        taken.add(fresh)
        serial += 1

    always = block.block
    sensitivity = SensitivityList(
        tuple(
            SensEntry(e.edge, None if e.signal is None else mapping.get(e.signal, e.signal))
            for e in always.sensitivity.entries
        )
    )
    renamed = AlwaysBlock(sensitivity=sensitivity, body=_rename_stmt(always.body, mapping))
    text = render_always(renamed)
    return block_from_always(parse_always(text), rtl_text=text)


# ---- report types ----


@dataclass(frozen=True)
class RetrievalEvalConfig:
    n_values: Tuple[int, ...] = (3, 5, 7, 10)
    rename_fraction: float = 0.30
    sample_size: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be positive")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ValueError("n_values must be strictly ascending")
        if not 0.0 <= self.rename_fraction <= 1.0:
            raise ValueError("rename_fraction must be in [0, 1]")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")


@dataclass(frozen=True)
class MetricBlock:
    recall_at_n: Dict[int, float]
    mrr_at_n: Dict[int, float]
    ndcg_at_n: Dict[int, float]


SCHEMA_VERSION = 1


@dataclass
class EvalReport:
    """Aggregated metrics plus per-query detail rows.

    Retrieval runs fill the ranking maps (exact-duplicate case) and
    `renamed`; generation runs fill the scalar fields. Unused fields stay
    at their empty defaults.
    """

    recall_at_n: Dict[int, float] = field(default_factory=dict)
    mrr_at_n: Dict[int, float] = field(default_factory=dict)
    ndcg_at_n: Dict[int, float] = field(default_factory=dict)
    renamed: Optional[MetricBlock] = None
    syntax_pass_rate: Optional[float] = None
    bleu_mean: Optional[float] = None
    semantic_sim_mean: Optional[float] = None
    path_coverage: Optional[float] = None
    coverage_by_group: Dict[int, float] = field(default_factory=dict)
    per_query: List[Dict] = field(default_factory=list)

    def to_json(self) -> str:
        def block(b: Optional[MetricBlock]):
            if b is None:
                return None
            return {
                "recall_at_n": b.recall_at_n,
                "mrr_at_n": b.mrr_at_n,
                "ndcg_at_n": b.ndcg_at_n,
            }

        payload = {
            "schema_version": SCHEMA_VERSION,
            "recall_at_n": self.recall_at_n,
            "mrr_at_n": self.mrr_at_n,
            "ndcg_at_n": self.ndcg_at_n,
            "renamed": block(self.renamed),
            "syntax_pass_rate": self.syntax_pass_rate,
            "bleu_mean": self.bleu_mean,
            "semantic_sim_mean": self.semantic_sim_mean,
            "path_coverage": self.path_coverage,
            "coverage_by_group": self.coverage_by_group,
            "per_query": self.per_query,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def render_table(self) -> str:
        lines: List[str] = []
        if self.recall_at_n:
            ns = sorted(self.recall_at_n)
            header = "case      " + "".join(f"  R@{n:<4}" for n in ns)
            header += "".join(f"  MRR@{n:<3}" for n in ns)
            header += "".join(f" nDCG@{n:<3}" for n in ns)
            lines.append(header)

            def row(label: str, b: MetricBlock) -> str:
                cells = "".join(f"  {b.recall_at_n[n]:.3f}" for n in ns)
                cells += "".join(f"  {b.mrr_at_n[n]:.3f}  " for n in ns)
                cells += "".join(f"  {b.ndcg_at_n[n]:.3f} " for n in ns)
                return f"{label:<10}" + cells

            lines.append(row("exact", MetricBlock(self.recall_at_n, self.mrr_at_n, self.ndcg_at_n)))
            if self.renamed is not None:
                lines.append(row("renamed", self.renamed))
        scalars = [
            ("syntax pass rate", self.syntax_pass_rate),
            ("BLEU mean", self.bleu_mean),
            ("semantic sim mean", self.semantic_sim_mean),
            ("path coverage", self.path_coverage),
        ]
        for label, value in scalars:
            if value is not None:
                lines.append(f"{label:<18} {value:.4f}")
        if self.coverage_by_group:
            for group in sorted(self.coverage_by_group):
                lines.append(
                    f"  coverage @ {group} paths: {self.coverage_by_group[group]:.4f}"
                )
        return "\n".join(lines)

    def render_csv(self) -> str:
        """Per-query rows as CSV (columns = union of row keys, sorted)."""
        if not self.per_query:
            return ""
        columns = sorted({key for row in self.per_query for key in row})
        out = [",".join(columns)]
        for row in self.per_query:
            out.append(",".join(_csv_cell(row.get(c)) for c in columns))
        return "\n".join(out)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        text = '"' + text.replace('"', '""') + '"'
    return text


# ---- retrieval evaluation ----


def _embed_batch(texts: Sequence[str]) -> list:
    return HashEmbeddingProvider().embed_batch(list(texts))


def run_retrieval_eval(
    kb: Sequence[KbEntry],
    config: RetrievalEvalConfig = RetrievalEvalConfig(),
    retriever: str = "structural",
) -> EvalReport:
    """Duplicate-query experiment: verbatim and renamed copies of sampled
    entries are issued against an index of the originals, with the original
    id marked relevant.

    `structural` embeds fingerprints and applies the context-tag penalty;
    `semantic_baseline` embeds raw RTL text directly.
    """
    if retriever not in RETRIEVERS:
        raise ValueError(f"unknown retriever {retriever!r}")
    if not kb:
        raise EmptyInput("knowledge base is empty")
    structural = retriever == "structural"

    texts = [e.fingerprint if structural else e.rtl_text for e in kb]
    vectors = _embed_batch(texts)
    index = build_exact(
        [
            IndexEntry(id=e.id, vector=v, context_tag=e.context_tag if structural else "")
            for e, v in zip(kb, vectors)
        ]
    )

    rng = random.Random(config.seed)
    if config.sample_size >= len(kb):
        sampled = list(kb)
    else:
        sampled = rng.sample(list(kb), config.sample_size)

    depth = max(config.n_values)
    query_texts: List[str] = []
    query_tags: List[Optional[str]] = []
    for entry in sampled:
        block = parse_rtl_block(entry.rtl_text)
        perturbed = rename_identifiers(
            block, config.rename_fraction, seed=config.seed ^ zlib.crc32(entry.id.encode())
        )
        if structural:
            query_texts.append(entry.fingerprint)
            query_texts.append(fingerprint(perturbed).full)
            query_tags.extend([entry.context_tag, entry.context_tag])
        else:
            query_texts.append(entry.rtl_text)
            query_texts.append(perturbed.rtl_text)
            query_tags.extend([None, None])
    query_vectors = _embed_batch(query_texts)

    rankings: Dict[str, List[Tuple[List[str], str]]] = {"exact": [], "renamed": []}
    per_query: List[Dict] = []
    for i, entry in enumerate(sampled):
        for j, case in enumerate(("exact", "renamed")):
            hits = index.search(
                query_vectors[2 * i + j],
                k=depth,
                query_tag=query_tags[2 * i + j],
                tag_penalty=DEFAULT_TAG_PENALTY,
            )
            ids = [h.id for h in hits]
            rankings[case].append((ids, entry.id))
            rank = ids.index(entry.id) + 1 if entry.id in ids else None
            per_query.append(
                {"id": entry.id, "case": case, "retriever": retriever, "rank": rank}
            )

    def block_for(case: str) -> MetricBlock:
        rows = rankings[case]
        return MetricBlock(
            recall_at_n={n: metrics.recall_at_n(rows, n) for n in config.n_values},
            mrr_at_n={n: metrics.mrr_at_n(rows, n) for n in config.n_values},
            ndcg_at_n={n: metrics.ndcg_at_n(rows, n) for n in config.n_values},
        )

    exact_block = block_for("exact")
    return EvalReport(
        recall_at_n=exact_block.recall_at_n,
        mrr_at_n=exact_block.mrr_at_n,
        ndcg_at_n=exact_block.ndcg_at_n,
        renamed=block_for("renamed"),
        per_query=per_query,
    )


# ---- generation evaluation ----


@dataclass
class Pipeline:
    """Everything the online phase needs: exemplar store, provider, prompt."""

    kb: Sequence[KbEntry]
    provider: LlmProvider
    k: int = 3
    config: GenerationConfig = field(default_factory=GenerationConfig)
    template: Optional[str] = None


def run_generation_eval(
    query_set: Sequence[KbEntry],
    pipeline: Pipeline,
) -> EvalReport:
    """Generate assertions for every query entry and score them.

    Reports assertion-level syntax pass rate, best-match BLEU and semantic
    similarity against each entry's reference SVA, and execution-path
    coverage overall and per path-count group. Per-entry failures are
    recorded and the run continues.
    """
    if not query_set:
        raise EmptyInput("query set is empty")

    index: Optional[ExactIndex] = None
    by_id: Dict[str, KbEntry] = {}
    if pipeline.k > 0 and pipeline.kb:
        vectors = _embed_batch([e.fingerprint for e in pipeline.kb])
        index = build_exact(
            [
                IndexEntry(id=e.id, vector=v, context_tag=e.context_tag)
                for e, v in zip(pipeline.kb, vectors)
            ]
        )
        by_id = {e.id: e for e in pipeline.kb}

    embedder = HashEmbeddingProvider()
    total_assertions = 0
    passed_assertions = 0
    bleu_scores: List[float] = []
    sem_scores: List[float] = []
    group_counts: Dict[int, List[int]] = {}
    per_query: List[Dict] = []

    for entry in query_set:
        row: Dict = {"id": entry.id, "paths": entry.path_count}
        try:
            target = parse_rtl_block(entry.rtl_text)
            hits = []
            if index is not None:
                hits = index.search(
                    hash_embed(entry.fingerprint),
                    k=pipeline.k,
                    query_tag=entry.context_tag,
                )
            bundle = build_prompt(hits, by_id, target, k=pipeline.k, template=pipeline.template)
            raw = llm_complete(pipeline.provider, bundle.rendered, pipeline.config)
            generated = parse_llm_output(raw)
            valid = [s for s in generated if check_sva_syntax(s) is None]

            total_assertions += len(generated)
            passed_assertions += len(valid)
            coverage = path_coverage(valid, target)

            if valid:
                bleu_scores.append(max(metrics.bleu(s, entry.sva_text) for s in valid))
                sem_scores.append(
                    max(
                        metrics.semantic_similarity(s, entry.sva_text, embedder)
                        for s in valid
                    )
                )
            row.update(
                generated=len(generated),
                valid=len(valid),
                covered=coverage.covered,
                approximate=coverage.approximate,
            )
            covered = coverage.covered
        except Exception as exc:  # per-entry isolation, run continues
            row["error"] = f"{type(exc).__name__}: {exc}"
            covered = False
        bucket = group_counts.setdefault(entry.path_count, [0, 0])
        bucket[0] += 1 if covered else 0
        bucket[1] += 1
        per_query.append(row)

    covered_total = sum(c for c, _ in group_counts.values())
    return EvalReport(
        syntax_pass_rate=(passed_assertions / total_assertions) if total_assertions else 0.0,
        bleu_mean=(sum(bleu_scores) / len(bleu_scores)) if bleu_scores else 0.0,
        semantic_sim_mean=(sum(sem_scores) / len(sem_scores)) if sem_scores else 0.0,
        path_coverage=covered_total / len(query_set),
        coverage_by_group={g: c / t for g, (c, t) in sorted(group_counts.items())},
        per_query=per_query,
    )


# ---- collision experiment ----


@dataclass(frozen=True)
class CollisionReport:
    n: int
    distinct_fingerprints: int
    rate: float
    elapsed_seconds: float


def run_collision_eval(n: int = 1000, seed: int = 0) -> CollisionReport:
    """Fingerprint collision rate over structurally distinct random blocks."""
    start = time.perf_counter()
    blocks = generate_distinct_blocks(n, seed=seed)
    prints = {fingerprint(b).full for b in blocks}
    elapsed = time.perf_counter() - start
    return CollisionReport(
        n=n,
        distinct_fingerprints=len(prints),
        rate=(n - len(prints)) / n,
        elapsed_seconds=elapsed,
    )


# ---- runtime sweep ----


@dataclass(frozen=True)
class RuntimeRow:
    size: int
    raw_ms: float
    exact_ms: float
    approx_ms: float


def run_runtime_sweep(
    max_size: int = 3000,
    step: int = 100,
    n_queries: int = 25,
    k: int = 5,
    nlist: int = 32,
    nprobe: int = 4,
    seed: int = 0,
) -> List[RuntimeRow]:
    """Mean query latency of raw-text scan vs exact vs approximate search
    at corpus sizes step, 2·step, ..., max_size.
    """
    if max_size < step or step < 1:
        raise ValueError("need max_size >= step >= 1")
    blocks = generate_distinct_blocks(max_size, seed=seed)
    texts = [render_always(b) for b in blocks]
    prints = [fingerprint(b).full for b in blocks]
    vectors = _embed_batch(prints)
    entries = [
        IndexEntry(id=str(i), vector=v) for i, v in enumerate(vectors)
    ]

    rng = random.Random(seed)
    query_idx = [rng.randrange(step) for _ in range(n_queries)]

    rows: List[RuntimeRow] = []
    for size in range(step, max_size + 1, step):
        exact = build_exact(entries[:size])
        approx = build_approx(entries[:size], nlist=min(nlist, size), seed=seed)

        start = time.perf_counter()
        for qi in query_idx:
            search_rawstring(texts[:size], texts[qi], k)
        raw_ms = (time.perf_counter() - start) * 1000 / n_queries

        start = time.perf_counter()
        for qi in query_idx:
            exact.search(vectors[qi], k)
        exact_ms = (time.perf_counter() - start) * 1000 / n_queries

        start = time.perf_counter()
        for qi in query_idx:
            approx.search(vectors[qi], k, nprobe=min(nprobe, approx.nlist))
        approx_ms = (time.perf_counter() - start) * 1000 / n_queries

        rows.append(RuntimeRow(size=size, raw_ms=raw_ms, exact_ms=exact_ms, approx_ms=approx_ms))
    return rows
