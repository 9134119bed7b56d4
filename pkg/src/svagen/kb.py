"""Knowledge-base curation, stratification, and JSONL persistence.

A knowledge base is a list of (RTL, SVA) pairs that passed three gates:
the RTL parses to exactly one always block, the SVA passes the syntax
checker, and structural metadata (fingerprint, path count, tags) could be
computed.  Rejections are returned as data so callers can audit them.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .embedding import Embedding
from .errors import EmptyInput, ParseError, PathExplosion, SvagenError
from .fingerprint import fingerprint
from .paths import count_paths
from .rtl import (
    Block,
    Case,
    If,
    RtlBlock,
    Stmt,
    block_from_always,
    extract_blocks,
    parse_always,
    parse_source,
)
from .sva import check_sva_syntax, normalize_sva

CONTROL_KINDS = ("if_else", "case", "mixed", "none")

# path buckets saturate here: 8 or more paths land in one stratum
PATH_BUCKET_CAP = 8


@dataclass(frozen=True)
class KbEntry:
    id: str
    rtl_text: str
    sva_text: str
    fingerprint: str
    path_count: int
    context_tag: str
    control_kind: str
    embedding: Optional[Embedding] = None

    def with_embedding(self, embedding: Embedding) -> "KbEntry":
        return replace(self, embedding=embedding)


@dataclass(frozen=True, order=True)
class StratumKey:
    path_bucket: int
    timing: str
    control_kind: str


def control_kind(body: Stmt) -> str:
    has_if = False
    has_case = False
    stack = [body]
    while stack:
        node = stack.pop()
        if isinstance(node, Block):
            stack.extend(node.statements)
        elif isinstance(node, If):
            has_if = True
            stack.append(node.then_stmt)
            if node.else_stmt is not None:
                stack.append(node.else_stmt)
        elif isinstance(node, Case):
            has_case = True
            for item in node.items:
                stack.append(item.body)
            if node.default is not None:
                stack.append(node.default)
    if has_if and has_case:
        return "mixed"
    if has_case:
        return "case"
    if has_if:
        return "if_else"
    return "none"


def stratum_key(entry: KbEntry) -> StratumKey:
    timing = "async" if entry.context_tag == "ASYNC" else "sync"
    return StratumKey(
        path_bucket=min(entry.path_count, PATH_BUCKET_CAP),
        timing=timing,
        control_kind=entry.control_kind,
    )


_MODULE_RE = re.compile(r"\bmodule\b")


def parse_rtl_block(rtl_text: str) -> RtlBlock:
    """Parse ``rtl_text`` into a single analyzable block.

    Accepts either a full module (which must contain exactly one always
    block) or a bare always block.
    """
    if not rtl_text or not rtl_text.strip():
        raise EmptyInput("rtl text is empty")
    if _MODULE_RE.search(rtl_text):
        unit = parse_source(rtl_text)
        blocks = extract_blocks(unit)
        if not blocks:
            raise ParseError("no-always-block", 1, 1)
        if len(blocks) > 1:
            raise ParseError("multiple-always-blocks", 1, 1)
        return blocks[0]
    always = parse_always(rtl_text)
    return block_from_always(always, rtl_text=rtl_text)


def _build_entry(entry_id: str, rtl_text: str, sva_text: str) -> KbEntry:
    block = parse_rtl_block(rtl_text)
    violation = check_sva_syntax(sva_text)
    if violation is not None:
        raise _SvaRejected(violation.kind)
    fp = fingerprint(block)
    count = count_paths(block.block.body, cap=1).count
    return KbEntry(
        id=entry_id,
        rtl_text=rtl_text,
        sva_text=normalize_sva(sva_text),
        fingerprint=fp.full,
        path_count=count,
        context_tag=fp.tag,
        control_kind=control_kind(block.block.body),
    )


class _SvaRejected(Exception):
    def __init__(self, kind: str) -> None:
        super().__init__(kind)
        self.kind = kind


def curate(
    raw_pairs: Iterable[Tuple[str, str]],
    ids: Optional[Sequence[str]] = None,
) -> Tuple[List[KbEntry], List[Tuple[Tuple[str, str], str]]]:
    """Filter raw (rtl_text, sva_text) pairs into validated entries.

    Returns (entries, rejected) where each rejection carries the original
    pair and a reason string.  Nothing raises for bad data; rejection is
    the normal path for it.
    """
    entries: List[KbEntry] = []
    rejected: List[Tuple[Tuple[str, str], str]] = []
    for i, (rtl_text, sva_text) in enumerate(raw_pairs):
        entry_id = ids[i] if ids is not None else f"e{i:06d}"
        try:
            entries.append(_build_entry(entry_id, rtl_text, sva_text))
        except _SvaRejected as exc:
            rejected.append(((rtl_text, sva_text), f"sva-syntax: {exc.kind}"))
        except ParseError as exc:
            if exc.message in ("no-always-block", "multiple-always-blocks"):
                rejected.append(((rtl_text, sva_text), exc.message))
            else:
                rejected.append(((rtl_text, sva_text), f"rtl-parse-error: {exc}"))
        except PathExplosion:
            rejected.append(((rtl_text, sva_text), "path-explosion"))
        except EmptyInput as exc:
            rejected.append(((rtl_text, sva_text), f"empty-input: {exc}"))
        except ValueError as exc:
            rejected.append(((rtl_text, sva_text), f"rtl-parse-error: {exc}"))
    return entries, rejected


def stratified_split(
    entries: Sequence[KbEntry],
    ratio: Tuple[int, int] = (2, 1),
    seed: int = 0,
) -> Tuple[List[KbEntry], List[KbEntry]]:
    """Split entries into (knowledge, query) per stratum at ``ratio``.

    Deterministic for a given seed.  Within every stratum the knowledge
    share is round(n * ratio0 / (ratio0 + ratio1)), so singleton strata go
    to the knowledge side: a query without at least one structurally
    comparable knowledge entry cannot be retrieved against.
    """
    if not entries:
        raise EmptyInput("cannot split an empty knowledge base")
    strata: Dict[StratumKey, List[KbEntry]] = {}
    for entry in entries:
        strata.setdefault(stratum_key(entry), []).append(entry)
    rng = random.Random(seed)
    knowledge: List[KbEntry] = []
    query: List[KbEntry] = []
    for key in sorted(strata):
        members = sorted(strata[key], key=lambda e: e.id)
        rng.shuffle(members)
        take = round(len(members) * ratio[0] / (ratio[0] + ratio[1]))
        take = min(len(members), max(1, take))
        knowledge.extend(members[:take])
        query.extend(members[take:])
    knowledge.sort(key=lambda e: e.id)
    query.sort(key=lambda e: e.id)
    return knowledge, query


def validate_entry(entry: KbEntry) -> List[str]:
    """Recompute every derived field and report mismatches as strings."""
    problems: List[str] = []
    try:
        block = parse_rtl_block(entry.rtl_text)
    except SvagenError as exc:
        return [f"rtl does not parse: {exc}"]
    fp = fingerprint(block)
    if fp.full != entry.fingerprint:
        problems.append(f"fingerprint mismatch: stored {entry.fingerprint!r}, recomputed {fp.full!r}")
    if fp.tag != entry.context_tag:
        problems.append(f"context_tag mismatch: stored {entry.context_tag!r}, recomputed {fp.tag!r}")
    count = count_paths(block.block.body, cap=1).count
    if count != entry.path_count:
        problems.append(f"path_count mismatch: stored {entry.path_count}, recomputed {count}")
    kind = control_kind(block.block.body)
    if kind != entry.control_kind:
        problems.append(f"control_kind mismatch: stored {entry.control_kind!r}, recomputed {kind!r}")
    violation = check_sva_syntax(entry.sva_text)
    if violation is not None:
        problems.append(f"sva invalid: {violation}")
    elif normalize_sva(entry.sva_text) != entry.sva_text:
        problems.append("sva not in normalized form")
    return problems


def write_kb(entries: Sequence[KbEntry], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            record = {
                "id": entry.id,
                "rtl": entry.rtl_text,
                "sva": entry.sva_text,
                "fingerprint": entry.fingerprint,
                "path_count": entry.path_count,
                "context_tag": entry.context_tag,
                "control_kind": entry.control_kind,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_kb(path: str) -> List[KbEntry]:
    entries: List[KbEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: not valid JSON: {exc}") from None
            try:
                entries.append(
                    KbEntry(
                        id=record["id"],
                        rtl_text=record["rtl"],
                        sva_text=record["sva"],
                        fingerprint=record["fingerprint"],
                        path_count=int(record["path_count"]),
                        context_tag=record["context_tag"],
                        control_kind=record["control_kind"],
                    )
                )
            except KeyError as exc:
                raise ValueError(f"{path}:{line_no}: missing field {exc}") from None
    return entries
