"""Rename-invariant structural fingerprints of always blocks.

A fingerprint is `<TAG>::<body>` where TAG classifies the sensitivity list
and the body is a canonical signature of the block's control flow,
assignment kinds, and operator usage. No identifier or literal content
reaches the signature, so renaming signals never changes it.

Signature grammar:
    ifSig    := if(dpth:<D>,brnch:<B>)[then:stmtSig][elif:stmtSig]*[else:stmtSig]?
    caseSig  := case(items:<k>,dflt:<0|1>)[item:stmtSig]*[default:stmtSig]?
    blockSig := block(nb_asgn:<n>,b_asgn:<n>,ops:{<op>:<count>,...})
with ops sorted lexicographically. A begin/end block that mixes assignments
with conditionals renders its blockSig followed by one [sub:...] section per
conditional; a block holding a single conditional and nothing else collapses
to that conditional's signature. Branch-guard operators are folded into the
guarded branch's block signature (case subjects into every arm).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from svagen.rtl.ast import (
    AlwaysBlock,
    Binary,
    Block,
    BlockingAssign,
    Case,
    Concat,
    Expr,
    Ident,
    If,
    Index,
    Literal,
    NonBlockingAssign,
    SensitivityList,
    Slice,
    Stmt,
    Ternary,
    Unary,
    normalized_key,
)
from svagen.rtl.extract import RtlBlock

CONTEXT_TAGS = ("ASYNC", "SYNC_POSEDGE", "SYNC_NEGEDGE", "SYNC_BOTH", "COMB")


@dataclass(frozen=True)
class Fingerprint:
    tag: str
    body: str

    @property
    def full(self) -> str:
        return f"{self.tag}::{self.body}"

    def __str__(self) -> str:
        return self.full


def context_tag(sens: SensitivityList) -> str:
    """Classify a sensitivity list into one of CONTEXT_TAGS.

    Star/level-only lists are COMB. A single edge on a single signal is
    SYNC_POSEDGE or SYNC_NEGEDGE; both edges of one signal SYNC_BOTH. Edges
    on two or more signals (the async-reset idiom), or an edge mixed with
    level entries, are ASYNC.
    """
    edges = [(e.edge, e.signal) for e in sens.entries if e.edge in ("posedge", "negedge")]
    others = [e for e in sens.entries if e.edge not in ("posedge", "negedge")]
    if not edges:
        return "COMB"
    if others:
        return "ASYNC"
    signals = {sig for _, sig in edges}
    if len(signals) > 1:
        return "ASYNC"
    kinds = {edge for edge, _ in edges}
    if kinds == {"posedge"}:
        return "SYNC_POSEDGE"
    if kinds == {"negedge"}:
        return "SYNC_NEGEDGE"
    return "SYNC_BOTH"


def fingerprint(block: RtlBlock | AlwaysBlock) -> Fingerprint:
    """Fingerprint an extracted block (or a bare AlwaysBlock)."""
    always = block.block if isinstance(block, RtlBlock) else block
    tag = context_tag(always.sensitivity)
    body = _stmt_sig(always.body, Counter())
    return Fingerprint(tag=tag, body=body)


# ---- signature rendering ----


def _stmt_sig(stmt: Stmt, pending_ops: Counter) -> str:
    """Signature of one statement; pending_ops are guard operators waiting to
    land in the next block signature."""
    if isinstance(stmt, (BlockingAssign, NonBlockingAssign)):
        return _block_sig([stmt], pending_ops)
    if isinstance(stmt, Block):
        assigns, conditionals = _split_block(stmt)
        if not assigns and len(conditionals) == 1 and not pending_ops:
            return _stmt_sig(conditionals[0], Counter())
        head = _block_sig(assigns, pending_ops)
        subs = "".join(f"[sub:{_stmt_sig(c, Counter())}]" for c in conditionals)
        return head + subs
    if isinstance(stmt, If):
        return _if_sig(stmt, pending_ops)
    if isinstance(stmt, Case):
        return _case_sig(stmt, pending_ops)
    raise TypeError(f"unknown statement node {type(stmt).__name__}")  # pragma: no cover


def _split_block(block: Block) -> tuple[list[Stmt], list[Stmt]]:
    """Partition a block into assignments and conditionals, flattening any
    directly nested begin/end blocks."""
    assigns: list[Stmt] = []
    conditionals: list[Stmt] = []
    for s in block.statements:
        if isinstance(s, Block):
            sub_a, sub_c = _split_block(s)
            assigns.extend(sub_a)
            conditionals.extend(sub_c)
        elif isinstance(s, (If, Case)):
            conditionals.append(s)
        else:
            assigns.append(s)
    return assigns, conditionals


def _block_sig(assigns: Sequence[Stmt], pending_ops: Counter) -> str:
    nb = sum(1 for s in assigns if isinstance(s, NonBlockingAssign))
    b = sum(1 for s in assigns if isinstance(s, BlockingAssign))
    ops = Counter(pending_ops)
    for s in assigns:
        _count_ops(s.lhs, ops)  # index/slice bounds may hold operators
        _count_ops(s.rhs, ops)
    rendered = ",".join(f"{op}:{ops[op]}" for op in sorted(ops))
    return f"block(nb_asgn:{nb},b_asgn:{b},ops:{{{rendered}}})"


def _if_sig(stmt: If, pending_ops: Counter) -> str:
    head = stmt
    if pending_ops:
        # A guarded branch holding only this conditional: the pending guard
        # operators need a block to land in, so no collapse happened and we
        # are called from _block_sig context instead. Reaching here means the
        # chain itself carries pending ops; give them an explicit empty block.
        return _block_sig([], pending_ops) + f"[sub:{_if_sig(head, Counter())}]"
    branches: list[tuple[Counter, Stmt]] = []
    cursor: Stmt = head
    while isinstance(cursor, If):
        cond_ops: Counter = Counter()
        _count_ops(cursor.cond, cond_ops)
        branches.append((cond_ops, cursor.then_stmt))
        if cursor.else_stmt is None:
            cursor = None  # type: ignore[assignment]
            break
        cursor = cursor.else_stmt
    final_else = cursor  # None when the chain ends without an explicit else
    brnch = len(branches) + 1
    dpth = _cond_depth(head)
    parts = [f"if(dpth:{dpth},brnch:{brnch})"]
    for i, (cond_ops, body) in enumerate(branches):
        label = "then" if i == 0 else "elif"
        parts.append(f"[{label}:{_stmt_sig(body, cond_ops)}]")
    if final_else is not None:
        parts.append(f"[else:{_stmt_sig(final_else, Counter())}]")
    return "".join(parts)


def _case_sig(stmt: Case, pending_ops: Counter) -> str:
    if pending_ops:
        return _block_sig([], pending_ops) + f"[sub:{_case_sig(stmt, Counter())}]"
    subject_ops: Counter = Counter()
    _count_ops(stmt.subject, subject_ops)
    parts = [f"case(items:{len(stmt.items)},dflt:{1 if stmt.default is not None else 0})"]
    for item in stmt.items:
        item_ops = Counter(subject_ops)
        for label in item.labels:
            _count_ops(label, item_ops)
        parts.append(f"[item:{_stmt_sig(item.body, item_ops)}]")
    if stmt.default is not None:
        parts.append(f"[default:{_stmt_sig(stmt.default, Counter(subject_ops))}]")
    return "".join(parts)


def _cond_depth(stmt: Stmt) -> int:
    """Maximum nesting depth of conditional constructs; an else-if chain
    counts as a single level."""
    if isinstance(stmt, (BlockingAssign, NonBlockingAssign)):
        return 0
    if isinstance(stmt, Block):
        return max((_cond_depth(s) for s in stmt.statements), default=0)
    if isinstance(stmt, If):
        inner = 0
        cursor = stmt.else_stmt
        inner = max(inner, _cond_depth(stmt.then_stmt))
        while isinstance(cursor, If):
            inner = max(inner, _cond_depth(cursor.then_stmt))
            cursor = cursor.else_stmt
        if cursor is not None:
            inner = max(inner, _cond_depth(cursor))
        return 1 + inner
    if isinstance(stmt, Case):
        inner = max((_cond_depth(item.body) for item in stmt.items), default=0)
        if stmt.default is not None:
            inner = max(inner, _cond_depth(stmt.default))
        return 1 + inner
    raise TypeError(type(stmt).__name__)  # pragma: no cover


def _count_ops(expr: Expr, ops: Counter) -> None:
    """Count operator tokens in an expression; unary and binary spellings of
    the same token merge, identifiers and literals contribute nothing."""
    if isinstance(expr, (Ident, Literal)):
        return
    if isinstance(expr, Unary):
        ops[expr.op] += 1
        _count_ops(expr.operand, ops)
    elif isinstance(expr, Binary):
        ops[expr.op] += 1
        _count_ops(expr.left, ops)
        _count_ops(expr.right, ops)
    elif isinstance(expr, Ternary):
        ops["?:"] += 1
        _count_ops(expr.cond, ops)
        _count_ops(expr.then_val, ops)
        _count_ops(expr.else_val, ops)
    elif isinstance(expr, Concat):
        for part in expr.parts:
            _count_ops(part, ops)
    elif isinstance(expr, Index):
        _count_ops(expr.base, ops)
        _count_ops(expr.index, ops)
    elif isinstance(expr, Slice):
        _count_ops(expr.base, ops)
        _count_ops(expr.high, ops)
        _count_ops(expr.low, ops)
    else:  # pragma: no cover - exhaustive over Expr
        raise TypeError(type(expr).__name__)


# ---- collision accounting ----


def collision_rate(blocks: Iterable[RtlBlock | AlwaysBlock]) -> float:
    """Fraction of blocks sharing a fingerprint with at least one block that
    is not structurally identical to them.

    Structural identity means rename-normalized AST equality, so exact copies
    of one block never count as collisions.
    """
    rows: list[tuple[str, str]] = []
    for block in blocks:
        always = block.block if isinstance(block, RtlBlock) else block
        rows.append((fingerprint(always).full, normalized_key(always)))
    if not rows:
        raise ValueError("collision_rate requires a nonempty corpus")
    by_fp: dict[str, set[str]] = {}
    for fp, key in rows:
        by_fp.setdefault(fp, set()).add(key)
    colliding = sum(1 for fp, key in rows if len(by_fp[fp]) > 1)
    return colliding / len(rows)
