"""Execution-path counting and path-condition enumeration for block bodies.

Counting rules: an assignment is one path; a sequence multiplies; if/else
adds its branches, an if without else gains one implicit fall-through path;
case adds its arms, with one implicit path when default is absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from svagen.errors import PathExplosion
from svagen.rtl.ast import (
    Binary,
    Block,
    BlockingAssign,
    Case,
    Expr,
    If,
    NonBlockingAssign,
    Stmt,
    Unary,
)
from svagen.rtl.render import render_expr

DEFAULT_PATH_CAP = 4096
_COUNT_LIMIT = 2**31


@dataclass(frozen=True)
class PathCond:
    """Conjunction of guard literals describing one execution path."""

    literals: Tuple[Tuple[Expr, bool], ...]

    @property
    def description(self) -> str:
        if not self.literals:
            return "1"
        parts = []
        for guard, polarity in self.literals:
            # min_level 2 keeps && members bare but parenthesizes || folds,
            # so the joined text re-parses as the intended conjunction
            text = render_expr(guard, min_level=2)
            parts.append(text if polarity else f"!({render_expr(guard)})")
        return " && ".join(parts)


@dataclass(frozen=True)
class PathSet:
    count: int
    paths: Tuple[PathCond, ...]
    truncated: bool


def count_paths(body: Stmt, cap: int = DEFAULT_PATH_CAP) -> PathSet:
    """Count execution paths and enumerate their conditions up to cap.

    The count is always exact; enumeration stops once cap conditions exist,
    setting `truncated`. Counts beyond 2^31 raise PathExplosion.
    """
    count = _count(body)
    if count > _COUNT_LIMIT:
        raise PathExplosion(f"{count} execution paths exceed the 2^31 limit")
    paths = _enumerate(body, cap)
    truncated = len(paths) < count
    return PathSet(count=count, paths=tuple(paths), truncated=truncated)


def enumerate_path_conditions(body: Stmt) -> Tuple[PathCond, ...]:
    """All path conditions, refusing to truncate."""
    count = _count(body)
    if count > _COUNT_LIMIT:
        raise PathExplosion(f"{count} execution paths exceed the 2^31 limit")
    return tuple(_enumerate(body, count))


def _count(stmt: Stmt) -> int:
    if isinstance(stmt, (BlockingAssign, NonBlockingAssign)):
        return 1
    if isinstance(stmt, Block):
        total = 1
        for s in stmt.statements:
            total *= _count(s)
            if total > _COUNT_LIMIT:
                raise PathExplosion(f"more than {_COUNT_LIMIT} execution paths")
        return total
    if isinstance(stmt, If):
        then_count = _count(stmt.then_stmt)
        else_count = _count(stmt.else_stmt) if stmt.else_stmt is not None else 1
        return then_count + else_count
    if isinstance(stmt, Case):
        total = sum(_count(item.body) for item in stmt.items)
        total += _count(stmt.default) if stmt.default is not None else 1
        return total
    raise TypeError(f"unknown statement node {type(stmt).__name__}")  # pragma: no cover


def _enumerate(stmt: Stmt, cap: int) -> list[PathCond]:
    if isinstance(stmt, (BlockingAssign, NonBlockingAssign)):
        return [PathCond(())]
    if isinstance(stmt, Block):
        acc: list[Tuple[Tuple[Expr, bool], ...]] = [()]
        for s in stmt.statements:
            sub = _enumerate(s, cap)
            merged = []
            for prefix in acc:
                for path in sub:
                    merged.append(prefix + path.literals)
                    if len(merged) >= cap:
                        break
                if len(merged) >= cap:
                    break
            acc = merged
        return [PathCond(lits) for lits in acc]
    if isinstance(stmt, If):
        out = []
        for path in _enumerate(stmt.then_stmt, cap):
            out.append(PathCond(((stmt.cond, True),) + path.literals))
            if len(out) >= cap:
                return out
        if stmt.else_stmt is not None:
            for path in _enumerate(stmt.else_stmt, cap):
                out.append(PathCond(((stmt.cond, False),) + path.literals))
                if len(out) >= cap:
                    return out
        else:
            out.append(PathCond(((stmt.cond, False),)))
        return out[:cap]
    if isinstance(stmt, Case):
        out = []
        all_label_literals: list[Tuple[Expr, bool]] = []
        for item in stmt.items:
            guard = _labels_guard(stmt.subject, list(item.labels))
            for label in item.labels:
                all_label_literals.append((Binary("==", stmt.subject, label), False))
            for path in _enumerate(item.body, cap):
                out.append(PathCond(((guard, True),) + path.literals))
                if len(out) >= cap:
                    return out
        default_prefix = tuple(all_label_literals)
        if stmt.default is not None:
            for path in _enumerate(stmt.default, cap):
                out.append(PathCond(default_prefix + path.literals))
                if len(out) >= cap:
                    return out
        else:
            out.append(PathCond(default_prefix))
        return out[:cap]
    raise TypeError(f"unknown statement node {type(stmt).__name__}")  # pragma: no cover


def _labels_guard(subject: Expr, labels: list[Expr]) -> Expr:
    guard: Expr = Binary("==", subject, labels[0])
    for label in labels[1:]:
        guard = Binary("||", guard, Binary("==", subject, label))
    return guard
