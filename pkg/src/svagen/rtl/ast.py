"""AST node types for the supported Verilog subset.

Nodes are frozen dataclasses; structural equality is plain dataclass equality.
Spans (byte offsets into the source) live only on module and always-block
nodes and are excluded from comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

# ---- expressions ----


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Literal:
    width: Optional[int]  # bit count for based literals, None for plain decimal
    base: str  # one of "bin", "oct", "dec", "hex"
    digits: str  # may contain x/z


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then_val: "Expr"
    else_val: "Expr"


@dataclass(frozen=True)
class Concat:
    parts: Tuple["Expr", ...]


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Slice:
    base: "Expr"
    high: "Expr"
    low: "Expr"


Expr = Union[Ident, Literal, Unary, Binary, Ternary, Concat, Index, Slice]

# ---- statements ----


@dataclass(frozen=True)
class BlockingAssign:
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class NonBlockingAssign:
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Block:
    statements: Tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    then_stmt: "Stmt"
    else_stmt: Optional["Stmt"]


@dataclass(frozen=True)
class CaseItem:
    labels: Tuple[Expr, ...]
    body: "Stmt"


@dataclass(frozen=True)
class Case:
    kind: str  # "case", "casez", or "casex"; metadata only, fingerprints ignore it
    subject: Expr
    items: Tuple[CaseItem, ...]
    default: Optional["Stmt"]


Stmt = Union[Block, If, Case, BlockingAssign, NonBlockingAssign]

# ---- module structure ----


@dataclass(frozen=True)
class SensEntry:
    edge: str  # "posedge", "negedge", "level", or "star"
    signal: Optional[str]  # None only for star


@dataclass(frozen=True)
class SensitivityList:
    entries: Tuple[SensEntry, ...]


@dataclass(frozen=True)
class AlwaysBlock:
    sensitivity: SensitivityList
    body: Stmt
    span: Tuple[int, int] = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class PortDecl:
    name: str
    direction: str  # "input", "output", or "inout"
    width: int  # bit count, >= 1
    msb: int = 0
    lsb: int = 0


@dataclass(frozen=True)
class NetDecl:
    name: str
    kind: str  # "wire", "reg", or "logic"
    width: int
    msb: int = 0
    lsb: int = 0


@dataclass(frozen=True)
class ContinuousAssign:
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    ports: Tuple[PortDecl, ...]
    nets: Tuple[NetDecl, ...]
    always_blocks: Tuple[AlwaysBlock, ...]
    continuous_assigns: Tuple[ContinuousAssign, ...]
    span: Tuple[int, int] = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class SourceUnit:
    modules: Tuple[ModuleDecl, ...]
    source_name: str = "<text>"
    text: str = field(compare=False, default="")


# ---- tree utilities ----


def expr_identifiers(expr: Expr) -> list[str]:
    """All identifier names in an expression, in traversal order (with repeats)."""
    out: list[str] = []
    _walk_expr(expr, out)
    return out


def _walk_expr(expr: Expr, out: list[str]) -> None:
    if isinstance(expr, Ident):
        out.append(expr.name)
    elif isinstance(expr, Literal):
        pass
    elif isinstance(expr, Unary):
        _walk_expr(expr.operand, out)
    elif isinstance(expr, Binary):
        _walk_expr(expr.left, out)
        _walk_expr(expr.right, out)
    elif isinstance(expr, Ternary):
        _walk_expr(expr.cond, out)
        _walk_expr(expr.then_val, out)
        _walk_expr(expr.else_val, out)
    elif isinstance(expr, Concat):
        for part in expr.parts:
            _walk_expr(part, out)
    elif isinstance(expr, Index):
        _walk_expr(expr.base, out)
        _walk_expr(expr.index, out)
    elif isinstance(expr, Slice):
        _walk_expr(expr.base, out)
        _walk_expr(expr.high, out)
        _walk_expr(expr.low, out)
    else:  # pragma: no cover - exhaustive over Expr
        raise TypeError(f"unknown expression node {type(expr).__name__}")


def stmt_identifiers(stmt: Stmt) -> list[str]:
    """All identifier names in a statement tree, in traversal order (with repeats)."""
    out: list[str] = []

    def walk(s: Stmt) -> None:
        if isinstance(s, (BlockingAssign, NonBlockingAssign)):
            _walk_expr(s.lhs, out)
            _walk_expr(s.rhs, out)
        elif isinstance(s, Block):
            for sub in s.statements:
                walk(sub)
        elif isinstance(s, If):
            _walk_expr(s.cond, out)
            walk(s.then_stmt)
            if s.else_stmt is not None:
                walk(s.else_stmt)
        elif isinstance(s, Case):
            _walk_expr(s.subject, out)
            for item in s.items:
                for label in item.labels:
                    _walk_expr(label, out)
                walk(item.body)
            if s.default is not None:
                walk(s.default)
        else:  # pragma: no cover - exhaustive over Stmt
            raise TypeError(f"unknown statement node {type(s).__name__}")

    walk(stmt)
    return out


def block_identifiers(block: AlwaysBlock) -> list[str]:
    """Identifiers referenced by an always block: sensitivity list plus body."""
    out = [e.signal for e in block.sensitivity.entries if e.signal is not None]
    out.extend(stmt_identifiers(block.body))
    return out


def normalized_key(block: AlwaysBlock) -> str:
    """Rename-normalized serialization of an always block.

    Identifiers are replaced by v0, v1, ... in order of first occurrence;
    literals are kept. Two blocks are structurally identical (for collision
    accounting) exactly when their keys are equal.
    """
    mapping: dict[str, str] = {}

    def canon(name: str) -> str:
        if name not in mapping:
            mapping[name] = f"v{len(mapping)}"
        return mapping[name]

    def ser_expr(e: Expr) -> str:
        if isinstance(e, Ident):
            return canon(e.name)
        if isinstance(e, Literal):
            return f"lit({e.width},{e.base},{e.digits})"
        if isinstance(e, Unary):
            return f"u{e.op}({ser_expr(e.operand)})"
        if isinstance(e, Binary):
            return f"({ser_expr(e.left)}{e.op}{ser_expr(e.right)})"
        if isinstance(e, Ternary):
            return f"({ser_expr(e.cond)}?{ser_expr(e.then_val)}:{ser_expr(e.else_val)})"
        if isinstance(e, Concat):
            return "{" + ",".join(ser_expr(p) for p in e.parts) + "}"
        if isinstance(e, Index):
            return f"{ser_expr(e.base)}[{ser_expr(e.index)}]"
        if isinstance(e, Slice):
            return f"{ser_expr(e.base)}[{ser_expr(e.high)}:{ser_expr(e.low)}]"
        raise TypeError(type(e).__name__)  # pragma: no cover

    def ser_stmt(s: Stmt) -> str:
        if isinstance(s, BlockingAssign):
            return f"b({ser_expr(s.lhs)}={ser_expr(s.rhs)})"
        if isinstance(s, NonBlockingAssign):
            return f"nb({ser_expr(s.lhs)}<={ser_expr(s.rhs)})"
        if isinstance(s, Block):
            return "{" + ";".join(ser_stmt(x) for x in s.statements) + "}"
        if isinstance(s, If):
            tail = "" if s.else_stmt is None else f"else{ser_stmt(s.else_stmt)}"
            return f"if({ser_expr(s.cond)}){ser_stmt(s.then_stmt)}{tail}"
        if isinstance(s, Case):
            items = "".join(
                f"[{','.join(ser_expr(l) for l in it.labels)}:{ser_stmt(it.body)}]"
                for it in s.items
            )
            dflt = "" if s.default is None else f"[default:{ser_stmt(s.default)}]"
            return f"{s.kind}({ser_expr(s.subject)}){items}{dflt}"
        raise TypeError(type(s).__name__)  # pragma: no cover

    sens = ",".join(
        f"{e.edge}:{canon(e.signal)}" if e.signal is not None else e.edge
        for e in block.sensitivity.entries
    )
    return f"@({sens}){ser_stmt(block.body)}"
