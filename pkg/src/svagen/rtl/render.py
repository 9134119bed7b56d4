"""Render AST nodes back to Verilog text.

Rendering is canonical (single spaces, minimal parentheses) and re-parses to
an equivalent tree; the synthetic corpus and the renaming perturbation both
rely on that round trip. Parser-produced trees round-trip exactly; a
synthesized if/else whose then-branch ends in an else-less if gains a
begin/end wrapper, the only spelling Verilog allows for that shape.
"""

from __future__ import annotations

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
    NetDecl,
    NonBlockingAssign,
    PortDecl,
    SensitivityList,
    Slice,
    Stmt,
    Ternary,
    Unary,
)
from svagen.rtl.parser import _BINARY_LEVELS  # precedence table shared with the parser

_LEVEL_OF_OP = {op: i + 1 for i, ops in enumerate(_BINARY_LEVELS) for op in ops}
_TERNARY_LEVEL = 0
_UNARY_LEVEL = len(_BINARY_LEVELS) + 1
_PRIMARY_LEVEL = _UNARY_LEVEL + 1

_BASE_LETTERS = {"bin": "b", "oct": "o", "dec": "d", "hex": "h"}


def render_expr(expr: Expr, min_level: int = 0) -> str:
    text, level = _render(expr)
    if level < min_level:
        return f"({text})"
    return text


def _render(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, Ident):
        return expr.name, _PRIMARY_LEVEL
    if isinstance(expr, Literal):
        if expr.base == "dec" and expr.width is None:
            return expr.digits, _PRIMARY_LEVEL
        prefix = "" if expr.width is None else str(expr.width)
        return f"{prefix}'{_BASE_LETTERS[expr.base]}{expr.digits}", _PRIMARY_LEVEL
    if isinstance(expr, Unary):
        # operand below primary gets parens: a nested unary would otherwise
        # glue into a longer token ("||x", "&&x") and re-lex as binary
        return f"{expr.op}{render_expr(expr.operand, _PRIMARY_LEVEL)}", _UNARY_LEVEL
    if isinstance(expr, Binary):
        level = _LEVEL_OF_OP[expr.op]
        left = render_expr(expr.left, level)
        right = render_expr(expr.right, level + 1)
        return f"{left} {expr.op} {right}", level
    if isinstance(expr, Ternary):
        cond = render_expr(expr.cond, _TERNARY_LEVEL + 1)
        then_val = render_expr(expr.then_val, _TERNARY_LEVEL + 1)
        else_val = render_expr(expr.else_val, _TERNARY_LEVEL)
        return f"{cond} ? {then_val} : {else_val}", _TERNARY_LEVEL
    if isinstance(expr, Concat):
        inner = ", ".join(render_expr(p) for p in expr.parts)
        return "{" + inner + "}", _PRIMARY_LEVEL
    if isinstance(expr, Index):
        return f"{render_expr(expr.base, _PRIMARY_LEVEL)}[{render_expr(expr.index)}]", _PRIMARY_LEVEL
    if isinstance(expr, Slice):
        base = render_expr(expr.base, _PRIMARY_LEVEL)
        return f"{base}[{render_expr(expr.high)}:{render_expr(expr.low)}]", _PRIMARY_LEVEL
    raise TypeError(f"unknown expression node {type(expr).__name__}")  # pragma: no cover


def render_stmt(stmt: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(stmt, BlockingAssign):
        return f"{pad}{render_expr(stmt.lhs)} = {render_expr(stmt.rhs)};"
    if isinstance(stmt, NonBlockingAssign):
        return f"{pad}{render_expr(stmt.lhs)} <= {render_expr(stmt.rhs)};"
    if isinstance(stmt, Block):
        lines = [f"{pad}begin"]
        lines.extend(render_stmt(s, indent + 1) for s in stmt.statements)
        lines.append(f"{pad}end")
        return "\n".join(lines)
    if isinstance(stmt, If):
        lines = [f"{pad}if ({render_expr(stmt.cond)})"]
        then_stmt = stmt.then_stmt
        if stmt.else_stmt is not None and _leaves_if_open(then_stmt):
            # dangling else: a bare then-branch ending in an else-less if
            # would capture our else on re-parse, so it needs begin/end
            then_stmt = Block((then_stmt,))
        lines.append(_render_body(then_stmt, indent))
        tail = stmt.else_stmt
        if tail is not None:
            if isinstance(tail, If):
                nested = render_stmt(tail, indent)
                lines.append(f"{pad}else {nested[len(pad):]}")
            else:
                lines.append(f"{pad}else")
                lines.append(_render_body(tail, indent))
        return "\n".join(lines)
    if isinstance(stmt, Case):
        lines = [f"{pad}{stmt.kind} ({render_expr(stmt.subject)})"]
        for item in stmt.items:
            labels = ", ".join(render_expr(l) for l in item.labels)
            lines.append(f"{pad}  {labels}:")
            lines.append(_render_body(item.body, indent + 1))
        if stmt.default is not None:
            lines.append(f"{pad}  default:")
            lines.append(_render_body(stmt.default, indent + 1))
        lines.append(f"{pad}endcase")
        return "\n".join(lines)
    raise TypeError(f"unknown statement node {type(stmt).__name__}")  # pragma: no cover


def _render_body(stmt: Stmt, indent: int) -> str:
    # bodies of if/else/case arms indent one level below their header
    return render_stmt(stmt, indent + 1)


def _leaves_if_open(stmt: Stmt) -> bool:
    """True when the statement's last textual line is an else-less if, which
    would bind a following `else` to itself."""
    if isinstance(stmt, If):
        return stmt.else_stmt is None or _leaves_if_open(stmt.else_stmt)
    return False


def render_sensitivity(sens: SensitivityList) -> str:
    if len(sens.entries) == 1 and sens.entries[0].edge == "star":
        return "@*"
    parts = []
    for entry in sens.entries:
        if entry.edge == "star":
            parts.append("*")
        elif entry.edge == "level":
            parts.append(entry.signal or "")
        else:
            parts.append(f"{entry.edge} {entry.signal}")
    return "@(" + " or ".join(parts) + ")"


def render_always(block: AlwaysBlock) -> str:
    return f"always {render_sensitivity(block.sensitivity)}\n{render_stmt(block.body)}"


def render_port_decl(port: PortDecl, reg: bool = False) -> str:
    kind = " reg" if reg else ""
    rng = f" [{port.msb}:{port.lsb}]" if port.width > 1 else ""
    return f"{port.direction}{kind}{rng} {port.name};"


def render_net_decl(net: NetDecl) -> str:
    rng = f" [{net.msb}:{net.lsb}]" if net.width > 1 else ""
    return f"{net.kind}{rng} {net.name};"
