"""Decompose parsed modules into always blocks with their local context."""

from __future__ import annotations

from dataclasses import dataclass

from svagen.errors import MissingDeclaration
from svagen.rtl.ast import (
    AlwaysBlock,
    Block,
    BlockingAssign,
    Case,
    Concat,
    Expr,
    Ident,
    If,
    Index,
    ModuleDecl,
    NonBlockingAssign,
    Slice,
    SourceUnit,
    Stmt,
    block_identifiers,
)
from svagen.rtl.render import (
    render_always,
    render_net_decl,
    render_port_decl,
)


@dataclass(frozen=True)
class RtlBlock:
    """One always block paired with the declarations it needs to stand alone.

    local_context renders as valid Verilog: `module _c; <local_context>
    <rtl_text> endmodule` parses, and rtl_text alone re-parses to `block`.
    """

    module_name: str
    block: AlwaysBlock
    local_context: str
    rtl_text: str


def extract_blocks(unit: SourceUnit) -> list[RtlBlock]:
    """One RtlBlock per always block, in source order.

    Raises MissingDeclaration if a block references a signal its module never
    declares.
    """
    out: list[RtlBlock] = []
    for module in unit.modules:
        ports = {p.name: p for p in module.ports}
        nets = {n.name: n for n in module.nets}
        for block in module.always_blocks:
            referenced = _ordered_unique(block_identifiers(block))
            lines = []
            for name in referenced:
                if name in ports:
                    lines.append(render_port_decl(ports[name], reg=name in nets))
                elif name in nets:
                    lines.append(render_net_decl(nets[name]))
                else:
                    raise MissingDeclaration(name)
            start, end = block.span
            rtl_text = unit.text[start:end] if unit.text else render_always(block)
            out.append(
                RtlBlock(
                    module_name=module.name,
                    block=block,
                    local_context="\n".join(lines),
                    rtl_text=rtl_text,
                )
            )
    return out


def block_from_always(
    block: AlwaysBlock, module_name: str = "", rtl_text: str | None = None
) -> RtlBlock:
    """Wrap a bare always block, synthesizing minimal declarations.

    Assigned signals become reg, everything else wire. Used when ingesting
    corpus entries that carry an always block without its module.
    """
    assigned = assigned_names(block.body)
    lines = []
    for name in _ordered_unique(block_identifiers(block)):
        kind = "reg" if name in assigned else "wire"
        lines.append(f"{kind} {name};")
    return RtlBlock(
        module_name=module_name,
        block=block,
        local_context="\n".join(lines),
        rtl_text=rtl_text if rtl_text is not None else render_always(block),
    )


def assigned_names(stmt: Stmt) -> set[str]:
    """Names of signals written by any assignment under stmt."""
    out: set[str] = set()

    def lhs_targets(expr: Expr) -> None:
        if isinstance(expr, Ident):
            out.add(expr.name)
        elif isinstance(expr, (Index, Slice)):
            lhs_targets(expr.base)
        elif isinstance(expr, Concat):
            for part in expr.parts:
                lhs_targets(part)

    def walk(s: Stmt) -> None:
        if isinstance(s, (BlockingAssign, NonBlockingAssign)):
            lhs_targets(s.lhs)
        elif isinstance(s, Block):
            for sub in s.statements:
                walk(sub)
        elif isinstance(s, If):
            walk(s.then_stmt)
            if s.else_stmt is not None:
                walk(s.else_stmt)
        elif isinstance(s, Case):
            for item in s.items:
                walk(item.body)
            if s.default is not None:
                walk(s.default)

    walk(stmt)
    return out


def _ordered_unique(names: list[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for name in names:
        if name not in seen:
            seen.add(name)
            out.append(name)
    return out
