"""Verilog subset front-end: lexer, parser, AST, extraction, rendering."""

from svagen.rtl.ast import (
    AlwaysBlock,
    Binary,
    Block,
    BlockingAssign,
    Case,
    CaseItem,
    Concat,
    ContinuousAssign,
    Expr,
    Ident,
    If,
    Index,
    Literal,
    ModuleDecl,
    NetDecl,
    NonBlockingAssign,
    PortDecl,
    SensEntry,
    SensitivityList,
    Slice,
    SourceUnit,
    Stmt,
    Ternary,
    Unary,
    block_identifiers,
    expr_identifiers,
    normalized_key,
    stmt_identifiers,
)
from svagen.rtl.extract import RtlBlock, assigned_names, block_from_always, extract_blocks
from svagen.rtl.parser import parse_always, parse_expr, parse_source
from svagen.rtl.render import (
    render_always,
    render_expr,
    render_sensitivity,
    render_stmt,
)

__all__ = [
    "AlwaysBlock", "Binary", "Block", "BlockingAssign", "Case", "CaseItem",
    "Concat", "ContinuousAssign", "Expr", "Ident", "If", "Index", "Literal",
    "ModuleDecl", "NetDecl", "NonBlockingAssign", "PortDecl", "RtlBlock",
    "SensEntry", "SensitivityList", "Slice", "SourceUnit", "Stmt", "Ternary",
    "Unary", "assigned_names", "block_from_always", "block_identifiers",
    "expr_identifiers", "extract_blocks", "normalized_key", "parse_always",
    "parse_expr", "parse_source", "render_always", "render_expr",
    "render_sensitivity", "render_stmt", "stmt_identifiers",
]
