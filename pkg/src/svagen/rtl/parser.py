"""Recursive-descent parser for the supported Verilog subset.

Supported: module/port/net declarations, continuous assigns, always blocks
with posedge/negedge/level/star sensitivity, begin/end, if/else,
case/casez/casex, blocking and non-blocking assignments, and the closed
operator set. Everything else is a ParseError.
"""

from __future__ import annotations

from typing import Optional

from svagen.errors import ParseError
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
)
from svagen.rtl.lexer import Token, TokenType, tokenize

MAX_SOURCE_BYTES = 4 * 1024 * 1024

# Binary operators by precedence level, loosest first. Ternary sits above
# level 0; unary operators bind tighter than all of these.
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^"],
    ["&"],
    ["==", "!=", "===", "!=="],
    ["<", "<=", ">", ">="],
    ["<<", ">>"],
    ["+", "-"],
    ["*", "/", "%"],
]

_UNARY_OPS = {"!", "~", "-", "&", "|", "^"}


def parse_source(text: str, source_name: str = "<text>") -> SourceUnit:
    """Parse Verilog source text into a SourceUnit."""
    if len(text.encode("utf-8", errors="replace")) > MAX_SOURCE_BYTES:
        raise ParseError("source exceeds size limit", 1, 1)
    parser = _Parser(tokenize(text, source_name), text)
    modules = []
    while not parser.at_eof():
        modules.append(parser.parse_module())
    return SourceUnit(modules=tuple(modules), source_name=source_name, text=text)


def parse_always(text: str) -> AlwaysBlock:
    """Parse a bare always block (no enclosing module required)."""
    parser = _Parser(tokenize(text), text)
    block = parser.parse_always_block()
    parser.expect_eof()
    return block


def parse_expr(text: str) -> Expr:
    """Parse a standalone expression; used by path descriptions and coverage."""
    parser = _Parser(tokenize(text), text)
    expr = parser.parse_expression()
    parser.expect_eof()
    return expr


class _Parser:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.text = text
        self.pos = 0

    # ---- token helpers ----

    def _cur(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def _at(self, text: str) -> bool:
        tok = self._cur()
        return tok.type in (TokenType.SYMBOL, TokenType.KEYWORD) and tok.text == text

    def _at_type(self, ttype: TokenType) -> bool:
        return self._cur().type is ttype

    def _eat(self, text: str) -> Token:
        if not self._at(text):
            tok = self._cur()
            shown = tok.text if tok.type is not TokenType.EOF else "end of input"
            raise ParseError(f"expected '{text}', found '{shown}'", tok.line, tok.column)
        return self._advance()

    def _eat_if(self, text: str) -> bool:
        if self._at(text):
            self._advance()
            return True
        return False

    def _eat_ident(self) -> Token:
        tok = self._cur()
        if tok.type is not TokenType.IDENT:
            shown = tok.text if tok.type is not TokenType.EOF else "end of input"
            raise ParseError(f"expected identifier, found '{shown}'", tok.line, tok.column)
        return self._advance()

    def _error(self, message: str) -> ParseError:
        tok = self._cur()
        return ParseError(message, tok.line, tok.column)

    def at_eof(self) -> bool:
        return self._at_type(TokenType.EOF)

    def expect_eof(self) -> None:
        if not self.at_eof():
            raise self._error(f"unexpected trailing input '{self._cur().text}'")

    # ---- module structure ----

    def parse_module(self) -> ModuleDecl:
        start = self._cur().offset
        self._eat("module")
        name = self._eat_ident().text
        ports: list[PortDecl] = []
        nets: list[NetDecl] = []
        header_names: list[str] = []
        if self._eat_if("("):
            if not self._at(")"):
                self._parse_port_list(ports, nets, header_names)
            self._eat(")")
        self._eat(";")

        always_blocks: list[AlwaysBlock] = []
        assigns: list[ContinuousAssign] = []
        while not self._at("endmodule"):
            if self.at_eof():
                raise self._error("missing 'endmodule'")
            if self._at("input") or self._at("output") or self._at("inout"):
                self._parse_direction_decl(ports, nets)
            elif self._at("wire") or self._at("reg") or self._at("logic"):
                self._parse_net_decl(nets)
            elif self._at("always"):
                always_blocks.append(self.parse_always_block())
            elif self._at("assign"):
                self._advance()
                lhs = self.parse_expression()
                self._eat("=")
                rhs = self.parse_expression()
                self._eat(";")
                assigns.append(ContinuousAssign(lhs, rhs))
            else:
                raise self._error(f"unexpected '{self._cur().text}' in module body")
        end_tok = self._eat("endmodule")
        self._check_unique([p.name for p in ports], "port")
        self._check_unique([d.name for d in nets], "net")
        return ModuleDecl(
            name=name,
            ports=tuple(ports),
            nets=tuple(nets),
            always_blocks=tuple(always_blocks),
            continuous_assigns=tuple(assigns),
            span=(start, end_tok.offset + len("endmodule")),
        )

    def _check_unique(self, names: list[str], kind: str) -> None:
        seen: set[str] = set()
        for n in names:
            if n in seen:
                raise self._error(f"duplicate {kind} declaration '{n}'")
            seen.add(n)

    def _parse_port_list(
        self, ports: list[PortDecl], nets: list[NetDecl], header_names: list[str]
    ) -> None:
        # ANSI entries ("input [3:0] a") and plain names (non-ANSI header)
        # may both appear; plain names get their direction from body decls.
        direction: Optional[str] = None
        kind: Optional[str] = None
        msb, lsb = 0, 0
        while True:
            if self._at("input") or self._at("output") or self._at("inout"):
                direction = self._advance().text
                kind = None
                msb, lsb = 0, 0
                if self._at("reg") or self._at("wire") or self._at("logic"):
                    kind = self._advance().text
                if self._at("["):
                    msb, lsb = self._parse_range()
            name = self._eat_ident().text
            if direction is None:
                header_names.append(name)
            else:
                width = abs(msb - lsb) + 1
                ports.append(PortDecl(name, direction, width, msb, lsb))
                if kind is not None and kind != "wire":
                    nets.append(NetDecl(name, kind, width, msb, lsb))
            if not self._eat_if(","):
                break

    def _parse_range(self) -> tuple[int, int]:
        self._eat("[")
        msb = self._parse_int_bound()
        self._eat(":")
        lsb = self._parse_int_bound()
        self._eat("]")
        return msb, lsb

    def _parse_int_bound(self) -> int:
        tok = self._cur()
        if tok.type is not TokenType.NUMBER:
            raise self._error("declaration ranges must use plain integers")
        self._advance()
        return int(tok.text.replace("_", ""))

    def _parse_direction_decl(self, ports: list[PortDecl], nets: list[NetDecl]) -> None:
        direction = self._advance().text
        kind = None
        if self._at("reg") or self._at("wire") or self._at("logic"):
            kind = self._advance().text
        msb, lsb = 0, 0
        if self._at("["):
            msb, lsb = self._parse_range()
        width = abs(msb - lsb) + 1
        while True:
            name = self._eat_ident().text
            ports.append(PortDecl(name, direction, width, msb, lsb))
            if kind is not None and kind != "wire":
                nets.append(NetDecl(name, kind, width, msb, lsb))
            if not self._eat_if(","):
                break
        self._eat(";")

    def _parse_net_decl(self, nets: list[NetDecl]) -> None:
        kind = self._advance().text
        msb, lsb = 0, 0
        if self._at("["):
            msb, lsb = self._parse_range()
        width = abs(msb - lsb) + 1
        while True:
            name = self._eat_ident().text
            nets.append(NetDecl(name, kind, width, msb, lsb))
            if not self._eat_if(","):
                break
        self._eat(";")

    # ---- always blocks ----

    def parse_always_block(self) -> AlwaysBlock:
        start_tok = self._eat("always")
        self._eat("@")
        entries: list[SensEntry] = []
        if self._eat_if("*"):
            entries.append(SensEntry("star", None))
        else:
            self._eat("(")
            if self._eat_if("*"):
                entries.append(SensEntry("star", None))
            else:
                while True:
                    if self._at("posedge") or self._at("negedge"):
                        edge = self._advance().text
                        entries.append(SensEntry(edge, self._eat_ident().text))
                    else:
                        entries.append(SensEntry("level", self._eat_ident().text))
                    if not (self._eat_if("or") or self._eat_if(",")):
                        break
            self._eat(")")
        body = self.parse_statement()
        end = self._prev_end()
        return AlwaysBlock(
            sensitivity=SensitivityList(tuple(entries)),
            body=body,
            span=(start_tok.offset, end),
        )

    def _prev_end(self) -> int:
        tok = self.tokens[self.pos - 1]
        return tok.offset + len(tok.text)

    # ---- statements ----

    def parse_statement(self) -> Stmt:
        if self._at("begin"):
            return self._parse_block()
        if self._at("if"):
            return self._parse_if()
        if self._at("case") or self._at("casez") or self._at("casex"):
            return self._parse_case()
        if self._at_type(TokenType.IDENT) or self._at("{"):
            return self._parse_assignment()
        raise self._error(f"unexpected '{self._cur().text}' in statement position")

    def _parse_block(self) -> Block:
        self._eat("begin")
        statements: list[Stmt] = []
        while not self._at("end"):
            if self.at_eof():
                raise self._error("missing 'end'")
            statements.append(self.parse_statement())
        self._eat("end")
        return Block(tuple(statements))

    def _parse_if(self) -> If:
        self._eat("if")
        self._eat("(")
        cond = self.parse_expression()
        self._eat(")")
        then_stmt = self.parse_statement()
        else_stmt: Optional[Stmt] = None
        if self._eat_if("else"):
            else_stmt = self.parse_statement()
        return If(cond, then_stmt, else_stmt)

    def _parse_case(self) -> Case:
        kind = self._advance().text
        self._eat("(")
        subject = self.parse_expression()
        self._eat(")")
        items: list[CaseItem] = []
        default: Optional[Stmt] = None
        while not self._at("endcase"):
            if self.at_eof():
                raise self._error("missing 'endcase'")
            if self._eat_if("default"):
                self._eat_if(":")
                if default is not None:
                    raise self._error("duplicate default item")
                default = self.parse_statement()
                continue
            labels = [self.parse_expression()]
            while self._eat_if(","):
                labels.append(self.parse_expression())
            self._eat(":")
            items.append(CaseItem(tuple(labels), self.parse_statement()))
        self._eat("endcase")
        if not items and default is None:
            raise self._error("case statement has no items")
        return Case(kind, subject, tuple(items), default)

    def _parse_assignment(self) -> Stmt:
        lhs = self._parse_lvalue()
        if self._eat_if("<="):
            rhs = self.parse_expression()
            self._eat(";")
            return NonBlockingAssign(lhs, rhs)
        self._eat("=")
        rhs = self.parse_expression()
        self._eat(";")
        return BlockingAssign(lhs, rhs)

    def _parse_lvalue(self) -> Expr:
        if self._at("{"):
            self._advance()
            parts = [self._parse_lvalue()]
            while self._eat_if(","):
                parts.append(self._parse_lvalue())
            self._eat("}")
            return Concat(tuple(parts))
        base: Expr = Ident(self._eat_ident().text)
        while self._at("["):
            base = self._parse_index_or_slice(base)
        return base

    # ---- expressions ----

    def parse_expression(self) -> Expr:
        return self._parse_ternary()

    def _parse_ternary(self) -> Expr:
        cond = self._parse_binary(0)
        if self._eat_if("?"):
            then_val = self._parse_ternary()
            self._eat(":")
            else_val = self._parse_ternary()
            return Ternary(cond, then_val, else_val)
        return cond

    def _parse_binary(self, level: int) -> Expr:
        if level >= len(_BINARY_LEVELS):
            return self._parse_unary()
        left = self._parse_binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self._cur().type is TokenType.SYMBOL and self._cur().text in ops:
            op = self._advance().text
            right = self._parse_binary(level + 1)
            left = Binary(op, left, right)
        return left

    def _parse_unary(self) -> Expr:
        tok = self._cur()
        if tok.type is TokenType.SYMBOL and tok.text in _UNARY_OPS:
            self._advance()
            return Unary(tok.text, self._parse_unary())
        return self._parse_primary()

    def _parse_primary(self) -> Expr:
        tok = self._cur()
        if tok.type is TokenType.IDENT:
            self._advance()
            base: Expr = Ident(tok.text)
            while self._at("["):
                base = self._parse_index_or_slice(base)
            return base
        if tok.type is TokenType.NUMBER:
            self._advance()
            return Literal(width=None, base="dec", digits=tok.text.replace("_", ""))
        if tok.type is TokenType.BASED:
            self._advance()
            return _decode_based(tok)
        if self._eat_if("("):
            expr = self.parse_expression()
            self._eat(")")
            return expr
        if self._at("{"):
            self._advance()
            parts = [self.parse_expression()]
            while self._eat_if(","):
                parts.append(self.parse_expression())
            self._eat("}")
            return Concat(tuple(parts))
        shown = tok.text if tok.type is not TokenType.EOF else "end of input"
        raise ParseError(f"expected expression, found '{shown}'", tok.line, tok.column)

    def _parse_index_or_slice(self, base: Expr) -> Expr:
        self._eat("[")
        first = self.parse_expression()
        if self._eat_if(":"):
            second = self.parse_expression()
            self._eat("]")
            return Slice(base, first, second)
        self._eat("]")
        return Index(base, first)


_BASE_CODES = {"b": "bin", "o": "oct", "d": "dec", "h": "hex"}


def _decode_based(tok: Token) -> Literal:
    text = tok.text
    quote = text.index("'")
    width = int(text[:quote].replace("_", "")) if quote > 0 else None
    rest = text[quote + 1:]
    if rest[0] in "sS":
        rest = rest[1:]
    base = _BASE_CODES[rest[0].lower()]
    digits = rest[1:].replace("_", "").lower()
    return Literal(width=width, base=base, digits=digits)
