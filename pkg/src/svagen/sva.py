"""Syntax checking and normalization for a practical SVA subset.

The checker accepts the property shapes that occur in concurrent-assertion
corpora for small RTL blocks:

    property <name>;
      [@(posedge|negedge <clk>)] [disable iff (<expr>)]
      <sequence> |-> <sequence>;       (or |=>)
    endproperty

    assert property (<name or inline body>);

Sequences are boolean expressions optionally chained with ``##N`` or
``##[m:n]`` delays.  The checker is not a full IEEE 1800 parser; it exists to
catch the malformation classes that actually poison a knowledge base:
unbalanced delimiters and event controls buried inside boolean expressions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import EmptyInput

KEYWORDS = frozenset(
    {
        "property",
        "endproperty",
        "assert",
        "assume",
        "cover",
        "disable",
        "iff",
        "posedge",
        "negedge",
        "or",
        "and",
        "not",
        "else",
    }
)

SYSTEM_FUNCTIONS = frozenset({"$past", "$rose", "$fell", "$stable", "$changed", "$onehot", "$onehot0", "$countones", "$isunknown"})

# Longest match first so "|->" never lexes as "|" "-" ">".
_SYMBOLS = (
    "|->",
    "|=>",
    "===",
    "!==",
    "##",
    "&&",
    "||",
    "==",
    "!=",
    "<=",
    ">=",
    "<<",
    ">>",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    ";",
    ":",
    ",",
    "@",
    "?",
    "!",
    "~",
    "&",
    "|",
    "^",
    "+",
    "-",
    "*",
    "/",
    "%",
    "<",
    ">",
    "=",
    ".",
)

_OPENERS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {")": "(", "]": "[", "}": "{"}


class TokType(enum.Enum):
    IDENT = "ident"
    SYSFUNC = "sysfunc"
    NUMBER = "number"
    BASED = "based"
    KEYWORD = "keyword"
    SYMBOL = "symbol"
    EOF = "eof"


@dataclass(frozen=True)
class Tok:
    type: TokType
    text: str
    position: int


@dataclass(frozen=True)
class SyntaxViolation:
    """A single syntax defect: ``kind`` is a stable class label, ``reason``
    a human-readable detail, ``position`` a character offset into the text."""

    position: int
    reason: str
    kind: str

    def __str__(self) -> str:
        return f"{self.kind} at offset {self.position}: {self.reason}"


class _Reject(Exception):
    def __init__(self, violation: SyntaxViolation) -> None:
        super().__init__(str(violation))
        self.violation = violation


def _reject(position: int, kind: str, reason: str) -> None:
    raise _Reject(SyntaxViolation(position=position, reason=reason, kind=kind))


_BASE_DIGITS = {
    "b": "01xzXZ?_",
    "o": "01234567xzXZ?_",
    "d": "0123456789_",
    "h": "0123456789abcdefABCDEFxzXZ?_",
}


def tokenize_sva(text: str) -> List[Tok]:
    """Lex ``text`` into SVA tokens.  Raises _Reject (internally) for
    characters outside the subset; callers outside this module should go
    through check_sva_syntax."""
    toks: List[Tok] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                _reject(i, "unterminated-comment", "block comment never closes")
            i = j + 2
            continue
        if ch == "$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if j == i + 1:
                # bare $ is the unbounded delay marker inside ##[m:$]
                toks.append(Tok(TokType.SYMBOL, "$", i))
                i = j
                continue
            toks.append(Tok(TokType.SYSFUNC, name, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            low = word.lower()
            if low in KEYWORDS:
                toks.append(Tok(TokType.KEYWORD, low, i))
            else:
                toks.append(Tok(TokType.IDENT, word, i))
            i = j
            continue
        if ch.isdigit() or (ch == "'" and i + 1 < n):
            tok, i = _lex_number(text, i)
            toks.append(tok)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Tok(TokType.SYMBOL, sym, i))
                i += len(sym)
                break
        else:
            _reject(i, "unknown-token", f"unexpected character {ch!r}")
    toks.append(Tok(TokType.EOF, "", n))
    return toks


def _lex_number(text: str, start: int) -> Tuple[Tok, int]:
    n = len(text)
    i = start
    while i < n and (text[i].isdigit() or text[i] == "_"):
        i += 1
    if i < n and text[i] == "'":
        j = i + 1
        if j < n and text[j] in "sS":
            j += 1
        if j >= n or text[j].lower() not in _BASE_DIGITS:
            _reject(start, "unknown-token", "malformed based literal")
        base = text[j].lower()
        j += 1
        digits_start = j
        allowed = _BASE_DIGITS[base]
        while j < n and text[j] in allowed:
            j += 1
        if j == digits_start:
            _reject(start, "unknown-token", "based literal has no digits")
        return Tok(TokType.BASED, text[start:j], start), j
    return Tok(TokType.NUMBER, text[start:i], start), i


def _check_balance(toks: List[Tok]) -> None:
    stack: List[Tok] = []
    for tok in toks:
        if tok.type is not TokType.SYMBOL:
            continue
        if tok.text in _OPENERS:
            stack.append(tok)
        elif tok.text in _CLOSERS:
            if not stack or stack[-1].text != _CLOSERS[tok.text]:
                _reject(
                    tok.position,
                    "unbalanced-parenthesis",
                    f"unmatched {tok.text!r}",
                )
            stack.pop()
    if stack:
        _reject(
            stack[-1].position,
            "unbalanced-parenthesis",
            f"{stack[-1].text!r} is never closed",
        )


class _Checker:
    def __init__(self, toks: List[Tok]) -> None:
        self.toks = toks
        self.pos = 0

    @property
    def cur(self) -> Tok:
        return self.toks[self.pos]

    def advance(self) -> Tok:
        tok = self.cur
        if tok.type is not TokType.EOF:
            self.pos += 1
        return tok

    def at_symbol(self, text: str) -> bool:
        return self.cur.type is TokType.SYMBOL and self.cur.text == text

    def at_keyword(self, text: str) -> bool:
        return self.cur.type is TokType.KEYWORD and self.cur.text == text

    def eat_symbol(self, text: str) -> Tok:
        if not self.at_symbol(text):
            _reject(self.cur.position, "bad-structure", f"expected {text!r}")
        return self.advance()

    def eat_keyword(self, text: str) -> Tok:
        if not self.at_keyword(text):
            _reject(self.cur.position, "bad-structure", f"expected keyword {text!r}")
        return self.advance()

    def eat_ident(self) -> Tok:
        if self.cur.type is not TokType.IDENT:
            _reject(self.cur.position, "bad-structure", "expected identifier")
        return self.advance()

    # --- grammar ---

    def check_unit(self) -> None:
        if (
            self.cur.type is TokType.IDENT
            and self.toks[self.pos + 1].type is TokType.SYMBOL
            and self.toks[self.pos + 1].text == ":"
        ):
            # `label: assert property (...)`
            self.advance()
            self.advance()
        if self.at_keyword("property"):
            self.check_property_decl()
        elif self.at_keyword("assert") or self.at_keyword("assume") or self.at_keyword("cover"):
            self.check_assert_stmt()
        else:
            _reject(
                self.cur.position,
                "bad-structure",
                "expected 'property' declaration or 'assert property' statement",
            )
        if self.cur.type is not TokType.EOF:
            _reject(self.cur.position, "bad-structure", "trailing tokens after property")

    def check_property_decl(self) -> None:
        self.eat_keyword("property")
        self.eat_ident()
        self.eat_symbol(";")
        self.check_body()
        self.eat_symbol(";")
        if not self.at_keyword("endproperty"):
            _reject(self.cur.position, "bad-structure", "expected 'endproperty'")
        self.advance()
        # an optional label-free `assert property (<name>);` may follow in the
        # same text; VERT-style entries ship them together
        if self.at_keyword("assert") or self.at_keyword("assume") or self.at_keyword("cover"):
            self.check_assert_stmt()

    def check_assert_stmt(self) -> None:
        self.advance()  # assert / assume / cover
        self.eat_keyword("property")
        self.eat_symbol("(")
        # either a bare property name or an inline body
        if self.cur.type is TokType.IDENT and self.toks[self.pos + 1].type is TokType.SYMBOL and self.toks[self.pos + 1].text == ")":
            self.advance()
        else:
            self.check_body()
        self.eat_symbol(")")
        if self.at_keyword("else"):
            # tolerate `else $error(...)` action blocks
            self.advance()
            if self.cur.type is TokType.SYSFUNC:
                self.advance()
                if self.at_symbol("("):
                    self.skip_parenthesized()
        self.eat_symbol(";")

    def check_body(self) -> None:
        if self.at_symbol("@"):
            self.check_clocking()
        if self.at_keyword("disable"):
            self.advance()
            self.eat_keyword("iff")
            self.eat_symbol("(")
            self.check_expr()
            self.eat_symbol(")")
        self.check_sequence()
        if not (self.at_symbol("|->") or self.at_symbol("|=>")):
            _reject(
                self.cur.position,
                "missing-implication",
                "property body has no |-> or |=> implication",
            )
        self.advance()
        self.check_sequence()

    def check_clocking(self) -> None:
        self.eat_symbol("@")
        self.eat_symbol("(")
        if not (self.at_keyword("posedge") or self.at_keyword("negedge")):
            _reject(self.cur.position, "bad-structure", "clocking event needs posedge or negedge")
        self.advance()
        self.eat_ident()
        self.eat_symbol(")")

    def check_sequence(self) -> None:
        if self.at_symbol("##"):
            self.check_delay()
        self.check_expr()
        while self.at_symbol("##"):
            self.check_delay()
            self.check_expr()

    def check_delay(self) -> None:
        self.eat_symbol("##")
        if self.cur.type is TokType.NUMBER:
            self.advance()
            return
        if self.at_symbol("["):
            self.advance()
            if self.cur.type is not TokType.NUMBER:
                _reject(self.cur.position, "bad-structure", "delay range needs a lower bound")
            self.advance()
            self.eat_symbol(":")
            if self.cur.type is TokType.NUMBER or self.at_symbol("$"):
                self.advance()
            else:
                _reject(self.cur.position, "bad-structure", "delay range needs an upper bound")
            self.eat_symbol("]")
            return
        _reject(self.cur.position, "bad-structure", "## must be followed by a count or [m:n]")

    # boolean expressions; precedence is irrelevant for validity so a flat
    # operand/operator walk is enough
    _BINARY = frozenset(
        {
            "&&",
            "||",
            "==",
            "!=",
            "===",
            "!==",
            "<",
            "<=",
            ">",
            ">=",
            "+",
            "-",
            "*",
            "/",
            "%",
            "&",
            "|",
            "^",
            "<<",
            ">>",
        }
    )

    def check_expr(self) -> None:
        self.check_operand()
        while True:
            if self.cur.type is TokType.SYMBOL and self.cur.text in self._BINARY:
                self.advance()
                self.check_operand()
                continue
            if self.at_symbol("?"):
                self.advance()
                self.check_expr()
                self.eat_symbol(":")
                self.check_expr()
                continue
            return

    def check_operand(self) -> None:
        if self.at_symbol("@"):
            _reject(
                self.cur.position,
                "event-control-in-expression",
                "event control @(...) is not a boolean operand",
            )
        while self.cur.type is TokType.SYMBOL and self.cur.text in ("!", "~", "-", "&", "|", "^", "+"):
            self.advance()
            if self.at_symbol("@"):
                _reject(
                    self.cur.position,
                    "event-control-in-expression",
                    "event control @(...) is not a boolean operand",
                )
        tok = self.cur
        if tok.type is TokType.IDENT:
            self.advance()
            self.check_select_suffix()
            return
        if tok.type in (TokType.NUMBER, TokType.BASED):
            self.advance()
            return
        if tok.type is TokType.SYSFUNC:
            if tok.text not in SYSTEM_FUNCTIONS:
                _reject(tok.position, "unknown-token", f"unknown system function {tok.text}")
            self.advance()
            self.eat_symbol("(")
            if not self.at_symbol(")"):
                self.check_expr()
                while self.at_symbol(","):
                    self.advance()
                    self.check_expr()
            self.eat_symbol(")")
            return
        if tok.type is TokType.SYMBOL and tok.text == "(":
            self.advance()
            self.check_expr()
            self.eat_symbol(")")
            return
        if tok.type is TokType.SYMBOL and tok.text == "{":
            self.advance()
            self.check_expr()
            while self.at_symbol(","):
                self.advance()
                self.check_expr()
            self.eat_symbol("}")
            return
        _reject(tok.position, "bad-structure", "expected an operand")

    def check_select_suffix(self) -> None:
        while self.at_symbol("["):
            self.advance()
            self.check_expr()
            if self.at_symbol(":"):
                self.advance()
                self.check_expr()
            self.eat_symbol("]")

    def skip_parenthesized(self) -> None:
        # balance was already verified, so a depth counter suffices
        self.eat_symbol("(")
        depth = 1
        while depth > 0:
            tok = self.advance()
            if tok.type is TokType.EOF:
                _reject(tok.position, "bad-structure", "unterminated action block")
            if tok.type is TokType.SYMBOL and tok.text == "(":
                depth += 1
            elif tok.type is TokType.SYMBOL and tok.text == ")":
                depth -= 1


def check_sva_syntax(sva_text: str) -> Optional[SyntaxViolation]:
    """Return None when ``sva_text`` is a well-formed property in the subset,
    otherwise the first SyntaxViolation found.

    Delimiter balance is checked before structure, so an extra ')' is always
    reported as unbalanced-parenthesis rather than some downstream confusion.
    """
    if not sva_text or not sva_text.strip():
        raise EmptyInput("sva text is empty")
    try:
        toks = tokenize_sva(sva_text)
        _check_balance(toks)
        _Checker(toks).check_unit()
    except _Reject as exc:
        return exc.violation
    return None


_NO_SPACE_BEFORE = frozenset({")", "]", "}", ";", ","})
_NO_SPACE_AFTER = frozenset({"(", "[", "{", "@", "!", "~", "##"})


def normalize_sva(sva_text: str) -> str:
    """Canonical single-space rendering of a syntactically valid property.

    Keywords are lowercased, statements end their line at ';', delays render
    tight (##1, ##[1:3]) and range colons bind tight inside brackets.  The
    output re-tokenizes to the same stream, so the function is idempotent.
    """
    violation = check_sva_syntax(sva_text)
    if violation is not None:
        raise ValueError(f"cannot normalize invalid sva: {violation}")
    toks = tokenize_sva(sva_text)

    parts: List[str] = []
    bracket_depth = 0
    prev: Optional[Tok] = None
    for tok in toks:
        if tok.type is TokType.EOF:
            break
        text = tok.text
        if tok.type is TokType.SYMBOL:
            if text == "[":
                bracket_depth += 1
            elif text == "]":
                bracket_depth -= 1
        sep = " "
        if prev is None:
            sep = ""
        elif prev.type is TokType.SYMBOL and prev.text == ";":
            sep = "\n"
        elif prev.type is TokType.SYMBOL and prev.text in _NO_SPACE_AFTER:
            sep = ""
        elif tok.type is TokType.SYMBOL and text in _NO_SPACE_BEFORE:
            sep = ""
        elif tok.type is TokType.SYMBOL and text == "(" and prev.type is TokType.SYSFUNC:
            sep = ""
        elif bracket_depth > 0 and (
            (tok.type is TokType.SYMBOL and text in (":", "$"))
            or (prev.type is TokType.SYMBOL and prev.text in (":", "["))
        ):
            sep = ""
        elif tok.type is TokType.SYMBOL and text == "[" and prev.type is TokType.SYMBOL and prev.text == "##":
            sep = ""
        parts.append(sep + text)
        prev = tok
    return "".join(parts)
