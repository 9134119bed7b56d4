"""Tokenizer for the supported Verilog subset."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from svagen.errors import ParseError

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "logic",
    "always", "begin", "end", "if", "else", "case", "casez", "casex",
    "endcase", "default", "posedge", "negedge", "or", "assign",
}

# Constructs outside the subset, rejected with a clear message instead of a
# generic "unexpected token".
UNSUPPORTED_KEYWORDS = {
    "generate", "endgenerate", "for", "while", "repeat", "forever",
    "function", "endfunction", "task", "endtask", "initial", "parameter",
    "localparam", "genvar", "integer", "real", "signed", "fork", "join",
}

# Longest-match-first operator and punctuation tokens.
_SYMBOLS = [
    "===", "!==", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "@", "(", ")", "[", "]", "{", "}", ";", ",", ":", "?", "#",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "=", ".",
]


class TokenType(Enum):
    IDENT = auto()
    NUMBER = auto()  # plain decimal
    BASED = auto()  # sized/based literal such as 4'b1010
    KEYWORD = auto()
    SYMBOL = auto()
    EOF = auto()


@dataclass(frozen=True)
class Token:
    type: TokenType
    text: str
    line: int
    column: int
    offset: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def tokenize(text: str, source_name: str = "<text>") -> list[Token]:
    """Tokenize Verilog source, skipping whitespace and comments.

    Raises ParseError on characters outside the subset.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance((j - i) if j != -1 else (n - i))
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j == -1:
                raise ParseError("unterminated block comment", line, col)
            advance(j + 2 - i)
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            if word in UNSUPPORTED_KEYWORDS:
                raise ParseError(f"unsupported construct '{word}'", line, col)
            ttype = TokenType.KEYWORD if word in KEYWORDS else TokenType.IDENT
            tokens.append(Token(ttype, word, line, col, i))
            advance(j - i)
            continue
        if ch.isdigit() or ch == "'":
            tok, length = _lex_number(text, i, line, col)
            tokens.append(tok)
            advance(length)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(TokenType.SYMBOL, sym, line, col, i))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)

    tokens.append(Token(TokenType.EOF, "", line, col, n))
    return tokens


_BASE_CODES = {"b": "bin", "o": "oct", "d": "dec", "h": "hex"}
_BASE_DIGITS = {
    "bin": set("01xz_"),
    "oct": set("01234567xz_"),
    "dec": set("0123456789_"),
    "hex": set("0123456789abcdefxz_"),
}


def _lex_number(text: str, i: int, line: int, col: int) -> tuple[Token, int]:
    n = len(text)
    j = i
    while j < n and (text[j].isdigit() or text[j] == "_"):
        j += 1
    if j < n and text[j] == "'":
        width_text = text[i:j].replace("_", "")
        k = j + 1
        if k < n and text[k] in "sS":
            k += 1
        if k >= n or text[k].lower() not in _BASE_CODES:
            raise ParseError("malformed based literal", line, col)
        base = _BASE_CODES[text[k].lower()]
        k += 1
        d0 = k
        allowed = _BASE_DIGITS[base]
        while k < n and text[k].lower() in allowed:
            k += 1
        if k == d0:
            raise ParseError("based literal has no digits", line, col)
        return Token(TokenType.BASED, text[i:k], line, col, i), k - i
    if j == i:
        raise ParseError("malformed number", line, col)
    return Token(TokenType.NUMBER, text[i:j], line, col, i), j - i
