"""Tokenizer shared by the Turtle and rule-file parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import SourceSpan


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    value: object = None

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.text)))


_PN_CHARS = r"[A-Za-z0-9_\-·À-￿]"
_PN_LOCAL_CHARS = r"[A-Za-z0-9_\-.:%·À-￿]"

_SPEC = [
    ("WS", r"[ \t\r\f]+"),
    ("NEWLINE", r"\n"),
    ("COMMENT", r"#[^\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\s]*>"),
    ("STRING_LONG", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"' + r"|'(?:[^'\\\n]|\\.)*'"),
    ("BNODE", r"_:" + _PN_CHARS + r"(?:" + _PN_LOCAL_CHARS + r"*" + _PN_CHARS + r")?"),
    ("DIRECTIVE", r"@(?:prefix|base)\b"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DATATYPE", r"\^\^"),
    ("ARROW", r"->"),
    ("NUMBER", r"[+-]?(?:\d+\.\d+(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)"),
    ("VAR", r"\?[A-Za-z_][A-Za-z0-9_]*"),
    (
        "PNAME",
        r"(?:[A-Za-z](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?:"
        r"(?:" + _PN_CHARS + r"|:|%[0-9A-Fa-f]{2})(?:" + _PN_LOCAL_CHARS + r"*(?:" + _PN_CHARS + r"|:))?"
        r"|[A-Za-z](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?:",
    ),
    ("WORD", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[.;,\[\]()]"),
    ("COLON", r":"),
]

_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _SPEC))

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


def unescape(body: str) -> str:
    def sub(m):
        esc = m.group(1)
        if esc[0] in "uU" and len(esc) > 1:
            return chr(int(esc[1:], 16))
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        raise ValueError(f"bad escape \\{esc}")

    return _ESCAPE_RE.sub(sub, body)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; unrecognised characters become ERROR tokens."""
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _MASTER.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            tokens.append(Token("ERROR", text[pos], line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        tok = m.group()
        if kind == "NEWLINE":
            line += 1
            line_start = m.end()
        elif kind == "STRING_LONG":
            tokens.append(Token("STRING", tok, line, col, tok[3:-3]))
            nl = tok.count("\n")
            if nl:
                line += nl
                line_start = pos + tok.rfind("\n") + 1
        elif kind == "STRING":
            tokens.append(Token("STRING", tok, line, col, tok[1:-1]))
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens
