"""Parser for the supported Turtle subset.

Covers ``@prefix``/``@base`` (and the SPARQL-style ``PREFIX``/``BASE``),
absolute and prefixed IRIs, ``a``, predicate/object lists, blank-node
property lists, collections, string/number/boolean literals and comments.
Blank nodes are replaced by skolem IRIs as they are read.  Errors are
collected per statement; parsing resumes after the next ``.``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import urljoin

from .. import vocab
from ..diagnostics import ERROR, Diagnostic, SourceSpan, has_errors
from ..terms import SKOLEM_PREFIX, Term
from .lexer import Token, tokenize, unescape


class SkolemCounter:
    """Hands out ``urn:capakb:bnode:<n>`` IRIs; share one across documents loaded together."""

    def __init__(self, start: int = 0):
        self.next_value = start

    def fresh(self) -> Term:
        n = self.next_value
        self.next_value += 1
        return Term.iri(f"{SKOLEM_PREFIX}{n}")


@dataclass
class OntologyDocument:
    prefixes: dict[str, str] = field(default_factory=dict)
    triples: list[tuple[Term, Term, Term]] = field(default_factory=list)
    axioms: list = field(default_factory=list)
    facts: list[tuple[Term, Term, Term]] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    spans: dict = field(default_factory=dict, repr=False)
    rules: list = field(default_factory=list)
    base: str | None = None

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]


class _Abort(Exception):
    def __init__(self, message: str, token: Token):
        self.message = message
        self.token = token


_RDF_TYPE = Term.iri(vocab.RDF_TYPE)
_RDF_FIRST = Term.iri(vocab.RDF_FIRST)
_RDF_REST = Term.iri(vocab.RDF_REST)
_RDF_NIL = Term.iri(vocab.RDF_NIL)


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.tokens[self.i]
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.peek
        if tok.kind == "ERROR":
            raise _Abort(tok.value, tok)
        if not self.at(kind, text):
            wanted = what or repr(text or kind)
            got = "end of input" if tok.kind == "EOF" else repr(tok.text)
            raise _Abort(f"expected {wanted}, found {got}", tok)
        return self.next()

    def resync(self) -> None:
        """Skip to just past the next statement terminator."""
        while not self.at("EOF"):
            tok = self.next()
            if tok.kind == "PUNCT" and tok.text == ".":
                return


class PrefixTable:
    def __init__(self, prefixes: dict[str, str] | None = None, base: str | None = None):
        self.prefixes = dict(prefixes or {})
        self.base = base

    def expand(self, tok: Token) -> Term:
        if tok.kind == "IRIREF":
            iri = unescape(tok.text[1:-1])
            if self.base and not _has_scheme(iri):
                iri = urljoin(self.base, iri)
            if not _has_scheme(iri):
                raise _Abort(f"relative IRI <{iri}> with no @base", tok)
            return Term.iri(iri)
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise _Abort(f"unknown prefix {prefix + ':'!r}", tok)
        local = local.replace("\\", "")
        return Term.iri(self.prefixes[prefix] + local)


def _has_scheme(iri: str) -> bool:
    head, sep, _ = iri.partition(":")
    return bool(sep) and head[:1].isalpha() and all(c.isalnum() or c in "+-." for c in head)


def parse_directive(ts: TokenStream, table: PrefixTable) -> None:
    """Consume one prefix/base directive at the head of ``ts``."""
    tok = ts.next()
    keyword = tok.text.lstrip("@").lower()
    if keyword == "prefix":
        name = ts.peek
        if name.kind == "COLON":
            prefix = ""
            ts.next()
        elif name.kind == "PNAME" and name.text.endswith(":") and name.text.count(":") == 1:
            prefix = name.text[:-1]
            ts.next()
        else:
            raise _Abort("expected a prefix name like 'ex:'", name)
        iri_tok = ts.expect("IRIREF", what="an IRI in <...>")
        table.prefixes[prefix] = table.expand(iri_tok).lexical
    else:
        iri_tok = ts.expect("IRIREF", what="an IRI in <...>")
        table.base = table.expand(iri_tok).lexical
    if tok.kind == "DIRECTIVE":
        ts.expect("PUNCT", ".")


def at_directive(ts: TokenStream) -> bool:
    tok = ts.peek
    return tok.kind == "DIRECTIVE" or (tok.kind == "WORD" and tok.text.upper() in ("PREFIX", "BASE"))


class _TurtleParser:
    def __init__(self, text: str, skolem: SkolemCounter, prefixes: dict[str, str] | None):
        self.ts = TokenStream(tokenize(text))
        self.table = PrefixTable(prefixes)
        self.skolem = skolem
        self.labels: dict[str, Term] = {}
        self.doc = OntologyDocument()
        self.pending: list = []
        self.stmt_span: SourceSpan | None = None

    def emit(self, s: Term, p: Term, o: Term) -> None:
        self.pending.append((s, p, o))

    def parse(self) -> OntologyDocument:
        ts = self.ts
        while not ts.at("EOF"):
            start = ts.peek
            self.pending = []
            self.stmt_span = start.span
            try:
                if at_directive(ts):
                    parse_directive(ts, self.table)
                else:
                    self.triples_statement()
                    ts.expect("PUNCT", ".", what="'.' at end of statement")
            except _Abort as err:
                self.doc.diagnostics.append(Diagnostic(ERROR, err.message, err.token.span))
                if not (err.token.kind == "PUNCT" and err.token.text == "."):
                    ts.resync()
                else:
                    ts.next()
                continue
            for t in self.pending:
                if t not in self.doc.spans:
                    self.doc.spans[t] = self.stmt_span
                    self.doc.triples.append(t)
        self.doc.prefixes = dict(self.table.prefixes)
        self.doc.base = self.table.base
        return self.doc

    def triples_statement(self) -> None:
        ts = self.ts
        if ts.at("PUNCT", "["):
            subject = self.blank_property_list()
            if ts.at("PUNCT", "."):
                return
        else:
            subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Term:
        tok = self.ts.peek
        if tok.kind in ("IRIREF", "PNAME"):
            return self.table.expand(self.ts.next())
        if tok.kind == "BNODE":
            return self.bnode(self.ts.next())
        if tok.kind == "PUNCT" and tok.text == "(":
            return self.collection()
        if tok.kind == "ERROR":
            raise _Abort(tok.value, tok)
        raise _Abort(f"expected a subject, found {tok.text or 'end of input'!r}", tok)

    def bnode(self, tok: Token) -> Term:
        label = tok.text[2:]
        term = self.labels.get(label)
        if term is None:
            term = self.labels[label] = self.skolem.fresh()
        return term

    def predicate_object_list(self, subject: Term) -> None:
        ts = self.ts
        while True:
            pred = self.verb()
            self.object_list(subject, pred)
            if not ts.at("PUNCT", ";"):
                return
            while ts.at("PUNCT", ";"):
                ts.next()
            if ts.at("PUNCT", ".") or ts.at("PUNCT", "]"):
                return

    def verb(self) -> Term:
        tok = self.ts.peek
        if tok.kind == "WORD" and tok.text == "a":
            self.ts.next()
            return _RDF_TYPE
        if tok.kind in ("IRIREF", "PNAME"):
            return self.table.expand(self.ts.next())
        if tok.kind == "ERROR":
            raise _Abort(tok.value, tok)
        raise _Abort(f"expected a predicate, found {tok.text or 'end of input'!r}", tok)

    def object_list(self, subject: Term, pred: Term) -> None:
        while True:
            self.emit(subject, pred, self.object())
            if not self.ts.at("PUNCT", ","):
                return
            self.ts.next()

    def object(self) -> Term:
        ts = self.ts
        tok = ts.peek
        if tok.kind in ("IRIREF", "PNAME"):
            return self.table.expand(ts.next())
        if tok.kind == "BNODE":
            return self.bnode(ts.next())
        if tok.kind == "PUNCT" and tok.text == "[":
            return self.blank_property_list()
        if tok.kind == "PUNCT" and tok.text == "(":
            return self.collection()
        if tok.kind in ("STRING", "NUMBER") or (tok.kind == "WORD" and tok.text in ("true", "false")):
            return self.literal()
        if tok.kind == "ERROR":
            raise _Abort(tok.value, tok)
        raise _Abort(f"expected an object, found {tok.text or 'end of input'!r}", tok)

    def literal(self) -> Term:
        ts = self.ts
        tok = ts.next()
        if tok.kind == "NUMBER":
            text = tok.text
            if "e" in text or "E" in text:
                return Term.literal(text, vocab.XSD + "double")
            if "." in text:
                return Term.literal(text, vocab.XSD_DECIMAL)
            return Term.literal(text, vocab.XSD_INTEGER)
        if tok.kind == "WORD":
            return Term.literal(tok.text, vocab.XSD + "boolean")
        try:
            value = unescape(tok.value)
        except ValueError as err:
            raise _Abort(str(err), tok) from None
        if ts.at("LANGTAG"):
            return Term.literal(value, lang=ts.next().text[1:])
        if ts.at("DATATYPE"):
            ts.next()
            dt_tok = ts.peek
            if dt_tok.kind not in ("IRIREF", "PNAME"):
                raise _Abort("expected a datatype IRI after '^^'", dt_tok)
            return Term.literal(value, self.table.expand(ts.next()).lexical)
        return Term.literal(value)

    def blank_property_list(self) -> Term:
        ts = self.ts
        ts.expect("PUNCT", "[")
        node = self.skolem.fresh()
        if not ts.at("PUNCT", "]"):
            self.predicate_object_list(node)
        ts.expect("PUNCT", "]", what="']'")
        return node

    def collection(self) -> Term:
        ts = self.ts
        ts.expect("PUNCT", "(")
        items = []
        while not ts.at("PUNCT", ")"):
            if ts.at("EOF"):
                raise _Abort("unterminated collection", ts.peek)
            items.append(self.object())
        ts.next()
        if not items:
            return _RDF_NIL
        head = node = self.skolem.fresh()
        for k, item in enumerate(items):
            self.emit(node, _RDF_FIRST, item)
            nxt = self.skolem.fresh() if k + 1 < len(items) else _RDF_NIL
            self.emit(node, _RDF_REST, nxt)
            node = nxt
        return head


def parse_turtle(
    text: str,
    *,
    skolem: SkolemCounter | None = None,
    prefixes: dict[str, str] | None = None,
    recognize: bool = True,
) -> OntologyDocument:
    """Parse Turtle text into an :class:`OntologyDocument`.

    Errors are reported in ``doc.diagnostics``; statements that fail are
    dropped whole.  With ``recognize`` (the default) schema triples are
    split off into ``doc.axioms``.
    """
    parser = _TurtleParser(text, skolem or SkolemCounter(), prefixes)
    doc = parser.parse()
    if recognize:
        from .axioms import recognize_axioms

        axioms, facts, diags = recognize_axioms(doc.triples, doc.spans)
        doc.axioms = axioms
        doc.facts = facts
        doc.diagnostics.extend(diags)
    else:
        doc.facts = list(doc.triples)
    return doc

