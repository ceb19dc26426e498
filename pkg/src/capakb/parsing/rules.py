"""Parser for ``.rules`` files.

::

    @prefix ex: <http://ex.org/> .
    rule "grasping": ex:Agent(?a), ex:hasCapability(?a, ?m) -> ex:canAct(?a, ?m) .
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..diagnostics import ERROR, Diagnostic, has_errors
from ..ontology import ClassAtom, HornRule, PropertyAtom
from .lexer import Token, tokenize
from .turtle import PrefixTable, TokenStream, _Abort, at_directive, parse_directive


@dataclass
class RuleDocument:
    rules: list[HornRule] = field(default_factory=list)
    prefixes: dict[str, str] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)


def _atom(ts: TokenStream, table: PrefixTable):
    """Parse ``name(?v)`` or ``name(?v, ?w)``; returns (atom, [(var, token)])."""
    name_tok = ts.peek
    if name_tok.kind not in ("PNAME", "IRIREF"):
        raise _Abort(f"expected an atom, found {name_tok.text or 'end of input'!r}", name_tok)
    ts.next()
    iri = table.expand(name_tok)
    ts.expect("PUNCT", "(", what="'(' after predicate name")
    args: list[Token] = [ts.expect("VAR", what="a ?variable")]
    while ts.at("PUNCT", ","):
        ts.next()
        args.append(ts.expect("VAR", what="a ?variable"))
    ts.expect("PUNCT", ")", what="')'")
    names = [a.text[1:] for a in args]
    if len(args) == 1:
        return ClassAtom(iri, names[0]), list(zip(names, args))
    if len(args) == 2:
        return PropertyAtom(iri, names[0], names[1]), list(zip(names, args))
    raise _Abort(f"atom {name_tok.text} takes one or two arguments, got {len(args)}", name_tok)


def _rule(ts: TokenStream, table: PrefixTable, diags: list) -> HornRule | None:
    kw = ts.next()  # 'rule'
    name_tok = ts.expect("STRING", what="a quoted rule name")
    ts.expect("COLON", what="':' after the rule name")
    body = []
    bound = set()
    atom, args = _atom(ts, table)
    body.append(atom)
    bound.update(n for n, _ in args)
    while ts.at("PUNCT", ","):
        ts.next()
        atom, args = _atom(ts, table)
        body.append(atom)
        bound.update(n for n, _ in args)
    ts.expect("ARROW", what="'->'")
    head_tok = ts.peek
    if head_tok.kind not in ("PNAME", "IRIREF"):
        raise _Abort("rule head must be a single atom", head_tok)
    head, head_args = _atom(ts, table)
    if ts.at("PUNCT", ","):
        raise _Abort("rule head must be a single atom", ts.peek)
    ts.expect("PUNCT", ".", what="'.' at end of rule")
    unsafe = [(n, tok) for n, tok in head_args if n not in bound]
    for n, tok in unsafe:
        diags.append(
            Diagnostic(ERROR, f"unsafe rule {name_tok.value!r}: head variable ?{n} does not occur in the body", tok.span)
        )
    if unsafe:
        return None
    return HornRule(name_tok.value, body, head, kw.span)


def parse_rules(text: str, *, prefixes: dict[str, str] | None = None) -> RuleDocument:
    """Parse a rule file; statements with errors are reported and skipped."""
    ts = TokenStream(tokenize(text))
    table = PrefixTable(prefixes)
    doc = RuleDocument()
    while not ts.at("EOF"):
        tok = ts.peek
        try:
            if at_directive(ts):
                parse_directive(ts, table)
            elif tok.kind == "WORD" and tok.text == "rule":
                rule = _rule(ts, table, doc.diagnostics)
                if rule is not None:
                    doc.rules.append(rule)
            elif tok.kind == "ERROR":
                raise _Abort(tok.value, tok)
            else:
                raise _Abort(f"expected 'rule' or a prefix declaration, found {tok.text!r}", tok)
        except _Abort as err:
            doc.diagnostics.append(Diagnostic(ERROR, err.message, err.token.span))
            if err.token.kind == "PUNCT" and err.token.text == ".":
                ts.next()
            else:
                ts.resync()
    doc.prefixes = dict(table.prefixes)
    return doc
