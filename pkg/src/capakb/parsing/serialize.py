"""Deterministic Turtle writer."""

from __future__ import annotations

import re
from collections import defaultdict

from .. import vocab
from ..terms import IRI, LITERAL, SKOLEM_PREFIX, Term, TermDict, TripleStore

_LOCAL = re.compile(r"^[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?$")
_INTEGER = re.compile(r"^[+-]?\d+$")
_DECIMAL = re.compile(r"^[+-]?\d*\.\d+$")
_TYPE = Term.iri(vocab.RDF_TYPE)
_FIRST = Term.iri(vocab.RDF_FIRST)
_REST = Term.iri(vocab.RDF_REST)
_NIL = Term.iri(vocab.RDF_NIL)


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
    )


class TermWriter:
    def __init__(self, prefixes: dict[str, str]):
        # longest namespace wins
        self.prefixes = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def iri(self, value: str) -> str:
        if value.startswith(SKOLEM_PREFIX):
            return "_:b" + value[len(SKOLEM_PREFIX):]
        for prefix, ns in self.prefixes:
            if ns and value.startswith(ns):
                local = value[len(ns):]
                if local == "" or _LOCAL.match(local):
                    return f"{prefix}:{local}"
        return f"<{value}>"

    def term(self, term: Term) -> str:
        if term.kind == IRI:
            return self.iri(term.lexical)
        if term.kind == LITERAL:
            lex = term.lexical
            if term.datatype == vocab.XSD_INTEGER and _INTEGER.match(lex):
                return lex
            if term.datatype == vocab.XSD_DECIMAL and _DECIMAL.match(lex):
                return lex
            text = f'"{_escape(lex)}"'
            if term.lang:
                return f"{text}@{term.lang}"
            if term.datatype:
                return f"{text}^^{self.iri(term.datatype)}"
            return text
        return f"_:{term.lexical}"

    def predicate(self, term: Term) -> str:
        return "a" if term == _TYPE else self.term(term)


def _sort_key(term: Term):
    if term.is_skolem:
        tail = term.lexical[len(SKOLEM_PREFIX):]
        return (1, int(tail) if tail.isdigit() else 0, tail)
    return (0 if term.kind == IRI else 2, term.lexical, term.datatype or "", term.lang or "")


def write_turtle(triples, prefixes: dict[str, str]) -> str:
    """Render ``(s, p, o, derived)`` term quadruples as Turtle."""
    writer = TermWriter(prefixes)
    rows: dict[Term, dict[Term, dict[Term, bool]]] = defaultdict(lambda: defaultdict(dict))
    refs: dict[Term, int] = defaultdict(int)
    for s, p, o, derived in triples:
        rows[s][p][o] = derived
        if o.is_skolem:
            refs[o] += 1

    inline: set[Term] = set()
    lists: dict[Term, list[Term]] = {}

    def plain(node) -> bool:
        return refs.get(node) == 1 and not any(d for po in rows[node].values() for d in po.values())

    for node in rows:
        if node.is_skolem and plain(node):
            inline.add(node)
    # drop nodes that sit on a cycle of inlined nodes
    for node in list(inline):
        seen = set()
        cur = [node]
        while cur:
            nxt = []
            for n in cur:
                for po in rows.get(n, {}).values():
                    for o in po:
                        if o in inline and o not in seen:
                            seen.add(o)
                            nxt.append(o)
            cur = nxt
        if node in seen:
            inline.discard(node)
    for node in inline:
        items = []
        cell = node
        ok = True
        visited = set()
        while cell != _NIL:
            po = rows.get(cell)
            if cell in visited or po is None or set(po) != {_FIRST, _REST} or len(po[_FIRST]) != 1 or len(po[_REST]) != 1:
                ok = False
                break
            if cell is not node and cell not in inline:
                ok = False
                break
            visited.add(cell)
            items.append(next(iter(po[_FIRST])))
            cell = next(iter(po[_REST]))
        if ok:
            lists[node] = items

    def render(o: Term) -> str:
        if o in lists:
            return "(" + "".join(" " + render(i) for i in lists[o]) + " )"
        if o in inline and o in rows:
            parts = []
            for p in sorted(rows[o], key=_sort_key):
                objs = ", ".join(render(x) for x in sorted(rows[o][p], key=_sort_key))
                parts.append(f"{writer.predicate(p)} {objs}")
            return "[ " + " ; ".join(parts) + " ]"
        return writer.term(o)

    list_cells = set()
    for head, _ in lists.items():
        cell = head
        while cell != _NIL:
            list_cells.add(cell)
            cell = next(iter(rows[cell][_REST]))

    out = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes.items())]
    blocks = []
    for s in sorted(rows, key=_sort_key):
        if s in inline or s in list_cells:
            continue
        lines = []
        preds = sorted(rows[s], key=_sort_key)
        for pi, p in enumerate(preds):
            objs = sorted(rows[s][p], key=_sort_key)
            for oi, o in enumerate(objs):
                last_obj = oi == len(objs) - 1
                sep = (" ." if pi == len(preds) - 1 else " ;") if last_obj else " ,"
                text = render(o)
                if oi == 0:
                    head = writer.term(s) + " " if pi == 0 else "    "
                    line = f"{head}{writer.predicate(p)} {text}{sep}"
                else:
                    line = f"        {text}{sep}"
                if rows[s][p][o]:
                    line += "  # derived"
                lines.append(line)
        blocks.append("\n".join(lines))
    text = "\n".join(out)
    if blocks:
        text += "\n\n" + "\n\n".join(blocks)
    return text + "\n"


def serialize_turtle(
    store: TripleStore,
    terms: TermDict,
    prefixes: dict[str, str],
    *,
    include_derived: bool = False,
    extra=(),
) -> str:
    """Write the store (asserted triples, plus derived ones when asked).

    ``extra`` holds additional ``(s, p, o)`` term triples written as
    asserted, e.g. schema axioms that live outside the store.
    """
    resolve = terms.resolve
    quads = []
    for t in store:
        derived = not store.is_asserted(t)
        if derived and not include_derived:
            continue
        quads.append((resolve(t[0]), resolve(t[1]), resolve(t[2]), derived))
    for s, p, o in extra:
        quads.append((s, p, o, False))
    return write_turtle(quads, prefixes)
