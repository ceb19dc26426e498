"""Dictionary-encoded terms and an indexed triple store.

Terms are interned to dense integer ids; triples are ``(s, p, o)`` tuples of
those ids.  The store keeps three nested-dict indexes (spo, pos, osp) and an
asserted/derived flag per triple.
"""

from __future__ import annotations

import copy
import re
from typing import Iterator, NamedTuple

IRI = "iri"
BNODE = "bnode"
LITERAL = "literal"

SKOLEM_PREFIX = "urn:capakb:bnode:"

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


class TermError(ValueError):
    pass


class Term(NamedTuple):
    """An RDF term; a tuple so hashing and comparison stay in C."""

    kind: str
    lexical: str
    datatype: str | None = None
    lang: str | None = None

    @classmethod
    def iri(cls, value: str) -> Term:
        return cls(IRI, value)

    @classmethod
    def literal(cls, value: str, datatype: str | None = None, lang: str | None = None) -> Term:
        return cls(LITERAL, value, datatype, lang)

    @classmethod
    def bnode(cls, label: str) -> Term:
        return cls(BNODE, label)

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_skolem(self) -> bool:
        return self.kind == IRI and self.lexical.startswith(SKOLEM_PREFIX)

    def __repr__(self) -> str:
        if self.kind == LITERAL:
            return f"Term.literal({self.lexical!r}, {self.datatype!r}, {self.lang!r})"
        return f"Term.{self.kind}({self.lexical!r})"

    def __str__(self) -> str:
        if self.kind == IRI:
            return f"<{self.lexical}>"
        if self.kind == BNODE:
            return f"_:{self.lexical}"
        text = '"' + self.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text


class Triple(NamedTuple):
    s: int
    p: int
    o: int


class TermDict:
    """Bijective mapping between :class:`Term` values and dense ids."""

    def __init__(self):
        self._ids: dict[Term, int] = {}
        self._terms: list[Term] = []

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: Term) -> bool:
        return term in self._ids

    def intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is not None:
            return tid
        if term.kind not in (IRI, BNODE, LITERAL):
            raise TermError(f"unknown term kind {term.kind!r}")
        if not term.lexical and term.kind != LITERAL:
            raise TermError("empty lexical form")
        if term.kind == IRI and not _SCHEME.match(term.lexical):
            raise TermError(f"malformed IRI (no scheme): {term.lexical!r}")
        tid = len(self._terms)
        self._terms.append(term)
        self._ids[term] = tid
        return tid

    def iri(self, value: str) -> int:
        return self.intern(Term(IRI, value))

    def lookup(self, term: Term) -> int | None:
        return self._ids.get(term)

    def lookup_iri(self, value: str) -> int | None:
        return self._ids.get(Term(IRI, value))

    def resolve(self, tid: int) -> Term:
        return self._terms[tid]

    def lexical(self, tid: int) -> str:
        return self._terms[tid].lexical

    def __iter__(self) -> Iterator[tuple[int, Term]]:
        return iter(enumerate(self._terms))


def _add(index: dict, a: int, b: int, c: int) -> None:
    inner = index.get(a)
    if inner is None:
        index[a] = {b: {c}}
        return
    leaf = inner.get(b)
    if leaf is None:
        inner[b] = {c}
    else:
        leaf.add(c)


def _remove(index: dict, a: int, b: int, c: int) -> None:
    inner = index[a]
    leaf = inner[b]
    leaf.discard(c)
    if not leaf:
        del inner[b]
        if not inner:
            del index[a]


class FrozenStoreError(RuntimeError):
    pass


class TripleStore:
    """Set of triples with spo/pos/osp indexes and an asserted flag.

    ``match`` yields in ascending order of the index it uses.  The engine
    reads the indexes directly through :meth:`objects`, :meth:`subjects` and
    :meth:`pairs`, which skip the sort.
    """

    def __init__(self):
        self.spo: dict[int, dict[int, set[int]]] = {}
        self.pos: dict[int, dict[int, set[int]]] = {}
        self.osp: dict[int, dict[int, set[int]]] = {}
        # triple -> True when asserted, False when derived
        self._flags: dict[Triple, bool] = {}
        self._asserted_count = 0
        self._frozen = False

    def __len__(self) -> int:
        return len(self._flags)

    def __contains__(self, triple) -> bool:
        return triple in self._flags

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._flags)

    @property
    def asserted_count(self) -> int:
        return self._asserted_count

    @property
    def derived_count(self) -> int:
        return len(self._flags) - self._asserted_count

    def _check_writable(self):
        if self._frozen:
            raise FrozenStoreError("store snapshot is read-only")

    def insert(self, triple, asserted: bool = True) -> bool:
        """Add a triple; returns True iff it was absent.

        Re-inserting a derived triple as asserted upgrades its flag.
        """
        self._check_writable()
        t = Triple(*triple)
        flag = self._flags.get(t)
        if flag is not None:
            if asserted and not flag:
                self._flags[t] = True
                self._asserted_count += 1
            return False
        s, p, o = t
        self._flags[t] = asserted
        if asserted:
            self._asserted_count += 1
        _add(self.spo, s, p, o)
        _add(self.pos, p, o, s)
        _add(self.osp, o, s, p)
        return True

    def insert_new_derived(self, triple) -> Triple:
        """Engine fast path: add a triple known to be absent, flagged derived."""
        t = tuple.__new__(Triple, triple)
        s, p, o = t
        self._flags[t] = False
        spo, pos, osp = self.spo, self.pos, self.osp
        inner = spo.get(s)
        if inner is None:
            spo[s] = {p: {o}}
        else:
            leaf = inner.get(p)
            if leaf is None:
                inner[p] = {o}
            else:
                leaf.add(o)
        inner = pos.get(p)
        if inner is None:
            pos[p] = {o: {s}}
        else:
            leaf = inner.get(o)
            if leaf is None:
                inner[o] = {s}
            else:
                leaf.add(s)
        inner = osp.get(o)
        if inner is None:
            osp[o] = {s: {p}}
        else:
            leaf = inner.get(s)
            if leaf is None:
                inner[s] = {p}
            else:
                leaf.add(p)
        return t

    def erase(self, triple) -> bool:
        self._check_writable()
        t = Triple(*triple)
        flag = self._flags.pop(t, None)
        if flag is None:
            return False
        if flag:
            self._asserted_count -= 1
        s, p, o = t
        _remove(self.spo, s, p, o)
        _remove(self.pos, p, o, s)
        _remove(self.osp, o, s, p)
        return True

    def is_asserted(self, triple) -> bool:
        return self._flags.get(Triple(*triple), False)

    def set_asserted(self, triple, asserted: bool) -> None:
        """Change the flag of a present triple."""
        self._check_writable()
        t = Triple(*triple)
        old = self._flags[t]
        if old != asserted:
            self._flags[t] = asserted
            self._asserted_count += 1 if asserted else -1

    def asserted(self) -> Iterator[Triple]:
        return (t for t, a in self._flags.items() if a)

    def derived(self) -> Iterator[Triple]:
        return (t for t, a in self._flags.items() if not a)

    def clear_derived(self) -> int:
        doomed = list(self.derived())
        for t in doomed:
            self.erase(t)
        return len(doomed)

    # unsorted index access for the rule engine

    def objects(self, s: int, p: int) -> set[int]:
        return self.spo.get(s, {}).get(p, _EMPTY)

    def subjects(self, p: int, o: int) -> set[int]:
        return self.pos.get(p, {}).get(o, _EMPTY)

    def pairs(self, p: int) -> Iterator[tuple[int, int]]:
        for o, subjects in self.pos.get(p, {}).items():
            for s in subjects:
                yield s, o

    def match(self, s: int | None = None, p: int | None = None, o: int | None = None) -> Iterator[Triple]:
        """Yield triples matching the bound positions, sorted by the chosen index."""
        if s is not None:
            by_p = self.spo.get(s, {})
            preds = [p] if p is not None else sorted(by_p)
            for pp in preds:
                objs = by_p.get(pp, _EMPTY)
                if o is not None:
                    if o in objs:
                        yield Triple(s, pp, o)
                    continue
                for oo in sorted(objs):
                    yield Triple(s, pp, oo)
        elif p is not None:
            by_o = self.pos.get(p, {})
            objs = [o] if o is not None else sorted(by_o)
            for oo in objs:
                for ss in sorted(by_o.get(oo, _EMPTY)):
                    yield Triple(ss, p, oo)
        elif o is not None:
            by_s = self.osp.get(o, {})
            for ss in sorted(by_s):
                for pp in sorted(by_s[ss]):
                    yield Triple(ss, pp, o)
        else:
            for ss in sorted(self.spo):
                by_p = self.spo[ss]
                for pp in sorted(by_p):
                    for oo in sorted(by_p[pp]):
                        yield Triple(ss, pp, oo)

    def index_triples(self, name: str) -> set[Triple]:
        """All triples as reconstructed from one index (for consistency audits)."""
        index = getattr(self, name)
        out = set()
        for a, inner in index.items():
            for b, leaf in inner.items():
                for c in leaf:
                    if name == "spo":
                        out.add(Triple(a, b, c))
                    elif name == "pos":
                        out.add(Triple(c, a, b))
                    else:
                        out.add(Triple(b, c, a))
        return out

    def snapshot(self) -> TripleStore:
        """Read-only deep copy, safe to hand to other threads."""
        snap = copy.deepcopy(self)
        snap._frozen = True
        return snap

    def copy(self) -> TripleStore:
        dup = copy.deepcopy(self)
        dup._frozen = False
        return dup


_EMPTY: frozenset = frozenset()
