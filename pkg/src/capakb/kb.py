"""The knowledge base: terms, store, schema, compiled program and provenance."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from . import vocab
from .diagnostics import Diagnostic, DiagnosticError, has_errors
from .ontology import EquivalentTo, InferenceProgram, _named, compile_program, map_axiom, map_rule, validate
from .parsing import OntologyDocument, RuleDocument, SkolemCounter, axiom_triples, parse_rules, parse_turtle
from .parsing.serialize import TermWriter, serialize_turtle
from .provenance import ProvenanceIndex
from .reasoner import DEFAULT_ITERATION_CAP, MaterializationStats, engine_for, materialize
from .terms import SKOLEM_PREFIX, Term, TermDict, Triple, TripleStore


class UnknownTermError(KeyError):
    def __init__(self, message: str):
        super().__init__(message)

    def __str__(self) -> str:
        return self.args[0]


def local_name(iri: str) -> str:
    for sep in ("#", "/", ":"):
        if sep in iri:
            tail = iri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return iri


class KnowledgeBase:
    """Asserted facts plus schema, kept materialized on demand.

    Schema axioms and user rules live beside the store, not in it; the
    store holds asserted facts and everything derived from them.
    """

    def __init__(self, prefixes: dict[str, str] | None = None, *, iteration_cap: int = DEFAULT_ITERATION_CAP):
        self.terms = TermDict()
        self.vocab = vocab.Vocab.intern(self.terms)
        self.store = TripleStore()
        self.provenance = ProvenanceIndex()
        self.prefixes: dict[str, str] = dict(vocab.STANDARD_PREFIXES)
        if prefixes:
            self.prefixes.update(prefixes)
        self.axioms: list = []  # over term ids
        self.rules: list = []  # over term ids
        self.iteration_cap = iteration_cap
        self.skolem = SkolemCounter()
        self.materialized = False
        self._program: InferenceProgram | None = None

    # loading

    @classmethod
    def from_documents(cls, *docs, **kwargs) -> KnowledgeBase:
        kb = cls(**kwargs)
        for doc in docs:
            kb.add_document(doc)
        return kb

    @classmethod
    def load(
        cls,
        ontology_paths: Sequence[str | Path],
        rules_paths: Sequence[str | Path] = (),
        *,
        prefixes: dict[str, str] | None = None,
        strict: bool = True,
        **kwargs,
    ) -> KnowledgeBase:
        """Parse files into a new knowledge base; raises DiagnosticError on errors when ``strict``."""
        kb = cls(prefixes, **kwargs)
        diags = kb.load_files(ontology_paths, rules_paths)
        if strict and has_errors(diags):
            raise DiagnosticError(diags)
        return kb

    def load_files(self, ontology_paths=(), rules_paths=()) -> list[Diagnostic]:
        diags: list[Diagnostic] = []
        for path in ontology_paths:
            doc = parse_turtle(Path(path).read_text(encoding="utf-8"), skolem=self.skolem, prefixes=self.prefixes)
            diags.extend(d.with_source(str(path)) for d in doc.diagnostics)
            if doc.ok:
                self.add_document(doc)
        for path in rules_paths:
            rdoc = parse_rules(Path(path).read_text(encoding="utf-8"), prefixes=self.prefixes)
            diags.extend(d.with_source(str(path)) for d in rdoc.diagnostics)
            if rdoc.ok:
                self.add_rules(rdoc)
        return diags

    def add_document(self, doc: OntologyDocument) -> None:
        self.prefixes.update(doc.prefixes)
        intern, insert = self.terms.intern, self.store.insert
        for s, p, o in doc.facts:
            insert(Triple(intern(s), intern(p), intern(o)), asserted=True)
        self.axioms.extend(map_axiom(ax, self._intern_any) for ax in doc.axioms)
        self.rules.extend(map_rule(r, self._intern_any) for r in doc.rules)
        self._invalidate()

    def add_rules(self, rules: RuleDocument | Iterable) -> None:
        if isinstance(rules, RuleDocument):
            self.prefixes.update(rules.prefixes)
            rules = rules.rules
        self.rules.extend(map_rule(r, self._intern_any) for r in rules)
        self._invalidate()

    def _intern_any(self, x) -> int:
        if isinstance(x, Term):
            return self.terms.intern(x)
        if isinstance(x, int):
            return x
        return self.terms.iri(x)

    def _invalidate(self) -> None:
        self._program = None
        self.materialized = False

    # names

    def intern_triple(self, triple) -> Triple:
        return Triple(*(self._intern_any(x) for x in triple))

    def expand(self, name: str) -> str:
        """Expand ``prefix:local`` or ``<iri>`` to a full IRI string."""
        if name.startswith("<") and name.endswith(">"):
            return name[1:-1]
        if name == "a":
            return vocab.RDF_TYPE
        prefix, sep, local = name.partition(":")
        if sep and prefix in self.prefixes:
            return self.prefixes[prefix] + local
        if sep and not local.startswith("//") and prefix not in ("http", "https", "urn"):
            raise UnknownTermError(f"unknown prefix {prefix}: in {name}")
        return name

    def id(self, name: str) -> int:
        """Id of an already-known term named by prefixed name or IRI."""
        tid = self.terms.lookup_iri(self.expand(name))
        if tid is None:
            raise UnknownTermError(f"unknown term {name}")
        return tid

    def triple(self, s: str, p: str, o: str, *, create: bool = False) -> Triple:
        if create:
            return Triple(self.terms.iri(self.expand(s)), self.terms.iri(self.expand(p)), self.terms.iri(self.expand(o)))
        return Triple(self.id(s), self.id(p), self.id(o))

    def name(self, tid: int) -> str:
        return TermWriter(self.prefixes).term(self.terms.resolve(tid))

    def label(self, tid: int) -> str:
        term = self.terms.resolve(tid)
        return local_name(term.lexical) if term.is_iri else term.lexical

    def format_triple(self, t) -> str:
        w = TermWriter(self.prefixes)
        s, p, o = (self.terms.resolve(x) for x in t)
        return f"{w.term(s)} {w.predicate(p)} {w.term(o)}"

    # reasoning

    @property
    def program(self) -> InferenceProgram:
        if self._program is None:
            self._program = compile_program(self.axioms, self.rules, self.vocab, label=self.label)
        return self._program

    def validate(self) -> list[Diagnostic]:
        return validate(self.axioms, self.rules)

    def materialize(self) -> MaterializationStats:
        stats = materialize(self.store, self.program, self.provenance, iteration_cap=self.iteration_cap)
        self.materialized = True
        return stats

    def ensure_materialized(self) -> None:
        if not self.materialized:
            self.rebuild()

    def rebuild(self) -> MaterializationStats:
        from .incremental import rebuild

        return rebuild(self)

    @property
    def engine(self):
        return engine_for(self.program)

    def assert_fact(self, triple):
        from .incremental import assert_fact

        return assert_fact(self, triple)

    def retract_fact(self, triple):
        from .incremental import retract_fact

        return retract_fact(self, triple)

    # schema helpers

    def defined_classes(self) -> set[int]:
        """Named classes with an equivalence definition."""
        return {_named(ax.cls) for ax in self.axioms if isinstance(ax, EquivalentTo)}

    def schema_triples(self) -> list:
        """Axioms rendered back to term triples, with fresh skolem nodes."""
        out = []
        resolve = self.terms.resolve
        # numbered after every skolem already handed out, without consuming the counter
        fresh = SkolemCounter(self.skolem.next_value).fresh
        for ax in self.axioms:
            out.extend(axiom_triples(map_axiom(ax, resolve), fresh))
        return out

    def to_turtle(self, *, include_derived: bool = False, include_schema: bool = True) -> str:
        extra = self.schema_triples() if include_schema else ()
        used = {
            t.lexical for triple in extra for t in triple if t.is_iri and not t.lexical.startswith(SKOLEM_PREFIX)
        }
        for triple in self.store:
            for x in triple:
                term = self.terms.resolve(x)
                if term.is_iri:
                    used.add(term.lexical)
                elif term.datatype:
                    used.add(term.datatype)
        prefixes = {p: ns for p, ns in self.prefixes.items() if any(u.startswith(ns) for u in used)}
        return serialize_turtle(self.store, self.terms, prefixes, include_derived=include_derived, extra=extra)

    def asserted_set(self) -> set:
        return set(self.store.asserted())

    def snapshot(self) -> TripleStore:
        return self.store.snapshot()
