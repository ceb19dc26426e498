"""Recognise OWL/RDFS schema triples as axioms, and write axioms back as triples."""

from __future__ import annotations

from collections import defaultdict

from .. import vocab
from ..diagnostics import ERROR, WARNING, Diagnostic
from ..ontology import (
    EquivalentTo,
    Intersection,
    InverseProperties,
    Named,
    PropertyChain,
    SomeValuesFrom,
    SubClassOf,
    SubPropertyOf,
    TransitiveProperty,
)
from ..terms import Term

_T = Term.iri

TYPE = _T(vocab.RDF_TYPE)
FIRST = _T(vocab.RDF_FIRST)
REST = _T(vocab.RDF_REST)
NIL = _T(vocab.RDF_NIL)
SUBCLASS = _T(vocab.RDFS_SUBCLASS_OF)
SUBPROPERTY = _T(vocab.RDFS_SUBPROPERTY_OF)
TRANSITIVE = _T(vocab.OWL_TRANSITIVE_PROPERTY)
INVERSE = _T(vocab.OWL_INVERSE_OF)
EQUIVALENT = _T(vocab.OWL_EQUIVALENT_CLASS)
RESTRICTION = _T(vocab.OWL_RESTRICTION)
ON_PROPERTY = _T(vocab.OWL_ON_PROPERTY)
SOME_VALUES = _T(vocab.OWL_SOME_VALUES_FROM)
INTERSECTION = _T(vocab.OWL_INTERSECTION_OF)
CHAIN = _T(vocab.OWL_PROPERTY_CHAIN_AXIOM)

# declarations and annotations kept as plain facts without a warning
_BENIGN_TYPES = {
    _T(vocab.OWL + x) for x in ("Class", "ObjectProperty", "DatatypeProperty", "NamedIndividual", "Ontology", "Thing")
} | {_T(vocab.RDFS + "Class"), _T(vocab.RDF + "Property")}
_BENIGN_PREDICATES = {_T(vocab.RDFS + x) for x in ("label", "comment", "seeAlso", "isDefinedBy")}


def _is_vocab(term: Term) -> bool:
    return term.is_iri and (term.lexical.startswith(vocab.OWL) or term.lexical.startswith(vocab.RDFS))


class _Malformed(Exception):
    pass


class _Unsupported(Exception):
    pass


class _Recognizer:
    def __init__(self, triples, spans):
        self.triples = list(triples)
        self.spans = spans or {}
        self.by_subject: dict[Term, list] = defaultdict(list)
        for t in self.triples:
            self.by_subject[t[0]].append(t)
        self.consumed: set = set()
        self.axioms: list = []
        self.diags: list[Diagnostic] = []

    def span(self, triple):
        return self.spans.get(triple)

    def values(self, node: Term, pred: Term) -> list[Term]:
        return [o for (_, p, o) in self.by_subject.get(node, ()) if p == pred]

    def only(self, node: Term, pred: Term, what: str) -> Term:
        vals = self.values(node, pred)
        if len(vals) != 1:
            raise _Malformed(f"{what}: expected exactly one {pred.lexical.rsplit('#', 1)[-1]}, found {len(vals)}")
        return vals[0]

    def read_list(self, node: Term, used: list) -> list[Term]:
        items = []
        seen = set()
        while node != NIL:
            if not node.is_skolem or node in seen:
                raise _Malformed(f"malformed collection at {node.lexical}")
            seen.add(node)
            items.append(self.only(node, FIRST, "collection"))
            nxt = self.only(node, REST, "collection")
            used.extend([(node, FIRST, items[-1]), (node, REST, nxt)])
            node = nxt
        return items

    def read_expr(self, node: Term, used: list, depth: int = 0):
        if not node.is_skolem:
            return Named(node)
        if depth > 8:
            raise _Malformed("class expression nested too deeply")
        types = self.values(node, TYPE)
        if RESTRICTION in types or self.values(node, ON_PROPERTY):
            props = self.values(node, ON_PROPERTY)
            if not props:
                raise _Malformed("owl:Restriction without owl:onProperty")
            prop = self.only(node, ON_PROPERTY, "restriction")
            filler_node = self.values(node, SOME_VALUES)
            if not filler_node:
                raise _Unsupported("only owl:someValuesFrom restrictions are supported")
            filler_node = self.only(node, SOME_VALUES, "restriction")
            filler = filler_node if not filler_node.is_skolem else self.read_expr(filler_node, used, depth + 1)
            used.extend([(node, ON_PROPERTY, prop), (node, SOME_VALUES, filler_node)])
            if RESTRICTION in types:
                used.append((node, TYPE, RESTRICTION))
            return SomeValuesFrom(prop, filler)
        if self.values(node, INTERSECTION):
            head = self.only(node, INTERSECTION, "intersection")
            used.append((node, INTERSECTION, head))
            members = self.read_list(head, used)
            owl_class = _T(vocab.OWL + "Class")
            if owl_class in types:
                used.append((node, TYPE, owl_class))
            return Intersection(self.read_expr(m, used, depth + 1) for m in members)
        raise _Unsupported("unsupported anonymous class expression")

    def take(self, axiom, used) -> None:
        self.axioms.append(axiom)
        self.consumed.update(used)

    def run(self):
        for t in self.triples:
            if t in self.consumed:
                continue
            s, p, o = t
            span = self.span(t)
            try:
                if p == SUBCLASS:
                    if s.is_skolem or o.is_skolem:
                        raise _Unsupported("rdfs:subClassOf is only supported between named classes")
                    self.take(SubClassOf(s, o, span), [t])
                elif p == EQUIVALENT:
                    used = [t]
                    left = self.read_expr(s, used) if s.is_skolem else s
                    if o.is_skolem:
                        expr = self.read_expr(o, used)
                    else:
                        expr = Named(o)
                    self.take(EquivalentTo(left, expr, span), used)
                elif p == TYPE and o == TRANSITIVE:
                    self.take(TransitiveProperty(s, span), [t])
                elif p == INVERSE:
                    self.take(InverseProperties(s, o, span), [t])
                elif p == SUBPROPERTY:
                    self.take(SubPropertyOf(s, o, span), [t])
                elif p == CHAIN:
                    used = [t]
                    chain = self.read_list(o, used)
                    self.take(PropertyChain(chain, s, span), used)
            except _Unsupported as err:
                self.diags.append(Diagnostic(WARNING, f"{err}; triple kept as a fact", span))
            except _Malformed as err:
                self.diags.append(Diagnostic(ERROR, str(err), span))

        facts = []
        for t in self.triples:
            if t in self.consumed:
                continue
            facts.append(t)
            s, p, o = t
            if p in (FIRST, REST, ON_PROPERTY, SOME_VALUES, INTERSECTION) or (p == TYPE and o == RESTRICTION):
                continue  # leftover pieces of a structure already reported
            if p == TYPE and o in _BENIGN_TYPES or p in _BENIGN_PREDICATES:
                continue
            if p in (SUBCLASS, EQUIVALENT, CHAIN):
                continue
            if _is_vocab(p) or (p == TYPE and _is_vocab(o)):
                self.diags.append(
                    Diagnostic(WARNING, f"unrecognised vocabulary <{(o if p == TYPE else p).lexical}>; triple kept as a fact", self.span(t))
                )
        return self.axioms, facts, self.diags


def recognize_axioms(triples, spans=None):
    """Split parsed triples into ``(axioms, facts, diagnostics)``.

    Triples that make up a recognised axiom (including its blank-node
    structure) are consumed; everything else is returned as a fact.
    """
    return _Recognizer(triples, spans).run()


# axioms back to triples


def _expr_triples(expr, fresh, out) -> Term:
    if isinstance(expr, Named):
        return expr.cls
    if not isinstance(expr, (SomeValuesFrom, Intersection)):
        return expr  # a bare term
    node = fresh()
    if isinstance(expr, SomeValuesFrom):
        out.append((node, TYPE, RESTRICTION))
        out.append((node, ON_PROPERTY, expr.property))
        out.append((node, SOME_VALUES, _expr_triples(expr.filler, fresh, out)))
        return node
    members = [_expr_triples(c, fresh, out) for c in expr.conjuncts]
    out.append((node, INTERSECTION, _list_triples(members, fresh, out)))
    return node


def _list_triples(items, fresh, out) -> Term:
    if not items:
        return NIL
    head = cell = fresh()
    for k, item in enumerate(items):
        out.append((cell, FIRST, item))
        nxt = fresh() if k + 1 < len(items) else NIL
        out.append((cell, REST, nxt))
        cell = nxt
    return head


def axiom_triples(axiom, fresh) -> list:
    """Render one axiom (over :class:`Term` values) as triples; ``fresh()`` makes skolem nodes."""
    out: list = []
    if isinstance(axiom, SubClassOf):
        out.append((axiom.sub, SUBCLASS, axiom.sup))
    elif isinstance(axiom, EquivalentTo):
        left = _expr_triples(axiom.cls, fresh, out)
        out.append((left, EQUIVALENT, _expr_triples(axiom.expr, fresh, out)))
    elif isinstance(axiom, TransitiveProperty):
        out.append((axiom.prop, TYPE, TRANSITIVE))
    elif isinstance(axiom, InverseProperties):
        out.append((axiom.first, INVERSE, axiom.second))
    elif isinstance(axiom, SubPropertyOf):
        out.append((axiom.sub, SUBPROPERTY, axiom.sup))
    elif isinstance(axiom, PropertyChain):
        out.append((axiom.implies, CHAIN, _list_triples(list(axiom.chain), fresh, out)))
    else:
        raise TypeError(axiom)
    return out
