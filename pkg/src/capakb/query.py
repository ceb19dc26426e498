"""Capability and affordance queries, derivation trees and DOT export."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .terms import Triple

EX = "http://ex.org/"


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class CapabilityVocab:
    has_capability: str = EX + "hasCapability"
    capability_root: str = EX + "Capability"
    has_component: str = EX + "hasComponent"


@dataclass
class CapabilityReport:
    agent: int
    capability_individual: int | None
    capabilities: set[int] = field(default_factory=set)
    # capabilities whose class carries an equivalence definition
    defined: set[int] = field(default_factory=set)
    components: set[int] = field(default_factory=set)

    @property
    def no_capability_individual(self) -> bool:
        return self.capability_individual is None


def _lookup(kb, iri: str) -> int | None:
    return kb.terms.lookup_iri(iri)


def subclasses_of(kb, root: int) -> set[int]:
    """Reflexive-transitive subclasses of ``root`` read from the materialized store."""
    sc = kb.vocab.subclass_of
    found = {root}
    queue = deque([root])
    while queue:
        c = queue.popleft()
        for sub in kb.store.subjects(sc, c):
            if sub not in found:
                found.add(sub)
                queue.append(sub)
    return found


def capabilities_of(kb, agent: int, cvocab: CapabilityVocab = CapabilityVocab()) -> CapabilityReport:
    kb.ensure_materialized()
    store = kb.store
    has_cap = _lookup(kb, cvocab.has_capability)
    root = _lookup(kb, cvocab.capability_root)
    has_comp = _lookup(kb, cvocab.has_component)

    components = set(store.objects(agent, has_comp)) if has_comp is not None else set()
    individuals = sorted(store.objects(agent, has_cap)) if has_cap is not None else []
    if len(individuals) > 1:
        names = ", ".join(kb.name(i) for i in individuals)
        raise QueryError(f"{kb.name(agent)} has {len(individuals)} capability individuals ({names}); expected one")
    if not individuals:
        return CapabilityReport(agent, None, components=components)
    capa = individuals[0]
    if root is None:
        return CapabilityReport(agent, capa, components=components)
    types = set(store.objects(capa, kb.vocab.type))
    caps = types & subclasses_of(kb, root)
    caps.discard(root)
    return CapabilityReport(agent, capa, caps, caps & kb.defined_classes(), components)


def instances_of(kb, cls: int | None) -> set[int]:
    if cls is None:
        return set()
    kb.ensure_materialized()
    return set(kb.store.subjects(kb.vocab.type, cls))


def rule_head_properties(kb) -> set[int]:
    """Properties concluded by user rules (the default affordance properties)."""
    return {r.head[1] for r in kb.program if r.schema == "R9" and r.head[1] != kb.vocab.type}


def affordances_of(kb, agent: int, properties=None) -> set[tuple[int, int]]:
    kb.ensure_materialized()
    if properties is None:
        properties = rule_head_properties(kb)
    return {(p, o) for p in properties for o in kb.store.objects(agent, p)}


# explanations

ASSERTED = "asserted"
DERIVED = "derived"


@dataclass
class DerivationNode:
    fact: Triple
    kind: str
    rule: str | None = None
    children: list[DerivationNode] = field(default_factory=list)
    truncated: bool = False

    def height(self) -> int:
        """Levels in the tree; a lone leaf has height 1."""
        return 1 + max((c.height() for c in self.children), default=0)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_json(self, kb=None) -> dict:
        fact = kb.format_triple(self.fact) if kb is not None else list(self.fact)
        out = {"fact": fact, "kind": self.kind}
        if self.rule:
            out["rule"] = self.rule
        if self.truncated:
            out["truncated"] = True
        if self.children:
            out["children"] = [c.to_json(kb) for c in self.children]
        return out


def choose_support(kb, fact):
    """Deterministic support for ``fact`` whose premises all entered the store earlier."""
    prov = kb.provenance
    rank = prov.rank(fact)
    sups = prov.supports(fact)
    older = [s for s in sups if all(prov.rank(p) < rank for p in s.premises)]
    pool = older or list(sups)
    if not pool:
        return None
    return min(pool, key=lambda s: (s.rule, s.premises))


def explain(kb, fact, max_depth: int = 32) -> DerivationNode:
    kb.ensure_materialized()
    fact = Triple(*fact)
    if fact not in kb.store:
        raise QueryError("fact not in store")

    def build(f, depth, path):
        if kb.store.is_asserted(f):
            return DerivationNode(f, ASSERTED)
        sup = choose_support(kb, f)
        if sup is None:
            return DerivationNode(f, DERIVED, truncated=True)
        node = DerivationNode(f, DERIVED, sup.rule)
        if depth >= max_depth or f in path:
            node.truncated = True
            return node
        path = path | {f}
        node.children = [build(p, depth + 1, path) for p in sup.premises]
        return node

    return build(fact, 0, frozenset())


def format_tree(kb, node: DerivationNode, indent: str = "") -> str:
    lines = []

    def walk(n, pad):
        text = kb.format_triple(n.fact)
        if n.kind == ASSERTED:
            tag = "[asserted]"
        else:
            tag = f"[{n.rule}]"
        if n.truncated:
            tag += " ..."
        lines.append(f"{pad}{text}  {tag}")
        for c in n.children:
            walk(c, pad + "  ")

    walk(node, indent)
    return "\n".join(lines)


# DOT export

DOT_HEADER = "// capakb knowledge graph\n"


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(kb, *, show_derived: bool = True, focus: int | None = None, depth: int = 1) -> str:
    """Graphviz rendering: individuals as ellipses, classes as boxes, derived edges dashed."""
    store = kb.store
    terms = kb.terms
    T, SC = kb.vocab.type, kb.vocab.subclass_of
    edges = []
    for t in store:
        if not show_derived and not store.is_asserted(t):
            continue
        if not (terms.resolve(t.s).is_iri and terms.resolve(t.o).is_iri):
            continue  # literals are not drawn
        edges.append(t)

    if focus is not None:
        adj: dict[int, set[int]] = {}
        for s, _, o in edges:
            adj.setdefault(s, set()).add(o)
            adj.setdefault(o, set()).add(s)
        keep = {focus}
        frontier = [focus]
        for _ in range(depth):
            nxt = []
            for n in frontier:
                for m in adj.get(n, ()):
                    if m not in keep:
                        keep.add(m)
                        nxt.append(m)
            frontier = nxt
        edges = [t for t in edges if t.s in keep and t.o in keep]

    if not edges:
        return DOT_HEADER + "digraph capakb {}\n"

    classes = set()
    for s, p, o in edges:
        if p == T:
            classes.add(o)
        elif p == SC:
            classes.update((s, o))
    classes.update(kb.defined_classes())
    nodes = {x for s, _, o in edges for x in (s, o)}

    def label(tid):
        return terms.lexical(tid)

    lines = [DOT_HEADER.rstrip("\n"), "digraph capakb {", "  rankdir=LR;"]
    for n in sorted(nodes, key=label):
        shape = "box" if n in classes else "ellipse"
        lines.append(f"  {_dot_id(label(n))} [label={_dot_id(kb.label(n))}, shape={shape}];")
    rendered = []
    for s, p, o in edges:
        name = "isA" if p == T else kb.label(p)
        style = "solid" if store.is_asserted((s, p, o)) else "dashed"
        rendered.append((label(s), label(o), name, style))
    for s, o, name, style in sorted(rendered):
        lines.append(f"  {_dot_id(s)} -> {_dot_id(o)} [label={_dot_id(name)}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
