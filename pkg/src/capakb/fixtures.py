"""The Pepper example knowledge base, random knowledge bases, and test oracles."""

from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path

from . import vocab
from .ontology import (
    ClassAtom,
    EquivalentTo,
    HornRule,
    Intersection,
    InverseProperties,
    Named,
    PropertyAtom,
    PropertyChain,
    SomeValuesFrom,
    SubClassOf,
    SubPropertyOf,
    TransitiveProperty,
)
from .parsing import OntologyDocument, RuleDocument, SkolemCounter, axiom_triples, parse_rules, parse_turtle, write_turtle
from .terms import Term

EX = "http://ex.org/"

PEPPER_TTL = """\
# Pepper: capabilities inferred from owned components and held objects.
@prefix ex: <http://ex.org/> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

# properties

ex:hasComponent a owl:ObjectProperty, owl:TransitiveProperty .
ex:isHolding a owl:ObjectProperty ;
    rdfs:subPropertyOf ex:hasComponent .
ex:hasCapability a owl:ObjectProperty ;
    owl:inverseOf ex:isCapabilityOf .
ex:isCapabilityOf a owl:ObjectProperty .
ex:hasAvailableComponent a owl:ObjectProperty ;
    owl:propertyChainAxiom ( ex:isCapabilityOf ex:hasComponent ) .
ex:hasGraspingAffordance a owl:ObjectProperty .

# components

ex:Component a owl:Class .
ex:HardwareComponent rdfs:subClassOf ex:Component .
ex:SoftwareComponent rdfs:subClassOf ex:Component .
ex:Camera rdfs:subClassOf ex:HardwareComponent .
ex:Head rdfs:subClassOf ex:HardwareComponent .
ex:Arm rdfs:subClassOf ex:HardwareComponent .
ex:Hand rdfs:subClassOf ex:HardwareComponent .
ex:Gripper rdfs:subClassOf ex:HardwareComponent .
ex:ObjectTracker rdfs:subClassOf ex:SoftwareComponent .
ex:Tool a owl:Class .
ex:Screwdriver rdfs:subClassOf ex:Tool .

# capability fields

ex:Capability a owl:Class .
ex:Communication rdfs:subClassOf ex:Capability .
ex:Perception rdfs:subClassOf ex:Capability .
ex:Navigation rdfs:subClassOf ex:Capability .
ex:ObjectManipulation rdfs:subClassOf ex:Capability .

ex:MotionCommunicationCapability rdfs:subClassOf ex:Communication .
ex:VerbalCommunicationCapability rdfs:subClassOf ex:Communication .
ex:HumanDetection rdfs:subClassOf ex:Perception .
ex:HumanFaceDetection rdfs:subClassOf ex:HumanDetection .
ex:HumanLocalisation rdfs:subClassOf ex:HumanDetection .
ex:BodyJointsDetection rdfs:subClassOf ex:HumanDetection .

# capabilities defined by the components they need

ex:ObjectLocalisationCapa rdfs:subClassOf ex:Perception ;
    owl:equivalentClass [
        owl:intersectionOf (
            [ a owl:Restriction ; owl:onProperty ex:hasAvailableComponent ; owl:someValuesFrom ex:Camera ]
            [ a owl:Restriction ; owl:onProperty ex:hasAvailableComponent ; owl:someValuesFrom ex:ObjectTracker ]
        )
    ] .

ex:HandPointingCapa rdfs:subClassOf ex:MotionCommunicationCapability ;
    owl:equivalentClass [
        owl:intersectionOf (
            ex:ObjectLocalisationCapa
            [ a owl:Restriction ; owl:onProperty ex:hasAvailableComponent ; owl:someValuesFrom ex:Hand ]
        )
    ] .

ex:ScrewingCapability rdfs:subClassOf ex:ObjectManipulation ;
    owl:equivalentClass [ a owl:Restriction ; owl:onProperty ex:hasAvailableComponent ; owl:someValuesFrom ex:Screwdriver ] .

ex:MoveObjectViaGrasping rdfs:subClassOf ex:ObjectManipulation .
# Asserted on pepper_capa below. A component-based definition would read:
# ex:MoveObjectViaGrasping owl:equivalentClass
#     [ a owl:Restriction ; owl:onProperty ex:hasAvailableComponent ; owl:someValuesFrom ex:Gripper ] .

# dispositions

ex:Pickable a owl:Class .

# individuals

ex:pepper a ex:Agent ;
    ex:hasCapability ex:pepper_capa ;
    ex:hasComponent ex:pepper_head, ex:artrack, ex:pepper_rightarm .
ex:pepper_head a ex:Head ;
    ex:hasComponent ex:realsense .
ex:realsense a ex:Camera .
ex:artrack a ex:ObjectTracker .
ex:pepper_rightarm a ex:Arm ;
    ex:hasComponent ex:pepper_hand .
ex:pepper_hand a ex:Hand ;
    ex:isHolding ex:screwdriver .
ex:screwdriver a ex:Screwdriver .
ex:pepper_capa a ex:MoveObjectViaGrasping .
ex:cube a ex:Pickable .
"""

PEPPER_RULES = """\
# Affordances derived from capabilities and object dispositions.
@prefix ex: <http://ex.org/> .

rule "grasping": ex:Agent(?a), ex:MoveObjectViaGrasping(?m), ex:hasCapability(?a, ?m), ex:Pickable(?p)
    -> ex:hasGraspingAffordance(?a, ?p) .
"""

PEPPER_DEFINED_CAPABILITIES = {"ObjectLocalisationCapa", "HandPointingCapa", "ScrewingCapability"}

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"


def build_pepper(skolem: SkolemCounter | None = None) -> tuple[OntologyDocument, RuleDocument]:
    """Parse the Pepper ontology and rule file."""
    doc = parse_turtle(PEPPER_TTL, skolem=skolem)
    rules = parse_rules(PEPPER_RULES, prefixes=doc.prefixes)
    return doc, rules


def pepper_kb(**kwargs):
    from .kb import KnowledgeBase

    kb = KnowledgeBase(**kwargs)
    doc, rules = build_pepper(kb.skolem)
    kb.add_document(doc)
    kb.add_rules(rules)
    return kb


def write_fixture_files(directory: str | Path = FIXTURE_DIR) -> None:
    """Write ``pepper.ttl``, ``pepper.rules`` and the golden materialization."""
    directory = Path(directory)
    (directory / "golden").mkdir(parents=True, exist_ok=True)
    (directory / "pepper.ttl").write_text(PEPPER_TTL, encoding="utf-8")
    (directory / "pepper.rules").write_text(PEPPER_RULES, encoding="utf-8")
    (directory / "golden" / "pepper_materialized.ttl").write_text(golden_materialization(), encoding="utf-8")


def golden_materialization() -> str:
    """Pepper fixture materialized by the naive fixpoint, written with derived triples marked."""
    from .reasoner import naive_fixpoint

    kb = pepper_kb()
    naive_fixpoint(kb.store, kb.program)
    return kb.to_turtle(include_derived=True)


# oracles


def bfs_closure_oracle(edges) -> set[tuple]:
    """Strict reachability closure: (a, c) whenever a path of length >= 1 leads from a to c."""
    succ = defaultdict(set)
    for a, b in edges:
        succ[a].add(b)
    closure = set()
    for start in list(succ):
        seen = set()
        queue = deque(succ[start])
        while queue:
            n = queue.popleft()
            if n in seen:
                continue
            seen.add(n)
            queue.extend(succ.get(n, ()))
        closure.update((start, n) for n in seen)
    return closure


def canonical_triples(triples) -> set[tuple]:
    """Term triples with skolem nodes relabelled by structural signature.

    Equal results mean the two triple sets are the same up to renaming of
    blank nodes (exact for the tree-shaped structures the parser produces).
    """
    triples = list(triples)
    nodes = {t for tr in triples for t in (tr[0], tr[2]) if t.is_skolem}
    label = {n: "" for n in nodes}

    def show(t, lab):
        return f"_:{lab[t]}" if t.is_skolem else repr(t)

    for _ in range(len(nodes) + 1):
        new = {}
        for n in nodes:
            out_sig = sorted(f"{p!r}>{show(o, label)}" for s, p, o in triples if s == n)
            in_sig = sorted(f"{p!r}<{show(s, label)}" for s, p, o in triples if o == n)
            new[n] = str(hash((tuple(out_sig), tuple(in_sig))))
        if len(set(new.values())) == len(set(label.values())) and all(
            (label[a] == label[b]) == (new[a] == new[b]) for a in nodes for b in nodes
        ):
            label = new
            break
        label = new
    return {(show(s, label), repr(p), show(o, label)) for s, p, o in triples}


# random knowledge bases


@dataclass
class RandomKbSpec:
    seed: int = 0
    individual_count: int = 20
    class_count: int = 8
    property_count: int = 5
    edge_density: float = 0.08
    type_density: float = 0.15
    axiom_counts: dict = field(
        default_factory=lambda: {
            "subclass": 2,
            "equivalent": 2,
            "transitive": 1,
            "inverse": 1,
            "subproperty": 1,
            "chain": 1,
        }
    )
    rule_count: int = 2

    MAX_INDIVIDUALS = 30
    MAX_CLASSES = 10
    MAX_AXIOMS = 8
    MAX_RULES = 3

    def __post_init__(self):
        if not 1 <= self.individual_count <= self.MAX_INDIVIDUALS:
            raise ValueError(f"individual_count must be within 1..{self.MAX_INDIVIDUALS}")
        if not 1 <= self.class_count <= self.MAX_CLASSES:
            raise ValueError(f"class_count must be within 1..{self.MAX_CLASSES}")
        if sum(self.axiom_counts.values()) > self.MAX_AXIOMS:
            raise ValueError(f"at most {self.MAX_AXIOMS} axioms")
        if not 0 <= self.rule_count <= self.MAX_RULES:
            raise ValueError(f"rule_count must be within 0..{self.MAX_RULES}")
        if self.property_count < 2:
            raise ValueError("property_count must be at least 2")

    @classmethod
    def sample(cls, seed: int) -> RandomKbSpec:
        """A spec with sizes drawn from the documented caps."""
        rng = random.Random(seed * 7919 + 13)
        kinds = ["subclass", "equivalent", "transitive", "inverse", "subproperty", "chain"]
        budget = rng.randint(0, cls.MAX_AXIOMS)
        counts = dict.fromkeys(kinds, 0)
        for _ in range(budget):
            counts[rng.choice(kinds)] += 1
        return cls(
            seed=seed,
            individual_count=rng.randint(3, cls.MAX_INDIVIDUALS),
            class_count=rng.randint(2, cls.MAX_CLASSES),
            property_count=rng.randint(2, 6),
            edge_density=rng.choice([0.0, 0.03, 0.06, 0.1]),
            type_density=rng.choice([0.05, 0.1, 0.2]),
            axiom_counts=counts,
            rule_count=rng.randint(0, cls.MAX_RULES),
        )


RAND = "http://example.org/rand/"
RAND_PREFIXES = {"r": RAND, **vocab.STANDARD_PREFIXES}


def _random_axioms(rng, spec, classes, props):
    axioms = []
    c = spec.axiom_counts
    for _ in range(c.get("subclass", 0)):
        a, b = rng.sample(classes, 2) if len(classes) > 1 else (classes[0], classes[0])
        axioms.append(SubClassOf(a, b))
    for _ in range(c.get("equivalent", 0)):
        target = rng.choice(classes)
        shape = rng.choice(["named", "some", "and"])
        if shape == "named":
            other = rng.choice([k for k in classes if k != target] or classes)
            expr = Named(other)
        elif shape == "some":
            expr = SomeValuesFrom(rng.choice(props), rng.choice(classes))
        else:
            parts = []
            for _ in range(rng.randint(2, 3)):
                if rng.random() < 0.4:
                    parts.append(Named(rng.choice(classes)))
                else:
                    parts.append(SomeValuesFrom(rng.choice(props), rng.choice(classes)))
            expr = Intersection(parts)
        axioms.append(EquivalentTo(target, expr))
    for _ in range(c.get("transitive", 0)):
        axioms.append(TransitiveProperty(rng.choice(props)))
    for _ in range(c.get("inverse", 0)):
        p, q = rng.sample(props, 2)
        axioms.append(InverseProperties(p, q))
    for _ in range(c.get("subproperty", 0)):
        p, q = rng.sample(props, 2)
        axioms.append(SubPropertyOf(p, q))
    for _ in range(c.get("chain", 0)):
        implied = rng.choice(props)
        others = [p for p in props if p != implied]
        # two links: longer chains over a dense closure multiply instantiations
        # by the individual count per extra link
        chain = [rng.choice(others) for _ in range(2)]
        axioms.append(PropertyChain(chain, implied))
    return axioms


def _random_rules(rng, spec, classes, props):
    rules = []
    for k in range(spec.rule_count):
        variables = ["a", "b", "c"][: rng.randint(1, 3)]
        body = []
        for v in variables:
            body.append(ClassAtom(rng.choice(classes), v))
        for v, w in zip(variables, variables[1:]):
            body.append(PropertyAtom(rng.choice(props), v, w))
        rng.shuffle(body)
        if len(variables) > 1 and rng.random() < 0.6:
            head = PropertyAtom(rng.choice(props), variables[0], variables[-1])
        else:
            head = ClassAtom(rng.choice(classes), rng.choice(variables))
        rules.append(HornRule(f"rule{k}", body, head))
    return rules


def generate_random(spec: RandomKbSpec) -> OntologyDocument:
    """A well-formed random document (facts, axioms and rules); deterministic per seed."""
    rng = random.Random(spec.seed)
    individuals = [Term.iri(f"{RAND}i{k}") for k in range(spec.individual_count)]
    classes = [Term.iri(f"{RAND}C{k}") for k in range(spec.class_count)]
    props = [Term.iri(f"{RAND}p{k}") for k in range(spec.property_count)]
    type_ = Term.iri(vocab.RDF_TYPE)

    facts = []
    for a in individuals:
        for b in individuals:
            for p in props:
                if rng.random() < spec.edge_density / len(props) * 2:
                    facts.append((a, p, b))
        for cls in classes:
            if rng.random() < spec.type_density:
                facts.append((a, type_, cls))
    axioms = _random_axioms(rng, spec, classes, props)
    rules = _random_rules(rng, spec, classes, props)

    skolem = SkolemCounter()
    schema = []
    for ax in axioms:
        schema.extend(axiom_triples(ax, skolem.fresh))
    return OntologyDocument(
        prefixes=dict(RAND_PREFIXES),
        triples=schema + facts,
        axioms=axioms,
        facts=facts,
        rules=rules,
    )


def random_document_text(spec: RandomKbSpec) -> str:
    doc = generate_random(spec)
    return write_turtle([(s, p, o, False) for s, p, o in doc.triples], doc.prefixes)


def random_kb(spec: RandomKbSpec):
    from .kb import KnowledgeBase

    return KnowledgeBase.from_documents(generate_random(spec))


def random_fact_pool(spec: RandomKbSpec, size: int = 40) -> list[tuple]:
    """Candidate facts over the same vocabulary as ``generate_random(spec)``."""
    rng = random.Random(spec.seed + 1_000_003)
    individuals = [Term.iri(f"{RAND}i{k}") for k in range(spec.individual_count)]
    classes = [Term.iri(f"{RAND}C{k}") for k in range(spec.class_count)]
    props = [Term.iri(f"{RAND}p{k}") for k in range(spec.property_count)]
    type_ = Term.iri(vocab.RDF_TYPE)
    pool = set()
    while len(pool) < size:
        a = rng.choice(individuals)
        if rng.random() < 0.35:
            pool.add((a, type_, rng.choice(classes)))
        else:
            pool.add((a, rng.choice(props), rng.choice(individuals)))
    return sorted(pool)


# desk-scale benchmark input


def component_forest(edge_count: int = 50_000, max_depth: int = 6, equivalences: int = 20, seed: int = 0):
    """A forest of agents owning component trees, with capability definitions.

    Returns an :class:`OntologyDocument` with ``edge_count`` hasComponent
    edges, no node deeper than ``max_depth`` below its agent, and
    ``equivalences`` capability classes defined by required components.
    """
    rng = random.Random(seed)
    iri = Term.iri
    type_ = iri(vocab.RDF_TYPE)
    has_component = iri(EX + "hasComponent")
    has_capability = iri(EX + "hasCapability")
    is_capability_of = iri(EX + "isCapabilityOf")
    available = iri(EX + "hasAvailableComponent")
    capability = iri(EX + "Capability")
    kinds = [iri(f"{EX}Kind{k}") for k in range(30)]

    facts = []
    edges = 0
    agent = 0
    while edges < edge_count:
        root = iri(f"{EX}agent{agent}")
        facts.append((root, type_, iri(EX + "Agent")))
        facts.append((root, has_capability, iri(f"{EX}agent{agent}_capa")))
        nodes = [(root, 0)]
        size = min(rng.randint(40, 160), edge_count - edges)
        for k in range(size):
            parent, depth = rng.choice([n for n in nodes[-60:] if n[1] < max_depth] or nodes[:1])
            child = iri(f"{EX}agent{agent}_c{k}")
            facts.append((parent, has_component, child))
            facts.append((child, type_, rng.choice(kinds)))
            nodes.append((child, depth + 1))
            edges += 1
        agent += 1

    axioms = [
        TransitiveProperty(has_component),
        InverseProperties(has_capability, is_capability_of),
        PropertyChain([is_capability_of, has_component], available),
    ]
    for k in range(equivalences):
        cls = iri(f"{EX}Capa{k}")
        needs = rng.sample(kinds, rng.randint(1, 3))
        parts = [SomeValuesFrom(available, n) for n in needs]
        axioms.append(EquivalentTo(cls, Intersection(parts) if len(parts) > 1 else parts[0]))
        axioms.append(SubClassOf(cls, capability))
    return OntologyDocument(prefixes={"ex": EX}, triples=list(facts), axioms=axioms, facts=facts)
