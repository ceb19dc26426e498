from .axioms import axiom_triples, recognize_axioms
from .rules import RuleDocument, parse_rules
from .serialize import serialize_turtle, write_turtle
from .turtle import OntologyDocument, SkolemCounter, parse_turtle

__all__ = [
    "OntologyDocument",
    "RuleDocument",
    "SkolemCounter",
    "axiom_triples",
    "parse_rules",
    "parse_turtle",
    "recognize_axioms",
    "serialize_turtle",
    "write_turtle",
]
