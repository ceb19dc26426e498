"""Reserved RDF/RDFS/OWL IRIs."""

from __future__ import annotations

from dataclasses import dataclass

from .terms import TermDict

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"

RDF_TYPE = RDF + "type"
RDF_FIRST = RDF + "first"
RDF_REST = RDF + "rest"
RDF_NIL = RDF + "nil"

RDFS_SUBCLASS_OF = RDFS + "subClassOf"
RDFS_SUBPROPERTY_OF = RDFS + "subPropertyOf"

OWL_TRANSITIVE_PROPERTY = OWL + "TransitiveProperty"
OWL_INVERSE_OF = OWL + "inverseOf"
OWL_EQUIVALENT_CLASS = OWL + "equivalentClass"
OWL_RESTRICTION = OWL + "Restriction"
OWL_ON_PROPERTY = OWL + "onProperty"
OWL_SOME_VALUES_FROM = OWL + "someValuesFrom"
OWL_INTERSECTION_OF = OWL + "intersectionOf"
OWL_PROPERTY_CHAIN_AXIOM = OWL + "propertyChainAxiom"

XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"

STANDARD_PREFIXES = {
    "rdf": RDF,
    "rdfs": RDFS,
    "owl": OWL,
    "xsd": XSD,
}


@dataclass(frozen=True)
class Vocab:
    """Interned ids of the two predicates the compiled rules mention."""

    type: int
    subclass_of: int

    @classmethod
    def intern(cls, terms: TermDict) -> Vocab:
        return cls(terms.iri(RDF_TYPE), terms.iri(RDFS_SUBCLASS_OF))
