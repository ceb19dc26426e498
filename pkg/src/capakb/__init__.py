"""Capability inference for agents from the components they own."""

from .diagnostics import Diagnostic, DiagnosticError, SourceSpan
from .incremental import DeltaReport, RetractionError, assert_all, assert_fact, rebuild, retract_all, retract_fact
from .kb import KnowledgeBase, UnknownTermError
from .ontology import (
    ClassAtom,
    CompileError,
    EquivalentTo,
    HornRule,
    InferenceProgram,
    Intersection,
    InverseProperties,
    Named,
    PropertyAtom,
    PropertyChain,
    SomeValuesFrom,
    SubClassOf,
    SubPropertyOf,
    TransitiveProperty,
    compile_program,
    validate,
)
from .parsing import OntologyDocument, RuleDocument, parse_rules, parse_turtle, serialize_turtle
from .provenance import ProvenanceIndex, Support
from .query import (
    CapabilityReport,
    CapabilityVocab,
    DerivationNode,
    QueryError,
    affordances_of,
    capabilities_of,
    explain,
    export_dot,
    instances_of,
)
from .reasoner import IterationCapExceeded, MaterializationStats, materialize, naive_fixpoint
from .terms import Term, TermDict, Triple, TripleStore

__version__ = "0.1.0"
