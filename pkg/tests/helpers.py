"""Shared oracles and small utilities for the test suite."""

from __future__ import annotations

from capakb import KnowledgeBase
from capakb.reasoner import naive_fixpoint


def twin(kb: KnowledgeBase) -> KnowledgeBase:
    """A fresh knowledge base with the same schema, rules and asserted facts."""
    fresh = KnowledgeBase()
    fresh.terms = kb.terms
    fresh.vocab = kb.vocab
    fresh.prefixes = dict(kb.prefixes)
    fresh.axioms = list(kb.axioms)
    fresh.rules = list(kb.rules)
    for t in kb.store.asserted():
        fresh.store.insert(t, asserted=True)
    return fresh


def rebuilt_set(kb: KnowledgeBase) -> set:
    """Triple set of a from-scratch materialization of kb's asserted facts."""
    fresh = twin(kb)
    fresh.rebuild()
    return set(fresh.store)


def naive_set(kb: KnowledgeBase) -> set:
    """Triple set of the naive fixpoint over kb's asserted facts."""
    fresh = twin(kb)
    naive_fixpoint(fresh.store, fresh.program)
    return set(fresh.store)


def local(kb: KnowledgeBase, ids) -> set[str]:
    return {kb.label(i) for i in ids}


def capability_names(kb: KnowledgeBase, agent: str = "ex:pepper", defined_only: bool = True) -> set[str]:
    from capakb import capabilities_of

    report = capabilities_of(kb, kb.id(agent))
    return local(kb, report.defined if defined_only else report.capabilities)
