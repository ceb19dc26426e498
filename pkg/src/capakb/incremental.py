"""Keep a materialized knowledge base current under assertions and retractions.

Retraction uses delete-and-rederive: everything that might depend on the
retracted facts is removed, then whatever still has a derivation from the
surviving facts is put back and propagated.  Counting supports instead
would keep facts alive through cycles of transitive edges.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from .reasoner import MaterializationStats, materialize
from .terms import Triple


class RetractionError(ValueError):
    pass


@dataclass
class DeltaReport:
    added: list = field(default_factory=list)
    removed: list = field(default_factory=list)
    rederived: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed)


def assert_all(kb, triples: Iterable) -> DeltaReport:
    """Assert facts and propagate their consequences in one delta run."""
    kb.ensure_materialized()
    started = time.perf_counter()
    store, prov = kb.store, kb.provenance
    seed = []
    for t in triples:
        t = Triple(*t)
        if t in store:
            # already present: at most a derived -> asserted upgrade
            store.set_asserted(t, True)
            continue
        store.insert(t, asserted=True)
        prov.stamp(t)
        seed.append(t)
    stats = kb.engine.run(store, prov, seed, iteration_cap=kb.iteration_cap)
    return DeltaReport(added=seed + stats.added, elapsed=time.perf_counter() - started)


def assert_fact(kb, triple) -> DeltaReport:
    return assert_all(kb, [triple])


def retract_all(kb, triples: Iterable) -> DeltaReport:
    """Retract asserted facts with one overdelete/rederive cycle."""
    kb.ensure_materialized()
    started = time.perf_counter()
    store, prov = kb.store, kb.provenance
    seeds = []
    for t in triples:
        t = Triple(*t)
        if t not in store:
            continue
        if not store.is_asserted(t):
            raise RetractionError(
                f"cannot retract derived fact; retract its asserted supports ({kb.format_triple(t)})"
            )
        seeds.append(t)
    if not seeds:
        return DeltaReport(elapsed=time.perf_counter() - started)

    # overdelete: every derived fact with some support that touches the deleted set
    for t in seeds:
        store.set_asserted(t, False)
    doomed = dict.fromkeys(seeds)
    stack = list(seeds)
    while stack:
        g = stack.pop()
        for support in prov.users(g):
            f = support.fact
            if f not in doomed and not store.is_asserted(f):
                doomed[f] = None
                stack.append(f)
    for f in doomed:
        store.erase(f)
    prov.drop_using(doomed)

    # rederive: facts that kept a support entirely outside the deleted set seed the delta run
    restored = [f for f in doomed if prov.supports_of.get(f)]
    for f in restored:
        store.insert(f, asserted=False)
        prov.stamp(f)
    kb.engine.run(store, prov, restored, iteration_cap=kb.iteration_cap)

    removed, rederived = [], []
    for f in doomed:
        if f in store:
            rederived.append(f)
        else:
            removed.append(f)
            prov.forget(f)
    return DeltaReport(removed=removed, rederived=rederived, elapsed=time.perf_counter() - started)


def retract_fact(kb, triple) -> DeltaReport:
    return retract_all(kb, [triple])


def rebuild(kb) -> MaterializationStats:
    """Drop all derived facts and provenance, then materialize from the asserted facts."""
    kb.store.clear_derived()
    kb.provenance.clear()
    stats = materialize(kb.store, kb.program, kb.provenance, iteration_cap=kb.iteration_cap)
    kb.materialized = True
    return stats
