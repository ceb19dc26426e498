"""Rule instantiations that support derived facts."""

from __future__ import annotations

import gc
from typing import Iterable, NamedTuple


class Support(NamedTuple):
    """One rule instantiation: ``rule`` derived ``fact`` from ``premises``.

    Supports compare and hash by identity, which keeps the ``used_by`` sets
    cheap; the index holds at most one object per (fact, rule, premises).
    Compare ``key`` for value equality.
    """

    fact: tuple
    rule: str
    premises: tuple

    __eq__ = object.__eq__
    __ne__ = object.__ne__
    __hash__ = object.__hash__

    @property
    def key(self) -> tuple:
        return tuple(self)

    def same(self, rule: str, premises: tuple) -> bool:
        return self.rule == rule and self.premises == premises


make_support = Support


class ProvenanceIndex:
    """Two-way index between facts and the supports that mention them.

    ``order`` numbers facts in the sequence they entered the store; a
    derived fact always has a support whose premises all carry smaller
    numbers, which is what keeps explanations acyclic.

    ``used_by`` is the inverse of ``supports_of``.  Only retraction reads
    it, so it is built from ``supports_of`` on first access and kept in
    step from then on.
    """

    def __init__(self):
        self.supports_of: dict[tuple, list[Support]] = {}
        self._used_by: dict[tuple, set[Support]] | None = None
        self.order: dict[tuple, int] = {}
        self._clock = 0

    def __len__(self) -> int:
        return sum(len(s) for s in self.supports_of.values())

    def __bool__(self) -> bool:
        return bool(self.supports_of)

    @property
    def used_by(self) -> dict[tuple, set[Support]]:
        if self._used_by is None:
            index: dict[tuple, set[Support]] = {}
            was_enabled = gc.isenabled()
            gc.disable()  # only allocations here; collection passes would rescan the whole heap
            try:
                for sups in self.supports_of.values():
                    for s in sups:
                        for p in s.premises:
                            users = index.get(p)
                            if users is None:
                                index[p] = {s}
                            else:
                                users.add(s)
            finally:
                if was_enabled:
                    gc.enable()
            self._used_by = index
        return self._used_by

    @property
    def tracks_users(self) -> bool:
        """True once ``used_by`` exists and must be updated on every record."""
        return self._used_by is not None

    def stamp(self, fact) -> int:
        self._clock += 1
        self.order[fact] = self._clock
        return self._clock

    def rank(self, fact) -> int:
        return self.order.get(fact, 0)

    def record(self, fact, rule: str, premises: tuple, check: bool = True) -> bool:
        """Index a support; returns False if the same instantiation is already known.

        ``check=False`` skips the duplicate scan, for callers that know the
        instantiation is new (a semi-naive run into an empty index).
        """
        support = Support(fact, rule, premises)
        have = self.supports_of.get(fact)
        if have is None:
            self.supports_of[fact] = [support]
        else:
            if check and any(old.same(rule, premises) for old in have):
                return False
            have.append(support)
        if self._used_by is not None:
            used_by = self._used_by
            for p in premises:
                users = used_by.get(p)
                if users is None:
                    used_by[p] = {support}
                else:
                    users.add(support)
        return True

    def add(self, support: Support) -> bool:
        return self.record(support.fact, support.rule, support.premises)

    def find(self, fact, rule: str, premises) -> Support | None:
        premises = tuple(tuple(p) for p in premises)
        for s in self.supports_of.get(tuple(fact), ()):
            if s.same(rule, premises):
                return s
        return None

    def remove(self, support: Support) -> None:
        have = self.supports_of.get(support.fact)
        if have is None:
            return
        for i, s in enumerate(have):
            if s is support:
                del have[i]
                break
        else:
            return
        if not have:
            del self.supports_of[support.fact]
        if self._used_by is not None:
            for p in support.premises:
                users = self._used_by.get(p)
                if users is not None:
                    users.discard(support)
                    if not users:
                        del self._used_by[p]

    def supports(self, fact) -> list[Support]:
        return list(self.supports_of.get(fact, ()))

    def users(self, fact) -> set[Support]:
        return self.used_by.get(fact, set())

    def drop_using(self, facts: Iterable) -> int:
        """Remove every support that has a premise in ``facts``."""
        used_by = self.used_by
        doomed = set()
        for f in facts:
            doomed.update(used_by.get(f, ()))
        for s in doomed:
            self.remove(s)
        return len(doomed)

    def forget(self, fact) -> None:
        """Drop a fact that left the store; its own supports must already be gone."""
        self.order.pop(fact, None)
        for s in list(self.supports_of.get(fact, ())):
            self.remove(s)

    def clear(self) -> None:
        self.supports_of.clear()
        self._used_by = None
        self.order.clear()

    def audit(self, store) -> list[str]:
        """Check the index invariants against a store; returns problems found."""
        problems = []
        used_by = self.used_by
        for fact, sups in self.supports_of.items():
            if not sups:
                problems.append(f"empty support set kept for {fact}")
            if len({s.key for s in sups}) != len(sups):
                problems.append(f"duplicate supports recorded for {fact}")
            for s in sups:
                if s.fact != fact:
                    problems.append(f"support {s} filed under {fact}")
                if fact not in store:
                    problems.append(f"support for absent fact {fact}")
                for p in s.premises:
                    if p not in store:
                        problems.append(f"support {s} has absent premise {p}")
                    if s not in used_by.get(p, ()):
                        problems.append(f"support {s} missing from used_by[{p}]")
        live = {id(s) for sups in self.supports_of.values() for s in sups}
        for p, users in used_by.items():
            if not users:
                problems.append(f"empty used_by set kept for {p}")
            for s in users:
                if p not in s.premises:
                    problems.append(f"used_by[{p}] holds unrelated {s}")
                if id(s) not in live:
                    problems.append(f"used_by[{p}] holds dangling {s}")
        for t in store.derived():
            if not self.supports_of.get(t):
                problems.append(f"derived fact {t} has no support")
        return problems
