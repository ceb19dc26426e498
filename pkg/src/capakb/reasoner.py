"""Semi-naive materialization with provenance, plus a naive reference fixpoint.

Each compiled rule is turned into one Python function per body position.
Variant ``d`` draws body atom ``d`` from the current delta, requires atoms
before ``d`` to come from the store minus the delta, and lets atoms after
``d`` range over the whole store, so each instantiation is found once per
round it becomes possible.
"""

from __future__ import annotations

import functools
import gc
import time
from collections import Counter, defaultdict
from operator import itemgetter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .ontology import ClassExpression, InferenceProgram, Intersection, Named, SomeValuesFrom, _conjuncts, _named
from .provenance import ProvenanceIndex, Support
from .terms import Triple, TripleStore

DEFAULT_ITERATION_CAP = 10_000


class IterationCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"materialization did not converge within {cap} iterations")


@dataclass
class MaterializationStats:
    iterations: int = 0
    derived_count: int = 0
    rule_fire_counts: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0
    added: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "kind": "stats",
            "iterations": self.iterations,
            "derived_count": self.derived_count,
            "rule_fire_counts": dict(sorted(self.rule_fire_counts.items())),
            "elapsed": self.elapsed,
        }


# code generation


def _is_var(x) -> bool:
    return isinstance(x, str)


class _Gen:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 1

    def emit(self, line: str) -> None:
        self.lines.append("    " * self.depth + line)

    def open(self, line: str) -> None:
        self.emit(line)
        self.depth += 1

    def source(self) -> str:
        return "\n".join(self.lines) + "\n"


def _single_var_group(body, i, done, is_bound) -> list[int]:
    """Atoms (``i`` first) whose only unbound term is the same single variable.

    Empty unless there are at least two such atoms.
    """
    def lone(k):
        s, _, o = body[k]
        free = [x for x in (s, o) if not is_bound(x)]
        if len(free) != 1 or s == o:
            return None
        return free[0]

    var = lone(i)
    if var is None:
        return []
    group = [i] + [k for k in range(len(body)) if k != i and k not in done and lone(k) == var]
    return group if len(group) > 1 else []


def _variant_source(rule, d: int, fname: str) -> str:
    body = rule.body
    names: dict[str, str] = {}

    def ident(var: str) -> str:
        if var not in names:
            names[var] = f"v{len(names)}"
        return names[var]

    def term(x) -> str:
        return names[x] if _is_var(x) else repr(x)

    def is_bound(x) -> bool:
        return not _is_var(x) or x in names

    facts: dict[int, str] = {}  # body index -> name of an existing tuple for that atom

    def rest(done):
        _emit_rest(g, body, d, rule.head, set(done), names, facts, ident, term, is_bound)

    g = _Gen()
    g.lines.append(f"def {fname}(spo, pos, flags, delta, delta_set, out):")
    s, p, o = body[d]
    facts[d] = "_t"
    if not _is_var(o):
        # constant object: read the delta's (p, o) bucket directly
        g.open(f"for _t in delta.get(({p!r}, {o!r}), ()):")
        if is_bound(s):
            g.open(f"if _t[0] == {term(s)}:")
        else:
            g.emit(f"{ident(s)} = _t[0]")
        rest({d})
        return g.source()

    k = _class_filter(body, d)
    if k is not None:
        # the delta edge's object must also be in a fixed class: walk whichever of
        # the delta edges and the class extension is smaller
        _, q, c = body[k]
        g.emit(f"_d = delta.get({p!r}, ())")
        g.emit(f"_f = pos.get({q!r}, _E).get({c!r}, _ES)")
        g.open("if len(_f) < len(_d):")
        depth = g.depth
        g.open(f"for {ident(o)} in _f:")
        if k < d:
            g.emit(f"_a{k} = ({term(o)}, {q!r}, {c!r})")
            g.open(f"if _a{k} not in delta_set:")
            facts[k] = f"_a{k}"
        g.open(f"for _t in delta.get(({p!r}, {term(o)}), ()):")
        g.emit(f"{ident(s)} = _t[0]")
        rest({d, k})
        g.depth = depth - 1
        names.clear()
        facts.clear()
        facts[d] = "_t"
        g.open("else:")
        g.open("for _t in _d:")
    else:
        g.open(f"for _t in delta.get({p!r}, ()):")
    for slot, x in (("_t[0]", s), ("_t[2]", o)):
        if is_bound(x):
            g.open(f"if {slot} == {term(x)}:")
        else:
            g.emit(f"{ident(x)} = {slot}")
    rest({d})
    return g.source()


def _class_filter(body, d: int) -> int | None:
    """Index of an atom ``(o, q, C)`` with constant ``C`` on the delta atom's object variable."""
    s, _, o = body[d]
    if not _is_var(s) or not _is_var(o) or s == o:
        return None
    for k, (ks, _, ko) in enumerate(body):
        if k != d and ks == o and not _is_var(ko):
            return k
    return None


def _emit_rest(g, body, d, head, done, names, facts, ident, term, is_bound) -> None:
    while len(done) < len(body):
        # most-bound atom next, then one joined to an already bound variable, then body order
        i = max(
            (k for k in range(len(body)) if k not in done),
            key=lambda k: (
                is_bound(body[k][0]) + is_bound(body[k][2]),
                any(_is_var(x) and x in names for x in (body[k][0], body[k][2])),
                -k,
            ),
        )
        done.add(i)
        s, p, o = body[i]
        old = i < d
        group = _single_var_group(body, i, done, is_bound)
        if group:
            # every variable that several atoms pin down given the current bindings:
            # compute each candidate set once, here, instead of inside each other's loops
            groups = [group]
            for k in range(len(body)):
                if k in done or any(k in gr for gr in groups):
                    continue
                more = _single_var_group(body, k, done | {x for gr in groups for x in gr}, is_bound)
                if more:
                    groups.append(more)
            cands = []
            for gr in groups:
                gs, _, go = body[gr[0]]
                var = gs if not is_bound(gs) else go
                sets = []
                for k in gr:
                    ks, kp, ko = body[k]
                    if ks == var:
                        sets.append(f"pos.get({kp!r}, _E).get({term(ko)}, _ES)")
                    else:
                        sets.append(f"spo.get({term(ks)}, _E).get({kp!r}, _ES)")
                cand = f"_c{g.depth}_{len(cands)}"
                g.emit(f"{cand} = {' & '.join(sets)}")
                cands.append((cand, var, gr))
            g.open("if " + " and ".join(c for c, _, _ in cands) + ":")
            for cand, var, gr in cands:
                g.open(f"for {ident(var)} in {cand}:")
                for k in gr:
                    done.add(k)
                    if k < d:
                        ks, kp, ko = body[k]
                        g.emit(f"_a{k} = ({term(ks)}, {kp!r}, {term(ko)})")
                        g.open(f"if _a{k} not in delta_set:")
                        facts[k] = f"_a{k}"
            continue
        if is_bound(s) and is_bound(o):
            g.emit(f"_a{i} = ({term(s)}, {p!r}, {term(o)})")
            facts[i] = f"_a{i}"
            cond = f"_a{i} in flags"
            if old:
                cond += f" and _a{i} not in delta_set"
            g.open(f"if {cond}:")
            continue
        if is_bound(s):
            g.open(f"for {ident(o)} in spo.get({term(s)}, _E).get({p!r}, _ES):")
        elif is_bound(o):
            g.open(f"for {ident(s)} in pos.get({p!r}, _E).get({term(o)}, _ES):")
        elif s == o:
            g.open(f"for _oo, _ss in pos.get({p!r}, _E).items():")
            g.open("if _oo in _ss:")
            g.emit(f"{ident(s)} = _oo")
        else:
            g.open(f"for {ident(o)}, _ss in pos.get({p!r}, _E).items():")
            g.open(f"for {ident(s)} in _ss:")
        if old:
            g.emit(f"_a{i} = ({term(s)}, {p!r}, {term(o)})")
            g.open(f"if _a{i} not in delta_set:")
            facts[i] = f"_a{i}"

    premises = ", ".join(
        facts.get(k) or f"({term(a)}, {b!r}, {term(c)})" for k, (a, b, c) in enumerate(body)
    )
    hs, hp, ho = head
    g.emit(f"out.append((({term(hs)}, {hp!r}, {term(ho)}), RULE, ({premises},)))")


def _compile_variants(rule) -> list[Callable]:
    out = []
    for d in range(len(rule.body)):
        src = _variant_source(rule, d, "variant")
        ns = {"RULE": rule.name, "_E": {}, "_ES": frozenset()}
        exec(compile(src, f"<rule {rule.name} @{d}>", "exec"), ns)
        out.append(ns["variant"])
    return out


class Engine:
    """Compiled evaluation plan for one program."""

    def __init__(self, program: InferenceProgram):
        self.program = program
        # (delta key, fn) in program order; the key is p, or (p, o) for a constant object
        self.variants: list[tuple[object, Callable]] = []
        self.axiom_facts = []
        for rule in program:
            if not rule.body:
                self.axiom_facts.append((tuple(rule.head), rule.name, ()))
                continue
            for d, fn in enumerate(_compile_variants(rule)):
                _, p, o = rule.body[d]
                self.variants.append((p if _is_var(o) else (p, o), fn))

    def run(
        self,
        store: TripleStore,
        provenance: ProvenanceIndex,
        seed: Iterable,
        *,
        fire_axiom_facts: bool = False,
        iteration_cap: int = DEFAULT_ITERATION_CAP,
    ) -> MaterializationStats:
        """Run delta rounds from ``seed`` until nothing new is derived."""
        # the run allocates millions of small tuples and frees none of them;
        # cyclic collection would rescan the growing heap over and over
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            return self._run(store, provenance, seed, fire_axiom_facts, iteration_cap)
        finally:
            if was_enabled:
                gc.enable()

    def _run(self, store, provenance, seed, fire_axiom_facts, iteration_cap) -> MaterializationStats:
        store._check_writable()
        started = time.perf_counter()
        stats = MaterializationStats()
        counts: Counter = Counter()
        spo, pos, osp, flags = store.spo, store.pos, store.osp, store._flags
        supports_of, order = provenance.supports_of, provenance.order
        clock = provenance._clock
        # a semi-naive run finds each instantiation once, so duplicates can only
        # come from supports that were already indexed when the run started
        check = bool(provenance)
        added = stats.added
        make_triple = tuple.__new__
        rule_of = itemgetter(1)
        used_by = provenance._used_by

        delta_set = set(seed)
        pending = list(self.axiom_facts) if fire_axiom_facts else []
        while delta_set or pending:
            if stats.iterations >= iteration_cap:
                raise IterationCapExceeded(iteration_cap)
            stats.iterations += 1
            delta: dict = {}
            for t in delta_set:
                p = t[1]
                by_p = delta.get(p)
                if by_p is None:
                    delta[p] = [t]
                else:
                    by_p.append(t)
                key = (p, t[2])
                by_po = delta.get(key)
                if by_po is None:
                    delta[key] = [t]
                else:
                    by_po.append(t)
            out = pending
            for key, fn in self.variants:
                if key in delta:
                    fn(spo, pos, flags, delta, delta_set, out)
            pending = []
            fresh = set()
            counts.update(map(rule_of, out))
            # inlined TripleStore.insert and ProvenanceIndex.stamp/record: this
            # loop runs once per rule instantiation
            for entry in out:
                head = entry[0]
                sup = make_triple(Support, entry)
                if head not in flags:
                    head = make_triple(Triple, head)
                    s, p, o = head
                    flags[head] = False
                    inner = spo.get(s)
                    if inner is None:
                        spo[s] = {p: {o}}
                    elif p in inner:
                        inner[p].add(o)
                    else:
                        inner[p] = {o}
                    inner = pos.get(p)
                    if inner is None:
                        pos[p] = {o: {s}}
                    elif o in inner:
                        inner[o].add(s)
                    else:
                        inner[o] = {s}
                    inner = osp.get(o)
                    if inner is None:
                        osp[o] = {s: {p}}
                    elif s in inner:
                        inner[s].add(p)
                    else:
                        inner[s] = {p}
                    clock += 1
                    order[head] = clock
                    fresh.add(head)
                    added.append(head)
                    supports_of[head] = [sup]
                else:
                    have = supports_of.get(head)
                    if have is None:
                        supports_of[head] = [sup]
                    elif check and any(x[1] == sup[1] and x[2] == sup[2] for x in have):
                        counts[entry[1]] -= 1
                        continue
                    else:
                        have.append(sup)
                if used_by is not None:
                    for prem in entry[2]:
                        users = used_by.get(prem)
                        if users is None:
                            used_by[prem] = {sup}
                        else:
                            users.add(sup)
            provenance._clock = clock
            delta_set = fresh
        stats.rule_fire_counts = {r: n for r, n in counts.items() if n}
        stats.derived_count = store.derived_count
        stats.elapsed = time.perf_counter() - started
        return stats


@functools.lru_cache(maxsize=128)
def engine_for(program: InferenceProgram) -> Engine:
    return Engine(program)


def materialize(
    store: TripleStore,
    program: InferenceProgram,
    provenance: ProvenanceIndex | None = None,
    *,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
) -> MaterializationStats:
    """Extend ``store`` to the least fixpoint of ``program``.

    The first round treats every stored triple as new.  Supports go into
    ``provenance`` (a throwaway index when omitted).
    """
    if provenance is None:
        provenance = ProvenanceIndex()
    return engine_for(program).run(
        store, provenance, list(store), fire_axiom_facts=True, iteration_cap=iteration_cap
    )


# reference oracle: every rule against the whole store, every round


def _value(x, binding):
    if _is_var(x):
        return binding.get(x)
    return x


def _match_body(body, index, binding, remaining):
    if not remaining:
        yield binding
        return

    # most-bound atom first; ties broken by body order
    def boundness(i):
        s, _, o = body[i]
        return -((_value(s, binding) is not None) + (_value(o, binding) is not None)), i

    i = min(remaining, key=boundness)
    rest = [k for k in remaining if k != i]
    s, p, o = body[i]
    sv, ov = _value(s, binding), _value(o, binding)
    if sv is not None and ov is not None:
        candidates = [(sv, ov)] if (sv, ov) in index.get(("p", p), ()) else []
    elif sv is not None:
        candidates = [(sv, x) for x in index.get(("s", p, sv), ())]
    elif ov is not None:
        candidates = [(x, ov) for x in index.get(("o", p, ov), ())]
    else:
        candidates = index.get(("p", p), ())
    for ts, to in candidates:
        b = binding
        if sv is None:
            b = {**b, s: ts}
        if ov is None:
            if o == s and b[s] != to:
                continue
            b = {**b, o: to}
        yield from _match_body(body, index, b, rest)


def _naive_index(store):
    index = defaultdict(set)
    for s, p, o in list(store):
        index[("p", p)].add((s, o))
        index[("s", p, s)].add(o)
        index[("o", p, o)].add(s)
    return index


def naive_fixpoint(
    store: TripleStore, program: InferenceProgram, *, iteration_cap: int = DEFAULT_ITERATION_CAP
) -> MaterializationStats:
    """Plain fixpoint iteration: every rule joined against the whole store each round, no provenance."""
    started = time.perf_counter()
    stats = MaterializationStats()
    while True:
        if stats.iterations >= iteration_cap:
            raise IterationCapExceeded(iteration_cap)
        stats.iterations += 1
        index = _naive_index(store)
        new = []
        for rule in program:
            for b in _match_body(rule.body, index, {}, range(len(rule.body))):
                head = tuple(b[x] if _is_var(x) else x for x in rule.head)
                if head not in store:
                    new.append(head)
                    stats.rule_fire_counts[rule.name] = stats.rule_fire_counts.get(rule.name, 0) + 1
        changed = False
        for head in new:
            if store.insert(head, asserted=False):
                changed = True
                stats.added.append(head)
        if not changed:
            break
    stats.derived_count = store.derived_count
    stats.elapsed = time.perf_counter() - started
    return stats


def check_instance(store: TripleStore, individual: int, expr: ClassExpression, type_id: int) -> bool:
    """Evaluate a class expression directly against the stored facts."""
    if isinstance(expr, Named):
        return (individual, type_id, expr.cls) in store
    if isinstance(expr, SomeValuesFrom):
        filler = _named(expr.filler)
        return any((y, type_id, filler) in store for y in store.objects(individual, expr.property))
    if isinstance(expr, Intersection):
        return all(check_instance(store, individual, c, type_id) for c in _conjuncts(expr))
    raise TypeError(expr)
