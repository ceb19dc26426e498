"""Axiom fragment and its lowering to Horn rules over triple patterns.

Identifiers inside axioms and rules are opaque: parsed documents carry IRI
strings, a loaded knowledge base carries interned ids.  :func:`map_axiom` and
:func:`map_rule` convert between the two.

Compiled rule bodies and heads are ``(s, p, o)`` patterns whose positions are
either constant term ids (``int``) or variable names (``str``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence, Union

from .diagnostics import ERROR, Diagnostic, SourceSpan
from .vocab import Vocab

# class expressions


@dataclass(frozen=True)
class Named:
    cls: Hashable


@dataclass(frozen=True)
class SomeValuesFrom:
    property: Hashable
    filler: Hashable  # a named class; anything else fails validation


@dataclass(frozen=True)
class Intersection:
    conjuncts: tuple

    def __init__(self, conjuncts):
        object.__setattr__(self, "conjuncts", tuple(conjuncts))


ClassExpression = Union[Named, SomeValuesFrom, Intersection]

# axioms

_span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SubClassOf:
    sub: Hashable
    sup: Hashable
    span: SourceSpan | None = _span


@dataclass(frozen=True)
class EquivalentTo:
    cls: Hashable
    expr: ClassExpression
    span: SourceSpan | None = _span


@dataclass(frozen=True)
class TransitiveProperty:
    prop: Hashable
    span: SourceSpan | None = _span


@dataclass(frozen=True)
class InverseProperties:
    first: Hashable
    second: Hashable
    span: SourceSpan | None = _span


@dataclass(frozen=True)
class SubPropertyOf:
    sub: Hashable
    sup: Hashable
    span: SourceSpan | None = _span


@dataclass(frozen=True)
class PropertyChain:
    chain: tuple
    implies: Hashable
    span: SourceSpan | None = _span

    def __init__(self, chain, implies, span=None):
        object.__setattr__(self, "chain", tuple(chain))
        object.__setattr__(self, "implies", implies)
        object.__setattr__(self, "span", span)


Axiom = Union[SubClassOf, EquivalentTo, TransitiveProperty, InverseProperties, SubPropertyOf, PropertyChain]

# user rules


@dataclass(frozen=True)
class ClassAtom:
    cls: Hashable
    var: str


@dataclass(frozen=True)
class PropertyAtom:
    prop: Hashable
    subject: str
    object: str


Atom = Union[ClassAtom, PropertyAtom]


def atom_vars(atom: Atom) -> tuple[str, ...]:
    if isinstance(atom, ClassAtom):
        return (atom.var,)
    return (atom.subject, atom.object)


@dataclass(frozen=True)
class HornRule:
    name: str
    body: tuple
    head: Atom
    span: SourceSpan | None = _span

    def __init__(self, name, body, head, span=None):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "body", tuple(body))
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "span", span)


# compiled form


@dataclass(frozen=True)
class CompiledRule:
    name: str
    body: tuple  # of (s, p, o) patterns
    head: tuple
    origin: str  # "builtin" | "axiom" | "user-rule"
    schema: str  # "R1" ... "R10"

    def variables(self) -> set[str]:
        return {x for pat in self.body for x in pat if isinstance(x, str)}

    def is_range_restricted(self) -> bool:
        head_vars = {x for x in self.head if isinstance(x, str)}
        return head_vars <= self.variables()


@dataclass(frozen=True)
class InferenceProgram:
    rules: tuple

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def by_name(self, name: str) -> CompiledRule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)


class CompileError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


# mapping between identifier spaces


def map_expr(expr: ClassExpression, fn: Callable) -> ClassExpression:
    if isinstance(expr, Named):
        return Named(fn(expr.cls))
    if isinstance(expr, SomeValuesFrom):
        filler = expr.filler
        filler = map_expr(filler, fn) if isinstance(filler, (Named, SomeValuesFrom, Intersection)) else fn(filler)
        return SomeValuesFrom(fn(expr.property), filler)
    return Intersection(map_expr(c, fn) for c in expr.conjuncts)


def map_axiom(axiom: Axiom, fn: Callable) -> Axiom:
    if isinstance(axiom, SubClassOf):
        return SubClassOf(fn(axiom.sub), fn(axiom.sup), axiom.span)
    if isinstance(axiom, EquivalentTo):
        cls = map_expr(axiom.cls, fn) if isinstance(axiom.cls, (Named, SomeValuesFrom, Intersection)) else fn(axiom.cls)
        return EquivalentTo(cls, map_expr(axiom.expr, fn), axiom.span)
    if isinstance(axiom, TransitiveProperty):
        return TransitiveProperty(fn(axiom.prop), axiom.span)
    if isinstance(axiom, InverseProperties):
        return InverseProperties(fn(axiom.first), fn(axiom.second), axiom.span)
    if isinstance(axiom, SubPropertyOf):
        return SubPropertyOf(fn(axiom.sub), fn(axiom.sup), axiom.span)
    if isinstance(axiom, PropertyChain):
        return PropertyChain([fn(p) for p in axiom.chain], fn(axiom.implies), axiom.span)
    raise TypeError(f"not an axiom: {axiom!r}")


def map_rule(rule: HornRule, fn: Callable) -> HornRule:
    def atom(a):
        if isinstance(a, ClassAtom):
            return ClassAtom(fn(a.cls), a.var)
        return PropertyAtom(fn(a.prop), a.subject, a.object)

    return HornRule(rule.name, [atom(a) for a in rule.body], atom(rule.head), rule.span)


# validation

_EXPR_TYPES = (Named, SomeValuesFrom, Intersection)


def _flatten(expr: Intersection, span, diags: list) -> list:
    """Flatten one level of nested intersections; deeper nesting is reported."""
    out = []
    for c in expr.conjuncts:
        if isinstance(c, Intersection):
            for cc in c.conjuncts:
                if isinstance(cc, Intersection):
                    diags.append(Diagnostic(ERROR, "nested intersection beyond one level is unsupported", span))
                else:
                    out.append(cc)
        else:
            out.append(c)
    return out


def _check_expr(expr, span, diags: list) -> None:
    if isinstance(expr, Named):
        return
    if isinstance(expr, SomeValuesFrom):
        if isinstance(expr.filler, _EXPR_TYPES) and not isinstance(expr.filler, Named):
            diags.append(Diagnostic(ERROR, "complex filler unsupported: someValuesFrom needs a named class", span))
        return
    if isinstance(expr, Intersection):
        flat = _flatten(expr, span, diags)
        if len(flat) < 2:
            diags.append(Diagnostic(ERROR, "intersection needs at least two conjuncts", span))
        for c in flat:
            if not isinstance(c, Intersection):
                _check_expr(c, span, diags)
        return
    diags.append(Diagnostic(ERROR, f"unsupported class expression {expr!r}", span))


def _check_rule(rule: HornRule, diags: list) -> None:
    if not isinstance(rule.head, (ClassAtom, PropertyAtom)):
        diags.append(Diagnostic(ERROR, f"rule {rule.name!r}: head must be a single atom", rule.span))
        return
    if not rule.body:
        diags.append(Diagnostic(ERROR, f"rule {rule.name!r}: empty body", rule.span))
    bound = {v for a in rule.body for v in atom_vars(a)}
    for v in atom_vars(rule.head):
        if v not in bound:
            diags.append(
                Diagnostic(ERROR, f"unsafe rule {rule.name!r}: head variable ?{v} does not occur in the body", rule.span)
            )


def validate(axioms: Sequence[Axiom], user_rules: Sequence[HornRule] = ()) -> list[Diagnostic]:
    """Return every violation of the supported fragment; empty means compilable."""
    diags: list[Diagnostic] = []
    for ax in axioms:
        span = getattr(ax, "span", None)
        if isinstance(ax, EquivalentTo):
            if isinstance(ax.cls, _EXPR_TYPES) and not isinstance(ax.cls, Named):
                diags.append(Diagnostic(ERROR, "equivalence needs a named class on the left", span))
            _check_expr(ax.expr, span, diags)
        elif isinstance(ax, PropertyChain):
            if len(ax.chain) < 2:
                diags.append(Diagnostic(ERROR, "property chain needs at least two properties", span))
            if ax.implies in ax.chain:
                diags.append(Diagnostic(ERROR, "self-recursive property chain: implied property occurs in its own chain", span))
        elif not isinstance(ax, (SubClassOf, TransitiveProperty, InverseProperties, SubPropertyOf)):
            diags.append(Diagnostic(ERROR, f"unsupported axiom {ax!r}", span))
    for rule in user_rules:
        _check_rule(rule, diags)
    return diags


# lowering


def _conjuncts(expr: ClassExpression) -> list:
    if isinstance(expr, Intersection):
        return _flatten(expr, None, [])
    return [expr]


def _named(x):
    return x.cls if isinstance(x, Named) else x


class _Names:
    def __init__(self, label):
        self.label = label
        self.seen: dict[str, int] = {}

    def __call__(self, text: str) -> str:
        n = self.seen.get(text, 0)
        self.seen[text] = n + 1
        return text if n == 0 else f"{text} #{n + 1}"


def compile_program(
    axioms: Sequence[Axiom],
    user_rules: Sequence[HornRule],
    vocab: Vocab,
    label: Callable[[int], str] = str,
) -> InferenceProgram:
    """Lower axioms and user rules (over interned ids) to an InferenceProgram.

    ``label`` renders ids inside rule names.
    """
    diags = validate(axioms, user_rules)
    if diags:
        raise CompileError(diags)

    T, SC = vocab.type, vocab.subclass_of
    name = _Names(label)
    rules: list[CompiledRule] = [
        CompiledRule("R1 type-propagation", (("x", T, "c"), ("c", SC, "d")), ("x", T, "d"), "builtin", "R1"),
        CompiledRule("R2 subclass-transitivity", (("c", SC, "d"), ("d", SC, "e")), ("c", SC, "e"), "builtin", "R2"),
    ]

    def link(sub, sup, schema="R10", what="subclass-link"):
        rules.append(CompiledRule(name(f"{schema} {what} {label(sub)} {label(sup)}"), (), (sub, SC, sup), "axiom", schema))

    for ax in axioms:
        if isinstance(ax, SubClassOf):
            link(ax.sub, ax.sup, what="subclass")
        elif isinstance(ax, TransitiveProperty):
            p = ax.prop
            rules.append(
                CompiledRule(name(f"R3 transitive {label(p)}"), (("x", p, "y"), ("y", p, "z")), ("x", p, "z"), "axiom", "R3")
            )
        elif isinstance(ax, InverseProperties):
            p, q = ax.first, ax.second
            rules.append(CompiledRule(name(f"R4 inverse {label(p)} {label(q)}"), (("x", p, "y"),), ("y", q, "x"), "axiom", "R4"))
            rules.append(CompiledRule(name(f"R4 inverse {label(q)} {label(p)}"), (("x", q, "y"),), ("y", p, "x"), "axiom", "R4"))
        elif isinstance(ax, SubPropertyOf):
            rules.append(
                CompiledRule(name(f"R5 subproperty {label(ax.sub)} {label(ax.sup)}"), (("x", ax.sub, "y"),), ("x", ax.sup, "y"), "axiom", "R5")
            )
        elif isinstance(ax, PropertyChain):
            body = tuple((f"x{i}", p, f"x{i + 1}") for i, p in enumerate(ax.chain))
            chain = "/".join(label(p) for p in ax.chain)
            rules.append(
                CompiledRule(name(f"R6 chain {chain} {label(ax.implies)}"), body, ("x0", ax.implies, f"x{len(ax.chain)}"), "axiom", "R6")
            )
        elif isinstance(ax, EquivalentTo):
            c = _named(ax.cls)
            parts = _conjuncts(ax.expr)
            body = []
            fresh = 0
            for part in parts:
                if isinstance(part, Named):
                    body.append(("x", T, part.cls))
                else:
                    fresh += 1
                    y = f"y{fresh}"
                    body.append(("x", part.property, y))
                    body.append((y, T, _named(part.filler)))
            rules.append(CompiledRule(name(f"R7 recognise {label(c)}"), tuple(body), ("x", T, c), "axiom", "R7"))
            if isinstance(ax.expr, Intersection):
                for part in parts:
                    if isinstance(part, Named):
                        rules.append(
                            CompiledRule(name(f"R8 decompose {label(c)} {label(part.cls)}"), (("x", T, c),), ("x", T, part.cls), "axiom", "R8")
                        )
                for part in parts:
                    if isinstance(part, Named):
                        link(c, part.cls)
            elif isinstance(ax.expr, Named):
                link(c, ax.expr.cls)
                link(ax.expr.cls, c)
        else:  # pragma: no cover - validate() rejects these
            raise TypeError(ax)

    for rule in user_rules:
        def pattern(atom):
            if isinstance(atom, ClassAtom):
                return (atom.var, T, atom.cls)
            return (atom.subject, atom.prop, atom.object)

        rules.append(
            CompiledRule(name(f"R9 {rule.name}"), tuple(pattern(a) for a in rule.body), pattern(rule.head), "user-rule", "R9")
        )
    return InferenceProgram(tuple(rules))

