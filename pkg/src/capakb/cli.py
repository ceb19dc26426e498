"""Command line front end: ``capakb check|materialize|query|repl|dot``."""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import Diagnostic, DiagnosticError, has_errors
from .incremental import RetractionError
from .kb import KnowledgeBase, UnknownTermError
from .ontology import CompileError
from .parsing import parse_turtle
from .query import (
    CapabilityVocab,
    QueryError,
    affordances_of,
    capabilities_of,
    explain,
    export_dot,
    format_tree,
    instances_of,
    subclasses_of,
)
from .reasoner import DEFAULT_ITERATION_CAP, IterationCapExceeded

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 2
EXIT_CAP = 3
EXIT_ABSENT = 4

PREFIX_MAP_ENV = "CAPAKB_PREFIX_MAP"


@dataclass
class SessionConfig:
    ontology_paths: list[str] = field(default_factory=list)
    rules_paths: list[str] = field(default_factory=list)
    capability_root: str = CapabilityVocab.capability_root
    iteration_cap: int = DEFAULT_ITERATION_CAP
    output_format: str = "text"

    @property
    def json(self) -> bool:
        return self.output_format == "json-lines"

    @property
    def vocab(self) -> CapabilityVocab:
        return CapabilityVocab(capability_root=self.capability_root)


class Output:
    """Writes either human-readable lines or one JSON object per line."""

    def __init__(self, config: SessionConfig, out=None, err=None):
        self.json = config.json
        self.out = out or sys.stdout
        self.err = err or sys.stderr

    def emit(self, text: str, record: dict) -> None:
        if self.json:
            print(json.dumps(record, sort_keys=True), file=self.out)
        else:
            print(text, file=self.out)

    def diagnostic(self, d: Diagnostic) -> None:
        if self.json:
            print(json.dumps(d.to_json(), sort_keys=True), file=self.out)
        else:
            print(str(d), file=self.err)

    def error(self, message: str) -> None:
        if self.json:
            print(json.dumps({"kind": "error", "message": message}, sort_keys=True), file=self.out)
        else:
            print(f"error: {message}", file=self.err)


def extra_prefixes() -> dict[str, str]:
    """Prefix declarations from the file named by ``CAPAKB_PREFIX_MAP``."""
    path = os.environ.get(PREFIX_MAP_ENV)
    if not path:
        return {}
    doc = parse_turtle(Path(path).read_text(encoding="utf-8"))
    if not doc.ok:
        raise DiagnosticError([d.with_source(path) for d in doc.diagnostics])
    return doc.prefixes


def load_kb(config: SessionConfig, out: Output) -> KnowledgeBase | None:
    """Load and validate; prints diagnostics and returns None on error."""
    kb = KnowledgeBase(extra_prefixes(), iteration_cap=config.iteration_cap)
    diags = kb.load_files(config.ontology_paths, config.rules_paths)
    diags += kb.validate()
    for d in diags:
        out.diagnostic(d)
    if has_errors(diags):
        return None
    return kb


def _guard(fn):
    """Map the failure modes shared by all commands onto exit codes."""

    def run(config: SessionConfig, args, out: Output) -> int:
        try:
            return fn(config, args, out)
        except OSError as exc:
            out.error(f"{exc.filename or ''}: {exc.strerror or exc}".lstrip(": "))
            return EXIT_IO
        except DiagnosticError as exc:
            for d in exc.diagnostics:
                out.diagnostic(d)
            return EXIT_ERROR
        except CompileError as exc:
            for d in exc.diagnostics:
                out.diagnostic(d)
            return EXIT_ERROR
        except IterationCapExceeded as exc:
            out.error(str(exc))
            return EXIT_CAP
        except (UnknownTermError, QueryError) as exc:
            out.error(str(exc))
            return EXIT_ERROR

    return run


# commands


@_guard
def cmd_check(config: SessionConfig, args, out: Output) -> int:
    kb = load_kb(config, out)
    return EXIT_ERROR if kb is None else EXIT_OK


@_guard
def cmd_materialize(config: SessionConfig, args, out: Output) -> int:
    kb = load_kb(config, out)
    if kb is None:
        return EXIT_ERROR
    stats = kb.rebuild()
    if out.json:
        out.emit("", stats.to_json())
    else:
        print(f"iterations: {stats.iterations}", file=out.out)
        print(f"derived: {stats.derived_count}", file=out.out)
        print(f"elapsed: {stats.elapsed:.4f}s", file=out.out)
        for name, n in sorted(stats.rule_fire_counts.items()):
            print(f"  {n:6d}  {name}", file=out.out)
    if args.emit:
        Path(args.emit).write_text(kb.to_turtle(include_derived=True), encoding="utf-8")
    return EXIT_OK


QUERY_ARITY = {"capabilities": 1, "instances": 1, "affordances": 1, "ask": 3}


def run_query(kb: KnowledgeBase, config: SessionConfig, words: list[str], out: Output, show_all: bool = False) -> int:
    if not words:
        raise QueryError("query needs one of: capabilities, instances, affordances, ask")
    kind, rest = words[0], words[1:]
    if kind not in QUERY_ARITY:
        raise QueryError(f"unknown query {kind!r}")
    if len(rest) != QUERY_ARITY[kind]:
        raise QueryError(f"query {kind} takes {QUERY_ARITY[kind]} argument(s)")
    kb.ensure_materialized()
    if kind == "capabilities":
        agent = kb.id(rest[0])
        report = capabilities_of(kb, agent, config.vocab)
        if report.no_capability_individual:
            record = {"kind": "notice", "agent": kb.name(agent), "message": "no capability individual"}
            out.emit(f"{kb.name(agent)} has no capability individual", record)
        classes = report.capabilities if show_all else report.defined
        for c in sorted(kb.name(c) for c in classes):
            out.emit(c, {"kind": "capability", "agent": kb.name(agent), "class": c})
    elif kind == "instances":
        cls = kb.id(rest[0])
        for x in sorted(kb.name(i) for i in instances_of(kb, cls)):
            out.emit(x, {"kind": "instance", "class": kb.name(cls), "individual": x})
    elif kind == "affordances":
        agent = kb.id(rest[0])
        pairs = sorted((kb.name(p), kb.name(o)) for p, o in affordances_of(kb, agent))
        for p, o in pairs:
            out.emit(f"{p} {o}", {"kind": "affordance", "agent": kb.name(agent), "property": p, "object": o})
    else:
        t = kb.triple(*rest)
        present = t in kb.store
        text = kb.format_triple(t)
        out.emit(f"{'yes' if present else 'no'}: {text}", {"kind": "ask", "fact": text, "present": present})
        return EXIT_OK if present else EXIT_ABSENT
    return EXIT_OK


@_guard
def cmd_query(config: SessionConfig, args, out: Output) -> int:
    kb = load_kb(config, out)
    if kb is None:
        return EXIT_ERROR
    return run_query(kb, config, args.query, out, show_all=args.all)


def split_query(words: list[str]) -> tuple[list[str], list[str]]:
    """Split ``query`` positionals into the query words and the ontology paths."""
    if not words or words[0] not in QUERY_ARITY:
        raise QueryError("query needs one of: capabilities, instances, affordances, ask")
    n = 1 + QUERY_ARITY[words[0]]
    return words[:n], words[n:]


@_guard
def cmd_dot(config: SessionConfig, args, out: Output) -> int:
    kb = load_kb(config, out)
    if kb is None:
        return EXIT_ERROR
    kb.ensure_materialized()
    focus = kb.id(args.focus) if args.focus else None
    text = export_dot(kb, show_derived=not args.asserted_only, focus=focus, depth=args.depth)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.out.write(text)
    return EXIT_OK


# REPL


REPL_HELP = """\
commands:
  assert <s> <p> <o>       add a fact and show what follows
  retract <s> <p> <o>      remove an asserted fact and show what goes
  query <kind> <args...>   capabilities|instances|affordances <term>, ask <s> <p> <o>
  explain <s> <p> <o>      derivation tree of a fact
  dot <path>               write the graph as DOT
  save <path> [--with-derived]
  quit"""


class Repl:
    def __init__(self, kb: KnowledgeBase, config: SessionConfig, out: Output):
        self.kb = kb
        self.config = config
        self.out = out

    def capability_facts(self, facts) -> list:
        root = self.kb.terms.lookup_iri(self.config.capability_root)
        if root is None:
            return []
        under = subclasses_of(self.kb, root)
        T = self.kb.vocab.type
        return [t for t in facts if t[1] == T and t[2] in under]

    def report(self, delta) -> None:
        kb, out = self.kb, self.out
        counts = f"added: {len(delta.added)}  removed: {len(delta.removed)}  rederived: {len(delta.rederived)}"
        out.emit(
            counts,
            {
                "kind": "delta",
                "added": len(delta.added),
                "removed": len(delta.removed),
                "rederived": len(delta.rederived),
                "elapsed": delta.elapsed,
            },
        )
        for change, facts in (("added", delta.added), ("removed", delta.removed)):
            for text in sorted(kb.format_triple(t) for t in facts):
                out.emit(f"  {'+' if change == 'added' else '-'} {text}", {"kind": "fact", "change": change, "fact": text})
        gained = sorted(kb.format_triple(t) for t in self.capability_facts(delta.added))
        lost = sorted(kb.format_triple(t) for t in self.capability_facts(delta.removed))
        for change, facts in (("gained", gained), ("lost", lost)):
            for text in facts:
                out.emit(f"capability {change}: {text}", {"kind": "capability-change", "change": change, "fact": text})

    def handle(self, line: str) -> bool:
        """Run one command; returns False when the session should end."""
        try:
            words = shlex.split(line, comments=True)
        except ValueError as exc:
            self.out.error(str(exc))
            return True
        if not words:
            return True
        cmd, rest = words[0], words[1:]
        kb = self.kb
        try:
            if cmd in ("quit", "exit"):
                return False
            if cmd == "help":
                print(REPL_HELP, file=self.out.out)
            elif cmd in ("assert", "retract"):
                if len(rest) != 3:
                    raise QueryError(f"{cmd} takes a triple: <s> <p> <o>")
                if cmd == "assert":
                    delta = kb.assert_fact(kb.triple(*rest, create=True))
                else:
                    delta = kb.retract_fact(kb.triple(*rest))
                self.report(delta)
            elif cmd == "query":
                show_all = "--all" in rest
                run_query(kb, self.config, [w for w in rest if w != "--all"], self.out, show_all)
            elif cmd == "explain":
                if len(rest) != 3:
                    raise QueryError("explain takes a triple: <s> <p> <o>")
                node = explain(kb, kb.triple(*rest))
                self.out.emit(format_tree(kb, node), {"kind": "explanation", "tree": node.to_json(kb)})
            elif cmd == "dot":
                if len(rest) != 1:
                    raise QueryError("dot takes an output path")
                kb.ensure_materialized()
                Path(rest[0]).write_text(export_dot(kb), encoding="utf-8")
            elif cmd == "save":
                paths = [w for w in rest if w != "--with-derived"]
                if len(paths) != 1:
                    raise QueryError("save takes an output path")
                kb.ensure_materialized()
                Path(paths[0]).write_text(kb.to_turtle(include_derived="--with-derived" in rest), encoding="utf-8")
            else:
                raise QueryError(f"unknown command {cmd!r} (try help)")
        except (UnknownTermError, QueryError, RetractionError) as exc:
            self.out.error(str(exc))
        except OSError as exc:
            self.out.error(str(exc))
        return True

    def run(self, stream) -> None:
        interactive = stream.isatty()
        while True:
            if interactive:
                print("capakb> ", end="", flush=True, file=self.out.out)
            line = stream.readline()
            if not line:
                break
            if not self.handle(line):
                break


@_guard
def cmd_repl(config: SessionConfig, args, out: Output) -> int:
    kb = load_kb(config, out)
    if kb is None:
        return EXIT_ERROR
    kb.ensure_materialized()
    Repl(kb, config, out).run(args.input or sys.stdin)
    return EXIT_OK


# argument parsing


def _common(p: argparse.ArgumentParser, paths: str = "+") -> None:
    p.add_argument("paths", nargs=paths, metavar="ONTOLOGY", help="Turtle ontology files")
    p.add_argument("--rules", action="append", default=[], metavar="PATH", help="rule file (repeatable)")
    p.add_argument("--capability-root", default=CapabilityVocab.capability_root, metavar="IRI")
    p.add_argument("--iteration-cap", type=int, default=DEFAULT_ITERATION_CAP, metavar="N")
    p.add_argument("--format", choices=("text", "json-lines"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capakb", description="Infer agent capabilities from components.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate only")
    _common(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("materialize", help="compute the fixpoint and print statistics")
    _common(p)
    p.add_argument("--emit", metavar="PATH", help="write the materialized store as Turtle")
    p.set_defaults(run=cmd_materialize)

    p = sub.add_parser(
        "query",
        help="answer a query over the materialized knowledge base",
        usage="capakb query {capabilities AGENT | instances CLASS | affordances AGENT | ask S P O} ONTOLOGY... [options]",
    )
    _common(p)
    p.add_argument("--all", action="store_true", help="list every capability class, not only defined ones")
    p.set_defaults(run=cmd_query)

    p = sub.add_parser("repl", help="interactive session")
    _common(p, paths="*")
    p.add_argument("--input", type=argparse.FileType("r"), help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_repl)

    p = sub.add_parser("dot", help="export the graph in Graphviz DOT")
    _common(p)
    p.add_argument("--asserted-only", action="store_true", help="omit derived edges")
    p.add_argument("--focus", metavar="TERM")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(run=cmd_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "query":
        try:
            args.query, args.paths = split_query(args.paths)
        except QueryError as exc:
            parser.error(str(exc))
        if not args.paths:
            parser.error("query needs at least one ontology file")
    config = SessionConfig(
        ontology_paths=list(args.paths),
        rules_paths=list(args.rules),
        capability_root=args.capability_root,
        iteration_cap=args.iteration_cap,
        output_format=args.format,
    )
    return args.run(config, args, Output(config))


if __name__ == "__main__":
    sys.exit(main())
