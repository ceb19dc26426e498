from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: SourceSpan | None = None
    source: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def with_source(self, source: str) -> Diagnostic:
        return Diagnostic(self.severity, self.message, self.span, source)

    def __str__(self) -> str:
        where = self.source or "<input>"
        if self.span is not None:
            where = f"{where}:{self.span.line}:{self.span.column}"
        return f"{where}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        out = {"kind": "diagnostic", "severity": self.severity, "message": self.message}
        if self.source:
            out["source"] = self.source
        if self.span is not None:
            out.update(line=self.span.line, column=self.span.column, length=self.span.length)
        return out


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


class DiagnosticError(Exception):
    """Raised by convenience loaders when parsing or validation reports errors."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        first = errors[0] if errors else self.diagnostics[0]
        more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        super().__init__(f"{first}{more}")
