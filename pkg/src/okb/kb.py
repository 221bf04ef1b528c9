from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .algebra import ObjectClass, ObjectCollection
from .lexer import Span
from .properties import ObjectInstance

KBValue = Union[ObjectInstance, ObjectClass, ObjectCollection]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Span

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    """A document did not parse; ``diagnostics`` holds at least one error."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class UnknownNameError(LookupError):
    def __init__(self, name: str, span: Span | None = None) -> None:
        super().__init__(f"unknown object {name}")
        self.name = name
        self.span = span


@dataclass
class KnowledgeBase:
    """Named objects, classes and sets; names are unique across all three."""

    objects: dict[str, ObjectInstance] = field(default_factory=dict)
    classes: dict[str, ObjectClass] = field(default_factory=dict)
    sets: dict[str, ObjectCollection] = field(default_factory=dict)
    spans: dict[str, Span] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)

    def __contains__(self, name: str) -> bool:
        return name in self.objects or name in self.classes or name in self.sets

    def lookup(self, name: str) -> KBValue:
        for table in (self.objects, self.classes, self.sets):
            if name in table:
                return table[name]
        raise UnknownNameError(name)

    def kind_of(self, name: str) -> str | None:
        if name in self.objects:
            return "object"
        if name in self.classes:
            return "class"
        if name in self.sets:
            return "set"
        return None
