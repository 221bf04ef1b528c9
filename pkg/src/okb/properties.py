"""Properties, methods and objects, with the equivalence predicates over them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

from .expr import (
    Expr,
    Value,
    VerificationExpression,
    canonical,
    eval_expression,
    free_names,
    parse_expression,
    rename_positional,
)


def _normalize_value(value) -> float | tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        if not value:
            raise ValueError("sequence values must be non-empty")
        items = tuple(float(v) for v in value)
        if not all(math.isfinite(v) for v in items):
            raise ValueError("quantitative values must be finite")
        return items
    v = float(value)
    if not math.isfinite(v):
        raise ValueError("quantitative values must be finite")
    return v


@dataclass(frozen=True)
class QuantitativeProperty:
    """A value with units of measure. ``value=None`` marks an abstract (class-level) property."""

    name: str
    value: float | tuple[float, ...] | None
    units: str

    def __post_init__(self) -> None:
        if not self.units:
            raise ValueError(f"property '{self.name}': units must be non-empty")
        if self.value is not None:
            object.__setattr__(self, "value", _normalize_value(self.value))

    def abstract(self) -> QuantitativeProperty:
        return QuantitativeProperty(self.name, None, self.units)


@dataclass(frozen=True)
class QualitativeProperty:
    name: str
    vf: VerificationExpression

    def abstract(self) -> QualitativeProperty:
        return self


Property = Union[QuantitativeProperty, QualitativeProperty]


@dataclass(frozen=True)
class MethodDescriptor:
    """A named operation. Equality of behaviour is judged by :attr:`key`.

    With a body, the key is the canonical body with parameters renamed by
    position, so ``perimeter(sides) = sum(sides)`` and ``p(s) = sum(s)``
    coincide. Without a body the key falls back to ``(name, arity)``.
    """

    name: str
    params: tuple[str, ...] = ()
    body: Expr | None = None
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        params = tuple(self.params)
        object.__setattr__(self, "params", params)
        if len(set(params)) != len(params):
            raise ValueError(f"method '{self.name}': duplicate parameter names")
        body = self.body
        if isinstance(body, str):
            body = parse_expression(body)
            object.__setattr__(self, "body", body)
        if body is None:
            key = ("opaque", self.name, len(params))
        else:
            unbound = free_names(body) - set(params)
            if unbound:
                raise ValueError(
                    f"method '{self.name}': body uses undeclared operand(s) {', '.join(sorted(unbound))}"
                )
            key = ("body", len(params), canonical(rename_positional(body, params)))
        object.__setattr__(self, "key", key)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ObjectInstance:
    """An identified object: specification (properties) plus signature (methods).

    Both vectors keep declaration order; comparisons sort by name first.
    """

    id: str
    specification: tuple[Property, ...] = ()
    signature: tuple[MethodDescriptor, ...] = ()

    def __post_init__(self) -> None:
        spec = tuple(self.specification)
        sig = tuple(self.signature)
        object.__setattr__(self, "specification", spec)
        object.__setattr__(self, "signature", sig)
        _check_unique((p.name for p in spec), f"object {self.id}: duplicate property name")
        _check_unique((f.name for f in sig), f"object {self.id}: duplicate method name")

    def property_named(self, name: str) -> Property:
        for p in self.specification:
            if p.name == name:
                return p
        raise KeyError(name)

    def sorted_specification(self) -> tuple[Property, ...]:
        return tuple(sorted(self.specification, key=lambda p: p.name))

    def sorted_signature(self) -> tuple[MethodDescriptor, ...]:
        return tuple(sorted(self.signature, key=lambda f: f.name))

    def canonical(self) -> ObjectInstance:
        """Copy with both vectors in name order; equal to another canonical copy iff structurally equal."""
        return ObjectInstance(self.id, self.sorted_specification(), self.sorted_signature())


def _check_unique(names: Iterable[str], message: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise ValueError(f"{message} '{n}'")
        seen.add(n)


# ------------------------------------------------------------- equivalence keys
#
# Each predicate below is "keys are equal" for the matching key function; the
# algebra groups by these keys, the predicates are the public contract.


def property_key(p: Property) -> tuple:
    if isinstance(p, QuantitativeProperty):
        return ("quant", p.units)
    return ("qual", p.vf.canonical)


def method_key(f: MethodDescriptor) -> tuple:
    return f.key


def object_key(a: ObjectInstance) -> tuple:
    """Hashable key with ``object_key(a) == object_key(b)`` iff ``object_equal(a, b)``."""
    spec = tuple(
        (property_key(p), p.value if isinstance(p, QuantitativeProperty) else None)
        for p in a.sorted_specification()
    )
    return (spec, tuple(method_key(f) for f in a.sorted_signature()))


def property_equivalent(p: Property, q: Property) -> bool:
    """Quantitative: same units (values ignored). Qualitative: same canonical function."""
    if isinstance(p, QuantitativeProperty) and isinstance(q, QuantitativeProperty):
        return p.units == q.units
    if isinstance(p, QualitativeProperty) and isinstance(q, QualitativeProperty):
        return p.vf.canonical == q.vf.canonical
    return False


def method_equivalent(f: MethodDescriptor, g: MethodDescriptor) -> bool:
    return f.key == g.key


def dimension(a: ObjectInstance) -> int:
    return len(a.specification)


def objects_similar(a: ObjectInstance, b: ObjectInstance) -> bool:
    if dimension(a) != dimension(b):
        return False
    return all(
        property_equivalent(p, q)
        for p, q in zip(a.sorted_specification(), b.sorted_specification())
    )


def signatures_equivalent(a: ObjectInstance, b: ObjectInstance) -> bool:
    if len(a.signature) != len(b.signature):
        return False
    return all(
        method_equivalent(f, g) for f, g in zip(a.sorted_signature(), b.sorted_signature())
    )


def object_equal(a: ObjectInstance, b: ObjectInstance) -> bool:
    """Similar, equal quantitative values position by position, equivalent signatures.

    Identifiers are ignored, so a clone equals its original.
    """
    if not objects_similar(a, b):
        return False
    for p, q in zip(a.sorted_specification(), b.sorted_specification()):
        if isinstance(p, QuantitativeProperty) and p.value != q.value:
            return False
    return signatures_equivalent(a, b)


def bindings_for(a: ObjectInstance) -> dict[str, Value]:
    return {
        p.name: p.value
        for p in a.specification
        if isinstance(p, QuantitativeProperty) and p.value is not None
    }


def apply_method(a: ObjectInstance, name: str) -> Value:
    """Run method ``name`` of ``a``, binding its operands to ``a``'s quantitative properties."""
    for f in a.signature:
        if f.name == name:
            break
    else:
        raise KeyError(f"object {a.id} has no method '{name}'")
    if f.body is None:
        raise ValueError(f"method '{name}' of {a.id} has no body")
    values = bindings_for(a)
    return eval_expression(f.body, {p: values[p] for p in f.params if p in values})
