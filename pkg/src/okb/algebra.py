"""Universal operations on objects, class inference and classification.

Classes are descriptions generated as data: a :class:`HomogeneousClass` for
objects that all share one specification and signature, an
:class:`InhomogeneousClass` (core plus per-object projections) otherwise.
Class members are abstract: quantitative properties keep units, not values.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from .expr import EvaluationError, Value, evaluate_verification
from .properties import (
    MethodDescriptor,
    ObjectInstance,
    Property,
    QualitativeProperty,
    QuantitativeProperty,
    method_equivalent,
    method_key,
    object_key,
    objects_similar,
    property_equivalent,
    property_key,
    signatures_equivalent,
)


def _abstract_sorted(props: Iterable[Property]) -> tuple[Property, ...]:
    return tuple(sorted((p.abstract() for p in props), key=lambda p: p.name))


def _sorted_methods(methods: Iterable[MethodDescriptor]) -> tuple[MethodDescriptor, ...]:
    return tuple(sorted(methods, key=lambda f: f.name))


@dataclass(frozen=True)
class ClassCore:
    properties: tuple[Property, ...] = ()
    methods: tuple[MethodDescriptor, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "properties", _abstract_sorted(self.properties))
        object.__setattr__(self, "methods", _sorted_methods(self.methods))

    def __len__(self) -> int:
        return len(self.properties) + len(self.methods)


@dataclass(frozen=True)
class Projection:
    owner: str
    properties: tuple[Property, ...] = ()
    methods: tuple[MethodDescriptor, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "properties", _abstract_sorted(self.properties))
        object.__setattr__(self, "methods", _sorted_methods(self.methods))

    def __len__(self) -> int:
        return len(self.properties) + len(self.methods)


@dataclass(frozen=True)
class HomogeneousClass:
    specification: tuple[Property, ...] = ()
    signature: tuple[MethodDescriptor, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "specification", _abstract_sorted(self.specification))
        object.__setattr__(self, "signature", _sorted_methods(self.signature))

    @property
    def core(self) -> ClassCore:
        return ClassCore(self.specification, self.signature)

    @property
    def projections(self) -> tuple[Projection, ...]:
        return ()


@dataclass(frozen=True)
class InhomogeneousClass:
    """Core members shared by every object plus one projection per object.

    Intersection yields a core with no projections; difference and
    symmetric difference yield projections with an empty core.
    """

    core: ClassCore
    projections: tuple[Projection, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "projections", tuple(self.projections))


ObjectClass = Union[HomogeneousClass, InhomogeneousClass]


class DoesNotExist(enum.Enum):
    """Distinguished outcome of an operation whose result class is empty."""

    INTERSECTION = "intersection"
    DIFFERENCE = "difference"
    SYMMETRIC_DIFFERENCE = "symmetric difference"

    def __str__(self) -> str:
        return f"{self.value} does not exist"


NoIntersection = DoesNotExist.INTERSECTION
NoDifference = DoesNotExist.DIFFERENCE
NoSymmetricDifference = DoesNotExist.SYMMETRIC_DIFFERENCE


class DuplicateOperandError(ValueError):
    """Strict set-mode union received operands that are equal objects."""


class ClassificationError(EvaluationError):
    def __init__(self, property_name: str, reason: str) -> None:
        super().__init__(f"property '{property_name}': {reason}")
        self.property_name = property_name


def class_properties(klass: ObjectClass) -> tuple[Property, ...]:
    """All properties of ``klass``: core first, then each projection in order."""
    props = list(klass.core.properties)
    for pr in klass.projections:
        props.extend(pr.properties)
    return tuple(props)


def class_methods(klass: ObjectClass) -> tuple[MethodDescriptor, ...]:
    methods = list(klass.core.methods)
    for pr in klass.projections:
        methods.extend(pr.methods)
    return tuple(methods)


# ------------------------------------------------------------------ inference


def is_homogeneous(objs: Sequence[ObjectInstance]) -> bool:
    if not objs:
        raise ValueError("is_homogeneous needs at least one object")
    first = objs[0]
    # similarity and signature equivalence are equivalence relations, so
    # comparing against one representative covers all pairs
    return all(objects_similar(first, o) and signatures_equivalent(first, o) for o in objs[1:])


def _partition(groups: list[tuple], key: Callable) -> tuple[list, list[list]]:
    """Split each operand's members into core-matched and projected.

    A key class enters the core as many times as the operand holding the
    fewest members of that class; within an operand, members are matched
    greedily in name order.
    """
    counts = [Counter(key(m) for m in g) for g in groups]
    shared = {k: min(c[k] for c in counts) for k in counts[0]}
    core = []
    projected = []
    for i, members in enumerate(groups):
        taken: Counter = Counter()
        rest = []
        for m in members:
            k = key(m)
            if taken[k] < shared.get(k, 0):
                taken[k] += 1
                if i == 0:
                    core.append(m)
            else:
                rest.append(m)
        projected.append(rest)
    return core, projected


def infer_class(objs: Sequence[ObjectInstance]) -> ObjectClass:
    """Class of a group of objects: homogeneous if all are alike, core plus projections otherwise."""
    if not objs:
        raise ValueError("cannot infer the class of an empty group of objects")
    if is_homogeneous(objs):
        return HomogeneousClass(objs[0].specification, objs[0].signature)
    core_props, proj_props = _partition([o.sorted_specification() for o in objs], property_key)
    core_methods, proj_methods = _partition([o.sorted_signature() for o in objs], method_key)
    projections = tuple(
        Projection(o.id, pp, pm) for o, pp, pm in zip(objs, proj_props, proj_methods)
    )
    return InhomogeneousClass(ClassCore(core_props, core_methods), projections)


# ------------------------------------------------------------------ binary operations


def _matched(a: ObjectInstance, b: ObjectInstance):
    props = [p for p in a.specification if any(property_equivalent(p, q) for q in b.specification)]
    methods = [f for f in a.signature if any(method_equivalent(f, g) for g in b.signature)]
    return props, methods


def _unmatched(a: ObjectInstance, b: ObjectInstance):
    props = [p for p in a.specification if not any(property_equivalent(p, q) for q in b.specification)]
    methods = [f for f in a.signature if not any(method_equivalent(f, g) for g in b.signature)]
    return props, methods


def intersection(a: ObjectInstance, b: ObjectInstance) -> InhomogeneousClass | DoesNotExist:
    props, methods = _matched(a, b)
    if not props and not methods:
        return NoIntersection
    return InhomogeneousClass(ClassCore(props, methods))


def difference(a: ObjectInstance, b: ObjectInstance) -> InhomogeneousClass | DoesNotExist:
    props, methods = _unmatched(a, b)
    if not props and not methods:
        return NoDifference
    return InhomogeneousClass(ClassCore(), (Projection(a.id, props, methods),))


def symmetric_difference(a: ObjectInstance, b: ObjectInstance) -> InhomogeneousClass | DoesNotExist:
    pa, ma = _unmatched(a, b)
    pb, mb = _unmatched(b, a)
    if not (pa or ma or pb or mb):
        return NoSymmetricDifference
    return InhomogeneousClass(ClassCore(), (Projection(a.id, pa, ma), Projection(b.id, pb, mb)))


def clone(a: ObjectInstance, i: int) -> ObjectInstance:
    """The ``i``-th clone of ``a``: same specification and signature, id ``<a.id>_<i>``."""
    if not isinstance(i, int) or isinstance(i, bool) or i < 1:
        raise ValueError(f"clone number must be a positive integer, got {i!r}")
    return ObjectInstance(f"{a.id}_{i}", a.specification, a.signature)


# ------------------------------------------------------------------ collections


@dataclass(frozen=True)
class ObjectCollection:
    """Members grouped by equality, with the class inferred over distinct members.

    ``multiplicity`` pairs each representative (first occurrence) with its
    count. ``klass`` is ``None`` only for the empty collection.
    """

    members: tuple[ObjectInstance, ...]
    klass: ObjectClass | None
    multiplicity: tuple[tuple[ObjectInstance, int], ...]

    def __post_init__(self) -> None:
        members = tuple(self.members)
        mult = tuple((rep, int(n)) for rep, n in self.multiplicity)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "multiplicity", mult)
        if any(n < 1 for _, n in mult):
            raise ValueError("multiplicities must be at least 1")
        declared = {object_key(rep): n for rep, n in mult}
        if len(declared) != len(mult):
            raise ValueError("representatives must be pairwise distinct objects")
        if Counter(object_key(m) for m in members) != Counter(declared):
            raise ValueError("multiplicities do not match the members")
        ids = [rep.id for rep, _ in mult]
        if len(set(ids)) != len(ids):
            raise ValueError("distinct members share an identifier")
        if (self.klass is None) != (not members):
            raise ValueError("a collection has a class exactly when it is non-empty")

    @classmethod
    def empty(cls) -> ObjectCollection:
        return cls((), None, ())

    def __len__(self) -> int:
        return len(self.members)

    @property
    def cardinality(self) -> int:
        return len(self.members)

    @property
    def representatives(self) -> tuple[ObjectInstance, ...]:
        return tuple(rep for rep, _ in self.multiplicity)

    def multiplicities(self) -> dict[str, int]:
        return {rep.id: n for rep, n in self.multiplicity}


def collect(objects: Iterable[ObjectInstance], *, mode: str, strict: bool = False) -> ObjectCollection:
    """Group ``objects`` by equality into a set (deduplicated) or a multiset."""
    if mode not in ("set", "multiset"):
        raise ValueError(f"mode must be 'set' or 'multiset', got {mode!r}")
    groups: dict[tuple, list[ObjectInstance]] = {}
    for o in objects:
        groups.setdefault(object_key(o), []).append(o)
    if strict and mode == "set":
        dupes = [g[0].id for g in groups.values() if len(g) > 1]
        if dupes:
            raise DuplicateOperandError(f"equal objects among union operands: {', '.join(dupes)}")
    reps = [g[0] for g in groups.values()]
    if mode == "set":
        members = reps
        mult = [(r, 1) for r in reps]
    else:
        members = [o for g in groups.values() for o in g]
        mult = [(g[0], len(g)) for g in groups.values()]
    klass = infer_class(reps) if reps else None
    return ObjectCollection(tuple(members), klass, tuple(mult))


def union(
    operands: Sequence[ObjectInstance | ObjectCollection],
    *,
    mode: str,
    strict: bool = False,
) -> ObjectCollection:
    """Union of objects and/or collections.

    ``mode="set"`` merges equal objects (first occurrence wins);
    ``mode="multiset"`` keeps every occurrence and counts it. With
    ``strict=True``, set mode rejects equal operands instead of merging.
    """
    if not operands:
        raise ValueError("union needs at least one operand")
    n_objects = sum(isinstance(o, ObjectInstance) for o in operands)
    n_sets = len(operands) - n_objects
    flat: list[ObjectInstance] = []
    for o in operands:
        if isinstance(o, ObjectCollection):
            flat.extend(o.members)
        elif isinstance(o, ObjectInstance):
            flat.append(o)
        else:
            raise TypeError(f"cannot take the union of {type(o).__name__}")
    if n_sets == 0 and n_objects < 2:
        raise ValueError("a union of objects needs at least two objects")
    if n_objects == 0 and n_sets < 2:
        raise ValueError("a union of sets needs at least two sets")
    if n_objects and n_sets and len(flat) < 2:
        raise ValueError("a mixed union needs at least two members in total")
    return collect(flat, mode=mode, strict=strict)


def is_multiset(c: ObjectCollection) -> bool:
    return any(n >= 2 for _, n in c.multiplicity)


# ------------------------------------------------------------------ classification


def _argument_value(a: ObjectInstance, prop: QualitativeProperty) -> Value:
    arg = prop.vf.arg
    scalars = []
    for q in a.specification:
        if isinstance(q, QuantitativeProperty) and q.value is not None:
            if q.name == arg:
                return q.value
            if not isinstance(q.value, tuple):
                scalars.append(q.value)
    if len(scalars) == 1:
        return scalars[0]
    raise ClassificationError(
        prop.name, f"cannot bind argument '{arg}' to a value of object {a.id}"
    )


def classify(a: ObjectInstance, klass: ObjectClass) -> tuple[float, ...]:
    """Degree of conformity of ``a`` to each property of ``klass`` (order of :func:`class_properties`).

    A qualitative property's argument binds to the object's quantitative
    property of the same name, or to its only scalar quantitative property.
    Quantitative class properties score 1 when ``a`` has a property with the
    same units.
    """
    degrees = []
    for p in class_properties(klass):
        if isinstance(p, QualitativeProperty):
            x = _argument_value(a, p)
            try:
                degrees.append(evaluate_verification(p.vf, x))
            except ClassificationError:
                raise
            except EvaluationError as exc:
                raise ClassificationError(p.name, str(exc)) from exc
        else:
            has = any(
                isinstance(q, QuantitativeProperty) and q.units == p.units for q in a.specification
            )
            degrees.append(1.0 if has else 0.0)
    return tuple(degrees)
