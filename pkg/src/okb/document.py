"""Canonical interchange documents (JSON-shaped, ``format`` 1).

Output is deterministic: properties and methods in name order, KB entries
in name order, fixed field order, numbers in shortest round-trip decimal
form without exponents.
"""

from __future__ import annotations

import json
from typing import Any

from .algebra import (
    ClassCore,
    DoesNotExist,
    HomogeneousClass,
    InhomogeneousClass,
    ObjectCollection,
    Projection,
)
from .expr import VerificationExpression, format_number, parse_expression, render
from .kb import Diagnostic, KnowledgeBase, ParseError
from .lexer import LexError, Span, SyntaxErrorAt
from .properties import (
    MethodDescriptor,
    ObjectInstance,
    QualitativeProperty,
    QuantitativeProperty,
    object_key,
)

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """An interchange document is well-formed JSON but not a valid document."""


# ------------------------------------------------------------------ encoding


def _property_doc(p) -> dict:
    if isinstance(p, QuantitativeProperty):
        value = p.value
        if isinstance(value, tuple):
            value = list(value)
        return {"kind": "quantitative", "name": p.name, "units": p.units, "value": value}
    return {"kind": "qualitative", "name": p.name, "argument": p.vf.arg, "expression": p.vf.text}


def _method_doc(f: MethodDescriptor) -> dict:
    return {
        "name": f.name,
        "parameters": list(f.params),
        "body": None if f.body is None else render(f.body),
    }


def _members_doc(props, methods) -> dict:
    return {
        "properties": [_property_doc(p) for p in sorted(props, key=lambda p: p.name)],
        "methods": [_method_doc(f) for f in sorted(methods, key=lambda f: f.name)],
    }


def object_doc(a: ObjectInstance) -> dict:
    return {"id": a.id, **_members_doc(a.specification, a.signature)}


def class_doc(k) -> dict:
    if isinstance(k, HomogeneousClass):
        return {"kind": "homogeneous", "core": _members_doc(k.specification, k.signature), "projections": []}
    return {
        "kind": "inhomogeneous",
        "core": _members_doc(k.core.properties, k.core.methods),
        "projections": [
            {"owner": pr.owner, **_members_doc(pr.properties, pr.methods)} for pr in k.projections
        ],
    }


def collection_doc(c: ObjectCollection) -> dict:
    return {
        "members": [object_doc(m) for m in c.members],
        "multiplicity": {rep.id: n for rep, n in c.multiplicity},
        "class": None if c.klass is None else class_doc(c.klass),
    }


def to_document(value) -> dict:
    head = {"format": FORMAT_VERSION}
    if isinstance(value, KnowledgeBase):
        return {
            **head,
            "objects": {k: object_doc(value.objects[k]) for k in sorted(value.objects)},
            "classes": {k: class_doc(value.classes[k]) for k in sorted(value.classes)},
            "sets": {k: collection_doc(value.sets[k]) for k in sorted(value.sets)},
        }
    if isinstance(value, ObjectInstance):
        return {**head, "object": object_doc(value)}
    if isinstance(value, (HomogeneousClass, InhomogeneousClass)):
        return {**head, "class": class_doc(value)}
    if isinstance(value, ObjectCollection):
        return {**head, "set": collection_doc(value)}
    if isinstance(value, DoesNotExist):
        return {**head, "result": "does not exist", "operation": value.value}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _emit(x: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if x is None:
        out.append("null")
    elif isinstance(x, bool):
        out.append("true" if x else "false")
    elif isinstance(x, int):
        out.append(str(x))
    elif isinstance(x, float):
        out.append(format_number(x))
    elif isinstance(x, str):
        out.append(json.dumps(x, ensure_ascii=False))
    elif isinstance(x, list):
        if not x:
            out.append("[]")
            return
        if not any(isinstance(v, (list, dict)) for v in x):
            inline: list[str] = []
            for v in x:
                _emit(v, 0, inline)
                inline.append(", ")
            out.append("[" + "".join(inline[:-1]) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(x):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(x) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(x, dict):
        if not x:
            out.append("{}")
            return
        out.append("{\n")
        items = list(x.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + "  " + json.dumps(k, ensure_ascii=False) + ": ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot encode {type(x).__name__}")


def dumps(doc: dict) -> str:
    out: list[str] = []
    _emit(doc, 0, out)
    out.append("\n")
    return "".join(out)


def serialize(value) -> str:
    """Canonical document text for a KB, object, class, collection or does-not-exist result."""
    return dumps(to_document(value))


# ------------------------------------------------------------------ decoding


def _field(d: Any, key: str, kind: type | tuple, where: str):
    if not isinstance(d, dict):
        raise DocumentError(f"{where}: expected an object")
    if key not in d:
        raise DocumentError(f"{where}: missing field '{key}'")
    v = d[key]
    if not isinstance(v, kind) or isinstance(v, bool):
        raise DocumentError(f"{where}: field '{key}' has the wrong type")
    return v


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DocumentError(f"{where}: expected a number")
    return float(v)


def _expr(text: str, where: str):
    try:
        return parse_expression(text)
    except (SyntaxErrorAt, LexError) as exc:
        raise DocumentError(f"{where}: malformed expression: {exc.message}") from None


def _load_property(d, where: str):
    kind = _field(d, "kind", str, where)
    name = _field(d, "name", str, where)
    where = f"{where} '{name}'"
    if kind == "quantitative":
        units = _field(d, "units", str, where)
        raw = d.get("value")
        if isinstance(raw, list):
            value = tuple(_number(v, where) for v in raw)
        elif raw is None:
            value = None
        else:
            value = _number(raw, where)
        return QuantitativeProperty(name, value, units)
    if kind == "qualitative":
        arg = _field(d, "argument", str, where)
        text = _field(d, "expression", str, where)
        return QualitativeProperty(name, VerificationExpression(_expr(text, where), arg))
    raise DocumentError(f"{where}: unknown property kind '{kind}'")


def _load_method(d, where: str) -> MethodDescriptor:
    name = _field(d, "name", str, where)
    params = _field(d, "parameters", list, where)
    if not all(isinstance(p, str) for p in params):
        raise DocumentError(f"{where} '{name}': parameters must be names")
    body = d.get("body")
    if body is not None and not isinstance(body, str):
        raise DocumentError(f"{where} '{name}': body must be text")
    return MethodDescriptor(name, tuple(params), None if body is None else _expr(body, where))


def _load_members(d, where: str):
    props = _field(d, "properties", list, where)
    methods = _field(d, "methods", list, where)
    return (
        tuple(_load_property(p, f"{where} property") for p in props),
        tuple(_load_method(m, f"{where} method") for m in methods),
    )


def load_object(d, where: str = "object") -> ObjectInstance:
    oid = _field(d, "id", str, where)
    props, methods = _load_members(d, f"object {oid}")
    return ObjectInstance(oid, props, methods)


def load_class(d, where: str = "class"):
    kind = _field(d, "kind", str, where)
    core_props, core_methods = _load_members(_field(d, "core", dict, where), f"{where} core")
    projections = _field(d, "projections", list, where)
    if kind == "homogeneous":
        if projections:
            raise DocumentError(f"{where}: a homogeneous class has no projections")
        return HomogeneousClass(core_props, core_methods)
    if kind == "inhomogeneous":
        prs = []
        for pr in projections:
            owner = _field(pr, "owner", str, f"{where} projection")
            props, methods = _load_members(pr, f"{where} projection {owner}")
            prs.append(Projection(owner, props, methods))
        return InhomogeneousClass(ClassCore(core_props, core_methods), tuple(prs))
    raise DocumentError(f"{where}: unknown class kind '{kind}'")


def load_collection(d, where: str = "set") -> ObjectCollection:
    members = tuple(load_object(m, f"{where} member") for m in _field(d, "members", list, where))
    mult = _field(d, "multiplicity", dict, where)
    klass_doc = d.get("class") if isinstance(d, dict) else None
    klass = None if klass_doc is None else load_class(klass_doc, f"{where} class")
    firsts: dict[tuple, ObjectInstance] = {}
    for m in members:
        firsts.setdefault(object_key(m), m)
    reps = {m.id: m for m in firsts.values()}
    pairs = []
    for rid, n in mult.items():
        if rid not in reps or isinstance(n, bool) or not isinstance(n, int):
            raise DocumentError(f"{where}: bad multiplicity entry '{rid}'")
        pairs.append((reps[rid], n))
    return ObjectCollection(members, klass, tuple(pairs))


def _check_format(doc, where: str = "document") -> None:
    fmt = _field(doc, "format", int, where)
    if fmt != FORMAT_VERSION:
        raise DocumentError(f"unsupported format version {fmt}")


def _load_kb(doc) -> KnowledgeBase:
    kb = KnowledgeBase()
    for table, loader, key, label in (
        (kb.objects, load_object, "objects", "object"),
        (kb.classes, load_class, "classes", "class"),
        (kb.sets, load_collection, "sets", "set"),
    ):
        for name, entry in _field(doc, key, dict, "document").items():
            if name in kb:
                raise DocumentError(f"duplicate definition '{name}'")
            table[name] = loader(entry, f"{label} {name}")
    for name, obj in kb.objects.items():
        if obj.id != name:
            raise DocumentError(f"object {name}: id '{obj.id}' does not match its name")
    return kb


def deserialize(text: str):
    """Inverse of :func:`serialize`. Raises :class:`DocumentError` on invalid documents."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at {exc.lineno}:{exc.colno}: {exc.msg}") from None
    _check_format(doc)
    try:
        if "objects" in doc or "classes" in doc or "sets" in doc:
            return _load_kb(doc)
        if "object" in doc:
            return load_object(doc["object"])
        if "class" in doc:
            return load_class(doc["class"])
        if "set" in doc:
            return load_collection(doc["set"])
        if doc.get("result") == "does not exist":
            return DoesNotExist(doc.get("operation"))
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc)) from exc
    raise DocumentError("document holds no recognizable value")


def load_knowledge_base(text: str) -> KnowledgeBase:
    """Interchange document to KB, reporting problems as :class:`ParseError` diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        span = Span(exc.lineno, exc.colno, exc.lineno, exc.colno + 1)
        raise ParseError([Diagnostic("error", f"invalid JSON: {exc.msg}", span)]) from None
    try:
        _check_format(doc)
        return _load_kb(doc)
    except ValueError as exc:
        raise ParseError([Diagnostic("error", str(exc), Span(1, 1, 1, 1))]) from None


# ------------------------------------------------------------------ structural equality


def structurally_equal(x, y) -> bool:
    """Equality of content up to declaration order; object ids count, spans do not."""
    if isinstance(x, KnowledgeBase) and isinstance(y, KnowledgeBase):
        return all(
            tx.keys() == ty.keys() and all(structurally_equal(tx[k], ty[k]) for k in tx)
            for tx, ty in ((x.objects, y.objects), (x.classes, y.classes), (x.sets, y.sets))
        )
    if isinstance(x, ObjectInstance) and isinstance(y, ObjectInstance):
        return x.canonical() == y.canonical()
    if isinstance(x, ObjectCollection) and isinstance(y, ObjectCollection):
        return (
            len(x.members) == len(y.members)
            and all(structurally_equal(a, b) for a, b in zip(x.members, y.members))
            and len(x.multiplicity) == len(y.multiplicity)
            and all(
                na == nb and structurally_equal(ra, rb)
                for (ra, na), (rb, nb) in zip(x.multiplicity, y.multiplicity)
            )
            and x.klass == y.klass
        )
    return type(x) is type(y) and x == y
