"""Parser for the knowledge-base DSL and for algebra terms over KB names.

Grammar (whitespace-insensitive, ``#`` comments, ``;`` optional separators)::

    kb        := { objectdef | classdef | setdef }
    objectdef := "object" NAME "{" { member } "}"
    classdef  := "class" NAME ( "{" { member } "}" | "=" term )
    setdef    := "set" NAME "=" term
    member    := "quant" NAME STRING [ "=" value ]
               | "qual" NAME [ "(" NAME ")" ] "=" expr [ "where" NAME "=" number { "," NAME "=" number } ]
               | "method" NAME "(" [ NAME { "," NAME } ] ")" [ "=" expr ]
    value     := number | "[" number { "," number } "]"
    term      := NAME
               | "clone" "(" term "," NUMBER ")"
               | "union" "(" term { "," term } ")" "mode" ( "set" | "multiset" )   # mode required
               | ( "intersect" | "diff" | "symdiff" ) "(" term "," term ")"
               | "infer" "(" term { "," term } ")"
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import algebra
from .algebra import DoesNotExist, ObjectCollection
from .expr import parse_expression
from .kb import Diagnostic, KBValue, KnowledgeBase, ParseError, UnknownNameError
from .lexer import LexError, Span, SyntaxErrorAt, Token, TokenStream
from .properties import (
    MethodDescriptor,
    ObjectInstance,
    QualitativeProperty,
    QuantitativeProperty,
    VerificationExpression,
)

TOP_LEVEL = ("object", "class", "set")
OPERATIONS = ("union", "intersect", "diff", "symdiff", "infer", "clone")


class AlgebraError(ValueError):
    def __init__(self, message: str, span: Span | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Term:
    op: str  # "ref" or one of OPERATIONS
    args: tuple
    span: Span
    mode: str | None = None


# ------------------------------------------------------------------ terms


def _parse_term(ts: TokenStream) -> Term:
    tok = ts.expect("NAME", what="a name or an operation")
    if tok.text not in OPERATIONS or not ts.at_op("("):
        return Term("ref", (tok.text,), tok.span)
    ts.advance()
    if tok.text == "clone":
        target = _parse_term(ts)
        ts.expect("OP", ",")
        num = ts.expect("NUMBER", what="a clone number")
        if "." in num.text or int(num.text) < 1:
            raise SyntaxErrorAt("clone number must be a positive integer", num.span)
        ts.expect("OP", ")")
        return Term("clone", (target, int(num.text)), tok.span)
    args = [_parse_term(ts)]
    while ts.accept_op(","):
        args.append(_parse_term(ts))
    ts.expect("OP", ")")
    if tok.text in ("intersect", "diff", "symdiff") and len(args) != 2:
        raise SyntaxErrorAt(f"'{tok.text}' takes exactly two objects", tok.span)
    mode = None
    if tok.text == "union" and ts.at_keyword("mode"):
        # a missing mode is reported at evaluation, after names resolve
        ts.advance()
        m = ts.expect("NAME", what="'set' or 'multiset'")
        if m.text not in ("set", "multiset"):
            raise SyntaxErrorAt(f"unknown union mode '{m.text}'; expected 'set' or 'multiset'", m.span)
        mode = m.text
    return Term(tok.text, tuple(args), tok.span, mode)


def parse_algebra(text: str) -> Term:
    """Parse a standalone algebra term such as ``union(A, B) mode set``."""
    ts = TokenStream(text)
    term = _parse_term(ts)
    ts.expect("EOF", what="end of expression")
    return term


def _object_operand(value, term: Term) -> ObjectInstance:
    if not isinstance(value, ObjectInstance):
        raise AlgebraError(f"'{term.op}' needs objects; {_describe(term)} is not an object", term.span)
    return value


def _describe(term: Term) -> str:
    return f"'{term.args[0]}'" if term.op == "ref" else f"the result of {term.op}"


def evaluate_term(kb: KnowledgeBase, term: Term, *, strict: bool = False) -> KBValue | DoesNotExist:
    if term.op == "ref":
        name = term.args[0]
        try:
            return kb.lookup(name)
        except UnknownNameError:
            raise UnknownNameError(name, term.span) from None
    if term.op == "clone":
        target, i = term.args
        return algebra.clone(_object_operand(evaluate_term(kb, target, strict=strict), target), i)
    values = [evaluate_term(kb, t, strict=strict) for t in term.args]
    if term.op == "union" or term.op == "infer":
        for v, t in zip(values, term.args):
            if not isinstance(v, (ObjectInstance, ObjectCollection)):
                raise AlgebraError(f"'{term.op}' needs objects or sets; {_describe(t)} is neither", t.span)
        if term.op == "union" and term.mode is None:
            raise AlgebraError("union needs an explicit mode: add 'mode set' or 'mode multiset'", term.span)
        try:
            if term.op == "union":
                return algebra.union(values, mode=term.mode, strict=strict)
            members = algebra.union(values, mode="set") if len(values) > 1 else values[0]
            objs = members.representatives if isinstance(members, ObjectCollection) else (members,)
            if not objs:
                raise ValueError("cannot infer the class of an empty set")
            return algebra.infer_class(objs)
        except ValueError as exc:
            raise AlgebraError(str(exc), term.span) from exc
    a, b = (_object_operand(v, t) for v, t in zip(values, term.args))
    op = {"intersect": algebra.intersection, "diff": algebra.difference, "symdiff": algebra.symmetric_difference}
    return op[term.op](a, b)


# ------------------------------------------------------------------ documents


class _Parser:
    def __init__(self, text: str, strict: bool) -> None:
        self.ts = TokenStream(text)
        self.strict = strict
        self.kb = KnowledgeBase()
        self.errors: list[Diagnostic] = []

    def error(self, message: str, span: Span) -> None:
        self.errors.append(Diagnostic("error", message, span))

    def warn(self, message: str, span: Span) -> None:
        self.kb.warnings.append(Diagnostic("warning", message, span))

    def parse(self) -> KnowledgeBase:
        ts = self.ts
        while not ts.at("EOF"):
            if ts.accept_op(";"):
                continue
            start = ts.pos
            try:
                tok = ts.current
                if ts.at_keyword("object"):
                    self.object_def()
                elif ts.at_keyword("class"):
                    self.class_def()
                elif ts.at_keyword("set"):
                    self.set_def()
                else:
                    raise SyntaxErrorAt(f"expected 'object', 'class' or 'set', found {tok.text!r}", tok.span)
            except SyntaxErrorAt as exc:
                self.error(exc.message, exc.span)
                self.recover(start)
        if self.errors:
            raise ParseError(self.errors)
        return self.kb

    def recover(self, start: int) -> None:
        """Skip to the next top-level definition after the one starting at ``start``."""
        ts = self.ts
        ts.pos = start + 1
        depth = 0
        while not ts.at("EOF"):
            tok = ts.current
            if tok.kind == "OP" and tok.text == "{":
                depth += 1
            elif tok.kind == "OP" and tok.text == "}":
                depth -= 1
                if depth <= 0:
                    ts.advance()
                    return
            elif depth == 0 and tok.kind == "NAME" and tok.text in TOP_LEVEL:
                return
            ts.advance()

    def define(self, name: Token) -> bool:
        if name.text in self.kb:
            first = self.kb.spans.get(name.text)
            where = f" (first defined at {first})" if first else ""
            self.error(f"duplicate definition '{name.text}'{where}", name.span)
            return False
        return True

    # -- members

    def members(self, owner: str, in_class: bool):
        ts = self.ts
        ts.expect("OP", "{")
        props, methods = [], []
        names: set[str] = set()
        method_names: set[str] = set()
        ok = True
        while not ts.accept_op("}"):
            if ts.accept_op(";"):
                continue
            kw = ts.expect("NAME", what="'quant', 'qual', 'method' or '}'")
            if kw.text == "quant":
                item = self.quant(in_class)
            elif kw.text == "qual":
                item = self.qual()
            elif kw.text == "method":
                item = self.method()
            else:
                raise SyntaxErrorAt(f"expected 'quant', 'qual' or 'method', found {kw.text!r}", kw.span)
            if item is None:
                ok = False
                continue
            value, span = item
            if isinstance(value, MethodDescriptor):
                if value.name in method_names:
                    self.error(f"duplicate method name '{value.name}' in {owner}", span)
                    ok = False
                method_names.add(value.name)
                methods.append(value)
            else:
                if value.name in names:
                    self.error(f"duplicate property name '{value.name}' in {owner}", span)
                    ok = False
                names.add(value.name)
                props.append(value)
        return (props, methods) if ok else None

    def quant(self, in_class: bool):
        ts = self.ts
        name = ts.expect("NAME", what="a property name")
        units = ts.expect("STRING", what="a units string")
        if not units.text:
            self.error(f"property '{name.text}': units must be non-empty", units.span)
            if ts.accept_op("="):
                self.value()
            return None
        value = None
        if ts.accept_op("="):
            value = self.value()
            if in_class:
                self.warn(f"class property '{name.text}' is abstract; its value is ignored", name.span)
                value = None
        elif not in_class:
            raise SyntaxErrorAt(f"quantitative property '{name.text}' needs a value", ts.current.span)
        return QuantitativeProperty(name.text, value, units.text), name.span

    def number(self) -> float:
        ts = self.ts
        negative = ts.accept_op("-")
        tok = ts.expect("NUMBER", what="a number")
        value = float(tok.text)
        if not math.isfinite(value):
            raise SyntaxErrorAt(f"number {tok.text[:20]}... is out of range", tok.span)
        return -value if negative else value

    def value(self):
        ts = self.ts
        if ts.accept_op("["):
            items = [self.number()]
            while ts.accept_op(","):
                items.append(self.number())
            ts.expect("OP", "]")
            return tuple(items)
        return self.number()

    def expression(self):
        start = self.ts.current.span
        try:
            return parse_expression(self.ts)
        except SyntaxErrorAt as exc:
            raise SyntaxErrorAt(f"malformed expression: {exc.message}", exc.span or start) from None

    def qual(self):
        ts = self.ts
        name = ts.expect("NAME", what="a property name")
        arg = "x"
        if ts.accept_op("("):
            arg = ts.expect("NAME", what="an argument name").text
            ts.expect("OP", ")")
        ts.expect("OP", "=")
        body = self.expression()
        params = {}
        if ts.at_keyword("where"):
            ts.advance()
            while True:
                p = ts.expect("NAME", what="a parameter name")
                ts.expect("OP", "=")
                if p.text == arg or p.text in params:
                    self.error(f"parameter '{p.text}' of '{name.text}' is bound twice", p.span)
                    self.number()
                    return None
                params[p.text] = self.number()
                if not ts.accept_op(","):
                    break
        vf = VerificationExpression(body, arg, params)
        unbound = vf.unbound_names()
        if unbound:
            self.warn(
                f"qualitative property '{name.text}' uses unbound name(s) {', '.join(sorted(unbound))}; "
                "evaluating it will fail",
                name.span,
            )
        return QualitativeProperty(name.text, vf), name.span

    def method(self):
        ts = self.ts
        name = ts.expect("NAME", what="a method name")
        ts.expect("OP", "(")
        params = []
        if not ts.at_op(")"):
            params.append(ts.expect("NAME", what="an operand name").text)
            while ts.accept_op(","):
                params.append(ts.expect("NAME", what="an operand name").text)
        ts.expect("OP", ")")
        body = self.expression() if ts.accept_op("=") else None
        try:
            return MethodDescriptor(name.text, tuple(params), body), name.span
        except ValueError as exc:
            self.error(str(exc), name.span)
            return None

    # -- definitions

    def object_def(self) -> None:
        self.ts.advance()
        name = self.ts.expect("NAME", what="an object name")
        result = self.members(f"object {name.text}", in_class=False)
        if result is not None and self.define(name):
            props, methods = result
            self.kb.objects[name.text] = ObjectInstance(name.text, tuple(props), tuple(methods))
            self.kb.spans[name.text] = name.span

    def class_def(self) -> None:
        ts = self.ts
        ts.advance()
        name = ts.expect("NAME", what="a class name")
        if ts.at_op("{"):
            result = self.members(f"class {name.text}", in_class=True)
            if result is not None and self.define(name):
                self.kb.classes[name.text] = algebra.HomogeneousClass(*result)
                self.kb.spans[name.text] = name.span
            return
        ts.expect("OP", "=", what="'{' or '='")
        term = _parse_term(ts)
        if term.op not in ("intersect", "diff", "symdiff", "infer"):
            raise SyntaxErrorAt("a class is defined by intersect, diff, symdiff or infer", term.span)
        value = self.evaluate(term)
        if isinstance(value, DoesNotExist):
            self.error(f"class {name.text}: {value}", term.span)
        elif value is not None and self.define(name):
            self.kb.classes[name.text] = value
            self.kb.spans[name.text] = name.span

    def set_def(self) -> None:
        ts = self.ts
        ts.advance()
        name = ts.expect("NAME", what="a set name")
        ts.expect("OP", "=")
        term = _parse_term(ts)
        if term.op != "union":
            raise SyntaxErrorAt("a set is defined by union(...) mode set|multiset", term.span)
        value = self.evaluate(term)
        if value is not None and self.define(name):
            self.kb.sets[name.text] = value
            self.kb.spans[name.text] = name.span

    def evaluate(self, term: Term):
        try:
            return evaluate_term(self.kb, term, strict=self.strict)
        except UnknownNameError as exc:
            self.error(f"unresolved reference '{exc.name}'", exc.span or term.span)
        except AlgebraError as exc:
            self.error(exc.message, exc.span or term.span)
        return None


def parse_document(text: str, *, strict: bool = False) -> KnowledgeBase:
    """Parse DSL text, or an interchange document (text starting with ``{``), into a KB.

    Raises :class:`ParseError` carrying every diagnostic found; warnings of a
    successful parse are on ``kb.warnings``.
    """
    if text.lstrip().startswith("{"):
        from .document import load_knowledge_base

        return load_knowledge_base(text)
    try:
        return _Parser(text, strict).parse()
    except LexError as exc:
        raise ParseError([Diagnostic("error", exc.message, exc.span)]) from None
    except RecursionError:
        raise ParseError([Diagnostic("error", "input nested too deeply", Span(1, 1, 1, 1))]) from None
