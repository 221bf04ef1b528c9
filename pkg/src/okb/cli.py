"""Command-line front end.

Exit codes: 0 success (including "does not exist" algebra results),
1 knowledge-base diagnostics, 2 unknown names / malformed expressions /
evaluation errors, 3 I/O failures.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence, TextIO

from .algebra import HomogeneousClass, InhomogeneousClass, classify
from .document import serialize
from .expr import EvaluationError
from .kb import KnowledgeBase, ParseError, UnknownNameError
from .lexer import LexError, SyntaxErrorAt
from .parser import AlgebraError, evaluate_term, parse_algebra, parse_document
from .properties import ObjectInstance, QuantitativeProperty

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_IO = 3


class CommandError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.message = message
        self.code = code


def _styled(text: str, code: str, stream: TextIO) -> str:
    if os.environ.get("OKB_NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="okb", description="Object/class algebra over knowledge-base files")
    parser.add_argument(
        "--strict", action="store_true", help="reject equal operands in set-mode unions instead of merging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a knowledge base and report diagnostics")
    p.add_argument("file")

    p = sub.add_parser("eval", help="evaluate an algebra expression over KB names")
    p.add_argument("file")
    p.add_argument("expression", help='e.g. "union(A, B, C) mode set", "intersect(A, B)", "clone(A, 2)"')

    p = sub.add_parser("classify", help="degrees of conformity of objects to a class")
    p.add_argument("file")
    p.add_argument("--class", dest="klass", required=True, metavar="NAME")
    p.add_argument(
        "--objects", required=True, metavar="LIST", help="comma-separated object names or numeric literals"
    )
    p.add_argument("--matrix", action="store_true", help="print a property-by-object table")

    p = sub.add_parser("export", help="write the canonical interchange document")
    p.add_argument("file")
    p.add_argument("--select", metavar="NAME", help="export one object, class or set instead of the whole KB")
    p.add_argument("--out", metavar="FILE", help="output path (default: stdout)")
    return parser


def _load(path: str, strict: bool, err: TextIO) -> KnowledgeBase:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CommandError(f"cannot read {path}: {exc}", EXIT_IO) from None
    try:
        kb = parse_document(text, strict=strict)
    except ParseError as exc:
        for d in exc.diagnostics:
            err.write(f"{path}:{_styled(str(d), '31', err)}\n")
        raise CommandError("", EXIT_DIAGNOSTICS) from None
    for d in kb.warnings:
        err.write(f"{path}:{d}\n")
    return kb


def format_degree(d: float) -> str:
    text = f"{d:.2f}".rstrip("0").rstrip(".")
    return text or "0"


def _class_labels(klass) -> list[str]:
    labels = [p.name for p in klass.core.properties]
    for pr in klass.projections:
        labels.extend(f"{pr.owner}.{p.name}" for p in pr.properties)
    return labels


def _resolve_object(kb: KnowledgeBase, token: str) -> ObjectInstance:
    if token in kb.objects:
        return kb.objects[token]
    try:
        value = float(token)
    except ValueError:
        raise CommandError(f"unknown object {token}", EXIT_USAGE) from None
    if not math.isfinite(value):
        raise CommandError(f"unknown object {token}", EXIT_USAGE)
    return ObjectInstance(token, (QuantitativeProperty("x", value, "number"),))


def format_matrix(labels: Sequence[str], columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    """Properties as rows, objects as columns."""
    table = [["property", *columns]]
    for label, row in zip(labels, rows):
        table.append([label, *(format_degree(d) for d in row)])
    widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
    return "\n".join(lines) + "\n"


def cmd_check(args, kb: KnowledgeBase, out: TextIO) -> int:
    out.write(_styled("OK", "32", out) + "\n")
    return EXIT_OK


def cmd_eval(args, kb: KnowledgeBase, out: TextIO) -> int:
    try:
        term = parse_algebra(args.expression)
    except (SyntaxErrorAt, LexError) as exc:
        raise CommandError(f"malformed expression: {exc.message} (at column {exc.span.column})", EXIT_USAGE)
    try:
        value = evaluate_term(kb, term, strict=args.strict)
    except UnknownNameError as exc:
        raise CommandError(str(exc), EXIT_USAGE) from None
    except AlgebraError as exc:
        raise CommandError(exc.message, EXIT_USAGE) from None
    out.write(serialize(value))
    return EXIT_OK


def cmd_classify(args, kb: KnowledgeBase, out: TextIO) -> int:
    klass = kb.classes.get(args.klass)
    if not isinstance(klass, (HomogeneousClass, InhomogeneousClass)):
        kind = kb.kind_of(args.klass)
        message = f"unknown class {args.klass}" if kind is None else f"'{args.klass}' is a {kind}, not a class"
        raise CommandError(message, EXIT_USAGE)
    tokens = [t.strip() for t in args.objects.split(",") if t.strip()]
    if not tokens:
        raise CommandError("no objects given", EXIT_USAGE)
    objs = [_resolve_object(kb, t) for t in tokens]
    try:
        results = [classify(o, klass) for o in objs]
    except EvaluationError as exc:
        raise CommandError(f"evaluation error: {exc}", EXIT_USAGE) from None
    labels = _class_labels(klass)
    if args.matrix:
        rows = [[r[i] for r in results] for i in range(len(labels))]
        out.write(format_matrix(labels, tokens, rows))
    else:
        for token, degrees in zip(tokens, results):
            cells = " ".join(f"{lab}={format_degree(d)}" for lab, d in zip(labels, degrees))
            out.write(f"{token}: {cells}\n")
    return EXIT_OK


def cmd_export(args, kb: KnowledgeBase, out: TextIO) -> int:
    if args.select:
        try:
            value = kb.lookup(args.select)
        except UnknownNameError as exc:
            raise CommandError(str(exc), EXIT_USAGE) from None
    else:
        value = kb
    text = serialize(value)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CommandError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "eval": cmd_eval, "classify": cmd_classify, "export": cmd_export}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        kb = _load(args.file, args.strict, err)
        return COMMANDS[args.command](args, kb, out)
    except CommandError as exc:
        if exc.message:
            err.write(f"{_styled('error', '31', err)}: {exc.message}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
