"""Small expression language for verification functions and method bodies.

Expressions are trees of :class:`Num`, :class:`Name` and :class:`Op` nodes.
Operators and function calls share the ``Op`` node: ``Op("+", (a, b))``,
``Op("ramp", (x, lo, hi))``, ``Op("index", (seq, i))``.

Values are floats or tuples of floats (sequences). Comparisons evaluate to
0.0 or 1.0 so that crisp predicates compose with ``*`` as conjunction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .lexer import SyntaxErrorAt, TokenStream

Value = Union[float, tuple]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple


Expr = Union[Num, Name, Op]


class EvaluationError(ArithmeticError):
    """Raised when an expression cannot be evaluated (never coerced to 0)."""


class UnboundNameError(EvaluationError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unbound name '{name}'")
        self.name = name


ARITHMETIC = ("+", "-", "*", "/")
COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")
COMMUTATIVE = frozenset({"+", "*", "min", "max", "==", "!="})
ASSOCIATIVE = frozenset({"+", "*", "min", "max"})

# name -> (min args, max args); None means unbounded
FUNCTIONS: dict[str, tuple[int, int | None]] = {
    "min": (1, None),
    "max": (1, None),
    "clamp": (1, 3),
    "ramp": (3, 3),
    "sum": (1, 1),
    "prod": (1, 1),
    "len": (1, 1),
    "abs": (1, 1),
    "sqrt": (1, 1),
    "floor": (1, 1),
    "fract": (1, 1),
}


# ---------------------------------------------------------------- parsing


def parse_expression(source: str | TokenStream) -> Expr:
    """Parse an expression; with a string, the whole text must be consumed."""
    if isinstance(source, str):
        ts = TokenStream(source)
        e = _parse_comparison(ts)
        ts.expect("EOF", what="end of expression")
        return e
    return _parse_comparison(source)


def _parse_comparison(ts: TokenStream) -> Expr:
    left = _parse_additive(ts)
    tok = ts.current
    if tok.kind == "OP" and tok.text in COMPARISONS:
        ts.advance()
        right = _parse_additive(ts)
        nxt = ts.current
        if nxt.kind == "OP" and nxt.text in COMPARISONS:
            raise SyntaxErrorAt("comparisons cannot be chained; use '*' to combine", nxt.span)
        return Op(tok.text, (left, right))
    return left


def _parse_additive(ts: TokenStream) -> Expr:
    left = _parse_term(ts)
    while ts.at_op("+") or ts.at_op("-"):
        op = ts.advance().text
        left = Op(op, (left, _parse_term(ts)))
    return left


def _parse_term(ts: TokenStream) -> Expr:
    left = _parse_unary(ts)
    while ts.at_op("*") or ts.at_op("/"):
        op = ts.advance().text
        left = Op(op, (left, _parse_unary(ts)))
    return left


def _parse_unary(ts: TokenStream) -> Expr:
    if ts.accept_op("-"):
        operand = _parse_unary(ts)
        if isinstance(operand, Num):
            return Num(-operand.value)
        return Op("-", (Num(0.0), operand))
    return _parse_postfix(ts)


def _parse_postfix(ts: TokenStream) -> Expr:
    e = _parse_primary(ts)
    while ts.accept_op("["):
        index = _parse_comparison(ts)
        ts.expect("OP", "]")
        e = Op("index", (e, index))
    return e


def _parse_primary(ts: TokenStream) -> Expr:
    tok = ts.current
    if tok.kind == "NUMBER":
        ts.advance()
        value = float(tok.text)
        if not math.isfinite(value):
            raise SyntaxErrorAt(f"number {tok.text[:20]}... is out of range", tok.span)
        return Num(value)
    if tok.kind == "NAME":
        ts.advance()
        if not ts.at_op("("):
            return Name(tok.text)
        if tok.text not in FUNCTIONS:
            raise SyntaxErrorAt(f"unknown function '{tok.text}'", tok.span)
        ts.advance()
        args = []
        if not ts.at_op(")"):
            args.append(_parse_comparison(ts))
            while ts.accept_op(","):
                args.append(_parse_comparison(ts))
        ts.expect("OP", ")")
        lo, hi = FUNCTIONS[tok.text]
        if len(args) < lo or (hi is not None and len(args) > hi) or (tok.text == "clamp" and len(args) == 2):
            raise SyntaxErrorAt(f"wrong number of arguments to '{tok.text}'", tok.span)
        return Op(tok.text, tuple(args))
    if ts.accept_op("("):
        e = _parse_comparison(ts)
        ts.expect("OP", ")")
        return e
    found = "end of input" if tok.kind == "EOF" else repr(tok.text)
    raise SyntaxErrorAt(f"expected an expression, found {found}", tok.span)


# ---------------------------------------------------------------- printing


def format_number(x: float) -> str:
    """Shortest round-trip decimal without exponent; integral values print bare."""
    if not math.isfinite(x):
        raise ValueError(f"cannot format non-finite number {x!r}")
    if x == 0:
        return "0"
    text = repr(float(x))
    if "e" in text or "E" in text:
        mantissa, exp = text.lower().split("e")
        sign = ""
        if mantissa.startswith("-"):
            sign, mantissa = "-", mantissa[1:]
        digits = mantissa.replace(".", "")
        point = (mantissa.index(".") if "." in mantissa else len(mantissa)) + int(exp)
        if point <= 0:
            text = sign + "0." + "0" * -point + digits
        elif point >= len(digits):
            text = sign + digits + "0" * (point - len(digits))
        else:
            text = sign + digits[:point] + "." + digits[point:]
    if text.endswith(".0"):
        text = text[:-2]
    return text


_PRECEDENCE = {"+": 2, "-": 2, "*": 3, "/": 3}
_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, Op):
        if e.op in COMPARISONS:
            return 1
        if e.op in _PRECEDENCE:
            return _PRECEDENCE[e.op]
        return _ATOM
    if isinstance(e, Num) and e.value < 0:
        return 4  # unary minus
    return _ATOM


def render(e: Expr) -> str:
    """Render ``e`` as source text; ``parse_expression(render(e)) == e``."""
    if isinstance(e, Num):
        return format_number(e.value)
    if isinstance(e, Name):
        return e.id
    if e.op == "index":
        target, index = e.args
        inner = render(target)
        if _prec(target) < _ATOM:
            inner = f"({inner})"
        return f"{inner}[{render(index)}]"
    if e.op in FUNCTIONS:
        return f"{e.op}({', '.join(render(a) for a in e.args)})"
    level = _prec(e)
    parts = []
    for i, arg in enumerate(e.args):
        text = render(arg)
        p = _prec(arg)
        # left-nested chains need no parens; right operands of equal level do
        if p < level or (p == level and (i > 0 or level == 1)):
            text = f"({text})"
        parts.append(text)
    return f" {e.op} ".join(parts)


def free_names(e: Expr) -> frozenset[str]:
    if isinstance(e, Name):
        return frozenset({e.id})
    if isinstance(e, Op):
        return frozenset().union(*(free_names(a) for a in e.args))
    return frozenset()


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if isinstance(e, Name):
        return mapping.get(e.id, e)
    if isinstance(e, Op):
        return Op(e.op, tuple(substitute(a, mapping) for a in e.args))
    return e


# ---------------------------------------------------------------- evaluation


def _scalar(v: Value, what: str) -> float:
    if isinstance(v, tuple):
        raise EvaluationError(f"{what} expects a number, got a sequence")
    return v


def _sequence(v: Value, what: str) -> tuple:
    if not isinstance(v, tuple):
        raise EvaluationError(f"{what} expects a sequence, got a number")
    return v


def _apply(op: str, vals: list) -> Value:
    if op in ("+", "*"):
        # canonical forms flatten these into n-ary nodes
        nums = [_scalar(v, f"'{op}'") for v in vals]
        return sum(nums) if op == "+" else math.prod(nums)
    if op in ARITHMETIC:
        a, b = (_scalar(v, f"'{op}'") for v in vals)
        if op == "-":
            return a - b
        if b == 0:
            raise EvaluationError("division by zero")
        return a / b
    if op in COMPARISONS:
        a, b = (_scalar(v, f"'{op}'") for v in vals)
        result = {
            "<": a < b, "<=": a <= b, ">": a > b,
            ">=": a >= b, "==": a == b, "!=": a != b,
        }[op]
        return 1.0 if result else 0.0
    if op == "index":
        seq = _sequence(vals[0], "indexing")
        i = _scalar(vals[1], "index")
        if i != int(i) or not -len(seq) <= i < len(seq):
            raise EvaluationError(f"index {format_number(i)} out of range for sequence of length {len(seq)}")
        return seq[int(i)]
    if op in ("min", "max"):
        items = _sequence(vals[0], op) if len(vals) == 1 else tuple(_scalar(v, op) for v in vals)
        if not items:
            raise EvaluationError(f"{op} of an empty sequence")
        return min(items) if op == "min" else max(items)
    if op == "clamp":
        x = _scalar(vals[0], "clamp")
        lo, hi = (0.0, 1.0) if len(vals) == 1 else (_scalar(vals[1], "clamp"), _scalar(vals[2], "clamp"))
        return min(max(x, lo), hi)
    if op == "ramp":
        x, lo, hi = (_scalar(v, "ramp") for v in vals)
        if hi == lo:
            raise EvaluationError("ramp with equal bounds")
        return min(max((x - lo) / (hi - lo), 0.0), 1.0)
    if op == "sum":
        return math.fsum(_sequence(vals[0], "sum"))
    if op == "prod":
        return math.prod(_sequence(vals[0], "prod"))
    if op == "len":
        return float(len(_sequence(vals[0], "len")))
    x = _scalar(vals[0], op)
    if op == "abs":
        return abs(x)
    if op == "sqrt":
        if x < 0:
            raise EvaluationError("square root of a negative number")
        return math.sqrt(x)
    if op == "floor":
        return float(math.floor(x))
    if op == "fract":
        return x - math.floor(x)
    raise EvaluationError(f"unknown operator '{op}'")


def eval_expression(e: Expr, bindings: Mapping[str, Value]) -> Value:
    """Evaluate ``e`` with free names looked up in ``bindings``."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Name):
        try:
            v = bindings[e.id]
        except KeyError:
            raise UnboundNameError(e.id) from None
        return tuple(float(x) for x in v) if isinstance(v, (tuple, list)) else float(v)
    result = _apply(e.op, [eval_expression(a, bindings) for a in e.args])
    if isinstance(result, float) and not math.isfinite(result):
        raise EvaluationError(f"non-finite result from '{e.op}'")
    return result


# ---------------------------------------------------------------- canonical form


def sort_key(e: Expr) -> tuple:
    """Fixed total order on expression trees: numbers < names < operators."""
    if isinstance(e, Num):
        return (0, e.value)
    if isinstance(e, Name):
        return (1, e.id)
    return (2, e.op, tuple(sort_key(a) for a in e.args))


_FLIP = {">": "<", ">=": "<="}


def canonical(e: Expr) -> Expr:
    """Normalize ``e``: fold constants, flatten and sort commutative operands.

    Only value-preserving rewrites are applied (up to float rounding when
    constants are re-associated), so equal canonical forms imply equal
    functions. ``canonical`` is idempotent.
    """
    if not isinstance(e, Op):
        return e
    args = [canonical(a) for a in e.args]
    op = e.op
    if op in _FLIP:
        op, args = _FLIP[op], args[::-1]
    if op in ASSOCIATIVE and not (op in ("min", "max") and len(args) == 1):
        flat = []
        for a in args:
            if isinstance(a, Op) and a.op == op and len(a.args) > 1:
                flat.extend(a.args)
            else:
                flat.append(a)
        consts = [a for a in flat if isinstance(a, Num)]
        rest = [a for a in flat if not isinstance(a, Num)]
        if len(consts) > 1:
            folded = _try_fold(op, consts)
            if folded is not None:
                consts = [folded]
        if op == "+":
            consts = [c for c in consts if c.value != 0]
        elif op == "*":
            consts = [c for c in consts if c.value != 1]
        args = sorted(consts + rest, key=sort_key)
        if not args:
            return Num(0.0 if op == "+" else 1.0)
        if len(args) == 1:
            return args[0]
        return Op(op, tuple(args))
    if op in COMMUTATIVE:
        args = sorted(args, key=sort_key)
    if all(isinstance(a, Num) for a in args):
        try:
            v = _apply(op, [a.value for a in args])
        except EvaluationError:
            pass
        else:
            if isinstance(v, float) and math.isfinite(v):
                return Num(v + 0.0)
    return Op(op, tuple(args))


def _try_fold(op: str, consts: list[Num]) -> Num | None:
    values = sorted(c.value for c in consts)
    if op == "+":
        v = math.fsum(values)
    elif op == "*":
        v = math.prod(values)
    elif op == "min":
        v = min(values)
    else:
        v = max(values)
    if not math.isfinite(v):
        return None
    return Num(v + 0.0)


def rename_positional(e: Expr, names: tuple[str, ...]) -> Expr:
    """Replace each of ``names`` with a positional placeholder ``$0``, ``$1``, ..."""
    return substitute(e, {n: Name(f"${i}") for i, n in enumerate(names)})


# ---------------------------------------------------------------- verification functions


def _as_expr(source: str | Expr) -> Expr:
    return parse_expression(source) if isinstance(source, str) else source


@dataclass(frozen=True)
class VerificationExpression:
    """A verification function over one argument, yielding degrees in [0, 1].

    ``params`` are named constants substituted at construction time, so
    ``VerificationExpression("ramp(x, lo, hi)", params={"lo": 0, "hi": 150})`` stores
    ``ramp(x, 0, 150)``.
    """

    expr: Expr
    arg: str = "x"
    canonical: Expr = field(init=False, repr=False, compare=False)

    def __init__(self, expr: str | Expr, arg: str = "x", params: Mapping[str, float] | None = None) -> None:
        tree = _as_expr(expr)
        if params:
            if arg in params:
                raise ValueError(f"parameter '{arg}' shadows the argument")
            tree = substitute(tree, {k: Num(float(v)) for k, v in params.items()})
        object.__setattr__(self, "expr", tree)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "canonical", canonical(rename_positional(tree, (arg,))))

    @property
    def text(self) -> str:
        return render(self.expr)

    def unbound_names(self) -> frozenset[str]:
        return free_names(self.expr) - {self.arg}


def evaluate_verification(vf: VerificationExpression, x: Value) -> float:
    """Degree to which ``x`` satisfies ``vf``, clamped into [0, 1]."""
    value = eval_expression(vf.canonical, {"$0": x})
    degree = _scalar(value, "verification function")
    return min(max(degree, 0.0), 1.0)
