import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from okb import (
    EvaluationError,
    UnboundNameError,
    VerificationExpression,
    canonical,
    eval_expression,
    evaluate_verification,
    parse_expression,
    render,
)
from okb.expr import Name, Num, Op, format_number
from okb.lexer import LexError, SyntaxErrorAt

from laws import assert_canonical_idempotent
from strategies import crisp_predicates, expressions

FINITE = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def ev(text, **bindings):
    return eval_expression(parse_expression(text), bindings)


# ------------------------------------------------------------------ parsing


def test_precedence_and_associativity():
    assert parse_expression("1 + 2 * 3") == Op("+", (Num(1.0), Op("*", (Num(2.0), Num(3.0)))))
    assert parse_expression("8 - 3 - 2") == Op("-", (Op("-", (Num(8.0), Num(3.0))), Num(2.0)))
    assert ev("8 - 3 - 2") == 3.0
    assert ev("2 * 3 < 7") == 1.0


def test_negative_literal_and_unary_minus():
    assert parse_expression("-2") == Num(-2.0)
    assert parse_expression("-x") == Op("-", (Num(0.0), Name("x")))


def test_indexing_and_calls():
    assert ev("s[2]", s=(3.0, 4.0, 5.0)) == 5.0
    assert ev("len(s)", s=(3.0, 4.0, 5.0)) == 3.0
    assert ev("prod(s)", s=(3.0, 4.0, 5.0)) == 60.0
    assert ev("clamp(1.7)") == 1.0
    assert ev("clamp(5, 0, 3)") == 3.0


@pytest.mark.parametrize(
    "text",
    ["1 +", "(1", "1 < 2 < 3", "foo(1)", "min()", "ramp(x, 1)", "1e5", "x ? 2", "", "3 4"],
)
def test_malformed_expressions_raise_with_location(text):
    with pytest.raises((SyntaxErrorAt, LexError)) as info:
        parse_expression(text)
    assert info.value.span is not None


def test_out_of_range_literal_is_rejected():
    with pytest.raises(SyntaxErrorAt):
        parse_expression("9" * 400)


# ------------------------------------------------------------------ evaluation


def test_sum_of_sides():
    assert ev("sum(sides)", sides=(3.0, 4.0, 5.0)) == 12.0


def test_ramp_midpoint():
    assert ev("ramp(x, 0, 150)", x=75.0) == 0.5


def test_division_by_zero_is_an_error():
    with pytest.raises(EvaluationError, match="division by zero"):
        ev("x / y", x=1.0, y=0.0)


def test_unbound_name_is_an_error():
    with pytest.raises(UnboundNameError) as info:
        ev("x + y", x=1.0)
    assert info.value.name == "y"


@pytest.mark.parametrize(
    "text, bindings",
    [("sqrt(x)", {"x": -1.0}), ("s[3]", {"s": (1.0, 2.0)}), ("s + 1", {"s": (1.0,)}), ("ramp(x, 2, 2)", {"x": 1.0})],
)
def test_domain_errors(text, bindings):
    with pytest.raises(EvaluationError):
        ev(text, **bindings)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (75.0, 0.5), (150.0, 1.0), (200.0, 1.0)])
def test_high_speed_ramp(x, expected):
    vf = VerificationExpression("ramp(speed, lo, hi)", arg="speed", params={"lo": 0, "hi": 150})
    assert evaluate_verification(vf, x) == pytest.approx(expected, abs=1e-12)


def test_positivity_predicate():
    assert evaluate_verification(VerificationExpression("x > 0"), 11.0) == 1.0


def test_verification_output_is_clamped():
    assert evaluate_verification(VerificationExpression("x * 10"), 3.0) == 1.0
    assert evaluate_verification(VerificationExpression("x - 10"), 3.0) == 0.0


def test_verification_error_is_not_coerced():
    with pytest.raises(EvaluationError):
        evaluate_verification(VerificationExpression("1 / x"), 0.0)
    with pytest.raises(UnboundNameError):
        evaluate_verification(VerificationExpression("x > k"), 1.0)


def test_params_are_substituted_and_cannot_shadow():
    vf = VerificationExpression("x > k", params={"k": 2})
    assert vf.text == "x > 2"
    with pytest.raises(ValueError):
        VerificationExpression("x > 1", params={"x": 2})


def test_argument_name_does_not_affect_canonical_form():
    assert VerificationExpression("s > 0", arg="s").canonical == VerificationExpression("x > 0").canonical


# ------------------------------------------------------------------ canonical form and printing


def test_canonical_folds_and_sorts():
    assert canonical(parse_expression("2 + 3")) == Num(5.0)
    assert canonical(parse_expression("x + 1")) == canonical(parse_expression("1 + x"))
    assert canonical(parse_expression("(x + 1) + 2")) == canonical(parse_expression("x + 3"))
    assert canonical(parse_expression("0 < x")) == canonical(parse_expression("x > 0"))
    assert canonical(parse_expression("x - 1")) != canonical(parse_expression("1 - x"))


def test_format_number():
    assert format_number(3.0) == "3"
    assert format_number(-0.0) == "0"
    assert format_number(0.1) == "0.1"
    assert format_number(36.87) == "36.87"
    assert format_number(1e20) == "100000000000000000000"
    assert format_number(1e-7) == "0.0000001"
    assert float(format_number(1 / 3)) == 1 / 3


def test_render_examples():
    assert render(parse_expression("(a + b) * c")) == "(a + b) * c"
    assert render(parse_expression("a - (b - c)")) == "a - (b - c)"
    assert render(parse_expression("ramp(x, 0, 150)")) == "ramp(x, 0, 150)"
    assert render(parse_expression("s[0] * s[0]")) == "s[0] * s[0]"


@settings(max_examples=300)
@given(expressions())
def test_render_parse_round_trip(e):
    assert parse_expression(render(e)) == e


@settings(max_examples=300)
@given(expressions())
def test_canonical_is_idempotent(e):
    assert_canonical_idempotent(e)


@settings(max_examples=300)
@given(expressions(), FINITE)
def test_canonical_preserves_value(e, x):
    try:
        expected = eval_expression(e, {"x": x})
    except EvaluationError:
        return
    got = eval_expression(canonical(e), {"x": x})
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)


@settings(max_examples=300)
@given(expressions(), FINITE)
def test_verification_degree_in_unit_interval(e, x):
    try:
        d = evaluate_verification(VerificationExpression(e), x)
    except EvaluationError:
        return
    assert 0.0 <= d <= 1.0


@settings(max_examples=300)
@given(crisp_predicates(), FINITE)
def test_crisp_predicates_are_crisp(e, x):
    assert evaluate_verification(VerificationExpression(e), x) in (0.0, 1.0)
