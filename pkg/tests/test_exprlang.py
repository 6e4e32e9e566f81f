"""Expression language: grammar, evaluation semantics, compiled handles."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vofrac.exprlang import (
    BINARY_FUNCTIONS,
    UNARY_FUNCTIONS,
    BinOp,
    BoundBivariate,
    Call,
    Const,
    DomainError,
    EvalError,
    EvalScope,
    Expr,
    Neg,
    ParseError,
    UnboundVariableError,
    Var,
    bind_bivariate,
    bind_univariate,
    check_positive_on_box,
    compile_expr,
    evaluate,
    free_vars,
    parse,
    subst,
    to_source,
)


# --------------------------------------------------------------------------
# Parsing and evaluation basics


def test_parse_evaluate_linear():
    assert evaluate(parse("2*t+1"), {"t": 3.0}) == 7.0


def test_parse_evaluate_sin_pi_half():
    assert evaluate(parse("sin(pi/2)"), {}) == 1.0


def test_parse_free_vars_gaussian_order():
    expr = parse("0.5+0.3*exp(-(t-s)^2)")
    assert free_vars(expr) == {"t", "s"}


def test_evaluate_difference():
    assert evaluate(parse("t-s"), {"t": 1.0, "s": 0.25}) == 0.75


def test_evaluate_even_power_of_negative():
    assert evaluate(parse("x^2"), {"x": -2.0}) == 4.0


def test_evaluate_log_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("log(t)"), {"t": 0.0})


def test_evaluate_division_by_zero_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("1/x"), {"x": 0.0})


def test_evaluate_zero_to_negative_power_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("x^(-1)"), {"x": 0.0})


def test_evaluate_negative_base_fractional_exponent_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("x^0.5"), {"x": -1.0})


def test_evaluate_overflow_is_domain_error_not_inf():
    with pytest.raises(DomainError):
        evaluate(parse("exp(x)"), {"x": 1e6})


def test_evaluate_unbound_variable():
    with pytest.raises(UnboundVariableError):
        evaluate(parse("t+u"), {"t": 1.0})


def test_eval_scope_reports_missing_name():
    scope = EvalScope({"t": 1.0})
    assert scope.get("t") == 1.0
    with pytest.raises(UnboundVariableError):
        scope.get("s")


def test_constants_pi_e():
    assert evaluate(parse("pi"), {}) == math.pi
    assert evaluate(parse("e"), {}) == math.e


def test_binary_functions():
    assert evaluate(parse("min(2, 3)"), {}) == 2.0
    assert evaluate(parse("max(2, 3)"), {}) == 3.0
    assert evaluate(parse("pow(2, 10)"), {}) == 1024.0


def test_scientific_notation_numbers():
    assert evaluate(parse("1e-3 + 2.5E2"), {}) == pytest.approx(250.001)


# --------------------------------------------------------------------------
# Precedence and associativity


def test_precedence_mul_over_add():
    assert evaluate(parse("2+3*4"), {}) == 14.0


def test_power_right_associative():
    assert evaluate(parse("2^3^2"), {}) == 512.0


def test_power_binds_tighter_than_unary_minus():
    assert evaluate(parse("-2^2"), {}) == -4.0


def test_unary_minus_chains():
    assert evaluate(parse("--2"), {}) == 2.0
    assert evaluate(parse("-2*3"), {}) == -6.0


def test_parenthesized_unary_base():
    assert evaluate(parse("(-2)^2"), {}) == 4.0


# --------------------------------------------------------------------------
# Parse errors carry usable offsets


@pytest.mark.parametrize(
    "source",
    ["", "   ", "2+*3", "(1+2", "foo(1)", "min(1)", "sin(1,2)", "1.2.3", "2e", "1 @ 2"],
)
def test_parse_errors(source):
    with pytest.raises(ParseError) as info:
        parse(source)
    assert 0 <= info.value.offset <= len(source)


def test_parse_error_points_at_offending_token():
    with pytest.raises(ParseError) as info:
        parse("2+*3")
    assert info.value.offset == 2
    assert info.value.token == "*"


def test_unknown_function_named_in_error():
    with pytest.raises(ParseError, match="unknown function"):
        parse("foo(1)")


def test_call_node_arity_checked_on_construction():
    with pytest.raises(ValueError):
        Call("sin", (Const(1.0), Const(2.0)))
    with pytest.raises(ValueError):
        Call("nope", (Const(1.0),))


# --------------------------------------------------------------------------
# Structural helpers


def test_free_vars_constants_only():
    assert free_vars(parse("pi*2")) == set()


def test_free_vars_repeated_variable():
    assert free_vars(parse("t*s*t")) == {"t", "s"}


def test_free_vars_in_call():
    assert free_vars(parse("min(x,y)")) == {"x", "y"}


def test_subst_builds_composition():
    g = parse("y^2+1")
    f = parse("sin(x)")
    composed = subst(g, "y", f)
    x = 0.7
    assert evaluate(composed, {"x": x}) == math.sin(x) ** 2 + 1.0


def test_exprs_are_hashable_and_immutable():
    expr = parse("t+1")
    assert hash(expr) == hash(parse("t+1"))
    with pytest.raises(Exception):
        expr.op = "-"  # type: ignore[misc]


# --------------------------------------------------------------------------
# Bound handles


def test_bind_univariate_square():
    h = bind_univariate(parse("x^2"), "x")
    assert h(3.0) == 9.0


def test_bind_univariate_constant_one():
    h = bind_univariate(parse("1"), "x")
    assert h(123.0) == 1.0
    assert np.array_equal(h.eval_array(np.array([0.0, 5.0])), np.array([1.0, 1.0]))


def test_bind_univariate_rejects_foreign_variable():
    with pytest.raises(UnboundVariableError):
        bind_univariate(parse("2*x"), "t")


def test_bind_bivariate_constant_order():
    h = bind_bivariate(parse("0.5"), "t", "s")
    assert h(0.3, 0.9) == 0.5


def test_bind_bivariate_bounded_sine_order():
    h = bind_bivariate(parse("0.6+0.2*sin(t*s)"), "t", "s")
    ts = np.linspace(0.0, 2.0, 50)
    for t in ts:
        row = h.eval_many(float(t), ts)
        assert np.all(row > 0.4) and np.all(row < 0.8)


def test_bind_bivariate_rejects_unbound():
    with pytest.raises(UnboundVariableError):
        bind_bivariate(parse("t+u"), "t", "s")


def test_eval_many_broadcasts_first_argument():
    h = bind_bivariate(parse("t-s"), "t", "s")
    s = np.array([0.0, 0.5, 1.0])
    assert np.array_equal(h.eval_many(1.0, s), 1.0 - s)


def test_compile_expr_rejects_missing_variable():
    with pytest.raises(UnboundVariableError):
        compile_expr(parse("t+s"), ("t",))


# --------------------------------------------------------------------------
# Positivity sampling


def test_positive_box_constant_half():
    h = bind_bivariate(parse("0.5"), "t", "s")
    result = check_positive_on_box(h, ((0.0, 1.0), (0.0, 1.0)))
    assert result.passed and result.min_value == 0.5


def test_positive_box_fails_on_diagonal_zero():
    h = bind_bivariate(parse("t-s"), "t", "s")
    result = check_positive_on_box(h, ((0.0, 1.0), (0.0, 1.0)))
    assert not result.passed
    assert result.min_value <= 0.0


def test_positive_box_sine_order_minimum():
    # min of 0.6 + 0.2 sin(t s) over [0,2]^2 sits at the corner t = s = 2
    # (t s = 4 is the closest the product gets to 3 pi / 2).
    h = bind_bivariate(parse("0.6+0.2*sin(t*s)"), "t", "s")
    result = check_positive_on_box(h, ((0.0, 2.0), (0.0, 2.0)))
    assert result.passed
    assert result.min_value == pytest.approx(0.6 + 0.2 * math.sin(4.0), rel=1e-12)
    assert result.min_value > 0.4
    assert result.at == (2.0, 2.0)


def test_positive_box_plain_callable_handle():
    result = check_positive_on_box(
        lambda t, s: t + s + 1.0, ((0.0, 1.0), (0.0, 1.0)), grid=5
    )
    assert result.passed and result.min_value == 1.0


def test_positive_box_validates_arguments():
    h = bind_bivariate(parse("1"), "t", "s")
    with pytest.raises(ValueError):
        check_positive_on_box(h, ((0.0, 1.0), (0.0, 1.0)), grid=1)
    with pytest.raises(ValueError):
        check_positive_on_box(h, ((1.0, 1.0), (0.0, 1.0)))


# --------------------------------------------------------------------------
# Property tests

_NAMES = ("t", "s", "x")

_leaves = st.one_of(
    st.floats(min_value=-4.0, max_value=4.0, allow_nan=False).map(Const),
    st.sampled_from(_NAMES).map(Var),
)

_exprs = st.recursive(
    _leaves,
    lambda kids: st.one_of(
        kids.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), kids, kids).map(
            lambda p: BinOp(p[0], p[1], p[2])
        ),
        st.tuples(st.sampled_from(UNARY_FUNCTIONS), kids).map(
            lambda p: Call(p[0], (p[1],))
        ),
        st.tuples(st.sampled_from(BINARY_FUNCTIONS), kids, kids).map(
            lambda p: Call(p[0], (p[1], p[2]))
        ),
    ),
    max_leaves=12,
)

_scalars = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@given(_exprs, _scalars, _scalars, _scalars)
def test_round_trip_through_source(expr, tv, sv, xv):
    scope = {"t": tv, "s": sv, "x": xv}
    reparsed = parse(to_source(expr))
    try:
        want = evaluate(expr, scope)
    except EvalError:
        with pytest.raises(EvalError):
            evaluate(reparsed, scope)
        return
    assert evaluate(reparsed, scope) == want


@given(_exprs, _scalars, _scalars, _scalars)
def test_evaluate_is_deterministic(expr, tv, sv, xv):
    scope = {"t": tv, "s": sv, "x": xv}
    try:
        first = evaluate(expr, scope)
    except EvalError:
        with pytest.raises(EvalError):
            evaluate(expr, scope)
        return
    assert evaluate(expr, scope) == first


_univariate_exprs = st.recursive(
    st.one_of(
        st.floats(min_value=-4.0, max_value=4.0, allow_nan=False).map(Const),
        st.just(Var("x")),
    ),
    lambda kids: st.one_of(
        kids.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), kids, kids).map(
            lambda p: BinOp(p[0], p[1], p[2])
        ),
        st.tuples(st.sampled_from(UNARY_FUNCTIONS), kids).map(
            lambda p: Call(p[0], (p[1],))
        ),
    ),
    max_leaves=10,
)


@given(_univariate_exprs, _scalars)
def test_compiled_handle_matches_reference_walker(expr, xv):
    handle = bind_univariate(expr, "x")
    try:
        want = evaluate(expr, {"x": xv})
    except EvalError:
        with pytest.raises(EvalError):
            handle(xv)
        return
    got = handle(xv)
    assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12)


def test_eval_array_matches_scalar_calls():
    handle = bind_univariate(parse("sin(x)*exp(-x)+x^3"), "x")
    xs = np.linspace(-2.0, 2.0, 41)
    vector = handle.eval_array(xs)
    scalars = np.array([handle(float(v)) for v in xs])
    assert np.array_equal(vector, scalars)


def test_str_of_expr_is_source():
    expr = parse("1+t")
    assert evaluate(parse(str(expr)), {"t": 2.0}) == 3.0
