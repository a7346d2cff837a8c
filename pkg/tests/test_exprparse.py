import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfrac.exprparse import (
    Binary,
    Call,
    EvalError,
    Num,
    ParseError,
    Unary,
    Var,
    evaluate,
    parse,
    to_source,
)

VARS = frozenset({"t", "u"})


def ev(source, **bindings):
    return evaluate(parse(source, VARS), bindings)


class TestPrecedence:
    # each entry: source, bindings, expected value
    TABLE = [
        ("1+2*3", {}, 7.0),
        ("(1+2)*3", {}, 9.0),
        ("2*3+1", {}, 7.0),
        ("10-4-3", {}, 3.0),
        ("12/4/3", {}, 1.0),
        ("10-2*3", {}, 4.0),
        ("2^3^2", {}, 512.0),
        ("(2^3)^2", {}, 64.0),
        ("2^2*3", {}, 12.0),
        ("3*2^2", {}, 12.0),
        ("-2^2", {}, -4.0),
        ("(-2)^2", {}, 4.0),
        ("2^-3", {}, 0.125),
        ("-2-3", {}, -5.0),
        ("- -3", {}, 3.0),
        ("2*-3", {}, -6.0),
        ("1+t*u", {"t": 2.0, "u": 3.0}, 7.0),
        ("t^2-u", {"t": 3.0, "u": 4.0}, 5.0),
        ("exp(0)+cos(0)", {}, 2.0),
        ("sqrt(t^2+u^2)", {"t": 3.0, "u": 4.0}, 5.0),
    ]

    @pytest.mark.parametrize("source,bindings,want", TABLE)
    def test_table(self, source, bindings, want):
        assert ev(source, **bindings) == pytest.approx(want, rel=1e-14)

    def test_scientific_notation(self):
        assert ev("1.5e2+.5") == pytest.approx(150.5)


class TestAstShape:
    def test_right_assoc_power(self):
        node = parse("2^3^2", VARS)
        assert node == Binary("^", Num(2.0), Binary("^", Num(3.0), Num(2.0)))

    def test_unary_binds_looser_than_power(self):
        assert parse("-2^2", VARS) == Unary("-", Binary("^", Num(2.0),
                                                        Num(2.0)))

    def test_call(self):
        assert parse("sin(t)", VARS) == Call("sin", Var("t"))


class TestParseErrors:
    def test_dangling_operator(self):
        with pytest.raises(ParseError, match=r"^1:4: expected expression"):
            parse("t +", VARS)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier 'x'"):
            parse("x + 1", VARS)

    def test_unknown_function(self):
        with pytest.raises(ParseError, match="unknown function 'tan'"):
            parse("tan(t)", VARS)

    def test_no_implicit_multiplication(self):
        with pytest.raises(ParseError, match="unexpected trailing input"):
            parse("2t", VARS)

    def test_unbalanced_paren(self):
        with pytest.raises(ParseError, match=r"expected '\)'"):
            parse("(1+2", VARS)

    def test_empty(self):
        with pytest.raises(ParseError, match="1:1: expected expression"):
            parse("  ", VARS)

    def test_bad_character(self):
        with pytest.raises(ParseError, match="unexpected character"):
            parse("1 & 2", VARS)

    def test_column_is_one_based(self):
        with pytest.raises(ParseError) as exc:
            parse("u * * t", VARS)
        assert exc.value.col == 5


class TestEvalErrors:
    def test_division_by_zero(self):
        with pytest.raises(EvalError, match="division by zero"):
            ev("1/(t-1)", t=1.0)

    def test_log_domain(self):
        with pytest.raises(EvalError, match="log of nonpositive"):
            ev("log(t)", t=0.0)

    def test_sqrt_domain(self):
        with pytest.raises(EvalError, match="sqrt of negative"):
            ev("sqrt(t)", t=-1.0)

    def test_negative_base_fractional_power(self):
        with pytest.raises(EvalError, match="negative base"):
            ev("t^0.5", t=-2.0)

    def test_negative_base_integer_power_ok(self):
        assert ev("t^3", t=-2.0) == -8.0

    def test_unbound_variable(self):
        with pytest.raises(EvalError, match="unbound variable"):
            evaluate(parse("t+u", VARS), {"t": 1.0})


def exprs(depth=3):
    """Random ASTs over t and u with nonnegative literals."""
    leaf = st.one_of(
        st.floats(0.0, 10.0).map(Num),
        st.sampled_from(["t", "u"]).map(Var),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/"), children, children).map(
                lambda t: Binary(*t)),
            children.map(lambda c: Unary("-", c)),
            st.tuples(st.sampled_from(["sin", "cos", "abs"]), children).map(
                lambda t: Call(*t)),
        )

    return st.recursive(leaf, extend, max_leaves=12)


class TestRoundTrip:
    @given(expr=exprs())
    @settings(max_examples=150, deadline=None)
    def test_print_then_parse_is_identity(self, expr):
        assert parse(to_source(expr), VARS) == expr

    @given(expr=exprs(), t=st.floats(0.1, 3.0), u=st.floats(0.1, 3.0))
    @settings(max_examples=100, deadline=None)
    def test_evaluation_survives_round_trip(self, expr, t, u):
        bindings = {"t": t, "u": u}
        try:
            want = evaluate(expr, bindings)
        except EvalError:
            return
        got = evaluate(parse(to_source(expr), VARS), bindings)
        if math.isnan(want):
            assert math.isnan(got)
        else:
            assert got == want

    @given(t=st.floats(0.1, 2.0), u=st.floats(0.1, 2.0))
    @settings(max_examples=50, deadline=None)
    def test_purity(self, t, u):
        node = parse("exp(t)*u - sin(u)/2 + t^2", VARS)
        first = evaluate(node, {"t": t, "u": u})
        for _ in range(3):
            assert evaluate(node, {"t": t, "u": u}) == first
