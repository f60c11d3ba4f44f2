from fractions import Fraction

import pytest

from mrk.symexpr import (
    ZERO,
    Const,
    DivisionByZero,
    NonRationalExponent,
    NotPolynomial,
    Param,
    ParseError,
    QPoly,
    Symbol,
    SymbolTable,
    UnknownSymbol,
    add,
    as_polynomial,
    cancel_univariate,
    differentiate,
    expand,
    fn,
    is_zero,
    latex,
    mul,
    numer_denom,
    parse,
    power,
    render,
    substitute,
    zero_test_context,
)
from mrk.symexpr.qpoly import factor_linear, gcd, primitive_part, rational_sqrt

from conftest import TABLE

P = lambda s: parse(s, TABLE)
M = SymbolTable(("x",), ("u",), parameters={"m": Param("m", True, Fraction(3))})


class TestParse:
    def test_precedence(self):
        assert P("1 + 2*x^2") == add(Const(1), mul(Const(2), power(Symbol("x"), 2)))
        assert P("-x^2") == mul(Const(-1), power(Symbol("x"), 2))
        assert P("x/2/y") == mul(Const(Fraction(1, 2)), Symbol("x"), power(Symbol("y"), -1))

    def test_rational_exponent_needs_parentheses(self):
        assert P("x^(2/5)") == power(Symbol("x"), Fraction(2, 5))
        # bare exponent is an integer: this is (x^2)/2
        assert P("x^2/2") == mul(Const(Fraction(1, 2)), power(Symbol("x"), 2))

    def test_sqrt_and_opaque(self):
        assert P("sqrt(a)") == power(Symbol("a"), Fraction(1, 2))
        assert P("g(x, y)") == fn("g", [Symbol("x"), Symbol("y")])
        assert render(P("D[1,2](g)(x, y)")) == "D[1,2](g)(x, y)"

    def test_unknown_symbol_position(self):
        with pytest.raises(UnknownSymbol) as exc:
            P("x + zz")
        assert exc.value.column == 5

    def test_errors(self):
        for bad in ("x +", "(x", "x ^ y", "f(x, y)", "x^(1/0)", "3 4", ""):
            with pytest.raises(ParseError):
                P(bad)

    def test_non_rational_exponent(self):
        with pytest.raises(NonRationalExponent):
            P("x^(y)")

    def test_parameter_exponent(self):
        e = parse("x^(2/(m+2))", M)
        assert render(e) == "x^(2/(m + 2))"
        assert substitute(e, {"m": Const(3)}) == power(Symbol("x"), Fraction(2, 5))


class TestCanonical:
    def test_like_terms(self):
        assert P("x + x") == P("2*x")
        assert P("x - x") == ZERO
        assert P("x*x*y/y") == P("x^2")

    def test_zero_factor_with_opaque(self):
        assert mul(ZERO, fn("f", [Symbol("x")])) == ZERO

    def test_distribute_scalar_over_single_sum(self):
        assert render(P("-(x + 1)")) == "-x - 1"
        assert render(P("-(6*x^2 + 6*y^2)")) == "-6*x^2 - 6*y^2"

    def test_sum_power_content(self):
        assert render(P("(3*x + 2)^2")) == "(3*x + 2)^2"
        assert render(P("(x/2 + 1/3)^2")) == "1/36*(3*x + 2)^2"

    def test_constant_powers(self):
        assert P("4^(1/2)") == Const(2)
        assert P("(-8)^(1/3)") == Const(-2)
        assert render(P("8^(1/2)")) == "2*2^(1/2)"

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            power(P("x - x"), -1)
        with pytest.raises(ParseError):
            P("1/(x - x)")

    def test_render_roundtrip_examples(self):
        for s in ["1/2*u^2 + 1/2*v^2 - 2*x^3 - 6*x*y^2", "-2^(4/5)*5^(2/5)*x^(2/5)/(2*a^(1/5))",
                  "y^3*D[1](g)(x, y)", "(a + b*x)^(-3)"]:
            e = P(s)
            assert P(render(e)) == e


class TestCalculus:
    def test_power_rule(self):
        assert differentiate(P("x^(2/5)"), "x") == P("2/5*x^(-3/5)")
        assert differentiate(P("1/x^2"), "x") == P("-2/x^3")

    def test_chain_rule_opaque(self):
        d = differentiate(P("g(x^2, y)"), "x")
        assert render(d) == "2*x*D[1](g)(x^2, y)"

    def test_substitute_simultaneous(self):
        assert substitute(P("x + y"), {"x": Symbol("y"), "y": Symbol("x")}) == P("x + y")
        assert substitute(P("x*y"), {"x": P("y"), "y": P("2")}) == P("2*y")

    def test_substitute_zero_kills_opaque_product(self):
        e = P("y^3*D[2](g)(x, y) + y^2*g(x, y)")
        assert substitute(e, {"y": ZERO}) == ZERO

    def test_expand_and_numer_denom(self):
        assert expand(P("(x + 1)^2")) == P("x^2 + 2*x + 1")
        n, d = numer_denom(P("1/x + 1/y"))
        assert n == P("x + y") and d == P("x*y")

    def test_as_polynomial(self):
        assert as_polynomial(P("a*x^2 + b"), "x") == [Symbol("b"), ZERO, Symbol("a")]
        with pytest.raises(NotPolynomial):
            as_polynomial(P("1/x"), "x")

    def test_cancel_univariate(self):
        e = P("-2*a*(a - 1)/(a + 2)^2 + 4*a^2/(a + 2)^2")
        assert render(cancel_univariate(e)) == "2*a*(a + 1)/(a + 2)^2"


class TestZero:
    def test_exact_paths(self):
        z = is_zero(P("(x + y)^2 - x^2 - 2*x*y - y^2"))
        assert z and not z.probabilistic
        z = is_zero(P("2*2^(1/2)*a^(1/2)"))
        assert not z and not z.probabilistic

    def test_probabilistic_flag_and_log(self):
        with zero_test_context(7) as log:
            z = is_zero(P("(x^2 + 2*x + 1)^(1/2) - x - 1"))
        assert z and z.probabilistic
        assert len(log.probabilistic) == 1 and log.probabilistic[0].endswith("= 0")

    def test_nonzero_radical(self):
        z = is_zero(P("(x + 1)^(1/2) - x"))
        assert not z and z.probabilistic


class TestQPoly:
    def test_gcd_and_primitive(self):
        p = QPoly([Fraction(-1), Fraction(0), Fraction(1)])
        q = QPoly([Fraction(1), Fraction(1)])
        assert gcd(p, q) == q
        assert primitive_part(QPoly([Fraction(1, 2), Fraction(3, 4)])) == (Fraction(1, 4), [2, 3])

    def test_factor_linear(self):
        # 9m^2 + 12m + 4 = (3m + 2)^2
        content, lin, rest = factor_linear(QPoly([Fraction(4), Fraction(12), Fraction(9)]))
        assert content == 1 and lin == [(QPoly([Fraction(2), Fraction(3)]), 2)] and rest.degree == 0

    def test_rational_sqrt(self):
        assert rational_sqrt(Fraction(49, 4)) == Fraction(7, 2)
        assert rational_sqrt(Fraction(2)) is None


def test_latex_fraction():
    assert latex(P("12/x^2")) == "\\frac{12}{x^{2}}"
