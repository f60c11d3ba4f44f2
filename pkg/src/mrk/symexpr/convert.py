"""Conversions between expressions and univariate polynomials / exponents."""

from __future__ import annotations

from .expr import Const, Expr, Power, Product, Sum, Symbol, add, mul, power
from .qpoly import Param, ParamExponent, QPoly, make_exponent


class NotRationalFunction(ValueError):
    pass


def poly_to_expr(p: QPoly, var: Expr) -> Expr:
    return add(*[mul(Const(c), power(var, i)) for i, c in enumerate(p.coeffs) if c])


def exponent_expr(e) -> Expr:
    """Expression form of an exponent, e.g. ``2/(m + 2)``."""
    if isinstance(e, ParamExponent):
        m = Symbol(e.param.name)
        return mul(poly_to_expr(e.num, m), power(poly_to_expr(e.den, m), -1))
    return Const(e)


def to_ratfunc(e: Expr, var: str) -> tuple[QPoly, QPoly]:
    """(num, den) with ``e == num(var)/den(var)``; raises if ``e`` is not such a function."""
    if isinstance(e, Const):
        return QPoly([e.value]), QPoly([1])
    if isinstance(e, Symbol):
        if e.name != var:
            raise NotRationalFunction(f"unexpected symbol {e.name}")
        return QPoly.x(), QPoly([1])
    if isinstance(e, Sum):
        num, den = QPoly(), QPoly([1])
        for t in e.terms:
            n, d = to_ratfunc(t, var)
            num, den = num * d + n * den, den * d
        return num, den
    if isinstance(e, Product):
        num, den = QPoly([1]), QPoly([1])
        for f in e.factors:
            n, d = to_ratfunc(f, var)
            num, den = num * n, den * d
        return num, den
    if isinstance(e, Power) and not isinstance(e.exp, ParamExponent) and e.exp.denominator == 1:
        n, d = to_ratfunc(e.base, var)
        k = int(e.exp)
        return (n**k, d**k) if k > 0 else (d**-k, n**-k)
    raise NotRationalFunction(f"{e} is not a rational function of {var}")


def expr_to_exponent(e: Expr, params: dict[str, Param]):
    """Fraction or ParamExponent equal to ``e``; at most one parameter may occur."""
    if isinstance(e, Const):
        return e.value
    names = e.free_symbols
    if len(names) != 1:
        raise NotRationalFunction(f"exponent {e} must involve exactly one declared parameter")
    (name,) = names
    if name not in params:
        raise NotRationalFunction(f"exponent symbol {name} is not a declared parameter")
    num, den = to_ratfunc(e, name)
    return make_exponent(params[name], num, den)
