"""Differentiation, substitution, expansion and polynomial views."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .convert import NotRationalFunction, exponent_expr, poly_to_expr, to_ratfunc
from .expr import (
    ONE,
    ZERO,
    Const,
    Expr,
    OpaqueFn,
    OpaquePartial,
    Power,
    Product,
    Sum,
    Symbol,
    SymbolicError,
    add,
    mul,
    partial,
    power,
    rebuild,
    split_coeff,
)
from .qpoly import ParamExponent, QPoly, factor_linear, gcd


class NotPolynomial(SymbolicError):
    pass


class UnsupportedOperation(SymbolicError):
    pass


def _name(s) -> str:
    return s.name if isinstance(s, Symbol) else s


def differentiate(e: Expr, s) -> Expr:
    """Partial derivative of ``e`` in the symbol ``s``."""
    name = _name(s)
    memo: dict[Expr, Expr] = {}

    def d(x: Expr) -> Expr:
        if name not in x.free_symbols:
            return ZERO
        if x in memo:
            return memo[x]
        if isinstance(x, Symbol):
            out = ONE
        elif isinstance(x, Sum):
            out = add(*[d(t) for t in x.terms])
        elif isinstance(x, Product):
            fs = x.factors
            out = add(*[mul(d(f), *fs[:i], *fs[i + 1:]) for i, f in enumerate(fs)])
        elif isinstance(x, Power):
            if isinstance(x.exp, ParamExponent) and x.exp.param.name == name:
                raise UnsupportedOperation(f"cannot differentiate {x} in its exponent parameter {name}")
            out = mul(exponent_expr(x.exp), power(x.base, x.exp - 1), d(x.base))
        elif isinstance(x, (OpaqueFn, OpaquePartial)):
            idx = x.indices if isinstance(x, OpaquePartial) else ()
            out = add(*[mul(partial(x.name, idx + (i,), x.args), d(a)) for i, a in enumerate(x.args)])
        else:
            raise TypeError(type(x))
        memo[x] = out
        return out

    return d(e)


def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous substitution of symbols, followed by canonicalisation.

    Parameters used in exponents may only be bound to rational constants.
    """
    env = {_name(k): v if isinstance(v, Expr) else Const(v) for k, v in bindings.items()}
    keys = frozenset(env)
    memo: dict[Expr, Expr] = {}

    def sub(x: Expr) -> Expr:
        if not (x.free_symbols & keys):
            return x
        if x in memo:
            return memo[x]
        if isinstance(x, Symbol):
            out = env[x.name]
        elif isinstance(x, Power):
            exp = x.exp
            if isinstance(exp, ParamExponent) and exp.param.name in env:
                val = env[exp.param.name]
                if not isinstance(val, Const):
                    raise UnsupportedOperation(
                        f"exponent parameter {exp.param.name} can only be replaced by a rational constant"
                    )
                exp = exp.evaluate(val.value)
            out = power(sub(x.base), exp)
        else:
            out = rebuild(x, tuple(sub(c) for c in x.children()))
        memo[x] = out
        return out

    return sub(e)


def _mul_sums(a: list[Expr], b: list[Expr]) -> list[Expr]:
    return [mul(x, y) for x in a for y in b]


def _terms(e: Expr) -> list[Expr]:
    return list(e.terms) if isinstance(e, Sum) else [e]


def expand(e: Expr) -> Expr:
    """Distribute products over sums and multiply out positive integer powers of sums."""
    memo: dict[Expr, Expr] = {}

    def ex(x: Expr) -> Expr:
        if isinstance(x, (Const, Symbol)):
            return x
        if x in memo:
            return memo[x]
        if isinstance(x, Sum):
            out = add(*[ex(t) for t in x.terms])
        elif isinstance(x, Product):
            acc = [ONE]
            for f in x.factors:
                acc = _mul_sums(acc, _terms(ex(f)))
            out = add(*acc)
        elif isinstance(x, Power):
            b = ex(x.base)
            k = x.exp
            if isinstance(b, Sum) and not isinstance(k, ParamExponent) and k.denominator == 1 and k > 0:
                acc = [ONE]
                for _ in range(int(k)):
                    acc = _terms(add(*_mul_sums(acc, list(b.terms))))
                out = add(*acc)
            else:
                out = power(b, k)
                if out != x and not isinstance(out, Power):
                    out = ex(out)
        else:
            out = rebuild(x, tuple(ex(a) for a in x.children()))
        memo[x] = out
        return out

    return ex(e)


def _negative(exp) -> bool:
    if isinstance(exp, ParamExponent):
        return exp.sign() == -1
    return exp < 0


def _max_exp(a, b):
    diff = a - b
    if isinstance(diff, ParamExponent):
        s = diff.sign()
        if s is None:
            return a + b
        return a if s > 0 else b
    return a if diff >= 0 else b


def numer_denom(e: Expr) -> tuple[Expr, Expr]:
    """Write ``e`` over a common denominator: (expanded numerator, denominator)."""
    terms = _terms(expand(e))
    split = []
    lcm: dict[Expr, object] = {}
    for t in terms:
        factors = t.factors if isinstance(t, Product) else (t,)
        num, den = [], {}
        for f in factors:
            if isinstance(f, Power) and _negative(f.exp):
                den[f.base] = -f.exp
            else:
                num.append(f)
        for b, k in den.items():
            lcm[b] = _max_exp(lcm[b], k) if b in lcm else k
        split.append((num, den))
    parts = []
    for num, den in split:
        scale = [power(b, k - den[b]) if b in den else power(b, k) for b, k in lcm.items()]
        parts.append(mul(*num, *scale))
    numerator = expand(add(*parts))
    denominator = mul(*[power(b, k) for b, k in lcm.items()])
    return numerator, denominator


def together(e: Expr) -> Expr:
    n, d = numer_denom(e)
    return mul(n, power(d, -1))


def as_polynomial(e: Expr, s) -> list[Expr]:
    """Dense coefficient list of ``e`` in ``s`` (index = degree)."""
    from .zero import is_zero

    name = _name(s)
    var = Symbol(name)
    coeffs: dict[int, list[Expr]] = {}
    for t in _terms(expand(e)):
        factors = t.factors if isinstance(t, Product) else (t,)
        k = 0
        rest = []
        for f in factors:
            if f == var:
                k += 1
            elif isinstance(f, Power) and f.base == var:
                if isinstance(f.exp, ParamExponent) or f.exp.denominator != 1 or f.exp < 0:
                    raise NotPolynomial(f"{var} appears with exponent {f.exp}")
                k += int(f.exp)
            elif name in f.free_symbols:
                raise NotPolynomial(f"{name} occurs inside {f}")
            else:
                rest.append(f)
        coeffs.setdefault(k, []).append(mul(*rest))
    if not coeffs:
        return []
    out = [add(*coeffs.get(i, [])) for i in range(max(coeffs) + 1)]
    while out and is_zero(out[-1]):
        out.pop()
    return out


def coefficient_and_power(term: Expr, name: str):
    """Split a monomial ``c * name^k`` into (c, k); None if ``term`` is not of that shape."""
    var = Symbol(name)
    factors = term.factors if isinstance(term, Product) else (term,)
    k = Fraction(0)
    rest = []
    for f in factors:
        if f == var:
            k = k + 1
        elif isinstance(f, Power) and f.base == var:
            k = k + f.exp
        elif name in f.free_symbols:
            return None
        else:
            rest.append(f)
    return mul(*rest), k


def coeff_split(e: Expr):
    return split_coeff(e)


def factored(num: QPoly, den: QPoly, var: Expr) -> Expr:
    """Reduced num/den in ``var`` with rational linear factors pulled out."""
    g = gcd(num, den)
    num, den = num.divmod(g)[0], den.divmod(g)[0]
    cn, fnum, rn = factor_linear(num)
    cd, fden, rd = factor_linear(den)
    parts = [Const(cn / cd), poly_to_expr(rn, var), power(poly_to_expr(rd, var), -1)]
    parts += [power(poly_to_expr(f, var), k) for f, k in fnum]
    parts += [power(poly_to_expr(f, var), -k) for f, k in fden]
    return mul(*parts)


def cancel_univariate(e: Expr) -> Expr:
    """Normal form for rational functions of a single symbol; other input is returned unchanged."""
    names = e.free_symbols
    if len(names) != 1:
        return e
    (name,) = names
    try:
        num, den = to_ratfunc(expand(e), name)
    except NotRationalFunction:
        return e
    return factored(num, den, Symbol(name))
