"""Immutable expression trees kept in canonical form.

Nodes are never built directly by callers; the constructors :func:`add`,
:func:`mul`, :func:`power`, :func:`fn` and :func:`partial` return canonical
trees, so two expressions built from equal parts compare equal structurally.

Canonical form:

* sums and products are flattened, like terms merged and operands sorted by
  :func:`sort_key`;
* a product carries at most one rational coefficient, always first;
* powers have a non-product, non-power base; integer powers of constants are
  folded, fractional powers of constants are split over prime bases with the
  exponent reduced into (0, 1);
* a power of a sum with exponent other than 1 has the sum's rational content
  pulled out (signed like the leading term for integer exponents), so bases
  like ``2*x + 4`` become ``x + 2`` and ``x/2 + 1/3`` becomes ``3*x + 2``;
* a bare rational multiple of a sum is distributed: ``-(x + 1)`` is ``-x - 1``.

Powers are simplified as if every base were positive, e.g. ``(x^2)^(1/2)``
becomes ``x``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import floor
from typing import Iterable

from .qpoly import ParamExponent, exponent_sign, is_integer_exponent


class SymbolicError(Exception):
    """Base class for errors raised by the expression engine."""


class DivisionByZero(SymbolicError, ZeroDivisionError):
    pass


class IndeterminateSign(SymbolicError):
    """A power of zero whose exponent sign cannot be decided."""


def _exp_key(e):
    if isinstance(e, ParamExponent):
        return (1, e.param.name, e.num.coeffs, e.den.coeffs)
    return (0, e)


def _as_exponent(e):
    if isinstance(e, ParamExponent):
        return e
    if isinstance(e, Const):
        return e.value
    if isinstance(e, (int, Fraction)):
        return Fraction(e)
    raise TypeError(f"exponent must be rational or a parameter exponent, got {e!r}")


class Expr:
    __slots__ = ("_hash", "_key", "_free")

    rank = -1

    def _init(self, key):
        self._key = key
        self._hash = hash(key)
        self._free = None

    @property
    def key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    @property
    def free_symbols(self) -> frozenset[str]:
        if self._free is None:
            self._free = frozenset(self._collect_free())
        return self._free

    def _collect_free(self):
        out = set()
        for c in self.children():
            out |= c.free_symbols
        return out

    def children(self) -> tuple[Expr, ...]:
        return ()

    def has(self, name: str) -> bool:
        return name in self.free_symbols

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, e):
        return power(self, e)

    def __str__(self):
        from .render import render

        return render(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self}>"


class Const(Expr):
    __slots__ = ("value",)
    rank = 0

    def __init__(self, value):
        self.value = Fraction(value)
        self._init((0, self.value))


class Symbol(Expr):
    __slots__ = ("name",)
    rank = 1

    def __init__(self, name: str):
        self.name = name
        self._init((1, name))

    def _collect_free(self):
        return {self.name}


class Power(Expr):
    __slots__ = ("base", "exp")
    rank = 2

    def __init__(self, base: Expr, exp):
        self.base = base
        self.exp = exp
        self._init(base.key + (("^", _exp_key(exp)),))

    def children(self):
        return (self.base,)

    def _collect_free(self):
        out = set(self.base.free_symbols)
        if isinstance(self.exp, ParamExponent):
            out.add(self.exp.param.name)
        return out


class Product(Expr):
    __slots__ = ("factors",)
    rank = 3

    def __init__(self, factors: tuple[Expr, ...]):
        self.factors = factors
        self._init((3, tuple(f.key for f in factors)))

    def children(self):
        return self.factors


class Sum(Expr):
    __slots__ = ("terms",)
    rank = 4

    def __init__(self, terms: tuple[Expr, ...]):
        self.terms = terms
        self._init((4, tuple(t.key for t in terms)))

    def children(self):
        return self.terms


class OpaqueFn(Expr):
    """Application of an undeclared-form function such as ``beta(q1, q2)``."""

    __slots__ = ("name", "args")
    rank = 5

    def __init__(self, name: str, args: tuple[Expr, ...]):
        self.name = name
        self.args = args
        self._init((5, name, tuple(a.key for a in args)))

    def children(self):
        return self.args


class OpaquePartial(Expr):
    """Partial derivative of an opaque function; ``indices`` are 0-based and sorted."""

    __slots__ = ("name", "indices", "args")
    rank = 6

    def __init__(self, name: str, indices: tuple[int, ...], args: tuple[Expr, ...]):
        self.name = name
        self.indices = indices
        self.args = args
        self._init((6, name, indices, tuple(a.key for a in args)))

    def children(self):
        return self.args


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)


def sort_key(e: Expr):
    return e.key


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    raise TypeError(f"cannot convert {x!r} to an expression")


def const(v) -> Const:
    return Const(v)


def symbol(name: str) -> Symbol:
    return Symbol(name)


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    """Split ``e`` into rational coefficient and the remaining monomial part."""
    if isinstance(e, Const):
        return e.value, ONE
    if isinstance(e, Product) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Product(rest)
    return Fraction(1), e


def term_key(t: Expr):
    # Order sum terms by their monomial part so scaling never reorders them;
    # the constant term goes last.
    if isinstance(t, Const):
        return (1,)
    c, rest = split_coeff(t)
    return (0, rest.key, c)


def _with_coeff(c: Fraction, rest: Expr) -> Expr:
    if c == 0:
        return ZERO
    if rest == ONE:
        return Const(c)
    if c == 1:
        return rest
    if isinstance(rest, Product):
        return Product((Const(c),) + rest.factors)
    return Product((Const(c), rest))


def add(*args) -> Expr:
    const_part = Fraction(0)
    collected: dict[Expr, Fraction] = {}
    stack = list(args)
    flat: list[Expr] = []
    while stack:
        a = as_expr(stack.pop())
        if isinstance(a, Sum):
            stack.extend(a.terms)
        else:
            flat.append(a)
    for a in flat:
        if isinstance(a, Const):
            const_part += a.value
            continue
        c, rest = split_coeff(a)
        collected[rest] = collected.get(rest, 0) + c
    terms = [_with_coeff(c, rest) for rest, c in collected.items() if c != 0]
    if const_part:
        terms.append(Const(const_part))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=term_key)
    return Sum(tuple(terms))


def _scaled(coeff: Fraction, t: Expr) -> Expr:
    c, rest = split_coeff(t)
    return _with_coeff(coeff * c, rest)


def _product(coeff: Fraction, factors: list[Expr]) -> Expr:
    if coeff == 0:
        return ZERO
    if not factors:
        return Const(coeff)
    if coeff != 1 and len(factors) == 1 and isinstance(factors[0], Sum):
        # a bare numeric multiple of a sum is distributed: -(x + 1) -> -x - 1
        return add(*[_scaled(coeff, t) for t in factors[0].terms])
    factors.sort(key=sort_key)
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Product(tuple(factors))
    return Product((Const(coeff),) + tuple(factors))


def mul(*args) -> Expr:
    coeff = Fraction(1)
    bases: dict[Expr, object] = {}
    stack = list(args)
    while stack:
        a = as_expr(stack.pop())
        if isinstance(a, Product):
            stack.extend(a.factors)
            continue
        if isinstance(a, Const):
            coeff *= a.value
            continue
        if isinstance(a, Power):
            b, e = a.base, a.exp
        else:
            b, e = a, Fraction(1)
        if isinstance(b, Sum):
            # sums enter products primitive, so -(x + y)*z and (-x - y)*z coincide
            c = _content(b)
            if not is_integer_exponent(e):
                c = abs(c)
            if c != 1:
                b = add(*[_scaled(1 / c, t) for t in b.terms])
                stack.append(const_power(c, e))
        bases[b] = bases[b] + e if b in bases else e
    if coeff == 0:
        return ZERO
    factors: list[Expr] = []
    for b, e in bases.items():
        if not isinstance(e, ParamExponent) and e == 0:
            continue
        p = power(b, e)
        if isinstance(p, Const):
            coeff *= p.value
        elif isinstance(p, Product):
            for f in p.factors:
                if isinstance(f, Const):
                    coeff *= f.value
                else:
                    factors.append(f)
        else:
            factors.append(p)
    return _product(coeff, factors)


def _content(s: Sum) -> Fraction:
    # gcd of numerators over lcm of denominators, signed like the leading term
    g, d = 0, 1
    for t in s.terms:
        c, _ = split_coeff(t)
        g = math.gcd(g, c.numerator)
        d = d * c.denominator // math.gcd(d, c.denominator)
    lead, _ = split_coeff(s.terms[0])
    return Fraction(g if lead > 0 else -g, d)


def power(base, e) -> Expr:
    base = as_expr(base)
    e = _as_exponent(e)
    if not isinstance(e, ParamExponent):
        if e == 0:
            return ONE
        if e == 1:
            return base
    if isinstance(base, Const):
        return const_power(base.value, e)
    if isinstance(base, Power):
        return power(base.base, base.exp * e)
    if isinstance(base, Product):
        return mul(*[power(f, e) for f in base.factors])
    if isinstance(base, Sum):
        c = _content(base)
        if not is_integer_exponent(e):
            c = abs(c)
        if c != 1:
            primitive = add(*[mul(Const(1 / c), t) for t in base.terms])
            return mul(const_power(c, e), Power(primitive, e))
    return Power(base, e)


def factor_int(n: int, limit: int = 1_000_000) -> dict[int, int]:
    """Trial-division factorisation; a cofactor beyond ``limit`` is kept whole."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n and p <= limit:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def const_power(v: Fraction, e) -> Expr:
    v = Fraction(v)
    if v == 0:
        s = exponent_sign(e)
        if s is None:
            raise IndeterminateSign(f"sign of exponent {e!r} is undecided for base 0")
        if s > 0:
            return ZERO
        raise DivisionByZero("0 raised to a negative power")
    if v == 1:
        return ONE
    if is_integer_exponent(e):
        return Const(v ** int(e))
    coeff = Fraction(1)
    nodes: list[Expr] = []
    if v < 0:
        v = -v
        if isinstance(e, ParamExponent):
            nodes.append(Power(MINUS_ONE, e))
        elif e.denominator % 2:
            coeff = Fraction(-1) if e.numerator % 2 else Fraction(1)
        else:
            r = e % 2
            if r > 1:
                coeff, r = Fraction(-1), r - 1
            nodes.append(Power(MINUS_ONE, r))
    primes = dict(factor_int(v.numerator))
    for p, k in factor_int(v.denominator).items():
        primes[p] = primes.get(p, 0) - k
    for p, k in primes.items():
        ee = e * k
        if isinstance(ee, ParamExponent):
            ip, rest = ee.split_integer_part()
            coeff *= Fraction(p) ** ip
            if isinstance(rest, ParamExponent) or rest != 0:
                nodes.append(Power(Const(p), rest))
        else:
            ip = floor(ee)
            coeff *= Fraction(p) ** ip
            frac = ee - ip
            if frac:
                nodes.append(Power(Const(p), frac))
    return _product(coeff, nodes)


def fn(name: str, args: Iterable) -> OpaqueFn:
    return OpaqueFn(name, tuple(as_expr(a) for a in args))


def partial(name: str, indices: Iterable[int], args: Iterable) -> Expr:
    idx = tuple(sorted(indices))
    if not idx:
        return fn(name, args)
    return OpaquePartial(name, idx, tuple(as_expr(a) for a in args))


def rebuild(e: Expr, children: tuple[Expr, ...]) -> Expr:
    """Rebuild a node of the same kind from new children through the constructors."""
    if isinstance(e, Sum):
        return add(*children)
    if isinstance(e, Product):
        return mul(*children)
    if isinstance(e, Power):
        return power(children[0], e.exp)
    if isinstance(e, OpaqueFn):
        return fn(e.name, children)
    if isinstance(e, OpaquePartial):
        return partial(e.name, e.indices, children)
    return e


def simplify(e: Expr) -> Expr:
    """Re-canonicalise bottom-up; the identity on trees built by the constructors."""
    kids = e.children()
    if not kids:
        return e
    return rebuild(e, tuple(simplify(k) for k in kids))


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


def has_opaque(e: Expr) -> bool:
    return any(isinstance(n, (OpaqueFn, OpaquePartial)) for n in walk(e))
