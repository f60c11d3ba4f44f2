"""Numeric evaluation and the zero test.

``is_zero`` is exact whenever the common numerator is a polynomial in
independent atoms (symbols, opaque nodes). Otherwise it falls back to
evaluation at random rational points and flags the answer as probabilistic.
"""

from __future__ import annotations

import contextvars
import math
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import mpmath

from .expr import (
    Const,
    Expr,
    OpaqueFn,
    OpaquePartial,
    Power,
    Product,
    Sum,
    Symbol,
    SymbolicError,
    walk,
)
from .qpoly import Param, ParamExponent

DEFAULT_SEED = 0xC0FFEE
SAMPLES = 5
RANGE = 50


class NumericDomainError(SymbolicError, ValueError):
    pass


# -- float evaluation ----------------------------------------------------------


def _fpow(b: float, exp: float, integral: bool) -> float:
    if integral:
        if b == 0 and exp < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return b ** int(exp)
    if b > 0:
        return b**exp
    if b == 0:
        if exp > 0:
            return 0.0
        raise ZeroDivisionError("0 raised to a non-positive power")
    raise NumericDomainError(f"negative base {b} with non-integer exponent {exp}")


def _exp_value(exp, env) -> tuple[float, bool]:
    if isinstance(exp, ParamExponent):
        m = float(env[exp.param.name])
        v = float(exp.num(m)) / float(exp.den(m))
        return v, v.is_integer()
    return float(exp), exp.denominator == 1


def compile_numeric(e: Expr) -> Callable[[Mapping[str, float]], float]:
    """Closure evaluating ``e`` in doubles; used by the RK4 and finite-difference oracles."""
    if isinstance(e, Const):
        v = float(e.value)
        return lambda env: v
    if isinstance(e, Symbol):
        name = e.name
        return lambda env: env[name]
    if isinstance(e, Sum):
        parts = [compile_numeric(t) for t in e.terms]
        return lambda env: math.fsum(p(env) for p in parts)
    if isinstance(e, Product):
        parts = [compile_numeric(f) for f in e.factors]

        def prod(env):
            acc = 1.0
            for p in parts:
                acc *= p(env)
            return acc

        return prod
    if isinstance(e, Power):
        base = compile_numeric(e.base)
        exp = e.exp
        if isinstance(exp, ParamExponent):
            return lambda env: _fpow(base(env), *_exp_value(exp, env))
        fe, integral = float(exp), exp.denominator == 1
        return lambda env: _fpow(base(env), fe, integral)
    raise NumericDomainError(f"cannot evaluate opaque node {e} numerically")


def eval_numeric(e: Expr, bindings: Mapping) -> float:
    env = {(k.name if isinstance(k, Symbol) else k): float(v) for k, v in bindings.items()}
    missing = e.free_symbols - set(env)
    if missing:
        raise NumericDomainError(f"unbound symbols: {', '.join(sorted(missing))}")
    return compile_numeric(e)(env)


# -- high precision evaluation for the zero test -------------------------------


class _Singular(Exception):
    pass


def _mp_eval(e: Expr, env: dict, opaque: dict, memo: dict):
    if e in memo:
        return memo[e]
    if isinstance(e, Const):
        out = mpmath.mpf(e.value.numerator) / e.value.denominator
    elif isinstance(e, Symbol):
        out = env[e.name]
    elif isinstance(e, Sum):
        out = mpmath.fsum(_mp_eval(t, env, opaque, memo) for t in e.terms)
    elif isinstance(e, Product):
        out = mpmath.mpf(1)
        for f in e.factors:
            out *= _mp_eval(f, env, opaque, memo)
    elif isinstance(e, Power):
        b = _mp_eval(e.base, env, opaque, memo)
        exp = e.exp
        if isinstance(exp, ParamExponent):
            m = opaque[exp.param.name]
            den = exp.den(m)
            if den == 0:
                raise _Singular
            exp = exp.num(m) / den
        if exp.denominator == 1:
            if b == 0 and exp < 0:
                raise _Singular
            out = b ** int(exp)
        else:
            if b <= 0:
                raise _Singular
            out = mpmath.power(b, mpmath.mpf(exp.numerator) / exp.denominator)
    elif isinstance(e, (OpaqueFn, OpaquePartial)):
        out = opaque[e]
    else:
        raise TypeError(type(e))
    memo[e] = out
    return out


def _random_rational(rng: random.Random, positive: bool) -> Fraction:
    num = rng.randint(1, RANGE)
    if not positive and rng.random() < 0.5:
        num = -num
    return Fraction(num, rng.randint(1, RANGE))


def _params(e: Expr) -> dict[str, Param]:
    out = {}
    for node in walk(e):
        if isinstance(node, Power) and isinstance(node.exp, ParamExponent):
            out[node.exp.param.name] = node.exp.param
    return out


def _positive_symbols(e: Expr) -> set[str]:
    out: set[str] = set()
    for node in walk(e):
        if isinstance(node, Power):
            exp = node.exp
            if isinstance(exp, ParamExponent) or exp.denominator != 1:
                out |= node.base.free_symbols
    return out


def _is_polynomial_in_atoms(e: Expr) -> bool:
    for node in walk(e):
        if isinstance(node, Power):
            exp = node.exp
            if isinstance(exp, ParamExponent) or exp.denominator != 1:
                return False
            if not isinstance(node.base, (Symbol, OpaqueFn, OpaquePartial)):
                return False
    return True


def _is_nonzero_monomial(e: Expr) -> bool:
    """A single product of nonzero constants and powers of atoms never vanishes identically."""
    factors = e.factors if isinstance(e, Product) else (e,)
    for f in factors:
        base = f.base if isinstance(f, Power) else f
        if isinstance(base, Const):
            if base.value == 0:
                return False
        elif not isinstance(base, (Symbol, OpaqueFn, OpaquePartial)):
            return False
    return True


# -- zero test -------------------------------------------------------------------


@dataclass
class ZeroTestLog:
    seed: int = DEFAULT_SEED
    probabilistic: list[str] = field(default_factory=list)


_LOG: contextvars.ContextVar[ZeroTestLog | None] = contextvars.ContextVar("mrk_zero_log", default=None)


@contextmanager
def zero_test_context(seed: int = DEFAULT_SEED):
    """Fix the seed for probabilistic zero tests and collect a log of them."""
    log = ZeroTestLog(seed)
    token = _LOG.set(log)
    try:
        yield log
    finally:
        _LOG.reset(token)


def current_seed() -> int:
    log = _LOG.get()
    return log.seed if log else DEFAULT_SEED


@dataclass(frozen=True)
class ZeroCheck:
    value: bool
    probabilistic: bool = False

    def __bool__(self) -> bool:
        return self.value


def _numeric_zero(e: Expr, seed: int, samples: int = SAMPLES, max_draws: int = 200) -> bool:
    rng = random.Random(seed)
    names = sorted(e.free_symbols)
    params = _params(e)
    positive = _positive_symbols(e)
    opaque_nodes = sorted({n for n in walk(e) if isinstance(n, (OpaqueFn, OpaquePartial))}, key=lambda n: n.key)
    terms = e.terms if isinstance(e, Sum) else (e,)
    ok = 0
    draws = 0
    with mpmath.workdps(50):
        while ok < samples:
            draws += 1
            if draws > max_draws:
                raise SymbolicError(f"zero test could not find {samples} regular sample points")
            env = {}
            for n in names:
                p = params.get(n)
                if p is not None and p.integer:
                    lo = int(p.minimum) if p.minimum is not None else -RANGE
                    env[n] = rng.randint(lo, lo + RANGE)
                else:
                    env[n] = _random_rational(rng, n in positive)
            mp_env = {k: mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator for k, v in env.items()}
            # exact parameter values ride along for exponent evaluation
            opaque = {k: Fraction(v) for k, v in env.items() if k in params}
            for node in opaque_nodes:
                r = _random_rational(rng, False)
                opaque[node] = mpmath.mpf(r.numerator) / r.denominator
            memo: dict = {}
            try:
                vals = [_mp_eval(t, mp_env, opaque, memo) for t in terms]
            except (_Singular, ZeroDivisionError):
                continue
            total = mpmath.fsum(vals)
            scale = max([abs(v) for v in vals] + [mpmath.mpf(1)])
            if abs(total) > scale * mpmath.mpf(10) ** -35:
                return False
            ok += 1
    return True


def is_zero(e: Expr, seed: int | None = None) -> ZeroCheck:
    """Decide ``e == 0``.

    Exact when the expanded common numerator is a polynomial in independent
    atoms; otherwise random rational points decide and the result is flagged.
    """
    from .calculus import numer_denom

    if isinstance(e, Const):
        return ZeroCheck(e.value == 0)
    num, _ = numer_denom(e)
    if isinstance(num, Const):
        return ZeroCheck(num.value == 0)
    if _is_polynomial_in_atoms(num) or _is_nonzero_monomial(num):
        return ZeroCheck(False)
    value = _numeric_zero(num, current_seed() if seed is None else seed)
    log = _LOG.get()
    if log is not None:
        text = str(e) if len(str(e)) < 200 else str(e)[:197] + "..."
        log.probabilistic.append(f"{text} {'=' if value else '!='} 0")
    return ZeroCheck(value, probabilistic=True)
