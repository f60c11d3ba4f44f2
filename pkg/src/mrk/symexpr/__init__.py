"""Exact symbolic expressions over the rationals."""

from .calculus import (
    NotPolynomial,
    UnsupportedOperation,
    as_polynomial,
    cancel_univariate,
    factored,
    coefficient_and_power,
    differentiate,
    expand,
    numer_denom,
    substitute,
    together,
)
from .convert import NotRationalFunction, exponent_expr, poly_to_expr, to_ratfunc
from .expr import (
    MINUS_ONE,
    ONE,
    ZERO,
    Const,
    DivisionByZero,
    Expr,
    IndeterminateSign,
    OpaqueFn,
    OpaquePartial,
    Power,
    Product,
    Sum,
    Symbol,
    SymbolicError,
    add,
    as_expr,
    const,
    fn,
    has_opaque,
    mul,
    neg,
    partial,
    power,
    simplify,
    split_coeff,
    symbol,
    walk,
)
from .parse import NonRationalExponent, ParseError, SymbolTable, UnknownSymbol, parse
from .qpoly import Param, ParamExponent, QPoly
from .render import latex, latex_symbol, render
from .zero import (
    DEFAULT_SEED,
    NumericDomainError,
    ZeroCheck,
    compile_numeric,
    eval_numeric,
    is_zero,
    zero_test_context,
)
