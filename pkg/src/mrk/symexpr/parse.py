"""Recursive-descent parser for the expression language.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' exponent)?
    base     := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')'
              | 'D' '[' INT (',' INT)* ']' '(' IDENT ')' '(' expr (',' expr)* ')'
              | '(' expr ')' | '-' factor
    exponent := ['-'] INT | IDENT | '(' expr ')'

An exponent that is not a rational literal must be a rational function of a
single declared parameter, e.g. ``q1^m`` or ``t^(2/(m + 2))``. ``sqrt(e)`` is
shorthand for ``e^(1/2)``. ``D[i,j](f)(...)`` is the partial derivative of the
opaque function ``f`` in its i-th and j-th arguments (1-based).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .convert import NotRationalFunction, expr_to_exponent
from .expr import Const, Expr, Symbol, add, fn, mul, neg, partial, power
from .qpoly import Param, param_symbol_exponent

RESERVED = {"sqrt", "D"}
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class UnknownSymbol(ParseError):
    pass


class NonRationalExponent(ParseError):
    pass


@dataclass
class SymbolTable:
    """Names an expression may mention.

    ``parameters`` maps names to :class:`Param` (assumptions included);
    ``functions`` maps opaque function names to their arity. ``extra`` holds
    further free names (integration constants, variation variables).
    """

    coordinates: tuple[str, ...] = ()
    momenta: tuple[str, ...] = ()
    parameters: dict[str, Param] = field(default_factory=dict)
    functions: dict[str, int] = field(default_factory=dict)
    time: str = "t"
    extra: tuple[str, ...] = ()

    def __post_init__(self):
        self.coordinates = tuple(self.coordinates)
        self.momenta = tuple(self.momenta)
        self.extra = tuple(self.extra)
        self.parameters = {
            k: (v if isinstance(v, Param) else Param(k)) for k, v in dict(self.parameters).items()
        }
        names = [*self.coordinates, *self.momenta, *self.parameters, *self.functions, self.time, *self.extra]
        seen = set()
        for n in names:
            if not _IDENT.fullmatch(n):
                raise ValueError(f"invalid name {n!r}")
            if n in RESERVED:
                raise ValueError(f"{n!r} is reserved")
            if n in seen:
                raise ValueError(f"name {n!r} declared twice")
            seen.add(n)
        if len(self.coordinates) != len(self.momenta):
            raise ValueError("coordinates and momenta must pair up")

    @property
    def symbols(self) -> set[str]:
        return {*self.coordinates, *self.momenta, *self.parameters, self.time, *self.extra}

    def with_extra(self, *names: str) -> SymbolTable:
        return SymbolTable(
            self.coordinates, self.momenta, dict(self.parameters), dict(self.functions),
            self.time, self.extra + tuple(n for n in names if n not in self.extra),
        )


_TOKEN = re.compile(r"(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S)")


@dataclass
class _Tok:
    kind: str  # NUM, ID, OP, END
    text: str
    line: int
    col: int


def _position(text: str, pos: int) -> tuple[int, int]:
    return text.count("\n", 0, pos) + 1, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    for m in _TOKEN.finditer(text):
        line, col = _position(text, m.start())
        num, ident, op = m.groups()
        if num is not None:
            toks.append(_Tok("NUM", num, line, col))
        elif ident is not None:
            toks.append(_Tok("ID", ident, line, col))
        elif op in "+-*/^(),[]":
            toks.append(_Tok("OP", op, line, col))
        else:
            raise ParseError(f"unexpected character {op!r}", line, col)
    toks.append(_Tok("END", "", *_position(text, len(text))))
    return toks


class _Parser:
    def __init__(self, text: str, table: SymbolTable):
        self.toks = _tokenize(text)
        self.i = 0
        self.table = table

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def accept(self, op: str) -> bool:
        if self.tok.kind == "OP" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {found!r}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "END":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms)

    def term(self) -> Expr:
        acc = self.factor()
        while True:
            if self.accept("*"):
                acc = mul(acc, self.factor())
            elif self.accept("/"):
                tok = self.tok
                d = self.factor()
                if d == Const(0):
                    raise self.error("division by zero", tok)
                acc = mul(acc, power(d, -1))
            else:
                return acc

    def factor(self) -> Expr:
        base_tok = self.tok
        b = self.base()
        if self.accept("^"):
            e = self.exponent()
            try:
                return power(b, e)
            except ZeroDivisionError as exc:
                raise self.error(str(exc), base_tok) from None
        return b

    def base(self) -> Expr:
        tok = self.tok
        if tok.kind == "NUM":
            self.i += 1
            return Const(int(tok.text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("-"):
            return neg(self.factor())
        if tok.kind == "ID":
            self.i += 1
            if tok.text == "D" and self.tok.text == "[" and "D" not in self.table.symbols:
                return self.partial_call(tok)
            if self.tok.kind == "OP" and self.tok.text == "(":
                return self.call(tok)
            if tok.text not in self.table.symbols:
                raise self.error(f"unknown symbol {tok.text!r}", tok, UnknownSymbol)
            return Symbol(tok.text)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def args(self) -> list[Expr]:
        self.expect("(")
        out = [self.expr()]
        while self.accept(","):
            out.append(self.expr())
        self.expect(")")
        return out

    def call(self, tok: _Tok) -> Expr:
        name = tok.text
        if name == "sqrt":
            a = self.args()
            if len(a) != 1:
                raise self.error("sqrt takes one argument", tok)
            return power(a[0], Fraction(1, 2))
        if name not in self.table.functions:
            raise self.error(f"unknown function {name!r}", tok, UnknownSymbol)
        a = self.args()
        if len(a) != self.table.functions[name]:
            raise self.error(f"{name} expects {self.table.functions[name]} arguments, got {len(a)}", tok)
        return fn(name, a)

    def partial_call(self, tok: _Tok) -> Expr:
        self.expect("[")
        idx = [self.int_literal()]
        while self.accept(","):
            idx.append(self.int_literal())
        self.expect("]")
        self.expect("(")
        name_tok = self.tok
        if name_tok.kind != "ID" or name_tok.text not in self.table.functions:
            raise self.error("expected a declared function name", name_tok, UnknownSymbol)
        self.i += 1
        self.expect(")")
        a = self.args()
        arity = self.table.functions[name_tok.text]
        if len(a) != arity or any(not 1 <= k <= arity for k in idx):
            raise self.error("bad partial derivative indices or arity", tok)
        return partial(name_tok.text, [k - 1 for k in idx], a)

    def int_literal(self) -> int:
        if self.tok.kind != "NUM":
            raise self.error("expected an integer")
        v = int(self.tok.text)
        self.i += 1
        return v

    def exponent(self):
        tok = self.tok
        sign = -1 if self.accept("-") else 1
        if self.tok.kind == "NUM":
            # bare exponents are integers: "x^2/2" is x^2 divided by 2
            return sign * Fraction(self.int_literal())
        if self.tok.kind == "ID":
            name = self.tok.text
            if name not in self.table.parameters:
                raise self.error(f"exponent {name!r} is not a rational literal or declared parameter",
                                 cls=NonRationalExponent)
            self.i += 1
            return sign * param_symbol_exponent(self.table.parameters[name])
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            try:
                return sign * expr_to_exponent(inner, self.table.parameters)
            except (NotRationalFunction, ZeroDivisionError) as exc:
                raise self.error(str(exc), tok, NonRationalExponent) from None
        raise self.error("expected an exponent", cls=NonRationalExponent)


def parse(text: str, table: SymbolTable | None = None) -> Expr:
    return _Parser(text, table or SymbolTable()).parse()
