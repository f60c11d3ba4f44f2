"""Text and LaTeX rendering.

The text form is accepted back by :func:`mrk.symexpr.parse.parse`, so
``parse(render(e), table) == e`` for canonical ``e``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .expr import (
    Const,
    Expr,
    OpaqueFn,
    OpaquePartial,
    Power,
    Product,
    Sum,
    Symbol,
    neg,
    split_coeff,
)
from .qpoly import ParamExponent


def _is_negative_exp(e) -> bool:
    if isinstance(e, ParamExponent):
        return e.sign() == -1
    return e < 0


def _negated_power(f: Power) -> Expr:
    e = -f.exp
    if not isinstance(e, ParamExponent) and e == 1:
        return f.base
    return Power(f.base, e)


def _split_fraction(e: Expr):
    """(sign, |coeff|, numerator factors, denominator factors)."""
    c, rest = split_coeff(e)
    factors = rest.factors if isinstance(rest, Product) else (() if isinstance(rest, Const) else (rest,))
    num, den = [], []
    for f in factors:
        if isinstance(f, Power) and _is_negative_exp(f.exp):
            den.append(_negated_power(f))
        else:
            num.append(f)
    return (-1 if c < 0 else 1), abs(c), num, den


# -- text ---------------------------------------------------------------------


def render(e: Expr) -> str:
    if not isinstance(e, Expr):
        raise TypeError(f"render expects an Expr, got {type(e).__name__}")
    if isinstance(e, Const):
        return _frac(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Sum):
        return _render_sum(e)
    if isinstance(e, OpaqueFn):
        return f"{e.name}({', '.join(render(a) for a in e.args)})"
    if isinstance(e, OpaquePartial):
        idx = ",".join(str(i + 1) for i in e.indices)
        return f"D[{idx}]({e.name})({', '.join(render(a) for a in e.args)})"
    return _render_product(e)


def _frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _render_sum(e: Sum) -> str:
    out = []
    for i, t in enumerate(e.terms):
        c, _ = split_coeff(t)
        if i == 0:
            out.append(render(t))
        elif c < 0:
            out.append(" - " + render(neg(t)))
        else:
            out.append(" + " + render(t))
    return "".join(out)


def _render_product(e: Expr) -> str:
    sign, c, num, den = _split_fraction(e)
    num_parts = [_render_factor(f) for f in num]
    den_parts = [_render_factor(f) for f in den]
    if c.denominator != 1 and num_parts and not den_parts:
        # "x^2/2" would read as x^(2/2); lead with the coefficient instead
        num_parts.insert(0, _frac(c))
    else:
        if c.numerator != 1 or not num_parts:
            num_parts.insert(0, str(c.numerator))
        if c.denominator != 1:
            den_parts.insert(0, str(c.denominator))
    s = "*".join(num_parts)
    if den_parts:
        d = den_parts[0] if len(den_parts) == 1 else "(" + "*".join(den_parts) + ")"
        s = f"{s}/{d}"
    return "-" + s if sign < 0 else s


def _render_base(b: Expr) -> str:
    if isinstance(b, Const):
        v = b.value
        return _frac(v) if v > 0 and v.denominator == 1 else f"({_frac(v)})"
    if isinstance(b, (Symbol, OpaqueFn, OpaquePartial)):
        return render(b)
    return f"({render(b)})"


def render_exponent(x) -> str:
    if isinstance(x, ParamExponent):
        from .convert import exponent_expr

        ex = exponent_expr(x)
        return render(ex) if isinstance(ex, Symbol) else f"({render(ex)})"
    if x.denominator == 1 and x > 0:
        return str(x.numerator)
    return f"({_frac(x)})"


def _render_factor(f: Expr) -> str:
    if isinstance(f, Power):
        return f"{_render_base(f.base)}^{render_exponent(f.exp)}"
    if isinstance(f, Sum):
        return f"({render(f)})"
    return render(f)


# -- LaTeX --------------------------------------------------------------------

_GREEK = {
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota",
    "kappa", "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon",
    "phi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi",
    "Sigma", "Phi", "Psi", "Omega",
}

_NAME = re.compile(r"([A-Za-z]+?)(\d*)(?:_(\w+))?")


def latex_symbol(name: str) -> str:
    m = _NAME.fullmatch(name)
    if not m:
        return name
    stem, digits, tail = m.groups()
    stem_tex = "\\" + stem if stem in _GREEK else stem
    if digits and tail:
        return f"{stem_tex}^{{({digits})}}_{{{tail}}}"
    sub = digits or tail
    return f"{stem_tex}_{{{sub}}}" if sub else stem_tex


def latex(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        if v.denominator == 1:
            return str(v.numerator)
        s = f"\\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
        return "-" + s if v < 0 else s
    if isinstance(e, Symbol):
        return latex_symbol(e.name)
    if isinstance(e, Sum):
        out = []
        for i, t in enumerate(e.terms):
            c, _ = split_coeff(t)
            if i == 0:
                out.append(latex(t))
            elif c < 0:
                out.append(" - " + latex(neg(t)))
            else:
                out.append(" + " + latex(t))
        return "".join(out)
    if isinstance(e, OpaqueFn):
        return f"{latex_symbol(e.name)}\\left({', '.join(latex(a) for a in e.args)}\\right)"
    if isinstance(e, OpaquePartial):
        wrt = " ".join(f"\\partial x_{{{i + 1}}}" for i in e.indices)
        order = len(e.indices)
        top = "\\partial" + (f"^{{{order}}}" if order > 1 else "")
        args = ", ".join(latex(a) for a in e.args)
        return f"\\frac{{{top} {latex_symbol(e.name)}}}{{{wrt}}}\\left({args}\\right)"
    sign, c, num, den = _split_fraction(e)
    num_s = " ".join(_latex_factor(f) for f in num)
    if c.numerator != 1 or not num_s:
        num_s = (str(c.numerator) + " " + num_s).strip()
    den_parts = [_latex_factor(f) for f in den]
    if c.denominator != 1:
        den_parts.insert(0, str(c.denominator))
    s = f"\\frac{{{num_s}}}{{{' '.join(den_parts)}}}" if den_parts else num_s
    return "-" + s if sign < 0 else s


def _latex_exponent(x) -> str:
    if isinstance(x, ParamExponent):
        from .convert import exponent_expr

        return latex(exponent_expr(x))
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _latex_factor(f: Expr) -> str:
    if isinstance(f, Power):
        b = f.base
        if isinstance(b, (Symbol, OpaqueFn, OpaquePartial)) or (
            isinstance(b, Const) and b.value > 0 and b.value.denominator == 1
        ):
            bs = latex(b)
        else:
            bs = f"\\left({latex(b)}\\right)"
        if not isinstance(f.exp, ParamExponent) and f.exp == Fraction(1, 2):
            return f"\\sqrt{{{latex(b)}}}"
        return f"{bs}^{{{_latex_exponent(f.exp)}}}"
    if isinstance(f, Sum):
        return f"\\left({latex(f)}\\right)"
    return latex(f)
