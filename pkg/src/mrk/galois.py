"""Galois classification of xi'' = r(t) xi and the non-integrability verdict.

Only the families met along invariant planes are recognised: constant r,
Cauchy-Euler r = r0/t^2 and polynomial r. For Cauchy-Euler equations the
solutions are t^rho with rho(rho - 1) = r0, which gives the group directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .symexpr import (
    Const,
    Expr,
    NotPolynomial,
    NotRationalFunction,
    Param,
    QPoly,
    Symbol,
    add,
    as_polynomial,
    cancel_univariate,
    expand,
    factored,
    is_zero,
    mul,
    poly_to_expr,
    power,
    render,
    substitute,
    to_ratfunc,
)
from .symexpr.qpoly import gcd, primitive_part, rational_sqrt
from .variational import ScalarSecondOrderODE


class EmptyEvidence(ValueError):
    pass


class Group(str, Enum):
    IDENTITY = "Identity"
    CYCLIC = "CyclicOfOrder"
    TORUS = "MultiplicativeTorus"
    UNIPOTENT = "AdditiveUnipotentExtension"
    BOREL = "Borel"
    SL2 = "SL2"
    NON_ABELIAN = "UndeterminedNonAbelian"
    UNDETERMINED = "Undetermined"


class Abelian(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


ABELIAN = {
    Group.IDENTITY: Abelian.YES,
    Group.CYCLIC: Abelian.YES,
    Group.TORUS: Abelian.YES,
    Group.UNIPOTENT: Abelian.YES,
    Group.BOREL: Abelian.NO,
    Group.SL2: Abelian.NO,
    Group.NON_ABELIAN: Abelian.NO,
    Group.UNDETERMINED: Abelian.UNKNOWN,
}


@dataclass(frozen=True)
class CoefficientClass:
    tag: str  # CauchyEuler | ConstantCoeff | PolynomialCoeff | Unsupported
    r0: Expr | None = None
    coefficients: tuple[Expr, ...] = ()
    reason: str = ""

    @property
    def degree(self) -> int | None:
        return len(self.coefficients) - 1 if self.coefficients else None


@dataclass(frozen=True)
class GaloisClassification:
    group: Group
    order: int | None = None
    order_text: str | None = None
    exponents: tuple[Expr, Expr] | None = None
    notes: str = ""
    label: str = ""

    @property
    def abelian(self) -> Abelian:
        return ABELIAN[self.group]

    def describe(self) -> str:
        if self.group is Group.CYCLIC:
            return f"CyclicOfOrder({self.order if self.order is not None else self.order_text})"
        return self.group.value


@dataclass(frozen=True)
class Verdict:
    outcome: str  # NonIntegrable | Inconclusive
    basis: tuple[GaloisClassification, ...]
    category: str = "meromorphic"
    warnings: tuple[str, ...] = field(default=())


# -- coefficient patterns --------------------------------------------------------


def classify_coefficient(ode: ScalarSecondOrderODE) -> CoefficientClass:
    r, t = ode.r, ode.t
    if ode.implicit:
        return CoefficientClass("Unsupported", reason=f"coefficient still involves {', '.join(sorted(ode.implicit))}")
    if t not in r.free_symbols:
        return CoefficientClass("ConstantCoeff", r0=cancel_univariate(r))
    r0 = expand(mul(r, power(Symbol(t), 2)))
    if t not in r0.free_symbols:
        return CoefficientClass("CauchyEuler", r0=cancel_univariate(r0))
    try:
        coeffs = as_polynomial(r, t)
    except NotPolynomial as exc:
        return CoefficientClass("Unsupported", reason=str(exc))
    return CoefficientClass("PolynomialCoeff", coefficients=tuple(coeffs))


def _single_param(e: Expr) -> str | None:
    names = e.free_symbols
    return next(iter(names)) if len(names) == 1 else None


def cauchy_euler_exponents(r0: Expr) -> tuple[Expr, Expr]:
    """Roots of rho^2 - rho - r0, larger branch first."""
    half = Const(Fraction(1, 2))
    if isinstance(r0, Const):
        d = 1 + 4 * r0.value
        s = rational_sqrt(d)
        if s is not None:
            return Const((1 + s) / 2), Const((1 - s) / 2)
        sq = mul(half, power(Const(d), Fraction(1, 2)))
        return add(half, sq), add(half, mul(Const(-1), sq))
    disc = add(Const(1), mul(Const(4), r0))
    name = _single_param(disc)
    if name is not None:
        try:
            n, d = to_ratfunc(expand(disc), name)
        except NotRationalFunction:
            n = None
        if n is not None:
            # sqrt(n/d) = sqrt(n*d)/d
            s = (n * d).sqrt()
            if s is not None:
                var = Symbol(name)
                return factored(d + s, d * 2, var), factored(d - s, d * 2, var)
    sq = mul(half, power(disc, Fraction(1, 2)))
    return add(half, sq), add(half, mul(Const(-1), sq))


def _rational_in(e: Expr, name: str) -> tuple[QPoly, QPoly] | None:
    try:
        n, d = to_ratfunc(expand(e), name)
    except NotRationalFunction:
        return None
    g = gcd(n, d)
    return n.divmod(g)[0], d.divmod(g)[0]


def _integer_denominator(n: QPoly, d: QPoly) -> tuple[int, QPoly]:
    """(c, D) with n/d = N/(c*D), N integral and D primitive."""
    cn, _ = primitive_part(n)
    cd, dint = primitive_part(d)
    # n/d = (cn/cd) * nint/dint; the rational factor's denominator joins D
    return (cn / cd).denominator, QPoly(dint)


def classify_cauchy_euler(exponents: tuple[Expr, Expr], params: Mapping[str, Param] | None = None) -> GaloisClassification:
    rho1, rho2 = exponents
    params = params or {}
    if isinstance(rho1, Const) and isinstance(rho2, Const):
        a, b = rho1.value, rho2.value
        if a == b:
            return GaloisClassification(Group.UNIPOTENT, exponents=exponents,
                                        notes="double exponent 1/2: solutions t^(1/2), t^(1/2) log t")
        if a.denominator == 1 and b.denominator == 1:
            return GaloisClassification(Group.IDENTITY, exponents=exponents,
                                        notes="integer exponents: both solutions are rational")
        order = lcm(a.denominator, b.denominator)
        return GaloisClassification(Group.CYCLIC, order=order, exponents=exponents,
                                    notes=f"rational exponents: t^rho generate a cyclic extension of degree {order}")
    names = (rho1.free_symbols | rho2.free_symbols)
    if len(names) == 1:
        (name,) = names
        p = params.get(name)
        parts = [_rational_in(r, name) for r in (rho1, rho2)]
        if p is not None and p.integer and all(parts):
            (c1, d1), (c2, d2) = [_integer_denominator(n, d) for n, d in parts]
            _, dint = primitive_part((d1 * d2).divmod(gcd(d1, d2))[0])
            D = QPoly(dint) * lcm(c1, c2)
            if D.degree == 0 and D.const_value() == 1:
                return GaloisClassification(Group.IDENTITY, exponents=exponents,
                                            notes=f"exponents are integer for every integer {name}")
            text = f"divides {render(poly_to_expr(D, Symbol(name)))}"
            return GaloisClassification(
                Group.CYCLIC, order_text=text, exponents=exponents,
                notes=f"for integer {name} the exponents are rational; finite group, order {text}",
            )
    return GaloisClassification(Group.TORUS, exponents=exponents,
                                notes="exponents not known to be rational: diagonal torus")


def classify_polynomial_coeff(coeffs: Sequence[Expr]) -> GaloisClassification:
    degree = len(coeffs) - 1
    if degree < 1:
        raise ValueError("polynomial coefficient must have degree >= 1")
    if degree % 2:
        return GaloisClassification(Group.SL2, notes=f"odd degree {degree}: no Liouvillian solutions")
    return GaloisClassification(Group.NON_ABELIAN, notes=f"even degree {degree}: Borel or SL2, not abelian")


def classify_constant_coeff(r0: Expr) -> GaloisClassification:
    if is_zero(r0):
        return GaloisClassification(Group.IDENTITY, notes="r = 0: solutions 1 and t are rational")
    return GaloisClassification(Group.TORUS, notes="constant r != 0: solutions exp(+-sqrt(r) t)")


def classify(ode: ScalarSecondOrderODE, params: Mapping[str, Param] | None = None) -> tuple[CoefficientClass, GaloisClassification]:
    cc = classify_coefficient(ode)
    if cc.tag == "ConstantCoeff":
        g = classify_constant_coeff(cc.r0)
    elif cc.tag == "CauchyEuler":
        g = classify_cauchy_euler(cauchy_euler_exponents(cc.r0), params)
    elif cc.tag == "PolynomialCoeff":
        g = classify_polynomial_coeff(cc.coefficients)
    else:
        g = GaloisClassification(Group.UNDETERMINED, notes=cc.reason)
    return cc, replace(g, label=f"{ode.label} {ode.variable}")


def instantiate(ode: ScalarSecondOrderODE, bindings: Mapping[str, object]) -> ScalarSecondOrderODE:
    return replace(ode, r=substitute(ode.r, {k: Const(v) if not isinstance(v, Expr) else v for k, v in bindings.items()}))


def morales_ramis_verdict(normal: Sequence[GaloisClassification], category: str = "meromorphic") -> Verdict:
    if not normal:
        raise EmptyEvidence("the verdict needs at least one normal variational equation")
    if category not in ("meromorphic", "rational"):
        raise ValueError(f"unknown category {category!r}")
    basis = tuple(normal)
    warnings = []
    if any(g.abelian is Abelian.NO for g in basis):
        return Verdict("NonIntegrable", basis, category)
    if any(g.abelian is Abelian.UNKNOWN for g in basis):
        warnings.append("some normal equations could not be classified; no obstruction found among the rest")
    return Verdict("Inconclusive", basis, category, tuple(warnings))
