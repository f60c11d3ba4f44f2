"""Invariant planes, particular solutions and variational equations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd, lcm

from .hamiltonian import HamiltonianSystem, VectorField, hamilton_equations
from .symexpr import (
    ONE,
    ZERO,
    Const,
    Expr,
    ParamExponent,
    Power,
    Product,
    Sum,
    Symbol,
    SymbolicError,
    ZeroCheck,
    add,
    as_polynomial,
    cancel_univariate,
    coefficient_and_power,
    differentiate,
    expand,
    exponent_expr,
    is_zero,
    mul,
    neg,
    numer_denom,
    power,
    split_coeff,
    substitute,
)
from .symexpr.calculus import NotPolynomial


class VariationalError(SymbolicError):
    pass


class NotInvariant(VariationalError):
    def __init__(self, component: str, residual: Expr):
        super().__init__(f"plane is not invariant: {component} = {residual} on the plane")
        self.component = component
        self.residual = residual


class NoPowerLawSolution(VariationalError):
    pass


class UnsupportedPotential(VariationalError):
    pass


class NotFree(VariationalError):
    pass


class NotDecoupled(VariationalError):
    def __init__(self, entry: tuple[int, int], value: Expr):
        super().__init__(f"variational matrix entry {entry} = {value} couples the equations")
        self.entry = entry
        self.value = value


class NotReducible(VariationalError):
    pass


class NotNatural(VariationalError):
    """Restricted Hamiltonian is not of the form p^2/2 + V(q)."""


# -- planes ----------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantPlane:
    vanishing: tuple[str, ...]
    surviving: int

    @classmethod
    def of(cls, sys: HamiltonianSystem, vanishing) -> InvariantPlane:
        vanishing = tuple(vanishing)
        unknown = set(vanishing) - set(sys.phase)
        if unknown:
            raise ValueError(f"plane mentions unknown phase variables: {', '.join(sorted(unknown))}")
        pairs = []
        for i, (q, p) in enumerate(zip(sys.q, sys.p)):
            inq, inp = q in vanishing, p in vanishing
            if inq != inp:
                raise ValueError(f"plane must contain whole canonical pairs; {q} and {p} are split")
            if not inq:
                pairs.append(i)
        if len(pairs) != 1:
            raise ValueError(f"plane must leave exactly one canonical pair, leaves {len(pairs)}")
        order = {n: k for k, n in enumerate(sys.phase)}
        return cls(tuple(sorted(vanishing, key=order.__getitem__)), pairs[0])


@dataclass(frozen=True)
class RestrictedSystem:
    system: HamiltonianSystem
    plane: InvariantPlane
    field: VectorField
    h: Expr
    qdot: Expr
    pdot: Expr
    certificate: tuple[str, ...]

    @property
    def q(self) -> str:
        return self.system.q[self.plane.surviving]

    @property
    def p(self) -> str:
        return self.system.p[self.plane.surviving]

    @property
    def natural(self) -> bool:
        return self.qdot == Symbol(self.p) and self.p not in self.pdot.free_symbols

    @property
    def accel(self) -> Expr:
        """q'' as a function of q (requires a natural restricted Hamiltonian)."""
        if not self.natural:
            raise NotNatural(f"restricted system q' = {self.qdot} is not of the form q' = p")
        return self.pdot

    def potential(self) -> Expr:
        if not self.natural:
            raise NotNatural(f"restricted system q' = {self.qdot} is not of the form q' = p")
        V = substitute(self.h, {self.p: ZERO})
        if not is_zero(add(self.h, neg(V), mul(Const(Fraction(-1, 2)), power(Symbol(self.p), 2)))):
            raise NotNatural(f"restricted Hamiltonian {self.h} is not p^2/2 + V(q)")
        return V


def restrict_to_plane(sys: HamiltonianSystem, plane: InvariantPlane, field_: VectorField | None = None) -> RestrictedSystem:
    X = field_ or hamilton_equations(sys)
    zero = {n: ZERO for n in plane.vanishing}
    on_plane = [substitute(c, zero) for c in X]
    checked = []
    for k, name in enumerate(sys.phase):
        if name in plane.vanishing:
            label = f"{name}'"
            if not is_zero(on_plane[k]):
                raise NotInvariant(label, on_plane[k])
            checked.append(label)
    i = plane.surviving
    return RestrictedSystem(
        system=sys,
        plane=plane,
        field=X,
        h=substitute(sys.H, zero),
        qdot=on_plane[i],
        pdot=on_plane[sys.n + i],
        certificate=tuple(checked),
    )


# -- particular solutions ----------------------------------------------------------


@dataclass(frozen=True)
class ParticularSolution:
    """A solution on the plane.

    ``explicit``: q(t), p(t) given. ``implicit``: R(q) = rhs with p a function
    of q. ``generic``: q stays an unknown function of t (symbol ``q``).
    """

    kind: str
    q: str
    p: str
    t: str = "t"
    coordinate: Expr | None = None
    momentum: Expr | None = None
    relation: Expr | None = None
    rhs: Expr | None = None
    energy: Expr | None = None
    constants: tuple[str, ...] = ()
    residual: ZeroCheck | None = None
    notes: tuple[str, ...] = ()

    def point(self, sys: HamiltonianSystem, plane: InvariantPlane) -> dict[str, Expr]:
        pt = {n: ZERO for n in plane.vanishing}
        if self.kind == "explicit":
            pt[self.q] = self.coordinate
            pt[self.p] = self.momentum
        elif self.kind == "implicit":
            pt[self.p] = self.momentum
        return pt

    @property
    def implicit_symbols(self) -> frozenset[str]:
        return frozenset() if self.kind == "explicit" else frozenset({self.q})


def _residual(rs: RestrictedSystem, q_t: Expr, t: str) -> ZeroCheck:
    qdd = differentiate(differentiate(q_t, t), t)
    return is_zero(add(qdd, neg(substitute(rs.accel, {rs.q: q_t}))))


def _explicit(rs: RestrictedSystem, q_t: Expr, t: str, **kw) -> ParticularSolution:
    rs.accel  # natural check
    return ParticularSolution(
        "explicit", rs.q, rs.p, t, coordinate=q_t, momentum=differentiate(q_t, t),
        residual=_residual(rs, q_t, t), **kw,
    )


def explicit_solution(rs: RestrictedSystem, q_t: Expr, t: str = "t") -> ParticularSolution:
    """A user-supplied q(t); p = q' and the residual of q'' = F(q) is recorded."""
    return _explicit(rs, q_t, t)


def power_law_solution(rs: RestrictedSystem, t: str = "t") -> list[ParticularSolution]:
    """Solutions q = alpha*t^beta of q'' = c*q^k; both real roots when k - 1 is even."""
    F = rs.accel
    if isinstance(F, Const) and F.value == 0:
        raise NoPowerLawSolution("q'' = 0 has no power-law solution; use the linear solution")
    split = coefficient_and_power(F, rs.q)
    if split is None or isinstance(F, Sum):
        raise NoPowerLawSolution(f"q'' = {F} is not a monomial in {rs.q}")
    c, k = split
    if not isinstance(k, ParamExponent) and k == 1:
        raise NoPowerLawSolution(f"q'' = {F}: exponent {k} admits no power law")
    beta = 2 / (1 - k)
    # alpha^(k-1) = beta(beta-1)/c
    km1 = k - 1
    radicand = mul(exponent_expr(beta * (beta - 1)), power(c, -1))
    alpha = power(radicand, 1 / km1)
    alphas = [alpha]
    if not isinstance(km1, ParamExponent) and km1.denominator == 1 and km1.numerator % 2 == 0:
        if isinstance(radicand, Const) and radicand.value < 0:
            raise NoPowerLawSolution(f"alpha^{km1} = {radicand} has no real solution")
        alphas.append(neg(alpha))
    tt = Symbol(t)
    out = []
    for a in alphas:
        sol = _explicit(rs, mul(a, power(tt, beta)), t, notes=(f"alpha^{km1} = {radicand}, beta = {beta}",))
        out.append(sol)
    return out


def fresh_names(taken, stems=("a", "b")) -> tuple[str, ...]:
    taken = set(taken)
    out = []
    for s in stems:
        name, k = s, 0
        while name in taken:
            k += 1
            name = f"{s}_{k}"
        taken.add(name)
        out.append(name)
    return tuple(out)


def linear_solution(rs: RestrictedSystem, taken=(), t: str = "t") -> ParticularSolution:
    F = rs.accel
    if not is_zero(F):
        raise NotFree(f"q'' = {F} is not identically zero")
    a, b = fresh_names(set(taken) | set(rs.system.table.symbols) | set(rs.system.table.functions) | {t})
    q_t = add(mul(Symbol(a), Symbol(t)), Symbol(b))
    return _explicit(rs, q_t, t, constants=(a, b))


def generic_solution(rs: RestrictedSystem, t: str = "t") -> ParticularSolution:
    """Keep q as an unknown solution of the restricted equation."""
    return ParticularSolution(
        "generic", rs.q, rs.p, t, notes=(f"{rs.q} = {rs.q}(t) is any solution of the restricted flow",),
    )


def _numeric_content(coeffs: list[Expr]) -> Fraction:
    g, d = 0, 1
    for c in coeffs:
        terms = c.terms if isinstance(c, Sum) else (c,)
        for t in terms:
            v, _ = split_coeff(t)
            g = gcd(g, v.numerator)
            d = lcm(d, v.denominator)
    return Fraction(g or 1, d)


def energy_level_solution(rs: RestrictedSystem, h: Expr = ZERO, sign: int = 1, constant: Expr = ZERO,
                          t: str = "t") -> ParticularSolution:
    """Integrate q' = sign*sqrt(2h - 2V(q)) when the radicand has a supported shape."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    V = rs.potential()
    W = add(mul(Const(2), h), mul(Const(-2), V))
    q, tt = Symbol(rs.q), Symbol(t)
    sgn = Const(sign)

    split = None if isinstance(W, Sum) or W == ZERO else coefficient_and_power(W, rs.q)
    if split is not None:
        K, j = split
        e = 1 - j / 2
        if isinstance(e, ParamExponent) or e != 0:
            speed = mul(sgn, power(K, Fraction(1, 2)))
            # q^(-j/2) dq = speed dt  =>  q^e / e = speed*t + c
            q_t = power(mul(exponent_expr(e), add(mul(speed, tt), constant)), 1 / e)
            sol = _explicit(rs, q_t, t, energy=h, notes=(f"{rs.q}' = {speed}*{rs.q}^({exponent_expr(j / 2)})",))
            energy = is_zero(add(substitute(rs.h, {rs.q: q_t, rs.p: sol.momentum}), neg(h)))
            return replace(sol, residual=_both(sol.residual, energy))

    num, den = numer_denom(W)
    if rs.q in num.free_symbols:
        raise UnsupportedPotential(f"2h - 2V = {W} is neither c*q^e nor c/P(q)^2")
    dfactors = den.factors if isinstance(den, Product) else (den,)
    qfree, pfactors = [], []
    for f in dfactors:
        if rs.q not in f.free_symbols:
            qfree.append(f)
            continue
        base, k = (f.base, f.exp) if isinstance(f, Power) else (f, Fraction(1))
        if isinstance(k, ParamExponent) or k.denominator != 1 or k % 2:
            raise UnsupportedPotential(f"2h - 2V = {W}: factor {f} is not a square")
        try:
            as_polynomial(base, rs.q)
        except NotPolynomial:
            raise UnsupportedPotential(f"2h - 2V = {W}: {base} is not polynomial in {rs.q}") from None
        pfactors.append(power(base, k / 2))
    if not pfactors:
        raise UnsupportedPotential(f"2h - 2V = {W} does not depend on {rs.q}")
    P = expand(mul(*pfactors))
    coeffs = as_polynomial(P, rs.q)
    scale = 1 / _numeric_content(coeffs)
    if _lead_sign(coeffs[-1]) < 0:
        scale = -scale
    P = expand(mul(Const(scale), P))
    K = mul(num, Const(scale * scale), power(mul(*qfree), -1))
    speed = mul(sgn, power(K, Fraction(1, 2)))
    R = add(*[mul(Const(Fraction(1, i + 1)), c, power(q, i + 1))
              for i, c in enumerate(as_polynomial(P, rs.q))])
    rhs = add(mul(speed, tt), constant)
    p_of_q = mul(speed, power(P, -1))
    flow = is_zero(add(mul(differentiate(R, rs.q), p_of_q), neg(speed)))
    energy = is_zero(add(substitute(rs.h, {rs.p: p_of_q}), neg(h)))
    return ParticularSolution(
        "implicit", rs.q, rs.p, t, momentum=p_of_q, relation=R, rhs=rhs, energy=h,
        residual=_both(flow, energy),
        notes=(f"{rs.q}' = {speed}/({P})",),
    )


def _lead_sign(c: Expr) -> int:
    terms = c.terms if isinstance(c, Sum) else (c,)
    v, _ = split_coeff(terms[0])
    return 1 if v > 0 else -1


def _both(a: ZeroCheck, b: ZeroCheck) -> ZeroCheck:
    return ZeroCheck(a.value and b.value, a.probabilistic or b.probabilistic)


# -- relation reduction ------------------------------------------------------------


def _poly_divmod(a: list[Expr], b: list[Expr]) -> tuple[list[Expr], list[Expr]]:
    a = list(a)
    db = len(b) - 1
    inv_lead = power(b[-1], -1)
    quot = [ZERO] * max(len(a) - db, 0)
    for k in range(len(a) - db - 1, -1, -1):
        c = expand(mul(a[k + db], inv_lead))
        quot[k] = c
        if c == ZERO:
            continue
        for j, bj in enumerate(b):
            a[k + j] = expand(add(a[k + j], neg(mul(c, bj))))
        a[k + db] = ZERO
    return quot, a[:db]


def reduce_by_relation(e: Expr, q: str, R: Expr, w: Expr) -> Expr:
    """Rewrite a polynomial ``e`` in ``q`` as sum c_i R^i and replace R by ``w``."""
    try:
        a = as_polynomial(e, q)
        b = as_polynomial(R, q)
    except NotPolynomial as exc:
        raise NotReducible(str(exc)) from None
    if len(b) < 2:
        raise NotReducible(f"relation {R} does not involve {q}")
    parts = []
    i = 0
    while a:
        quot, rem = _poly_divmod(a, b)
        if any(not is_zero(r) for r in rem[1:]):
            raise NotReducible(f"remainder of {e} modulo {R} still contains {q}")
        if rem:
            parts.append(mul(rem[0], power(w, i)))
        while quot and is_zero(quot[-1]):
            quot.pop()
        a = quot
        i += 1
    return add(*parts)


def _reduce_entry(e: Expr, sol: ParticularSolution) -> tuple[Expr, bool]:
    """Entry on an implicit solution: rewrite through R(q) = rhs if possible."""
    if sol.q not in e.free_symbols:
        return e, True
    num, den = numer_denom(e)
    red = lambda x: reduce_by_relation(x, sol.q, sol.relation, sol.rhs)  # noqa: E731
    try:
        n = red(num)
        parts = []
        for f in den.factors if isinstance(den, Product) else (den,):
            if sol.q not in f.free_symbols:
                parts.append(f)
                continue
            base, k = (f.base, f.exp) if isinstance(f, Power) else (f, Fraction(1))
            # prefer reducing the base (or its square) so the factored shape survives
            try:
                parts.append(power(red(base), k))
                continue
            except NotReducible:
                pass
            if not isinstance(k, ParamExponent) and k.denominator == 1 and k % 2 == 0:
                try:
                    parts.append(power(red(expand(power(base, 2))), k / 2))
                    continue
                except NotReducible:
                    pass
            parts.append(red(expand(f)))
    except NotReducible:
        return e, False
    return mul(n, power(mul(*parts), -1)), True


# -- variational equations -----------------------------------------------------------


def xi_names(n: int, order: int = 1) -> tuple[str, ...]:
    return tuple(f"xi{order}_{k + 1}" for k in range(2 * n))


@dataclass(frozen=True)
class VariationalSystem:
    A: tuple[tuple[Expr, ...], ...]
    order: int = 1
    forcing: tuple[Expr, ...] | None = None
    xi: tuple[str, ...] = ()
    surviving: int = 0
    t: str = "t"
    implicit: frozenset[str] = frozenset()
    notes: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.A) // 2


def _on_curve(e: Expr, pt: dict, sol: ParticularSolution, notes: list) -> Expr:
    v = substitute(e, pt)
    if sol.kind == "explicit":
        return tidy_coefficient(v, sol.t)
    if sol.kind == "implicit" and sol.q in v.free_symbols:
        v, ok = _reduce_entry(v, sol)
        if not ok:
            notes.append(f"entry {v} kept in terms of {sol.q}")
    return v


def _jacobian(X: VectorField, names) -> list[list[Expr]]:
    return [[differentiate(c, x) for x in names] for c in X]


def first_variational(sys: HamiltonianSystem, plane: InvariantPlane, sol: ParticularSolution,
                      field_: VectorField | None = None) -> VariationalSystem:
    X = field_ or hamilton_equations(sys)
    pt = sol.point(sys, plane)
    notes: list[str] = []
    A = tuple(tuple(_on_curve(e, pt, sol, notes) for e in row) for row in _jacobian(X, sys.phase))
    return VariationalSystem(A, 1, None, xi_names(sys.n, 1), plane.surviving, sol.t,
                             _implicit(A, sol), tuple(notes))


def _implicit(rows, sol: ParticularSolution) -> frozenset[str]:
    names = set()
    for row in rows:
        for e in (row if isinstance(row, tuple) else (row,)):
            names |= e.free_symbols
    return frozenset(names & sol.implicit_symbols)


def second_variational(sys: HamiltonianSystem, plane: InvariantPlane, sol: ParticularSolution,
                       field_: VectorField | None = None) -> VariationalSystem:
    X = field_ or hamilton_equations(sys)
    ve1 = first_variational(sys, plane, sol, X)
    pt = sol.point(sys, plane)
    xi = [Symbol(s) for s in xi_names(sys.n, 1)]
    names = sys.phase
    notes = list(ve1.notes)
    forcing = []
    for c in X:
        grad = [differentiate(c, x) for x in names]
        terms = []
        for j, gj in enumerate(grad):
            for k in range(j, len(names)):
                d2 = differentiate(gj, names[k])
                if d2 == ZERO:
                    continue
                d2 = _on_curve(d2, pt, sol, notes)
                # symmetric pairs j != k appear twice in the full double sum
                weight = Const(Fraction(1, 2)) if j == k else ONE
                terms.append(mul(weight, d2, xi[j], xi[k]))
        forcing.append(add(*terms))
    forcing = tuple(forcing)
    return VariationalSystem(ve1.A, 2, forcing, ve1.xi, plane.surviving, sol.t,
                             ve1.implicit | _implicit([forcing], sol), tuple(notes))


# -- decoupling ---------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarSecondOrderODE:
    """xi'' = r(t) * xi."""

    r: Expr
    variable: str
    label: str  # "normal" or "tangential"
    index: int
    t: str = "t"
    implicit: frozenset[str] = frozenset()

    def __str__(self):
        return f"{self.variable}'' = ({self.r})*{self.variable}"


def tidy_coefficient(r: Expr, t: str) -> Expr:
    tt = Symbol(t)
    r0 = expand(mul(r, power(tt, 2)))
    if t not in r0.free_symbols:
        return mul(cancel_univariate(r0), power(tt, -2))
    return r


def decouple(ve: VariationalSystem) -> list[ScalarSecondOrderODE]:
    n = ve.n
    A = ve.A
    for i in range(2 * n):
        for j in range(2 * n):
            if i >= n and j < n and i - n == j:
                continue
            expected = ONE if (i < n and j == i + n) else ZERO
            if not is_zero(add(A[i][j], neg(expected))):
                raise NotDecoupled((i + 1, j + 1), A[i][j])
    out = []
    for i in range(n):
        r = tidy_coefficient(A[n + i][i], ve.t)
        label = "tangential" if i == ve.surviving else "normal"
        out.append(ScalarSecondOrderODE(r, f"xi{i + 1}", label, i, ve.t, frozenset(r.free_symbols & ve.implicit)))
    return out


def symplectic_defect(ve: VariationalSystem) -> list[tuple[int, int]]:
    """Entries where J*A fails to be symmetric (empty for Hamiltonian A)."""
    n = ve.n
    A = ve.A

    def JA(i, j):
        # J = [[0, I], [-I, 0]]
        return A[i + n][j] if i < n else neg(A[i - n][j])

    bad = []
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            if not is_zero(add(JA(i, j), neg(JA(j, i)))):
                bad.append((i, j))
    return bad


__all__ = [
    "InvariantPlane", "RestrictedSystem", "ParticularSolution", "VariationalSystem", "explicit_solution",
    "ScalarSecondOrderODE", "restrict_to_plane", "power_law_solution", "energy_level_solution",
    "linear_solution", "generic_solution", "first_variational", "second_variational", "decouple",
    "reduce_by_relation", "symplectic_defect", "tidy_coefficient", "fresh_names", "xi_names",
    "VariationalError", "NotInvariant", "NoPowerLawSolution", "UnsupportedPotential", "NotFree",
    "NotDecoupled", "NotReducible", "NotNatural",
]
