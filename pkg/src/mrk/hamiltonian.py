"""Hamiltonian systems, Poisson brackets and first-integral checks.

Sign convention: {f, g} = sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k), so that
{q_k, p_k} = 1 and the flow is f' = {f, H}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .symexpr import (
    Const,
    Expr,
    OpaqueFn,
    OpaquePartial,
    SymbolicError,
    SymbolTable,
    ZeroCheck,
    add,
    compile_numeric,
    differentiate,
    is_zero,
    mul,
    neg,
    parse,
    render,
    substitute,
    walk,
)
from .symexpr.zero import current_seed


class Indeterminate(SymbolicError):
    pass


@dataclass(frozen=True)
class HamiltonianSystem:
    table: SymbolTable
    H: Expr

    def __post_init__(self):
        if not self.table.coordinates:
            raise ValueError("a Hamiltonian system needs at least one degree of freedom")
        allowed = set(self.table.coordinates) | set(self.table.momenta) | set(self.table.parameters)
        stray = self.H.free_symbols - allowed
        if stray:
            raise ValueError(f"H mentions undeclared symbols: {', '.join(sorted(stray))}")

    @classmethod
    def from_text(cls, text: str, table: SymbolTable) -> HamiltonianSystem:
        return cls(table, parse(text, table))

    @property
    def n(self) -> int:
        return len(self.table.coordinates)

    @property
    def q(self) -> tuple[str, ...]:
        return self.table.coordinates

    @property
    def p(self) -> tuple[str, ...]:
        return self.table.momenta

    @property
    def phase(self) -> tuple[str, ...]:
        return self.q + self.p


@dataclass(frozen=True)
class VectorField:
    """Components ordered (q1'..qn', p1'..pn')."""

    components: tuple[Expr, ...]

    @property
    def n(self) -> int:
        return len(self.components) // 2

    @property
    def dq(self) -> tuple[Expr, ...]:
        return self.components[: self.n]

    @property
    def dp(self) -> tuple[Expr, ...]:
        return self.components[self.n:]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


def hamilton_equations(sys: HamiltonianSystem) -> VectorField:
    dq = [differentiate(sys.H, p) for p in sys.p]
    dp = [neg(differentiate(sys.H, q)) for q in sys.q]
    return VectorField(tuple(dq + dp))


def poisson_bracket(f: Expr, g: Expr, sys: HamiltonianSystem) -> Expr:
    terms = []
    for q, p in zip(sys.q, sys.p):
        terms.append(mul(differentiate(f, q), differentiate(g, p)))
        terms.append(neg(mul(differentiate(f, p), differentiate(g, q))))
    return add(*terms)


def is_first_integral(F: Expr, sys: HamiltonianSystem) -> ZeroCheck:
    return is_zero(poisson_bracket(sys.H, F, sys))


def _rank(rows: list[list[Fraction]]) -> int:
    m = [r[:] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _sample_point(sys: HamiltonianSystem, names, rng: random.Random) -> dict[str, Const]:
    point = {}
    for name in sorted(names):
        param = sys.table.parameters.get(name)
        if param is not None and param.integer:
            lo = int(param.minimum) if param.minimum is not None else -50
            point[name] = Const(rng.randint(lo, lo + 50))
        else:
            v = Fraction(rng.randint(1, 50) * rng.choice((1, -1)), rng.randint(1, 50))
            point[name] = Const(v)
    return point


def are_independent(Fs: Sequence[Expr], sys: HamiltonianSystem, points: int = 5, seed: int | None = None) -> bool:
    """Rank of the Jacobian of ``Fs`` at random rational points, exactly."""
    k = len(Fs)
    if not 1 <= k <= 2 * sys.n:
        raise ValueError(f"need between 1 and {2 * sys.n} functions, got {k}")
    if any(isinstance(node, (OpaqueFn, OpaquePartial)) for F in Fs for node in walk(F)):
        raise Indeterminate("cannot evaluate opaque functions at sample points")
    jac = [[differentiate(F, x) for x in sys.phase] for F in Fs]
    names = set(sys.phase) | set(sys.table.parameters)
    rng = random.Random(current_seed() if seed is None else seed)
    evaluated = 0
    for _ in range(points):
        point = _sample_point(sys, names, rng)
        rows = []
        try:
            for row in jac:
                vals = [substitute(e, point) for e in row]
                if not all(isinstance(v, Const) for v in vals):
                    raise Indeterminate
                rows.append([v.value for v in vals])
        except (Indeterminate, ZeroDivisionError):
            continue
        evaluated += 1
        if _rank(rows) == k:
            return True
    if evaluated == 0:
        raise Indeterminate("every sample point was singular or not exactly evaluable")
    return False


@dataclass
class InvolutionReport:
    functions: list[str]
    failing_pairs: list[tuple[int, int]] = field(default_factory=list)
    brackets: dict[tuple[int, int], str] = field(default_factory=dict)
    independent: bool | None = None
    probabilistic: bool = False
    error: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failing_pairs and bool(self.independent) and self.error is None


def verify_involution_set(Fs: Sequence[Expr], sys: HamiltonianSystem) -> InvolutionReport:
    rep = InvolutionReport([render(F) for F in Fs])
    for i in range(len(Fs)):
        for j in range(i + 1, len(Fs)):
            br = poisson_bracket(Fs[i], Fs[j], sys)
            z = is_zero(br)
            rep.probabilistic |= z.probabilistic
            if not z:
                rep.failing_pairs.append((i, j))
                rep.brackets[(i, j)] = render(br)
    try:
        rep.independent = are_independent(Fs, sys)
    except (Indeterminate, ValueError) as exc:
        rep.error = str(exc)
    return rep


def rk4(field_: VectorField, sys: HamiltonianSystem, x0: Sequence[float], t1: float, h: float,
        params: dict[str, float] | None = None) -> list[list[float]]:
    """Classical Runge-Kutta integration of the Hamiltonian flow; returns the trajectory."""
    fns = [compile_numeric(c) for c in field_.components]
    names = sys.phase
    base = dict(params or {})

    def f(x):
        env = dict(base)
        env.update(zip(names, x))
        return [g(env) for g in fns]

    x = list(x0)
    out = [x]
    steps = round(t1 / h)
    for _ in range(steps):
        k1 = f(x)
        k2 = f([a + h / 2 * b for a, b in zip(x, k1)])
        k3 = f([a + h / 2 * b for a, b in zip(x, k2)])
        k4 = f([a + h * b for a, b in zip(x, k3)])
        x = [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(x, k1, k2, k3, k4)]
        out.append(x)
    return out
