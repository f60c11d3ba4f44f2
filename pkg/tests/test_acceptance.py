"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run directly (``python tests/test_acceptance.py``) or through pytest, where the
lines are printed in the terminal summary. Every criterion is a list of named
checks; stated reference values are compared literally and, where the stated
value is itself in doubt, an independent numeric oracle is reported alongside.
"""

from __future__ import annotations

import subprocess
import sys
import time
from fractions import Fraction
from math import lcm
from pathlib import Path

import mpmath
import pytest

from mrk.cli import run
from mrk.cli.problem import load, loads
from mrk.galois import Abelian, Group, classify, instantiate
from mrk.hamiltonian import HamiltonianSystem, are_independent, hamilton_equations, is_first_integral
from mrk.symexpr import Symbol, compile_numeric, differentiate, is_zero, parse, render, substitute, ZERO
from mrk.variational import (
    InvariantPlane,
    decouple,
    energy_level_solution,
    first_variational,
    generic_solution,
    linear_solution,
    power_law_solution,
    restrict_to_plane,
    second_variational,
)

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"

RESULTS: dict[int, tuple[bool, float, list[tuple[str, bool]]]] = {}


class Checks:
    def __init__(self):
        self.items: list[tuple[str, bool]] = []

    def __call__(self, label: str, ok) -> bool:
        self.items.append((label, bool(ok)))
        return bool(ok)


def _system(path):
    prob = load(PROBLEMS / path)
    sys_ = HamiltonianSystem.from_text(prob.hamiltonian, prob.table)
    plane = InvariantPlane.of(sys_, prob.plane)
    return prob, sys_, plane, restrict_to_plane(sys_, plane)


def _odes(sys_, plane, sol):
    return {o.label: o for o in decouple(first_variational(sys_, plane, sol))}


def _eq(a, b):
    return is_zero(a - b)


# -- criteria ---------------------------------------------------------------------


def criterion_1(c: Checks):
    prob, sys_, plane, rs = _system("example1.problem")
    T = prob.table
    X = hamilton_equations(sys_)
    want = ["p1", "p2", "6*q1^2 + 6*q2^2", "12*q1*q2"]
    c("Hamilton equations", all(_eq(x, parse(w, T)) for x, w in zip(X, want)))
    (sol,) = power_law_solution(rs)
    c("q1 = t^-2", _eq(sol.coordinate, parse("t^(-2)", T)))
    c("zero residual, exact", sol.residual and not sol.residual.probabilistic)
    normal = _odes(sys_, plane, sol)["normal"]
    c("NVE xi'' = 12/t^2 xi", _eq(normal.r, parse("12/t^2", T)))
    _, g = classify(normal)
    c("exponents (4, -3)", [render(e) for e in g.exponents] == ["4", "-3"])
    c("oracle: rho(rho-1) = 12", all(r * (r - 1) == 12 for r in (4, -3)))
    c("group Identity", g.group is Group.IDENTITY)
    c("verdict Inconclusive", run(prob).verdict == "Inconclusive")


def criterion_2(c: Checks):
    prob, sys_, *_ = _system("example1.problem")
    I = parse("1/4*(p1 + p2)^2 - (q1 + q2)^3", prob.table)
    z = is_first_integral(I, sys_)
    c("{H, I} = 0", z)
    c("decided exactly", not z.probabilistic)
    c("H, I independent", are_independent([sys_.H, I], sys_))


def criterion_3(c: Checks):
    text = (PROBLEMS / "example2.problem").read_text()
    for Q, group in (("q1^3", Group.SL2), ("q1^2", Group.NON_ABELIAN)):
        prob = loads(text.replace("q1^3*q2^2", f"{Q}*q2^2"))
        sys_ = HamiltonianSystem.from_text(prob.hamiltonian, prob.table)
        plane = InvariantPlane.of(sys_, prob.plane)
        sol = linear_solution(restrict_to_plane(sys_, plane))
        T = prob.table
        c(f"Q = {Q}: q1 = a*t + b", _eq(sol.coordinate, Symbol("a") * Symbol("t") + Symbol("b")))
        normal = _odes(sys_, plane, sol)["normal"]
        c(f"Q = {Q}: NVE xi'' = Q(a*t + b) xi",
          _eq(normal.r, substitute(parse(Q, T), {"q1": sol.coordinate})))
        c(f"Q = {Q}: {group.value}", classify(normal)[1].group is group)
        c(f"Q = {Q}: verdict NonIntegrable", run(prob).verdict == "NonIntegrable")


def criterion_4(c: Checks):
    prob, sys_, plane, rs = _system("example3.problem")
    T = prob.table
    sol = energy_level_solution(rs, parse("lambda0", T), constant=parse("c", T))
    c("relation lambda2*q1 + lambda3*q1^2", _eq(sol.relation, parse("lambda2*q1 + lambda3*q1^2", T)))
    c("rhs = sqrt(lambda4)*t + c  [stated]", _eq(sol.rhs, parse("lambda4^(1/2)*t + c", T)))
    normal = _odes(sys_, plane, sol)["normal"]
    c("p(t) = 2*lambda1 + 2*(sqrt(lambda4)*t + c)  [stated]",
      _eq(normal.r, parse("2*lambda1 + 2*(lambda4^(1/2)*t + c)", T)))
    c("p(t) = 2*lambda1 + 2*rhs  [derived rhs]", _eq(normal.r, parse("2*lambda1", T) + 2 * sol.rhs))
    # oracle: integrate q'' = -V'(q), V = -lambda4/(lambda2 + 2 lambda3 q)^2, on the level h = lambda0
    l1, l2, l3, l4 = 0.7, 1.1, 0.4, 0.9
    q0 = 0.5
    p0 = (2 * l4) ** 0.5 / (l2 + 2 * l3 * q0)
    flow = mpmath.odefun(lambda t, y: [y[1], -4 * l3 * l4 / (l2 + 2 * l3 * y[0]) ** 3], 0, [q0, p0])
    R = lambda q: l2 * q + l3 * q ** 2  # noqa: E731
    slope = R(flow(1)[0]) - R(q0)
    c(f"oracle: slope {float(slope):.6f} = sqrt(2*lambda4)", abs(slope - (2 * l4) ** 0.5) < 1e-8)
    c("verdict NonIntegrable", run(prob).verdict == "NonIntegrable")


def criterion_5(c: Checks):
    prob, sys_, plane, rs = _system("example4.problem")
    T = prob.table
    (sol, *_) = power_law_solution(rs)
    alpha = sol.coordinate / parse("t^(2/5)", T)
    c("beta = 2/5", "t" not in alpha.free_symbols)
    c("alpha^5 = -25/(2c)", _eq(alpha ** 5, parse("-25/(2*c)", T)))
    normal = _odes(sys_, plane, sol)["normal"]
    c("NVE xi'' = -4b/25 t^-2 xi  [stated]", _eq(normal.r, parse("-4*b/(25*t^2)", T)))
    c("NVE xi'' = -4b/(25c) t^-2 xi  [derived]", _eq(normal.r, parse("-4*b/(25*c*t^2)", T)))
    c("stated value recovered at c = 1", _eq(substitute(normal.r, {"c": parse("1", T)}), parse("-4*b/(25*t^2)", T)))
    # oracle: -d^2V/dq1^2 at q1 = 0 along q2 = alpha t^(2/5), numerically
    a, b, cc, t = mpmath.mpf("0.7"), mpmath.mpf("1.3"), mpmath.mpf("-2.1"), mpmath.mpf("1.7")
    q2 = mpmath.root(-25 / (2 * cc), 5) * t ** mpmath.mpf("0.4")
    V = lambda q1: 1 / (a * q1 ** 3 + b * q1 ** 2 * q2 + cc * q2 ** 3)  # noqa: E731
    oracle = -mpmath.diff(V, 0, 2)
    got = compile_numeric(normal.r)({"a": float(a), "b": float(b), "c": float(cc), "t": float(t)})
    c(f"oracle: -V_q1q1 = {float(oracle):.6f}", abs(got - oracle) < 1e-8)
    g = classify(normal)[1]
    c("abelian identity component for symbolic b", g.abelian is Abelian.YES)
    c("verdict Inconclusive", run(prob).verdict == "Inconclusive")


def criterion_6(c: Checks):
    prob, sys_, plane, rs = _system("proposition.problem")
    T = prob.table
    tang = _odes(sys_, plane, energy_level_solution(rs))["tangential"]
    c("r = 2m(m+1)/((m+2)^2 t^2)", _eq(tang.r, parse("2*m*(m + 1)/((m + 2)^2*t^2)", T)))
    c("a, b absent", not {"a", "b"} & tang.r.free_symbols)
    _, g = classify(tang, T.parameters)
    c("exponents (2(m+1)/(m+2), -m/(m+2))",
      _eq(g.exponents[0], parse("2*(m + 1)/(m + 2)", T)) and _eq(g.exponents[1], parse("-m/(m + 2)", T)))
    for m, order in ((3, 5), (4, 3), (5, 7)):
        gi = classify(instantiate(tang, {"m": m}))[1]
        # oracle: reduced fractions of the exponents, lcm of denominators
        r1, r2 = Fraction(2 * (m + 1), m + 2), Fraction(-m, m + 2)
        c(f"m = {m}: oracle order {order}", lcm(r1.denominator, r2.denominator) == order)
        c(f"m = {m}: CyclicOfOrder({order}), abelian",
          gi.group is Group.CYCLIC and gi.order == order and gi.abelian is Abelian.YES)


def criterion_7(c: Checks):
    prob, sys_, plane, rs = _system("quartic.problem")
    X = hamilton_equations(sys_)
    ve2 = second_variational(sys_, plane, generic_solution(rs), X)
    # 1/2 D^2X(xi, xi) built from scratch, restricted to the plane
    xi = [Symbol(n) for n in ve2.xi]
    on_plane = {n: ZERO for n in prob.plane}
    ok = True
    for k, Xk in enumerate(X):
        acc = ZERO
        for i, zi in enumerate(sys_.phase):
            for j, zj in enumerate(sys_.phase):
                acc = acc + differentiate(differentiate(Xk, zi), zj) * xi[i] * xi[j]
        ok = ok and bool(_eq(substitute(acc, on_plane) / 2, ve2.forcing[k]))
    c("forcing = 1/2 D^2X contraction", ok)
    params = {f"a{i}": 1.0 for i in range(1, 6)}
    fX = [compile_numeric(x) for x in X]
    fF = [compile_numeric(f) for f in ve2.forcing]
    eps = 1e-3
    base = [1.0, 0.0, 0.0, 0.0]  # q1(1) = 1 on the plane
    dirs = [[0.3, -0.7, 0.2, 0.5], [1.0, 1.0, -1.0, 0.0], [-0.4, 0.9, 0.6, -0.8]]
    worst = 0.0
    for d in dirs:
        def at(s):
            env = {**params, **dict(zip(sys_.phase, [b + s * x for b, x in zip(base, d)]))}
            return [g(env) for g in fX]
        plus, mid, minus = at(eps), at(0.0), at(-eps)
        env = {**params, **dict(zip(sys_.phase, base)), **dict(zip(ve2.xi, d))}
        for k in range(4):
            fd = (plus[k] - 2 * mid[k] + minus[k]) / (2 * eps ** 2)
            worst = max(worst, abs(fd - fF[k](env)))
    c(f"finite differences within 1e-5 (max {worst:.1e})", worst <= 1e-5)


def criterion_8(c: Checks):
    targets = [
        "tests/test_properties.py",
        "tests/test_variational.py::test_symplectic_symmetry_of_derived_ve1",
        "tests/test_hamiltonian.py::test_rk4_energy_drift",
    ]
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *targets],
                          cwd=ROOT, capture_output=True, text=True)
    elapsed = time.perf_counter() - t0
    c(f"property suites pass ({proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else 'no output'})",
      proc.returncode == 0)
    c(f"runtime {elapsed:.1f} s <= 60 s", elapsed <= 60)


CRITERIA = {
    1: ("Example 1 end-to-end", criterion_1, 1.0),
    2: ("first-integral check", criterion_2, 1.0),
    3: ("Example 2, Q = q1^3 and q1^2", criterion_3, 1.0),
    4: ("Example 3 implicit solution", criterion_4, 1.0),
    5: ("Example 4 power law", criterion_5, 1.0),
    6: ("Proposition, symbolic m", criterion_6, 2.0),
    7: ("quartic VE2", criterion_7, None),
    8: ("property suites", criterion_8, 60.0),
}


def evaluate(n: int):
    title, fn, budget = CRITERIA[n]
    c = Checks()
    t0 = time.perf_counter()
    try:
        fn(c)
    except Exception as exc:  # noqa: BLE001
        c(f"raised {type(exc).__name__}: {exc}", False)
    dt = time.perf_counter() - t0
    if budget is not None:
        c(f"runtime {dt:.2f} s < {budget:g} s", dt < budget)
    ok = all(v for _, v in c.items)
    RESULTS[n] = (ok, dt, c.items)
    return ok, dt, c.items


def summary_lines() -> list[str]:
    lines = []
    for n in sorted(RESULTS):
        ok, dt, items = RESULTS[n]
        failed = [label for label, v in items if not v]
        tail = f"  failed: {'; '.join(failed)}" if failed else ""
        lines.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {CRITERIA[n][0]} ({dt:.2f} s){tail}")
    return lines


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, _, items = evaluate(n)
    assert ok, "; ".join(label for label, v in items if not v)


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        evaluate(n)
    print("\n".join(summary_lines()))
