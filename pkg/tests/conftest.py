import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from mrk.hamiltonian import HamiltonianSystem
from mrk.symexpr import Const, Param, Symbol, SymbolTable, add, fn, mul, partial, power

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"
GOLDEN = Path(__file__).resolve().parent / "golden"

settings.register_profile("ci", deadline=None)
settings.load_profile("ci")

TABLE = SymbolTable(("x", "y"), ("u", "v"), parameters={"a": Param("a"), "b": Param("b")}, functions={"f": 1, "g": 2})
EX1 = SymbolTable(("q1", "q2"), ("p1", "p2"))
EX1_H = "1/2*p1^2 + 1/2*p2^2 - 2*q1^3 - 6*q1*q2^2"
EX1_I = "1/4*(p1 + p2)^2 - (q1 + q2)^3"


@pytest.fixture
def ex1():
    return HamiltonianSystem.from_text(EX1_H, EX1)


# -- strategies -------------------------------------------------------------

small_fractions = st.fractions(min_value=-9, max_value=9, max_denominator=6)
consts = small_fractions.map(Const)
atoms = st.sampled_from(["x", "y", "u", "v", "a", "b"]).map(Symbol)


def _opaque(children):
    return st.one_of(
        children.map(lambda e: fn("f", [e])),
        st.tuples(children, children).map(lambda p: fn("g", list(p))),
        st.tuples(st.sampled_from([(0,), (1,), (0, 1)]), children, children).map(
            lambda t: partial("g", t[0], [t[1], t[2]])),
    )


def exprs(max_leaves=8, exponents=st.integers(-3, 4), opaque=True, rational_exponents=True):
    exps = exponents
    if rational_exponents:
        exps = st.one_of(exponents, st.sampled_from([Fraction(1, 2), Fraction(-1, 3), Fraction(2, 5)]))

    def extend(children):
        options = [
            st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
            st.tuples(atoms, exps).map(lambda p: power(p[0], p[1])),
            st.tuples(children, st.integers(2, 3)).map(lambda p: power(p[0], p[1])),
        ]
        if opaque:
            options.append(_opaque(children))
        return st.one_of(*options)

    return st.recursive(st.one_of(consts, atoms), extend, max_leaves=max_leaves)


polys = exprs(max_leaves=6, exponents=st.integers(0, 3), opaque=False, rational_exponents=False)

# polynomials in the phase variables of a 2-dof system
PHASE = SymbolTable(("q1", "q2"), ("p1", "p2"))
phase_atoms = st.sampled_from(["q1", "q2", "p1", "p2"]).map(Symbol)
phase_polys = st.recursive(
    st.one_of(st.integers(-3, 3).map(Const), phase_atoms),
    lambda c: st.one_of(
        st.lists(c, min_size=2, max_size=3).map(lambda xs: add(*xs)),
        st.lists(c, min_size=2, max_size=2).map(lambda xs: mul(*xs)),
    ),
    max_leaves=6,
)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acc.summary_lines():
        terminalreporter.write_line(line)
