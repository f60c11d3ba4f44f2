"""Staged pipeline: parse -> hamilton -> restrict -> solve -> ve -> decouple -> classify -> verdict.

Every stage appends a JSON-ready dict to the report. A failing stage records
a structured error and stops the run; nothing propagates to the caller.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .. import galois as gal
from ..hamiltonian import HamiltonianSystem, hamilton_equations, is_first_integral, poisson_bracket, verify_involution_set
from ..symexpr import (
    DEFAULT_SEED,
    ParseError,
    SymbolicError,
    expand,
    is_zero,
    parse,
    render,
    zero_test_context,
)
from ..variational import (
    InvariantPlane,
    NoPowerLawSolution,
    VariationalError,
    decouple,
    energy_level_solution,
    explicit_solution,
    first_variational,
    generic_solution,
    linear_solution,
    power_law_solution,
    restrict_to_plane,
    second_variational,
    symplectic_defect,
)
from .problem import ProblemError, ProblemFile, load

SCHEMA_VERSION = 1


@dataclass
class Report:
    name: str
    seed: int
    echo: dict = field(default_factory=dict)
    stages: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    # live objects for the text/latex renderers; never serialised
    objects: dict[str, Any] = field(default_factory=dict)
    failed: str | None = None  # None | "input" | "pipeline" | "internal"

    def stage(self, name: str) -> dict | None:
        return next((s for s in self.stages if s["stage"] == name), None)

    @property
    def verdict(self) -> str | None:
        s = self.stage("verdict")
        return s["outcome"] if s and s["status"] == "ok" else None

    def as_dict(self) -> dict:
        # timings are left out so identical inputs give byte-identical json
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "seed": self.seed,
            "echo": self.echo,
            "stages": self.stages,
            "warnings": self.warnings,
        }


class _Stop(Exception):
    pass


def _error(exc: BaseException) -> dict:
    return {"type": type(exc).__name__, "message": str(exc) or type(exc).__name__}


def _zero(z) -> dict:
    return {"zero": bool(z), "probabilistic": z.probabilistic}


class _Run:
    def __init__(self, report: Report, log):
        self.report = report
        self.log = log

    def stage(self, name: str, fn):
        t0 = time.perf_counter()
        seen = len(self.log.probabilistic)
        try:
            data = fn()
        except (ParseError, ProblemError) as exc:
            self._fail(name, "input", exc)
        except (SymbolicError, VariationalError, gal.EmptyEvidence, ValueError, ZeroDivisionError) as exc:
            self._fail(name, "pipeline", exc)
        except Exception as exc:  # noqa: BLE001 - isolated and reported, never raised
            self._fail(name, "internal", exc)
        finally:
            self.report.timings[name] = time.perf_counter() - t0
            for e in self.log.probabilistic[seen:]:
                self.report.warnings.append(f"{name}: decided by random evaluation: {e}")
        self.report.stages.append({"stage": name, "status": "ok", **data})

    def _fail(self, name: str, kind: str, exc: BaseException):
        self.report.stages.append({"stage": name, "status": "error", "kind": kind, "error": _error(exc)})
        self.report.failed = kind
        raise _Stop from exc


def _solve(prob: ProblemFile, rs):
    table = prob.table
    kind = prob.solution
    if kind == "explicit":
        return explicit_solution(rs, parse(prob.coordinate, table), table.time)
    if kind == "linear":
        return linear_solution(rs, t=table.time)
    if kind == "power-law":
        return power_law_solution(rs, table.time)[0]
    if kind == "generic":
        return generic_solution(rs, table.time)
    if kind == "energy":
        return energy_level_solution(rs, parse(prob.energy, table), prob.sign, parse(prob.constant, table), table.time)
    # auto: free motion, then power law, then quadrature at the requested energy
    F = rs.accel
    if is_zero(F):
        return linear_solution(rs, t=table.time)
    try:
        return power_law_solution(rs, table.time)[0]
    except NoPowerLawSolution:
        return energy_level_solution(rs, parse(prob.energy, table), prob.sign, parse(prob.constant, table), table.time)


def _solution_data(sol) -> dict:
    out = {"kind": sol.kind, "coordinate": sol.q, "momentum": sol.p, "notes": list(sol.notes)}
    if sol.kind == "explicit":
        out["q_of_t"] = render(sol.coordinate)
        out["p_of_t"] = render(sol.momentum)
    elif sol.kind == "implicit":
        out["relation"] = f"{render(sol.relation)} = {render(sol.rhs)}"
        out["p_of_q"] = render(sol.momentum)
    if sol.energy is not None:
        out["energy"] = render(sol.energy)
    if sol.constants:
        out["constants"] = list(sol.constants)
    if sol.residual is not None:
        out["residual"] = _zero(sol.residual)
    return out


def _classification_data(ode, cc, g) -> dict:
    out = {
        "variable": ode.variable,
        "label": ode.label,
        "coefficient_class": cc.tag,
        "group": g.describe(),
        "abelian_identity_component": g.abelian.value,
        "notes": g.notes,
    }
    if cc.r0 is not None:
        out["r0"] = render(cc.r0)
    if cc.coefficients:
        out["degree"] = cc.degree
    if g.exponents is not None:
        out["exponents"] = [render(x) for x in g.exponents]
    return out


def _param_independence(prob: ProblemFile, odes) -> dict:
    used = set()
    for o in odes:
        used |= o.r.free_symbols
    params = sorted(prob.table.parameters)
    return {
        "independent_of": [p for p in params if p not in used],
        "depends_on": [p for p in params if p in used],
    }


def run(prob: ProblemFile, seed: int | None = None) -> Report:
    seed = seed if seed is not None else (prob.seed if prob.seed is not None else DEFAULT_SEED)
    report = Report(prob.name, seed, prob.echo())
    with zero_test_context(seed) as log:
        try:
            _pipeline(prob, report, _Run(report, log))
        except _Stop:
            pass
    report.warnings.extend(f"note: {n}" for n in prob.notes)
    return report


def _pipeline(prob: ProblemFile, report: Report, st: _Run):
    pipeline = prob.requests
    if not pipeline and not prob.integrals:
        return
    obj = report.objects
    table = prob.table

    def parse_stage():
        try:
            obj["system"] = HamiltonianSystem.from_text(prob.hamiltonian, table)
        except ValueError as exc:
            raise ProblemError(str(exc)) from exc
        return {"hamiltonian": render(obj["system"].H)}

    st.stage("parse", parse_stage)
    sys = obj["system"]

    def hamilton():
        X = obj["field"] = hamilton_equations(sys)
        return {"equations": {f"{n}'": render(c) for n, c in zip(sys.phase, X)}}

    st.stage("hamilton_equations", hamilton)

    if prob.integrals:
        def integrals():
            Fs = [parse(c, table) for c in prob.integrals]
            rows = []
            for F in Fs:
                br = expand(poisson_bracket(sys.H, F, sys))
                rows.append({"candidate": render(F), "bracket_with_H": render(br), **_zero(is_first_integral(F, sys))})
            inv = verify_involution_set([sys.H, *Fs], sys)
            return {
                "candidates": rows,
                "involution": {
                    "functions": inv.functions,
                    "failing_pairs": [list(p) for p in inv.failing_pairs],
                    "independent": inv.independent,
                    "probabilistic": inv.probabilistic,
                    "error": inv.error,
                    "passed": inv.passed,
                },
            }

        st.stage("integrals", integrals)

    if not pipeline:
        return

    def restrict():
        plane = InvariantPlane.of(sys, prob.plane)
        rs = obj["restricted"] = restrict_to_plane(sys, plane, obj["field"])
        obj["plane"] = plane
        return {
            "vanishing": list(plane.vanishing),
            "certificate": [f"{c} = 0 on the plane" for c in rs.certificate],
            "restricted_hamiltonian": render(rs.h),
            "equations": {f"{rs.q}'": render(rs.qdot), f"{rs.p}'": render(rs.pdot)},
        }

    st.stage("restrict", restrict)

    def solve():
        sol = obj["solution"] = _solve(prob, obj["restricted"])
        return _solution_data(sol)

    st.stage("solution", solve)
    sol = obj["solution"]
    if sol.residual is not None and not sol.residual:
        report.warnings.append("particular solution residual is not zero")

    want_ve = pipeline & {"ve1", "nve", "galois", "verdict"}
    if want_ve:
        def ve1():
            ve = obj["ve1"] = first_variational(sys, obj["plane"], sol, obj["field"])
            return {
                "variables": list(ve.xi),
                "matrix": [[render(e) for e in row] for row in ve.A],
                "symplectic_defect": [list(p) for p in symplectic_defect(ve)],
                "implicit": sorted(ve.implicit),
                "notes": list(ve.notes),
            }

        st.stage("ve1", ve1)

    if "ve2" in pipeline:
        def ve2():
            ve = obj["ve2"] = second_variational(sys, obj["plane"], sol, obj["field"])
            return {
                "variables": list(ve.xi),
                "forcing": [render(f) for f in ve.forcing],
                "implicit": sorted(ve.implicit),
            }

        st.stage("ve2", ve2)

    if not pipeline & {"nve", "galois", "verdict"}:
        return

    def nve():
        odes = obj["odes"] = decouple(obj["ve1"])
        return {
            "equations": [
                {"variable": o.variable, "label": o.label, "r": render(o.r), "implicit": sorted(o.implicit)}
                for o in odes
            ],
            "parameters": _param_independence(prob, odes),
        }

    st.stage("nve", nve)

    if not pipeline & {"galois", "verdict"}:
        return

    def classify():
        rows, found = [], []
        for o in obj["odes"]:
            cc, g = gal.classify(o, table.parameters)
            found.append((o, cc, g))
            rows.append(_classification_data(o, cc, g))
        obj["classifications"] = found
        out = {"classifications": rows}
        if prob.instances:
            inst = []
            for binding in prob.instances:
                for o in obj["odes"]:
                    if not set(binding) & o.r.free_symbols:
                        continue
                    oi = gal.instantiate(o, binding)
                    cc, g = gal.classify(oi, table.parameters)
                    inst.append({"bindings": dict(sorted(binding.items())), "r": render(oi.r),
                                 **_classification_data(oi, cc, g)})
            out["instances"] = inst
        return out

    st.stage("galois", classify)

    if "verdict" not in pipeline:
        return

    def verdict():
        normal = [g for o, _, g in obj["classifications"] if o.label == "normal"]
        v = obj["verdict"] = gal.morales_ramis_verdict(normal, prob.category)
        report.warnings.extend(v.warnings)
        return {
            "outcome": v.outcome,
            "category": v.category,
            "basis": [f"{g.label}: {g.describe()} (abelian identity component: {g.abelian.value})" for g in v.basis],
        }

    st.stage("verdict", verdict)


def run_file(path: str | Path, seed: int | None = None) -> Report:
    try:
        prob = load(path)
    except (ProblemError, ParseError) as exc:
        rep = Report(Path(path).stem, seed if seed is not None else DEFAULT_SEED)
        rep.stages.append({"stage": "load", "status": "error", "kind": "input", "error": _error(exc)})
        rep.failed = "input"
        return rep
    return run(prob, seed)


@dataclass(frozen=True)
class SummaryRow:
    path: str
    name: str
    verdict: str | None
    error: str | None


def batch(paths: Sequence[str | Path], jobs: int = 1, seed: int | None = None) -> tuple[list[SummaryRow], list[Report]]:
    """Run each file independently; one row per path, in input order."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        reports = list(pool.map(lambda p: run_file(p, seed), paths))
    rows = []
    for p, r in zip(paths, reports):
        err = None
        if r.failed:
            bad = next(s for s in r.stages if s["status"] == "error")
            err = f"{bad['stage']}: {bad['error']['type']}: {bad['error']['message']}"
        rows.append(SummaryRow(str(p), r.name, r.verdict, err))
    return rows, reports


__all__ = ["Report", "SummaryRow", "run", "run_file", "batch", "SCHEMA_VERSION"]
