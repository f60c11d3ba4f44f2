"""Problem files.

A problem file is an INI-style ``key = value`` document::

    [symbols]
    coordinates = q1, q2
    momenta = p1, p2
    parameters = a, b, m
    functions = beta/2
    constants = c

    [assumptions]
    m = integer >= 3

    [problem]
    name = proposition
    hamiltonian = 1/2*p1^2 + 1/2*p2^2 - 1/(a*q1^m + b*q2^m)
    plane = q2, p2
    solution = energy
    energy = 0

    [requests]
    ve1 = yes
    verdict = yes
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..symexpr import Param, ParseError, SymbolTable, parse

SOLUTION_KINDS = ("auto", "power-law", "linear", "energy", "explicit", "generic")
REQUESTS = ("ve1", "ve2", "nve", "galois", "verdict")


class ProblemError(ValueError):
    """Malformed problem file (exit code 2)."""


def _names(value: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in value.replace(";", ",").split(",") if x.strip())


_ASSUME = re.compile(r"^(integer)?\s*(?:(>=|>)\s*(-?\d+(?:/\d+)?))?$")


def parse_assumption(name: str, text: str) -> Param:
    """``integer``, ``>= 3``, ``integer > 2`` ... into a :class:`Param`."""
    m = _ASSUME.match(text.strip().replace(",", " ").strip())
    if not m or not (m.group(1) or m.group(2)):
        raise ProblemError(f"cannot read assumption {name} = {text!r}")
    integer = bool(m.group(1))
    minimum = None
    if m.group(2):
        minimum = Fraction(m.group(3))
        if m.group(2) == ">" and integer:
            minimum = Fraction(int(minimum) + 1) if minimum.denominator == 1 else Fraction(-(-minimum.numerator // minimum.denominator))
    return Param(name, integer, minimum)


def _truthy(v: str) -> bool:
    v = v.strip().lower()
    if v in ("yes", "true", "on", "1"):
        return True
    if v in ("no", "false", "off", "0", ""):
        return False
    raise ProblemError(f"expected yes/no, got {v!r}")


@dataclass
class ProblemFile:
    name: str
    table: SymbolTable
    hamiltonian: str
    plane: tuple[str, ...] = ()
    solution: str = "auto"
    coordinate: str | None = None
    energy: str = "0"
    sign: int = 1
    constant: str = "0"
    category: str = "meromorphic"
    seed: int | None = None
    requests: set[str] = field(default_factory=set)
    integrals: tuple[str, ...] = ()
    instances: tuple[dict[str, int], ...] = ()
    notes: tuple[str, ...] = ()

    def echo(self) -> dict:
        t = self.table
        return {
            "name": self.name,
            "hamiltonian": self.hamiltonian,
            "coordinates": list(t.coordinates),
            "momenta": list(t.momenta),
            "parameters": {
                k: {"integer": p.integer, "minimum": None if p.minimum is None else str(p.minimum)}
                for k, p in sorted(t.parameters.items())
            },
            "functions": dict(sorted(t.functions.items())),
            "constants": list(t.extra),
            "plane": list(self.plane),
            "solution": self.solution,
            "coordinate": self.coordinate,
            "energy": self.energy,
            "sign": "+" if self.sign > 0 else "-",
            "constant": self.constant,
            "category": self.category,
            "requests": sorted(self.requests),
            "integrals": list(self.integrals),
            "instances": [dict(i) for i in self.instances],
            "notes": list(self.notes),
        }


def loads(text: str, default_name: str = "problem") -> ProblemFile:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ProblemError(f"malformed problem file: {exc}") from None
    for sec in cp.sections():
        if sec not in ("symbols", "assumptions", "problem", "requests"):
            raise ProblemError(f"unknown section [{sec}]")
    if not cp.has_section("problem") or "hamiltonian" not in cp["problem"]:
        raise ProblemError("missing [problem] hamiltonian")
    sym = cp["symbols"] if cp.has_section("symbols") else {}
    prob = cp["problem"]

    params = {n: Param(n) for n in _names(sym.get("parameters", ""))}
    if cp.has_section("assumptions"):
        for n, v in cp["assumptions"].items():
            if n not in params:
                raise ProblemError(f"assumption for undeclared parameter {n}")
            params[n] = parse_assumption(n, v)
    functions = {}
    for item in _names(sym.get("functions", "")):
        fname, _, arity = item.partition("/")
        if not arity.strip().isdigit():
            raise ProblemError(f"function {item!r} must be written name/arity")
        functions[fname.strip()] = int(arity)
    try:
        table = SymbolTable(
            coordinates=_names(sym.get("coordinates", "q1, q2")),
            momenta=_names(sym.get("momenta", "p1, p2")),
            parameters=params,
            functions=functions,
            time=sym.get("time", "t").strip(),
            extra=_names(sym.get("constants", "")),
        )
    except ValueError as exc:
        raise ProblemError(str(exc)) from None

    try:
        parse(prob["hamiltonian"], table)
    except ParseError as exc:
        raise ProblemError(f"hamiltonian: {exc}") from None

    solution = prob.get("solution", "auto").strip()
    if solution not in SOLUTION_KINDS:
        raise ProblemError(f"solution must be one of {', '.join(SOLUTION_KINDS)}")
    sign = prob.get("sign", "+").strip()
    if sign not in ("+", "-"):
        raise ProblemError("sign must be + or -")
    seed = prob.get("seed")
    try:
        seed = int(seed, 0) if seed is not None else None
    except ValueError:
        raise ProblemError(f"seed must be an integer, got {seed!r}") from None

    requests = set()
    integrals: tuple[str, ...] = ()
    instances = []
    if cp.has_section("requests"):
        for k, v in cp["requests"].items():
            if k in REQUESTS:
                if _truthy(v):
                    requests.add(k)
            elif k == "integrals":
                integrals = tuple(x.strip() for x in v.split(";") if x.strip())
            elif k == "instances":
                for chunk in v.split(";"):
                    if not chunk.strip():
                        continue
                    binding = {}
                    for pair in chunk.split(","):
                        n, _, val = pair.partition("=")
                        try:
                            binding[n.strip()] = int(val)
                        except ValueError:
                            raise ProblemError(f"instance {chunk.strip()!r} must bind parameters to integers") from None
                        if n.strip() not in params:
                            raise ProblemError(f"instance binds undeclared parameter {n.strip()}")
                    instances.append(binding)
            else:
                raise ProblemError(f"unknown request {k!r}")
    category = prob.get("category", "meromorphic").strip()
    if category not in ("meromorphic", "rational"):
        raise ProblemError("category must be meromorphic or rational")
    plane = _names(prob.get("plane", ""))
    if requests and not plane:
        raise ProblemError("requests need an invariant plane")
    undeclared = set(plane) - set(table.coordinates) - set(table.momenta)
    if undeclared:
        raise ProblemError(f"plane mentions undeclared symbols: {', '.join(sorted(undeclared))}")
    if solution == "explicit" and "coordinate" not in prob:
        raise ProblemError("explicit solution needs a coordinate = <expr in t>")
    return ProblemFile(
        name=prob.get("name", default_name).strip(),
        table=table,
        hamiltonian=prob["hamiltonian"].strip(),
        plane=plane,
        solution=solution,
        coordinate=prob.get("coordinate"),
        energy=prob.get("energy", "0").strip(),
        sign=1 if sign == "+" else -1,
        constant=prob.get("constant", "0").strip(),
        category=category,
        seed=seed,
        requests=requests,
        integrals=integrals,
        instances=tuple(instances),
        notes=tuple(x.strip() for x in prob.get("notes", "").splitlines() if x.strip()),
    )


def load(path: str | Path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, path.stem)


__all__ = ["ProblemFile", "ProblemError", "ParseError", "load", "loads", "parse_assumption"]
