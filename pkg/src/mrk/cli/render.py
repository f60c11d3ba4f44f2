"""Report rendering: json (schema-stable), text, latex."""

from __future__ import annotations

import json

from ..symexpr import latex, latex_symbol
from .pipeline import Report, SummaryRow

FORMATS = ("json", "text", "latex")


def render_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()
    if fmt == "text":
        return _text(report).encode()
    if fmt == "latex":
        return _latex(report).encode()
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _text(r: Report) -> str:
    out = [f"problem: {r.name}", f"seed: {r.seed:#x}"]
    for s in r.stages:
        name = s["stage"]
        if s["status"] == "error":
            out.append(f"[{name}] ERROR ({s['kind']}) {s['error']['type']}: {s['error']['message']}")
            continue
        out.append(f"[{name}]")
        if name == "parse":
            out.append(f"  H = {s['hamiltonian']}")
        elif name in ("hamilton_equations",):
            out.extend(f"  {k} = {v}" for k, v in s["equations"].items())
        elif name == "integrals":
            for c in s["candidates"]:
                state = "first integral" if c["zero"] else f"not conserved, {{H, F}} = {c['bracket_with_H']}"
                out.append(f"  {c['candidate']}: {state}{' (probabilistic)' if c['probabilistic'] else ''}")
            inv = s["involution"]
            out.append(f"  involution with H: {'yes' if not inv['failing_pairs'] else 'no'}; "
                       f"independent: {inv['independent']}")
        elif name == "restrict":
            out.append(f"  plane: {', '.join(v + ' = 0' for v in s['vanishing'])}")
            out.append(f"  invariance: {', '.join(s['certificate'])}")
            out.append(f"  h = {s['restricted_hamiltonian']}")
            out.extend(f"  {k} = {v}" for k, v in s["equations"].items())
        elif name == "solution":
            q, p = s["coordinate"], s["momentum"]
            if s["kind"] == "explicit":
                out.append(f"  {q}(t) = {s['q_of_t']}, {p}(t) = {s['p_of_t']}")
            elif s["kind"] == "implicit":
                out.append(f"  {s['relation']}, {p} = {s['p_of_q']}")
            else:
                out.append(f"  {q} = {q}(t), unknown solution of the restricted flow")
            if "residual" in s:
                res = s["residual"]
                out.append(f"  residual zero: {res['zero']}{' (probabilistic)' if res['probabilistic'] else ''}")
        elif name == "ve1":
            out.append(f"  A({', '.join(s['variables'])}) =")
            out.extend("    [" + ", ".join(row) + "]" for row in s["matrix"])
            out.append(f"  J*A symmetric: {not s['symplectic_defect']}")
        elif name == "ve2":
            out.extend(f"  forcing {v}'' : {f}" for v, f in zip(s["variables"], s["forcing"]))
        elif name == "nve":
            for e in s["equations"]:
                out.append(f"  ({e['label']}) {e['variable']}'' = ({e['r']})*{e['variable']}")
            ind = s["parameters"]["independent_of"]
            if ind:
                out.append(f"  independent of parameters: {', '.join(ind)}")
        elif name == "galois":
            for c in s["classifications"]:
                ex = f", exponents ({', '.join(c['exponents'])})" if "exponents" in c else ""
                out.append(f"  {c['label']} {c['variable']}: {c['coefficient_class']} -> {c['group']}, "
                           f"abelian identity component: {c['abelian_identity_component']}{ex}")
            for c in s.get("instances", []):
                b = ", ".join(f"{k} = {v}" for k, v in c["bindings"].items())
                out.append(f"  at {b}: {c['variable']}'' = ({c['r']})*{c['variable']} -> {c['group']}")
        elif name == "verdict":
            out.append(f"  {s['outcome']} ({s['category']} first integrals)")
            out.extend(f"  basis: {b}" for b in s["basis"])
    for w in r.warnings:
        out.append(f"warning: {w}")
    return "\n".join(out) + "\n"


def _pmatrix(rows) -> str:
    body = " \\\\\n".join(" & ".join(latex(e) for e in row) for row in rows)
    return "\\begin{pmatrix}\n" + body + "\n\\end{pmatrix}"


def _latex(r: Report) -> str:
    o = r.objects
    out = [f"% {r.name}, seed {r.seed:#x}"]
    if "field" in o:
        sys = o["system"]
        out.append("\\begin{align*}")
        out.append(" \\\\\n".join(f"\\dot{{{latex_symbol(n)}}} &= {latex(c)}" for n, c in zip(sys.phase, o["field"])))
        out.append("\\end{align*}")
    if "ve1" in o:
        ve = o["ve1"]
        xs = [latex_symbol(x) for x in ve.xi]
        col = " \\\\ ".join(xs)
        dcol = " \\\\ ".join(f"\\dot{{{x}}}" for x in xs)
        out.append("\\[\n\\begin{pmatrix} " + dcol + " \\end{pmatrix} = "
                   + _pmatrix(ve.A) + " \\begin{pmatrix} " + col + " \\end{pmatrix}\n\\]")
    if "ve2" in o:
        ve = o["ve2"]
        out.append("\\begin{align*}")
        out.append(" \\\\\n".join(f"f_{{{i + 1}}} &= {latex(f)}" for i, f in enumerate(ve.forcing)))
        out.append("\\end{align*}")
    if "odes" in o:
        out.append("\\begin{align*}")
        out.append(" \\\\\n".join(
            f"\\ddot{{{latex_symbol(e.variable)}}} &= {latex(e.r)}\\,{latex_symbol(e.variable)} && \\text{{{e.label}}}"
            for e in o["odes"]))
        out.append("\\end{align*}")
    if "verdict" in o:
        out.append(f"\\paragraph{{Verdict}} {o['verdict'].outcome}.")
    for s in r.stages:
        if s["status"] == "error":
            out.append(f"% error in {s['stage']}: {s['error']['type']}: {s['error']['message']}")
    return "\n".join(out) + "\n"


def render_summary(rows: list[SummaryRow], fmt: str = "text") -> bytes:
    if fmt == "json":
        data = [{"path": r.path, "name": r.name, "verdict": r.verdict, "error": r.error} for r in rows]
        return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode()
    if not rows:
        return b"no problems\n"
    w = max(len(r.name) for r in rows)
    lines = [f"{'problem'.ljust(w)}  result"]
    for r in rows:
        lines.append(f"{r.name.ljust(w)}  {r.verdict or ('error: ' + r.error if r.error else '-')}")
    counts: dict[str, int] = {}
    for r in rows:
        key = r.verdict or ("error" if r.error else "no verdict")
        counts[key] = counts.get(key, 0) + 1
    lines.append("total: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())))
    return ("\n".join(lines) + "\n").encode()


__all__ = ["render_report", "render_summary", "FORMATS"]
