"""``mrk`` command line. Exit codes: 0 ran, 2 input error, 3 internal error."""

from __future__ import annotations

import argparse
import sys

from ..hamiltonian import HamiltonianSystem, is_first_integral, poisson_bracket
from ..symexpr import DEFAULT_SEED, ParseError, expand, parse, render, zero_test_context
from .pipeline import batch, run_file
from .problem import ProblemError, load
from .render import FORMATS, render_report, render_summary

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


def _seed(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mrk", description="Morales-Ramis non-integrability pipeline")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one problem file")
    r.add_argument("file")
    r.add_argument("--format", choices=FORMATS, default="text")
    r.add_argument("--seed", type=_seed, default=None, help="zero-test seed (default 0xC0FFEE)")
    r.add_argument("-o", "--output", help="write the report here instead of stdout")

    b = sub.add_parser("batch", help="run several problem files")
    b.add_argument("files", nargs="*")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--seed", type=_seed, default=None)
    b.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("check-integral", help="test whether a candidate is a first integral")
    c.add_argument("file")
    c.add_argument("--candidate", required=True)
    c.add_argument("--seed", type=_seed, default=None)
    return ap


def _exit_code(failed: str | None) -> int:
    return {None: EXIT_OK, "pipeline": EXIT_OK, "input": EXIT_INPUT, "internal": EXIT_INTERNAL}[failed]


def _write(data: bytes, path: str | None = None):
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_run(args) -> int:
    report = run_file(args.file, args.seed)
    _write(render_report(report, args.format), args.output)
    print(f"seed: {report.seed:#x}", file=sys.stderr)
    return _exit_code(report.failed)


def cmd_batch(args) -> int:
    if args.jobs < 1:
        print("mrk: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    rows, reports = batch(args.files, args.jobs, args.seed)
    _write(render_summary(rows, args.format))
    if any(r.failed == "internal" for r in reports):
        return EXIT_INTERNAL
    return EXIT_INPUT if any(r.failed == "input" for r in reports) else EXIT_OK


def cmd_check_integral(args) -> int:
    try:
        prob = load(args.file)
        system = HamiltonianSystem.from_text(prob.hamiltonian, prob.table)
        F = parse(args.candidate, prob.table)
    except (ProblemError, ParseError, ValueError) as exc:
        print(f"mrk: {exc}", file=sys.stderr)
        return EXIT_INPUT
    seed = args.seed if args.seed is not None else (prob.seed if prob.seed is not None else DEFAULT_SEED)
    with zero_test_context(seed):
        z = is_first_integral(F, system)
        br = expand(poisson_bracket(system.H, F, system))
    verdict = "first integral" if z else "not a first integral"
    print(f"{{H, F}} = {render(br)}")
    print(f"{verdict}{' (probabilistic zero test)' if z.probabilistic else ''}")
    print(f"seed: {seed:#x}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "batch": cmd_batch, "check-integral": cmd_check_integral}[args.command]
    try:
        return handler(args)
    except Exception as exc:  # noqa: BLE001
        print(f"mrk: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
