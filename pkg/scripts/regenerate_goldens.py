"""Rewrite tests/golden/*.json from problems/*.problem.

Run after an intentional change to the report format, then review the diff.
"""

from pathlib import Path

from mrk.cli import render_report, run_file

ROOT = Path(__file__).resolve().parent.parent


def main():
    out = ROOT / "tests" / "golden"
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted((ROOT / "problems").glob("*.problem")):
        data = render_report(run_file(path), "json")
        target = out / f"{path.stem}.json"
        changed = not target.exists() or target.read_bytes() != data
        target.write_bytes(data)
        print(f"{path.stem:12s} {'updated' if changed else 'unchanged'}")


if __name__ == "__main__":
    main()
