"""Run every shipped problem file and print the verdict summary."""

import sys
from pathlib import Path

from mrk.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    files = [str(p) for p in sorted((ROOT / "problems").glob("*.problem"))]
    sys.exit(main(["batch", *files, "--jobs", "4"]))
