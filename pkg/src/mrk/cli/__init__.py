"""Problem files, the staged pipeline, reports and the ``mrk`` command."""

from .main import main
from .pipeline import Report, SummaryRow, batch, run, run_file
from .problem import ProblemError, ProblemFile, load, loads
from .render import render_report, render_summary

__all__ = [
    "ProblemFile", "ProblemError", "Report", "SummaryRow",
    "load", "loads", "run", "run_file", "batch", "render_report", "render_summary", "main",
]
