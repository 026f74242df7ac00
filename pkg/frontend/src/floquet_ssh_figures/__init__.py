"""Batch renderer turning floquet-ssh CSV artifacts into figures."""

__version__ = "0.1.0"

from .render import FigureJob, SchemaError, build_figure, discover_jobs, render
