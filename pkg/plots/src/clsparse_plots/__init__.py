"""Standalone figure renderer for clsparse experiment summary CSVs."""

from .render import PlotError, PlotSpec, read_summary_rows, render, render_svg

__version__ = "0.1.0"
