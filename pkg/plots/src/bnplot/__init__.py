"""bnplot: render bnlab experiment CSVs into figures.

A strictly read-only consumer of the CSV files the main library emits; no
scientific quantities are computed here.
"""

from .render import PLOT_KINDS, PlotSpec, SchemaError, render

__version__ = "0.1.0"
