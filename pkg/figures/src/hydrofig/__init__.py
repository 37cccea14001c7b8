"""Figure generation from persisted hydroelastic run artifacts.

Reads only the versioned delimited/JSON formats written by the solver CLI
(pair_table.csv, energy.csv, summary.json, trajectory.jsonl) and renders
matplotlib figures to files; it never imports or invokes the solver.
"""

from .render import FigureSpec, MissingColumn, RenderResult, render

__all__ = ["FigureSpec", "RenderResult", "MissingColumn", "render"]

__version__ = "0.1.0"
