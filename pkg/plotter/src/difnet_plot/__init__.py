"""Figure rendering for difnet experiment CSV logs."""

from .render import KINDS, PlotSpec, SchemaMismatch, render

__all__ = ["KINDS", "PlotSpec", "SchemaMismatch", "render"]

__version__ = "0.1.0"
