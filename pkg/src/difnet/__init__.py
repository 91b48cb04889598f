"""Diffusion LMS over random networks: simulation and closed-form analysis."""

from . import combination, errors, signal_model, simulator, theory, topology

__all__ = [
    "combination",
    "errors",
    "signal_model",
    "simulator",
    "theory",
    "topology",
]

__version__ = "0.1.0"
