"""Perturbative propagator of a periodically driven two-level system."""

from .interaction import InteractionSpec, classify
from .pipeline import Solution, prepare, solve
from .propagator import evaluate_U, transition_probability, unitarity_deviation

__all__ = [
    "InteractionSpec",
    "Solution",
    "classify",
    "evaluate_U",
    "prepare",
    "solve",
    "transition_probability",
    "unitarity_deviation",
]
