"""Consistency checks, C-G cuts, lift-and-project and branching for 0-1 systems.

All arithmetic is exact; rationals are :class:`fractions.Fraction` values.
"""

from .model import BinarySystem, Clause, LinIneq, PartialAssignment, rat
from .modelfile import Model, ModelParseError, format_model, parse_model
from .oracle import Property, check, enumerate_feasible

__version__ = "0.1.0"

__all__ = [
    "BinarySystem", "Clause", "LinIneq", "PartialAssignment", "rat",
    "Model", "ModelParseError", "format_model", "parse_model",
    "Property", "check", "enumerate_feasible",
]
