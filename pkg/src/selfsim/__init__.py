"""Finite equational systems of spaces: validation, universal solutions, and
recognition of geometric fixed points."""

from __future__ import annotations

from ._support import InputError, PreconditionError, Report, ResourceCapExceeded, Violation
from .coalgebra import Coalgebra, check_reso_connected, terminal_map, validate_coalgebra
from .complexes import LassoComplex, decide_equal, enumerate_complexes, truncated_components
from .discrete import DiscreteSystem, classify
from .fincat import FinCategory, SetFunctor, validate_category
from .finmod import EquationalSystem, Module, tensor, validate_module, validate_system
from .recognition import GeometricRealization, crude_verify, diameter_decay
from .solvability import check_S

__version__ = "0.1.0"

__all__ = [
    "Coalgebra",
    "DiscreteSystem",
    "EquationalSystem",
    "FinCategory",
    "GeometricRealization",
    "InputError",
    "LassoComplex",
    "Module",
    "PreconditionError",
    "Report",
    "ResourceCapExceeded",
    "SetFunctor",
    "Violation",
    "check_S",
    "check_reso_connected",
    "classify",
    "crude_verify",
    "decide_equal",
    "diameter_decay",
    "enumerate_complexes",
    "tensor",
    "terminal_map",
    "truncated_components",
    "validate_category",
    "validate_coalgebra",
    "validate_module",
    "validate_system",
]
