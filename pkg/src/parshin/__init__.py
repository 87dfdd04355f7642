"""Parshin residues of rational differential forms at flags of subvarieties,
computed by an exact series engine and checked by a numeric torus oracle."""

from .flag import (
    FlagError,
    FlagProblem,
    ParshinPoint,
    ValidationReport,
    enumerate_parshin_points,
    validate_parameters,
)
from .forms import DifferentialForm, FormTerm
from .symbolic import NotExact, residue_at_flag, residue_at_parshin_point, residues_by_point

__version__ = "0.1.0"

__all__ = [
    "FlagError", "FlagProblem", "ParshinPoint", "ValidationReport",
    "enumerate_parshin_points", "validate_parameters",
    "DifferentialForm", "FormTerm",
    "NotExact", "residue_at_flag", "residue_at_parshin_point", "residues_by_point",
]
