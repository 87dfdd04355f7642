"""Rational differential forms ``sum R * dG1 ^ ... ^ dGk`` on affine space."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Polynomial, RationalFunction


@dataclass(frozen=True)
class FormTerm:
    coeff: RationalFunction
    diffs: tuple  # Polynomials G_1..G_k

    def __str__(self):
        return f"{self.coeff} ; " + " ; ".join(str(g) for g in self.diffs)


@dataclass(frozen=True)
class DifferentialForm:
    terms: tuple
    variables: tuple

    def __post_init__(self):
        degs = {len(t.diffs) for t in self.terms}
        if len(degs) > 1:
            raise ValueError("all terms of a form must have the same degree")
        for t in self.terms:
            if tuple(t.coeff.vars) != self.variables or any(tuple(g.vars) != self.variables for g in t.diffs):
                raise ValueError("form terms must use the ambient variables")

    @property
    def degree(self) -> int:
        return len(self.terms[0].diffs) if self.terms else 0

    @classmethod
    def coordinate(cls, coeff, coords, variables):
        """``coeff * dx_i ^ dx_j`` for coordinate names."""
        variables = tuple(variables)
        coeff = RationalFunction.lift(coeff, variables)
        diffs = tuple(Polynomial.variable(variables, c) for c in coords)
        return cls((FormTerm(coeff, diffs),), variables)

    def __add__(self, other):
        if self.variables != other.variables:
            raise ValueError("forms on different ambient spaces")
        return DifferentialForm(self.terms + other.terms, self.variables)

    def scale(self, c):
        return DifferentialForm(tuple(FormTerm(t.coeff * c, t.diffs) for t in self.terms), self.variables)

    def polar_polynomials(self):
        return [t.coeff.den for t in self.terms]

    def __str__(self):
        return " + ".join(f"({t.coeff})*" + "^".join(f"d({g})" for g in t.diffs) for t in self.terms)
