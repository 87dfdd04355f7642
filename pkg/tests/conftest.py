import os
from fractions import Fraction

import pytest

from parshin.algebra.parse import parse_polynomial, parse_rational
from parshin.flag import FlagProblem
from parshin.forms import DifferentialForm, FormTerm

DECKS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "decks")

XYZ = ("x", "y", "z")
FIG8 = "x*y*z^2 + x^4 + y^4"
UMBRELLA = "y^2 - z*x^2"


def deck_path(name):
    return os.path.join(DECKS, name + ".deck")


def make_form(variables, terms):
    """terms: [(R, G1, ...)] as strings."""
    variables = tuple(variables)
    out = []
    for R, *gs in terms:
        out.append(FormTerm(parse_rational(R, variables), tuple(parse_polynomial(g, variables) for g in gs)))
    return DifferentialForm(tuple(out), variables)


def surface_flag(equation, curve, u1, u2, terms, variables=XYZ, point=None, name=""):
    variables = tuple(variables)
    var = parse_polynomial(equation, variables) if equation else None
    point = point or (0,) * len(variables)
    return FlagProblem(
        2, variables, var, point,
        (parse_rational(u1, variables), parse_rational(u2, variables)),
        make_form(variables, terms),
        curve=tuple(parse_rational(c, ("tau",)) for c in curve),
        name=name,
    )


def fig8(u2="x + y", terms=(("1/(z*(x + y))", "z", "x + y"),)):
    return surface_flag(FIG8, ("0", "0", "tau"), "z", u2, terms, name="fig8")


def umbrella(u2="x", terms=(("1/(z*y)", "z", "y"),)):
    return surface_flag(UMBRELLA, ("0", "0", "tau"), "z", u2, terms, name="umbrella")


def plane(curve, u1, u2, terms=(("1/(x*y)", "x", "y"),)):
    return surface_flag(None, curve, u1, u2, terms, variables=("x", "y"), name="plane")


def line(R, point=0, u=None):
    vs = ("t",)
    u = u or f"t - ({Fraction(point)})"
    return FlagProblem(1, vs, None, (Fraction(point),), (parse_rational(u, vs),), make_form(vs, [(R, "t")]))


def cusp(R="1/x", G="x", u="x", point=(0, 0)):
    vs = ("x", "y")
    return FlagProblem(1, vs, parse_polynomial("y^2 - x^3", vs), point, (parse_rational(u, vs),),
                       make_form(vs, [(R, G)]))


@pytest.fixture
def decks():
    return deck_path


# [k, verdict, description, detail] per acceptance criterion
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, verdict, what, detail in sorted(ACCEPTANCE, key=lambda e: e[0]):
        terminalreporter.write_line(f"CRITERION {k}: {verdict} - {what} [{detail}]")
