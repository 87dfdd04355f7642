from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from parshin.algebra import LaurentSeries, UniRat
from parshin.flag import transverse_sheets
from parshin.symbolic import (
    extract_residual,
    pullback_to_parameters,
    residue_at_flag,
    residue_at_parshin_point,
    residues_by_point,
)

from conftest import cusp, fig8, line, plane, surface_flag, umbrella

TAU = UniRat.variable()


def sheets(p, order=8):
    sh, unresolved = transverse_sheets(p, order)
    assert unresolved == 0
    return sh


@pytest.mark.parametrize("curve,u1,u2,sign", [(("tau", "0"), "x", "y", 1), (("0", "tau"), "y", "x", -1)])
def test_pullback_coordinate_cases(curve, u1, u2, sign):
    p = plane(curve, u1, u2)
    (sh,) = sheets(p)
    f = pullback_to_parameters(p, sh, 8)
    assert f.valuation == -1
    assert f.coeff(-1) == sign / TAU
    assert all(f.coeff(k) == 0 for k in range(0, f.order))


def test_pullback_fig8_leading_term():
    p = fig8()
    for sh in sheets(p):
        f = pullback_to_parameters(p, sh, 8)
        assert f.valuation == -1
        assert f.coeff(-1) == 1 / TAU


def test_extract_examples():
    # f = u1^-1 u2^-1
    f = LaurentSeries([1 / TAU], -1, 6, "function")
    w1 = extract_residual(f, ("u1", "u2"), at=0)
    assert w1.level == 1 and w1.coefficient.valuation == -1 and w1.coefficient.coeff(-1) == 1
    assert extract_residual(w1).value == 1
    # f = u1^-1 u2^-2
    f = LaurentSeries([1 / TAU], -2, 6, "function")
    assert extract_residual(extract_residual(f, ("u1", "u2"), at=0)).value == 0
    # f = (u1^-2 + u1^-1) u2^-1 + u2^0 (...)
    c = (1 + TAU) / (TAU * TAU)
    f = LaurentSeries([c, TAU], -1, 6, "function")
    w1 = extract_residual(f, ("u1", "u2"), at=0)
    assert [w1.coefficient.coeff(k) for k in (-2, -1, 0)] == [1, 1, 0]
    with pytest.raises(ValueError):
        w1.value


def test_residue_examples():
    assert residue_at_flag(line("1/t")) == 1
    assert residue_at_flag(cusp()) == 2
    assert residue_at_flag(plane(("tau", "0"), "x", "y")) == 1
    assert residue_at_flag(plane(("0", "tau"), "y", "x")) == -1


def test_line_goldens():
    assert residue_at_flag(line("1/(t*(t - 1))", 0)) == -1
    assert residue_at_flag(line("1/(t*(t - 1))", 1)) == 1
    assert residue_at_flag(line("1/(t^3*(t - 1))", 0)) == -1
    assert residue_at_flag(line("(t + 1)/(t^2*(t - 2)^3)", 2)) == Fraction(5, 16)


def test_cusp_goldens():
    assert residue_at_flag(cusp()) == 2
    assert residue_at_flag(cusp("1/y", "y")) == 3
    assert residue_at_flag(cusp("1/(x*y)", "y")) == 0


def test_fig8_two_points():
    res = residues_by_point(fig8())
    assert res.total == 2
    assert sorted(v for _, v in res.per_point) == [1, 1]
    assert residue_at_parshin_point((fig8(), 0)) == 1


def test_umbrella_one_orbit():
    res = residues_by_point(umbrella())
    assert res.total == 2
    assert res.base_change == 2
    assert len(res.per_point) == 1


def test_regular_form_gives_zero():
    assert residue_at_flag(plane(("tau", "0"), "x", "y", (("1/(1 + x)", "x", "y"),))) == 0
    assert residue_at_flag(line("t^2 + 1")) == 0


def test_antisymmetry():
    a = residue_at_flag(plane(("tau", "0"), "x", "y"))
    b = residue_at_flag(plane(("0", "tau"), "y", "x"))
    assert a == -b != 0


@pytest.mark.parametrize("a,b", [
    (fig8("x + y"), fig8("x + 2*y")),
    (umbrella("x"), umbrella("y")),
    (umbrella("x"), umbrella("x + y")),
])
def test_parameter_independence(a, b):
    assert residue_at_flag(a) == residue_at_flag(b)


@settings(max_examples=8, deadline=None)
@given(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7))
def test_linearity(a, b):
    eta, omega = "1/(x*y)", "(1 + x)/(x^2*y)"
    lhs = residue_at_flag(plane(("tau", "0"), "x", "y", ((f"({a})*{eta} + ({b})*{omega}", "x", "y"),)))
    ra = residue_at_flag(plane(("tau", "0"), "x", "y", ((eta, "x", "y"),)))
    rb = residue_at_flag(plane(("tau", "0"), "x", "y", ((omega, "x", "y"),)))
    assert lhs == a * ra + b * rb


def test_reciprocity_candidates_fig8():
    terms = (("z^2/(y^2*(x^2 + y^2))", "x", "y"),)
    from conftest import FIG8

    cands = [
        (("0", "0", "tau"), "z", "x + y", 4),
        (("I*tau", "tau", "(1 + I)*tau"), "y", "x - I*y", -1),
        (("-I*tau", "tau", "-(1 - I)*tau"), "y", "x + I*y", -1),
    ]
    for curve, u1, u2, expect in cands:
        assert residue_at_flag(surface_flag(FIG8, curve, u1, u2, terms)) == expect
