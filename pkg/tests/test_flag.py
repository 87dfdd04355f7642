from fractions import Fraction

import pytest

from parshin.algebra.parse import parse_rational
from parshin.flag import FlagError, FlagProblem, enumerate_parshin_points, validate_parameters
from parshin.numeric import local_monodromy, track_torus

from conftest import XYZ, cusp, fig8, line, make_form, plane, umbrella


def test_fig8_u2_x_has_valuation_three():
    rep = validate_parameters(fig8("x"))
    assert not rep.ok
    assert len(rep.violations) == 1
    v = rep.violations[0]
    assert v.level == 2 and "valuation 3" in v.message


def test_fig8_u2_x_plus_y_valid():
    rep = validate_parameters(fig8())
    assert rep.ok
    assert [rep.valuations[(2, k)] for k in (0, 1)] == [1, 1]


def test_coordinate_parameters_valid():
    assert validate_parameters(plane(("tau", "0"), "x", "y")).ok


def test_dependent_parameters_reported():
    rep = validate_parameters(plane(("tau", "0"), "x", "x"))
    assert not rep.ok
    assert any(v.level == 0 and "dependent" in v.message for v in rep.violations)
    assert "parameters" in str(rep)


def test_incidence_checks():
    p = fig8()
    assert p.check_incidence() == []
    bad = FlagProblem(2, XYZ, p.variety, (0, 0, 0), p.params, p.form,
                      curve=tuple(parse_rational(c, ("tau",)) for c in ("tau", "0", "0")))
    assert any("does not lie on V_n" in e for e in bad.check_incidence())
    off = line("1/t", point=0, u="t - 1")
    assert any("does not vanish" in e for e in off.check_incidence())


def test_shape_errors():
    form = make_form(("x", "y"), [("1/(x*y)", "x", "y")])
    with pytest.raises(FlagError):
        FlagProblem(2, ("x", "y"), None, (0, 0), (parse_rational("x", ("x", "y")),), form,
                    curve=(parse_rational("tau", ("tau",)),) * 2)
    with pytest.raises(FlagError):
        FlagProblem(2, ("x", "y"), None, (0, 0), tuple(parse_rational(v, ("x", "y")) for v in "xy"), form)


def test_curve_parameter_found():
    p = plane(("tau - 1", "0"), "x", "y")
    assert p.curve_at == 1


def test_fig8_two_points():
    pts = enumerate_parshin_points(fig8())
    assert len(pts) == 2
    assert [pt.covering for pt in pts] == [(1, 1), (1, 1)]
    assert sorted(k for pt in pts for k in pt.members) == [0, 1]


def test_umbrella_one_point():
    (pt,) = enumerate_parshin_points(umbrella())
    assert pt.covering[0] == 2
    assert pt.label == "a1"


def test_cusp_one_point():
    (pt,) = enumerate_parshin_points(cusp())
    assert pt.covering == (2,)


@pytest.mark.parametrize("make,radii", [(fig8, (0.5, 0.125)), (umbrella, (0.5, 0.5))])
def test_points_stable_under_halving(make, radii):
    a = enumerate_parshin_points(make(), radii=radii)
    b = enumerate_parshin_points(make(), radii=tuple(r / 2 for r in radii))
    assert [p.covering for p in a] == [p.covering for p in b]


@pytest.mark.parametrize("make,radii", [(fig8, (0.5, 0.125)), (umbrella, (0.5, 0.5))])
def test_orbit_count_matches_torus_components(make, radii):
    p = make()
    pts = enumerate_parshin_points(p, radii=radii)
    tori = [track_torus(p, pt, radii, 16) for pt in pts]
    assert len(tori) == len(local_monodromy(p, radii).orbits)
    assert [t.covering for t in tori] == [pt.covering for pt in pts]
