import cmath
from fractions import Fraction

import numpy as np
import pytest

from parshin.algebra.parse import parse_polynomial
from parshin.branches import (
    MonodromyPermutation,
    NonIsolatedComponent,
    branch_residual,
    expand_branches,
    germ_from_polynomial,
    monodromy_along_loop,
    weierstrass_degree,
)

from conftest import fig8, plane, umbrella

ST = ("s", "t")


def germ(text):
    return parse_polynomial(text, ST)


def binomial_half(k):
    """C(1/2, k), independent of the branch code."""
    out = Fraction(1)
    for j in range(k):
        out *= (Fraction(1, 2) - j) / (j + 1)
    return out


def test_sqrt_branches_match_binomial_series():
    bs = expand_branches(germ("t^2 - s^2*(1 + s)"), 6)
    assert len(bs) == 2 and all(b.flavor == "exact" and b.ramification == 1 for b in bs)
    expect = [binomial_half(k) for k in range(6)]
    signs = set()
    for b in bs:
        assert b.s.coeff(1) == 1
        sign = b.t.coeff(1)
        signs.add(sign)
        assert [b.t.coeff(k + 1) for k in range(4)] == [sign * c for c in expect[:4]]
    assert signs == {1, -1}
    # the golden truncation s + s^2/2 - s^3/8
    assert expect[:3] == [1, Fraction(1, 2), Fraction(-1, 8)]


def test_ramified_branch():
    (b,) = expand_branches(germ("t^2 - s"), 4)
    assert b.ramification == 2
    assert b.s.valuation == 2 and b.s.coeff(2) == 1
    assert b.t.coeff(1) == 1 and b.t.valuation == 1


def test_fig8_slice_branches():
    c = 4
    bs = expand_branches(germ(f"{c}*s*t + s^4 + t^4"), 8)
    assert all(b.flavor == "exact" for b in bs)
    plain = [b for b in bs if b.ramification == 1]
    other = [b for b in bs if b.ramification != 1]
    assert len(plain) == 1 and len(other) == 1
    (b,) = plain
    assert b.t.coeff(3) == Fraction(-1, c)
    assert all(b.t.coeff(k) == 0 for k in (1, 2, 4, 5))
    # the symmetric branch s = -t^3/c + ..., seen as ramified over s
    (o,) = other
    assert o.t.coeff(1) == 1 and o.s.coeff(3) == Fraction(-1, c)


@pytest.mark.parametrize("text", [
    "t^2 - s^2*(1 + s)", "t^2 - s", "4*s*t + s^4 + t^4", "t^3 - s^2*(1 + s)",
    "t*(t - s)*(t + 2*s) + s^5", "t^2 - 2*s^2",
])
def test_residual_and_count_conservation(text):
    g = germ(text)
    bs = expand_branches(g, 8)
    assert sum(b.ramification for b in bs) == weierstrass_degree(germ_from_polynomial(g))
    for b in bs:
        r = branch_residual(b)
        if b.flavor == "exact":
            assert r.is_zero()
        else:
            scale = max(abs(c) for c in b.t.coeffs)
            assert max((abs(c) for c in r.coeffs), default=0.0) < 1e-10 * scale


def test_float_branches():
    bs = expand_branches(germ("t^2 - 2*s^2"), 6)
    assert {b.flavor for b in bs} == {"float"}
    slopes = sorted(b.t.coeff(1).real for b in bs)
    assert slopes == pytest.approx([-2 ** 0.5, 2 ** 0.5], abs=1e-12)


def test_exact_branch_matches_float_roots_on_loop():
    # G(s, t) = s t/4 + s^4 + t^4 is the figure-eight slice at z = 1/2
    g = germ("1/4*s*t + s^4 + t^4")
    (b,) = [b for b in expand_branches(g, 12) if b.ramification == 1]
    for k in range(16):
        s0 = 0.02 * cmath.exp(2j * cmath.pi * k / 16)
        exact = complex(b.t.to_complex()(s0))
        roots = np.roots([1, 0, 0, s0 / 4, s0 ** 4])
        assert np.min(np.abs(roots - exact)) < 1e-8


def test_errors():
    with pytest.raises(NonIsolatedComponent):
        expand_branches(germ("s*t + s^2"), 4)
    with pytest.raises(ValueError):
        expand_branches(germ("t^2 - s"), 1)


def test_permutation_type():
    m = MonodromyPermutation.from_perm((1, 2, 0, 3))
    assert m.orbits == ((0, 1, 2), (3,))
    assert m.cycle_notation() == "(1 2 3)"
    assert m.compose(m).compose(m).is_identity
    with pytest.raises(ValueError):
        MonodromyPermutation(2, (0, 0), ((0, 1),))


def test_monodromy_umbrella_is_transposition():
    m = monodromy_along_loop(umbrella(), 0.5, samples=32)
    assert m.count == 2 and m.perm == (1, 0) and len(m.orbits) == 1


def test_monodromy_fig8_is_identity():
    m = monodromy_along_loop(fig8(), 0.5, samples=32)
    assert m.count == 2 and m.is_identity and len(m.orbits) == 2


def test_monodromy_smooth():
    m = monodromy_along_loop(plane(("tau", "0"), "x", "y"), 0.5, samples=16)
    assert m.count == 1 and m.is_identity


@pytest.mark.parametrize("make", [umbrella, fig8])
def test_two_laps_compose(make):
    once = monodromy_along_loop(make(), 0.5, samples=32)
    twice = monodromy_along_loop(make(), 0.5, samples=32, laps=2)
    assert once.compose(once) == twice


def test_samples_floor():
    with pytest.raises(ValueError):
        monodromy_along_loop(fig8(), 0.5, samples=8)
