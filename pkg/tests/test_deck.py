import glob
import os
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from parshin.algebra import Polynomial, RationalFunction
from parshin.deck import (
    Candidate,
    DeckError,
    NumericControls,
    ProblemDeck,
    load_deck,
    parse_deck,
    serialize_deck,
)
from parshin.flag import FlagProblem
from parshin.forms import DifferentialForm, FormTerm

from conftest import DECKS, deck_path

ALL_DECKS = sorted(glob.glob(os.path.join(DECKS, "*.deck")))

SMOOTH_TEXT = """[ambient]
vars = x, y
n = 2

[flag]
curve = tau, 0
point = 0, 0

[parameters]
u1 = x
u2 = y

[form]
term = 1/(x*y) ; x ; y
"""


@pytest.mark.parametrize("path", ALL_DECKS, ids=os.path.basename)
def test_round_trip_shipped_decks(path):
    d = load_deck(path)
    again = parse_deck(serialize_deck(d), d.name)
    assert again == d
    assert serialize_deck(again) == serialize_deck(d)


def test_parse_smooth():
    d = parse_deck(SMOOTH_TEXT, "s")
    p = d.problem
    assert p.n == 2 and p.variables == ("x", "y")
    assert p.variety is None and p.curve_at == 0
    assert d.engine == "both" and d.numeric == NumericControls()
    assert d.radii is None


def test_numeric_section():
    d = parse_deck(SMOOTH_TEXT + "[numeric]\ndelta1 = 1/4\ndelta2 = 0.125\ngrid = 32\ntol = 1e-11\nengine = symbolic\n")
    assert d.radii == (0.25, 0.125)
    assert d.numeric.grid == 32 and d.numeric.tol == 1e-11
    assert d.engine == "symbolic"


def offset_of(text, needle):
    return len(text[: text.index(needle)].encode())


@pytest.mark.parametrize("bad,needle,replacement", [
    ("u2 = y", "* y", "u2 = +* y"),
    ("u2 = y", "w", "u2 = w"),
    ("n = 2", "3", "n = 3"),
    ("[form]", "[forms]", "[forms]"),
    ("u2 = y", "u3", "u3 = y"),
    ("term = 1/(x*y) ; x ; y", "1/(x*y) ; x", "term = 1/(x*y) ; x"),
])
def test_error_offsets(bad, needle, replacement):
    text = SMOOTH_TEXT.replace(bad, replacement)
    with pytest.raises(DeckError) as e:
        parse_deck(text)
    assert e.value.offset == offset_of(text, needle)
    assert f"byte offset {e.value.offset}" in str(e.value)


def test_offsets_count_bytes_not_characters():
    text = "# éé\n" + SMOOTH_TEXT.replace("u2 = y", "u2 = y +")
    with pytest.raises(DeckError) as e:
        parse_deck(text)
    assert e.value.offset == len(text.encode()) - len(text[text.index("y +") + 3:].encode())


def test_missing_pieces():
    with pytest.raises(DeckError, match="missing"):
        parse_deck(SMOOTH_TEXT.replace("[form]\nterm = 1/(x*y) ; x ; y\n", ""))
    with pytest.raises(DeckError, match="outside"):
        parse_deck("vars = x\n" + SMOOTH_TEXT)
    with pytest.raises(DeckError, match="duplicate"):
        parse_deck(SMOOTH_TEXT.replace("u2 = y", "u2 = y\nu2 = x"))


def test_candidate_must_pass_through_point():
    text = SMOOTH_TEXT + "[candidates]\nc.curve = tau, 1\nc.u1 = x\nc.u2 = y\n"
    with pytest.raises(DeckError):
        parse_deck(text)


def test_candidate_must_lie_on_surface():
    text = open(deck_path("fig8")).read() + "[candidates]\nc.curve = tau, 0, 0\nc.u1 = x\nc.u2 = y\n"
    with pytest.raises(DeckError, match="does not lie on V_n"):
        parse_deck(text)


def test_infinity_candidate_only_on_line():
    d = load_deck(deck_path("line"))
    assert d.candidates[-1].point == "infinity"
    text = open(deck_path("cusp")).read() + "[candidates]\nc.point = infinity\n"
    with pytest.raises(DeckError):
        parse_deck(text)


# random decks ---------------------------------------------------------------

XY = ("x", "y")
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def polys(draw, nonzero=False):
    terms = draw(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), fracs, max_size=3))
    p = Polynomial(XY, terms)
    if nonzero and p.is_zero():
        p = Polynomial.constant(XY, 1)
    return p


@st.composite
def decks(draw):
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        num, den = draw(polys()), draw(polys(nonzero=True))
        terms.append(FormTerm(RationalFunction(num, den), (draw(polys()), draw(polys()))))
    form = DifferentialForm(tuple(terms), XY)
    tau = ("tau",)
    var = lambda v: RationalFunction(Polynomial.variable(XY, v))
    t = RationalFunction(Polynomial.variable(tau, "tau"))
    zero = RationalFunction(Polynomial.zero(tau))
    p = FlagProblem(2, XY, None, (0, 0), (var("x"), var("y")), form, (t, zero), name="r")
    cands = []
    for k in range(draw(st.integers(0, 3))):
        a, b = draw(fracs), draw(fracs)
        if a == 0:
            a = Fraction(1)
        cands.append(Candidate(f"c{k}", (t * a, t * b), None, (var("x"), var("x") * b - var("y") * a), Fraction(0)))
    numeric = NumericControls(
        delta1=draw(st.sampled_from([None, 0.5, 0.3])),
        delta2=draw(st.sampled_from([None, 0.25, 1e-3])),
        grid=draw(st.sampled_from([16, 64, 128])),
        tol=draw(st.sampled_from([1e-10, 1e-12, 2.5e-9])),
    )
    engine = draw(st.sampled_from(["symbolic", "numeric", "both"]))
    return ProblemDeck(p, tuple(cands), engine, numeric, "r")


@settings(max_examples=40, deadline=None)
@given(decks())
def test_round_trip_random(deck):
    assert parse_deck(serialize_deck(deck), "r") == deck
