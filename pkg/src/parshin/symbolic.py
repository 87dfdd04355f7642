"""Parshin residues computed from their definition: pull the form back to
local parameters along a branch, take u_n^-1 coefficients, iterate."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .algebra import InsufficientPrecision, LaurentSeries, Polynomial, RationalFunction, UniPoly, UniRat
from .algebra.laurent import compose_series
from .algebra.scalars import GaussianRational, normalize
from .flag import FlagProblem, pull_rational, series_valuation, transverse_sheets

__all__ = [
    "ResidualForm",
    "SymbolicResult",
    "NotExact",
    "pullback_to_parameters",
    "extract_residual",
    "residue_at_parshin_point",
    "residue_at_flag",
    "residues_by_point",
    "START_ORDER",
    "MAX_ORDER",
]

START_ORDER = 16
MAX_ORDER = 128


class NotExact(ValueError):
    """Some branch is not defined over the exact coefficient field; the
    numeric engine has to handle this flag."""


@dataclass(frozen=True)
class ResidualForm:
    """Level-k residual form; ``coefficient`` is a LaurentSeries (k >= 1,
    possibly nested for k = 2) or a scalar (k = 0)."""

    level: int
    coefficient: object
    parameters: tuple
    point: object = None

    @property
    def value(self):
        if self.level != 0:
            raise ValueError("only a level-0 residual form is a scalar")
        return self.coefficient


@dataclass
class SymbolicResult:
    total: object
    per_point: list  # [(sheet indices, value)]
    order: int
    base_change: int = 1


# ---------------------------------------------------------------------------
# helpers over Q(tau)


def _domain_of(values) -> str:
    return "gaussian" if any(isinstance(c, GaussianRational) for c in values) else "exact"


def unirat_series(r: UniRat, x0, order: int) -> LaurentSeries:
    """Laurent expansion of r at x0 in sigma = x - x0, known below ``order``."""
    num = r.num.taylor_shift(x0)
    den = r.den.taylor_shift(x0)
    dom = _domain_of(list(num.c) + list(den.c))
    nv, dv = num.valuation(), den.valuation()
    ln = LaurentSeries([normalize(c) for c in num.c], 0, order + dv + 1, dom)
    ld = LaurentSeries([normalize(c) for c in den.c], 0, order + dv + 1, dom)
    return (ln / ld).truncate(order)


def _d_tau(s: LaurentSeries) -> LaurentSeries:
    return s.map_coeffs(lambda c: c.derivative() if isinstance(c, UniRat) else UniRat(0))


def _as_series(x, like: LaurentSeries) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    return LaurentSeries.constant(x, like.order, like.domain)


def revert_series(a: LaurentSeries) -> LaurentSeries:
    """v(u) with a(v(u)) = u, for a of valuation exactly 1."""
    if a.valuation != 1:
        raise ValueError("series reversion needs valuation 1")
    order = a.order
    u = LaurentSeries.variable(order, a.domain)
    a1 = a.coeff(1)
    v = u / a1 if a.domain == "function" else u * (1 / a1)
    da = a.derivative()
    k = 2
    while k < 2 * order:
        r = compose_series(a, v) - u
        d = compose_series(da, v)
        v = (v - r / d).truncate(order)
        k *= 2
    return v


# ---------------------------------------------------------------------------
# the operations


def _form_on_sheet_n1(p: FlagProblem, coords):
    acc = None
    for t in p.form.terms:
        R = pull_rational(t.coeff, coords)
        G = _as_series(t.diffs[0].evaluate(list(coords)), coords[0])
        term = R * G.derivative()
        acc = term if acc is None else acc + term
    return acc


def _form_on_sheet_n2(p: FlagProblem, coords):
    """g with omega = g dtau ^ dv on the sheet."""
    acc = None
    for t in p.form.terms:
        R = pull_rational(t.coeff, coords)
        H1 = _as_series(t.diffs[0].evaluate(list(coords)), coords[0])
        H2 = _as_series(t.diffs[1].evaluate(list(coords)), coords[0])
        jac = _d_tau(H1) * H2.derivative() - H1.derivative() * _d_tau(H2)
        term = R * jac
        acc = term if acc is None else acc + term
    return acc


def pullback_to_parameters(p: FlagProblem, sheet, order: int = START_ORDER, to_u: bool = True) -> LaurentSeries:
    """The coefficient f of the form in the branch's local parameters.

    n = 1: a Laurent series in the branch parameter v (omega = f dv).
    n = 2: a Laurent series in u_2 (or in the sheet parameter v when u_2 is
    not a uniformizer there) whose coefficients lie in Q(tau); omega = f dtau ^ du_2.
    """
    coords = tuple(c.truncate(order) if c.order > order else c for c in sheet.coords)
    if p.n == 1:
        return _form_on_sheet_n1(p, coords)
    g = _form_on_sheet_n2(p, coords)
    if g is None:
        raise ValueError("empty form")
    if not to_u:
        return g
    u2 = pull_rational(p.params[1], coords)
    if series_valuation(u2) != 1:
        return g
    v_of_u = revert_series(u2)
    return compose_series(g, v_of_u) * v_of_u.derivative()


def extract_residual(f, parameters=(), point=None, at=None, order: int = START_ORDER) -> ResidualForm:
    """Coefficient of the innermost parameter to the power -1.

    ``f`` is a LaurentSeries (any domain) or a ResidualForm. Function-field
    coefficients are expanded around ``at`` to give the next level's series.
    """
    level = 2 if isinstance(f, LaurentSeries) and f.domain in ("function", "nested") else 1
    if isinstance(f, ResidualForm):
        level, parameters, point, f = f.level, f.parameters, f.point, f.coefficient
    c = f.coeff(-1)
    params = tuple(parameters[:-1]) if parameters else ()
    if f.domain == "function":
        if not isinstance(c, UniRat):
            c = UniRat(c)
        if at is None:
            raise ValueError("need the expansion point for function-field coefficients")
        return ResidualForm(level - 1, unirat_series(c, at, order), params, point)
    if f.domain == "nested":
        if not isinstance(c, LaurentSeries):
            c = LaurentSeries.constant(c, order)
        return ResidualForm(level - 1, c, params, point)
    return ResidualForm(level - 1, normalize(c) if not isinstance(c, complex) else c, params, point)


def _residue_on_sheet(p: FlagProblem, sheet, at, order: int):
    f = pullback_to_parameters(p, sheet, order)
    if p.n == 1:
        return extract_residual(f, ("v",)).value
    w1 = extract_residual(f, (p.curve_param, "u2"), at=at, order=order)
    return extract_residual(w1).value


def _with_order(fn):
    order = START_ORDER
    while True:
        try:
            return fn(order), order
        except InsufficientPrecision:
            if order >= MAX_ORDER:
                raise
            order *= 2


# base change tau = tau0 + w^e --------------------------------------------------


def _compose_unipoly(q: UniPoly, inner: UniPoly) -> UniPoly:
    acc = UniPoly()
    for c in reversed(q.c):
        acc = acc * inner + c
    return acc


def _to_rational_function(r: UniRat, var: str) -> RationalFunction:
    num = Polynomial((var,), {(k,): c for k, c in enumerate(r.num.c) if c != 0})
    den = Polynomial((var,), {(k,): c for k, c in enumerate(r.den.c) if c != 0})
    return RationalFunction(num, den)


def base_changed(p: FlagProblem, e: int) -> FlagProblem:
    inner = UniPoly([p.curve_at] + [0] * (e - 1) + [1])
    curve = []
    for r in p.curve_unirat():
        curve.append(_to_rational_function(UniRat(_compose_unipoly(r.num, inner), _compose_unipoly(r.den, inner)), "w"))
    return replace(p, curve=tuple(curve), curve_param="w", curve_at=Fraction(0))


def _exact_sheets(p: FlagProblem, order: int):
    """(problem, sheets, e): sheets over Q(tau), or over Q(w) with
    tau = tau0 + w^e when that resolves every branch."""
    sheets, unresolved = transverse_sheets(p, order)
    if not unresolved and all(s.flavor == "exact" for s in sheets):
        return p, sheets, 1
    if p.n == 2:
        for e in (2, 3):
            q = base_changed(p, e)
            sheets, unresolved = transverse_sheets(q, order)
            if not unresolved:
                return q, sheets, e
    raise NotExact("local branches are not defined over the exact coefficient field")


def _conj_unirat(r, zeta):
    if not isinstance(r, UniRat):
        return r
    return UniRat(UniPoly([c * zeta ** k for k, c in enumerate(r.num.c)]),
                  UniPoly([c * zeta ** k for k, c in enumerate(r.den.c)]))


def _group_conjugates(sheets, e):
    """Orbits of sheets under w -> -w (e = 2); None if they cannot be paired."""
    if e == 1:
        return [(k,) for k in range(len(sheets))]
    if e != 2:
        return None
    keys = []
    for sh in sheets:
        if sh.ramification != 1:
            return None
        keys.append(sh.coords)
    groups, used = [], set()
    for i, ci in enumerate(keys):
        if i in used:
            continue
        conj = tuple(c.map_coeffs(lambda r: _conj_unirat(r, -1)) for c in ci)
        partner = next((j for j in range(len(keys)) if j not in used and j != i and keys[j] == conj), None)
        if conj == ci or partner is None:
            groups.append((i,))
            used.add(i)
        else:
            groups.append((i, partner))
            used |= {i, partner}
    return groups


def residues_by_point(p: FlagProblem) -> SymbolicResult:
    """Exact residue of every branch orbit and their sum."""

    def run(order):
        q, sheets, e = _exact_sheets(p, order)
        at = q.curve_at if q.n == 2 else None
        vals = [_residue_on_sheet(q, sh, at, order) for sh in sheets]
        total = normalize(sum(vals, Fraction(0)) / e)
        groups = _group_conjugates(sheets, e)
        per = []
        if groups is not None:
            for g in groups:
                per.append((g, normalize(sum((vals[k] for k in g), Fraction(0)) / e)))
        return SymbolicResult(total, per, order, e)

    res, order = _with_order(run)
    res.order = order
    return res


def residue_at_parshin_point(point, order: int = START_ORDER):
    """Exact residue at one Parshin point, given by a sheet of an exact
    branch expansion (``point`` is (problem, sheet index))."""
    p, idx = point
    res = residues_by_point(p)
    for g, v in res.per_point:
        if idx in g:
            return v
    raise NotExact("point is not resolved by an exact branch")


def residue_at_flag(p: FlagProblem):
    return residues_by_point(p).total
