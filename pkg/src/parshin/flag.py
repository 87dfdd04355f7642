"""Flags V_n > ... > V_0 on affine hypersurfaces, local parameters, their
validation, and Parshin points as monodromy orbits of local branches."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .algebra import LaurentSeries, Polynomial, RationalFunction, UniPoly, UniRat
from .algebra.scalars import GaussianRational, is_exact_scalar, normalize
from .branches import NonIsolatedComponent, expand_germ
from .forms import DifferentialForm
from .puiseux_fields import ComplexField, ExactField, FunctionField

__all__ = [
    "FlagProblem",
    "ParshinPoint",
    "Sheet",
    "ValidationReport",
    "Violation",
    "FlagError",
    "validate_parameters",
    "enumerate_parshin_points",
    "transverse_sheets",
    "shifted_germ",
]

VALUATION_ORDER = 8


class FlagError(ValueError):
    """Malformed flag data (points off the flag, bad parametrization, ...)."""


@dataclass(frozen=True)
class FlagProblem:
    """A flag V_n > ... > V_0 with local parameters and a rational n-form.

    ``variety`` is the hypersurface V_n (None when V_n is the whole affine
    space). For n = 2 the curve V_1 is given by a rational parametrization
    ``curve`` in the single variable ``curve_param``; ``curve_at`` is the
    parameter value over V_0.
    """

    n: int
    variables: tuple
    variety: Polynomial | None
    point: tuple
    params: tuple
    form: DifferentialForm
    curve: tuple | None = None
    curve_param: str = "tau"
    curve_at: object = None
    name: str = ""

    def __post_init__(self):
        if self.n not in (1, 2):
            raise FlagError("only n = 1 and n = 2 are supported")
        d = len(self.variables)
        if d != self.n + (self.variety is not None):
            raise FlagError(f"ambient dimension {d} does not fit n = {self.n}")
        if len(self.point) != d:
            raise FlagError("point has the wrong number of coordinates")
        if len(self.params) != self.n:
            raise FlagError(f"need {self.n} local parameters")
        if self.form.degree != self.n:
            raise FlagError(f"form must have degree {self.n}")
        if self.n == 2 and self.curve is None:
            raise FlagError("n = 2 needs a rational parametrization of V_1")
        if self.n == 1 and self.curve is not None:
            raise FlagError("n = 1 flags take no curve parametrization")
        if self.curve is not None and len(self.curve) != d:
            raise FlagError("curve parametrization has the wrong number of coordinates")
        object.__setattr__(self, "point", tuple(normalize(c) for c in self.point))
        if self.n == 2 and self.curve_at is None:
            object.__setattr__(self, "curve_at", self._find_curve_at())

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def is_exact(self) -> bool:
        return True

    def curve_unirat(self) -> tuple:
        return tuple(UniRat.from_rational_function(c) for c in self.curve)

    def _find_curve_at(self):
        from .puiseux_fields import rational_roots

        cands = None
        for c, p in zip(self.curve_unirat(), self.point):
            poly = c.num - c.den * UniPoly([p])
            if poly.is_zero():
                continue
            if any(isinstance(x, GaussianRational) for x in poly.c):
                continue
            roots = {r for r, _ in rational_roots(poly.c)}
            cands = roots if cands is None else cands & roots
        if cands is None:
            raise FlagError("curve parametrization is constant")
        good = [r for r in sorted(cands) if all(c.den(r) != 0 and c(r) == p for c, p in zip(self.curve_unirat(), self.point))]
        if not good:
            raise FlagError("V_0 is not c(tau) for a rational tau; give 'at' explicitly")
        return good[0]

    def check_incidence(self) -> list[str]:
        """Exact substitution checks that the flag is a flag."""
        errs = []
        if self.variety is not None and self.variety.evaluate(self.point) != 0:
            errs.append("V_0 does not lie on V_n")
        for k, u in enumerate(self.params, 1):
            if u.den.evaluate(self.point) == 0:
                errs.append(f"u{k} has a pole at V_0")
            elif u.num.evaluate(self.point) != 0:
                errs.append(f"u{k} does not vanish at V_0")
        if self.curve is not None:
            cu = self.curve_unirat()
            if any(c.den(self.curve_at) == 0 for c in cu):
                errs.append("curve parametrization has a pole at 'at'")
            elif tuple(c(self.curve_at) for c in cu) != self.point:
                errs.append("curve does not pass through V_0 at 'at'")
            if self.variety is not None and self.variety.evaluate(list(cu)) != 0:
                errs.append("curve V_1 does not lie on V_n")
        return errs


@dataclass(frozen=True)
class Sheet:
    """A transverse branch of V_n along V_1 (n = 2) or a branch of V_1 at
    V_0 (n = 1), as ambient coordinate series in the branch parameter v.

    For n = 2 exact sheets have coefficients in Q(tau) (domain 'function');
    float sheets are computed at a fixed tau and have complex coefficients.
    """

    coords: tuple
    ramification: int
    flavor: str
    tau: object = None


@dataclass
class Violation:
    level: int
    branch: int | None
    message: str

    def __str__(self):
        where = f" on branch {self.branch}" if self.branch is not None else ""
        who = f"u{self.level}" if self.level else "parameters"
        return f"{who}{where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    coverings: dict = field(default_factory=dict)
    valuations: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class ParshinPoint:
    """A monodromy orbit of local points, i.e. a point a of W_0.

    ``members`` index the local points found at theta = 0 (one per transverse
    branch over each nearby base point); ``covering`` holds (m_1, ..., m_n).
    """

    problem: FlagProblem = field(repr=False)
    orbit_id: int
    members: tuple
    covering: tuple
    start: object = field(repr=False, compare=False, default=None)
    radii: tuple = ()

    @property
    def label(self) -> str:
        return f"a{self.orbit_id + 1}"


# ---------------------------------------------------------------------------
# germs and sheets


def _bivariate_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return out


def shifted_germ(P: Polynomial, base, i_s: int, i_t: int | None) -> dict:
    """{(i, j): coeff} of P(base + s*e_{i_s} + t*e_{i_t}); coefficients
    live in whatever ring ``base`` does."""
    out: dict = {}
    cache: dict = {}
    for e, c in P.sorted_terms():
        acc = {(0, 0): c}
        for k, ek in enumerate(e):
            if ek == 0:
                continue
            key = (k, ek)
            if key not in cache:
                b = base[k]
                if k == i_s or k == i_t:
                    slot = (1, 0) if k == i_s else (0, 1)
                    cache[key] = {(slot[0] * a, slot[1] * a): comb(ek, a) * b ** (ek - a) for a in range(ek + 1)}
                else:
                    cache[key] = {(0, 0): b ** ek}
            acc = _bivariate_mul(acc, cache[key])
        for k, v in acc.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v != 0}


def _germ_zero_on_s_axis(G: dict) -> bool:
    return not any(i == 0 and c != 0 for (i, j), c in G.items())


def transverse_frame(p: FlagProblem) -> tuple:
    """(i_s, i_t) coordinate indices spanning the slice. For n = 2 they are
    complementary to the tangent direction of V_1 at V_0; i_t is None when
    V_n is the whole affine space."""
    d = p.dim
    if p.n == 1:
        if p.variety is None:
            return (0, None)
        G = shifted_germ(p.variety, p.point, 0, 1)
        return (1, 0) if _germ_zero_on_s_axis(G) else (0, 1)
    cu = p.curve_unirat()
    # leading direction of c(tau) - c(tau0)
    lead = None
    for k in range(1, 12):
        vec = []
        for c in cu:
            shifted = _taylor(c, p.curve_at, k + 1)
            vec.append(shifted[k] if len(shifted) > k else 0)
        if any(x != 0 for x in vec):
            lead = vec
            break
    if lead is None:
        raise FlagError("cannot find the tangent direction of V_1 at V_0")
    along = max(range(d), key=lambda j: abs(complex(lead[j])))
    rest = [j for j in range(d) if j != along]
    if p.variety is None:
        return (rest[0], None)
    G = shifted_germ(p.variety, cu, rest[0], rest[1])
    if _germ_zero_on_s_axis(G):
        rest.reverse()
    return tuple(rest)


def _taylor(r: UniRat, x0, n: int) -> list:
    """First n Taylor coefficients of r at x0."""
    num = r.num.taylor_shift(x0)
    den = r.den.taylor_shift(x0)
    if den.c[0] == 0:
        raise FlagError("curve parametrization has a pole at V_0")
    s = LaurentSeries(num.c, 0, n) / LaurentSeries(den.c, 0, n)
    return [s.coeff(k) for k in range(n)]


def _sheet_from_branch(base, i_s, i_t, br, domain, order) -> tuple:
    coords = []
    for k, b in enumerate(base):
        x = LaurentSeries.constant(b, order, domain)
        if k == i_s:
            x = x + br.s
        if k == i_t:
            x = x + br.t
        coords.append(x.truncate(order))
    return tuple(coords)


def transverse_sheets(p: FlagProblem, order: int = VALUATION_ORDER, tau=None, force_float=False):
    """Branches of the slice germ through V_1 (n = 2) or of V_1 at V_0 (n = 1).

    Returns (sheets, unresolved). For n = 2 with ``tau`` None the expansion
    is done over Q(tau); branches whose data is not rational over Q(tau) are
    counted as unresolved. With a numeric ``tau`` (or ``force_float``) every
    sheet is complex.
    """
    i_s, i_t = transverse_frame(p)
    if p.n == 1:
        base = list(p.point)
        if p.variety is None:
            dom = "gaussian" if any(isinstance(c, GaussianRational) for c in base) else "exact"
            v = LaurentSeries.variable(order, dom)
            coords = (LaurentSeries.constant(base[0], order, dom) + v,)
            if force_float:
                coords = tuple(c.to_complex() for c in coords)
            return [Sheet(coords, 1, "float" if force_float else "exact")], 0
        G = shifted_germ(p.variety, base, i_s, i_t)
        fld = ComplexField() if force_float else None
        if force_float:
            G = {k: complex(c) for k, c in G.items()}
            base = [complex(b) for b in base]
        exp = expand_germ(G, order, fld)
        sheets = []
        for br in exp.branches:
            dom = br.s.domain
            bb = [complex(b) for b in base] if dom == "complex" else base
            sheets.append(Sheet(_sheet_from_branch(bb, i_s, i_t, br, dom, order), br.ramification, br.flavor))
        return sheets, exp.unresolved
    # n = 2
    if tau is None and not force_float:
        base = list(p.curve_unirat())
        dom = "function"
    else:
        t0 = tau if tau is not None else generic_tau(p)
        base = [complex(c(t0)) if not isinstance(t0, complex) else _eval_unirat_complex(c, t0)
                for c in p.curve_unirat()]
        dom = "complex"
    if p.variety is None:
        v = LaurentSeries.variable(order, dom)
        coords = []
        for k, b in enumerate(base):
            x = LaurentSeries.constant(b, order, dom)
            coords.append(x + v if k == i_s else x)
        return [Sheet(tuple(coords), 1, "exact" if dom == "function" else "float", tau)], 0
    G = shifted_germ(p.variety, base, i_s, i_t)
    if dom == "function":
        G = {k: (c if isinstance(c, UniRat) else UniRat(c)) for k, c in G.items()}
        gauss = _has_gaussian(p)
        exp = expand_germ(G, order, FunctionField(gauss))
    else:
        exp = expand_germ(G, order, ComplexField())
    sheets = [Sheet(_sheet_from_branch(base, i_s, i_t, br, dom, order), br.ramification,
                    "exact" if dom == "function" else "float", tau) for br in exp.branches]
    return sheets, exp.unresolved


def _eval_unirat_complex(r: UniRat, z: complex) -> complex:
    num = sum(complex(c) * z ** k for k, c in enumerate(r.num.c))
    den = sum(complex(c) * z ** k for k, c in enumerate(r.den.c))
    return num / den


def _has_gaussian(p: FlagProblem) -> bool:
    polys = [p.variety] if p.variety is not None else []
    for c in p.curve or ():
        polys += [c.num, c.den]
    return any(p_.is_gaussian() for p_ in polys)


def generic_tau(p: FlagProblem) -> complex:
    """A fixed pseudo-random base point near V_0 on V_1, for float checks."""
    rng = random.Random(12345)
    t0 = complex(p.curve_at)
    return t0 + complex(rng.uniform(0.2, 0.4), rng.uniform(0.1, 0.3))


# ---------------------------------------------------------------------------
# validation


def series_valuation(s: LaurentSeries, rel_tol: float = 1e-9):
    """Valuation, treating relatively tiny float coefficients as zero; None
    when the series vanishes to its precision."""
    if s.domain != "complex":
        return None if s.is_zero() else s.valuation
    if s.is_zero():
        return None
    # compare against nearby coefficients only: series with a small radius
    # of convergence have rapidly growing tails
    mags = [abs(c) for c in s.coeffs]
    for i, c in enumerate(mags):
        if c > rel_tol * max(mags[: i + 3]):
            return s.valuation + i
    return None


def pull_rational(r: RationalFunction, coords: tuple) -> LaurentSeries:
    num = r.num.evaluate(list(coords))
    den = r.den.evaluate(list(coords))
    dom = coords[0].domain
    if not isinstance(num, LaurentSeries):
        num = LaurentSeries.constant(num, coords[0].order, dom)
    if not isinstance(den, LaurentSeries):
        den = LaurentSeries.constant(den, coords[0].order, dom)
    return num / den


def _curve_valuation(p: FlagProblem, u: RationalFunction):
    """Order of u(c(tau)) at tau = curve_at; None if identically zero."""
    cu = p.curve_unirat()
    val = u.num.evaluate(list(cu))
    den = u.den.evaluate(list(cu))
    val = val if isinstance(val, UniRat) else UniRat(val)
    den = den if isinstance(den, UniRat) else UniRat(den)
    r = val / den
    if r == 0:
        return None
    return r.valuation_at(p.curve_at)


def validate_parameters(p: FlagProblem, order: int = VALUATION_ORDER) -> ValidationReport:
    rep = ValidationReport()
    for msg in p.check_incidence():
        rep.violations.append(Violation(0, None, msg))
    if rep.violations:
        return rep
    if p.n == 1:
        sheets, unresolved = transverse_sheets(p, order)
        for k, sh in enumerate(sheets):
            val = series_valuation(pull_rational(p.params[0], sh.coords))
            rep.valuations[(1, k)] = val
            if val is None:
                rep.violations.append(Violation(1, k, "vanishes identically on the branch"))
            elif val < 1:
                rep.violations.append(Violation(1, k, f"valuation {val} < 1 on the branch"))
            else:
                rep.coverings[k] = val
        _check_jacobian(p, rep)
        return rep
    # n = 2: u1 along V_1 at V_0
    v1 = _curve_valuation(p, p.params[0])
    rep.valuations[(1, None)] = v1
    if v1 is None:
        rep.violations.append(Violation(1, None, "vanishes identically along V_1"))
    elif v1 < 1:
        rep.violations.append(Violation(1, None, f"valuation {v1} along V_1"))
    else:
        rep.coverings["curve"] = v1
    # u2 on every transverse sheet at a generic point of V_1
    sheets, unresolved = _sheets_with_fallback(p, order, rep)
    for k, sh in enumerate(sheets):
        val = series_valuation(pull_rational(p.params[1], sh.coords))
        rep.valuations[(2, k)] = val
        if val != 1:
            what = "vanishes identically" if val is None else f"has valuation {val}"
            rep.violations.append(Violation(2, k, f"{what} on the transverse branch (needs 1)"))
    _check_jacobian(p, rep)
    return rep


def _sheets_with_fallback(p, order, rep):
    try:
        sheets, unresolved = transverse_sheets(p, order)
    except NonIsolatedComponent as exc:
        raise FlagError(str(exc)) from exc
    if unresolved:
        rep.notes.append("transverse branches not rational over Q(tau); checked in floating point at a generic tau")
        sheets, unresolved = transverse_sheets(p, order, force_float=True)
    return sheets, unresolved


def _check_jacobian(p: FlagProblem, rep: ValidationReport):
    from .numeric.system import random_point_on_variety, jacobian_at

    x = random_point_on_variety(p)
    J = jacobian_at(p, x)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] <= 1e-10 * max(sv[0], 1.0):
        rep.violations.append(Violation(0, None, "du_1, ..., du_n dependent at a generic point of V_n"))


# ---------------------------------------------------------------------------
# Parshin points


def enumerate_parshin_points(p: FlagProblem, radii=None, **kw) -> list[ParshinPoint]:
    """Orbits of the local points under monodromy of the parameter loops."""
    from .numeric.radii import choose_radii
    from .numeric.torus import local_monodromy

    if radii is None:
        radii = choose_radii(p)
    mono = local_monodromy(p, radii, **kw)
    points = []
    for k, orbit in enumerate(mono.orbits):
        points.append(ParshinPoint(p, k, tuple(orbit), mono.covering(orbit), mono.start[list(orbit)], tuple(radii)))
    return points
