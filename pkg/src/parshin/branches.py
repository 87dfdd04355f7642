"""Local branches of plane-curve germs (Newton-Puiseux) and their monodromy
around a loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .algebra import LaurentSeries, Polynomial
from .algebra.scalars import GaussianRational
from .puiseux_fields import ComplexField, ExactField, FunctionField

__all__ = [
    "PuiseuxBranch",
    "Expansion",
    "NonIsolatedComponent",
    "expand_branches",
    "expand_germ",
    "germ_from_polynomial",
    "branch_residual",
    "weierstrass_degree",
    "MonodromyPermutation",
    "monodromy_along_loop",
]

MAX_DEPTH = 12


class NonIsolatedComponent(ValueError):
    """The germ vanishes identically on {s = 0}."""


@dataclass(frozen=True)
class PuiseuxBranch:
    """One branch ``s = s(v), t = t(v)`` of a germ at the origin.

    ``ramification`` is the order of ``s(v)``; ``s`` is always the exact
    monomial ``scale * v**ramification``.
    """

    ramification: int
    s: LaurentSeries
    t: LaurentSeries
    flavor: str
    germ: dict = field(repr=False, compare=False, default=None)
    param: str = "v"

    @property
    def coords(self) -> tuple[LaurentSeries, LaurentSeries]:
        return (self.s, self.t)

    @property
    def multiplicity(self) -> int:
        return self.ramification


@dataclass
class Expansion:
    branches: list
    unresolved: int = 0


def germ_from_polynomial(p: Polynomial) -> dict:
    if len(p.vars) != 2:
        raise ValueError(f"germ must be bivariate, got variables {p.vars}")
    return {(e[0], e[1]): c for e, c in p.terms.items()}


def weierstrass_degree(G: dict) -> int:
    """Order in t of G(0, t): the number of roots t(s) -> 0."""
    js = [j for (i, j), c in G.items() if i == 0 and c != 0]
    if not js:
        raise NonIsolatedComponent("germ vanishes identically on {s = 0}; divide out the factor s first")
    return min(js)


def germ_eval(G: dict, v, T):
    """G(v, T) for ring elements v, T."""
    vp: dict = {}
    tp: dict = {}

    def pw(cache, base, k):
        if k not in cache:
            cache[k] = base if k == 1 else pw(cache, base, k - 1) * base
        return cache[k]

    total = None
    for (i, j), c in sorted(G.items()):
        term = c
        if i:
            term = pw(vp, v, i) * term
        if j:
            term = pw(tp, T, j) * term
        total = term if total is None else total + term
    return total


class _State:
    """s = beta * v**Q ; t = sum(t_poly[e] v**e) + lam * v**E * T."""

    __slots__ = ("beta", "Q", "t_poly", "E", "lam")

    def __init__(self, beta, Q, t_poly, E, lam):
        self.beta, self.Q, self.t_poly, self.E, self.lam = beta, Q, t_poly, E, lam

    def refine(self, p, q, b_scale, g_root):
        t_poly = {q * e: c * b_scale ** e for e, c in self.t_poly.items()}
        lam_scale = b_scale ** self.E
        k = q * self.E + p
        t_poly[k] = t_poly.get(k, 0) + self.lam * lam_scale * g_root
        return _State(self.beta * b_scale ** self.Q, self.Q * q, t_poly, k, self.lam * lam_scale)

    def complexify(self):
        return _State(complex(self.beta), self.Q, {e: complex(c) for e, c in self.t_poly.items()},
                      self.E, complex(self.lam))


def _clean(G: dict, fld) -> dict:
    if fld.exact:
        return {k: c for k, c in G.items() if c != 0}
    scale = max((abs(c) for c in G.values()), default=0.0)
    return {k: c for k, c in G.items() if abs(c) > fld.zero_tol * scale}


def _substitute(G: dict, p: int, q: int, b_scale, g_root, shift: int, fld) -> dict:
    """G(b v^q, v^p (g + T)) / v^shift."""
    out: dict = {}
    for (i, j), c in G.items():
        base = c * b_scale ** i
        e = q * i + p * j - shift
        for l in range(j + 1):
            coef = base * comb(j, l) * g_root ** (j - l)
            key = (e, l)
            out[key] = out.get(key, 0) + coef
    return _clean(out, fld)


def _newton_edges(G: dict):
    """Edges of the Newton polygon relevant to roots T -> 0, as
    (p, q, [(i, j) on edge ordered by increasing j])."""
    pts = sorted(G)
    j0 = min(j for (i, j) in pts if i == 0)
    ic, jc = 0, j0
    edges = []
    while jc > 0:
        best = None
        for (i, j) in pts:
            if j >= jc:
                continue
            mu = Fraction(i - ic, jc - j)
            if best is None or mu < best[0] or (mu == best[0] and j < best[1][1]):
                best = (mu, (i, j))
        mu, (ie, je) = best
        on_edge = sorted(
            [(i, j) for (i, j) in pts if je <= j <= jc and (i - ic) * mu.denominator == (jc - j) * mu.numerator],
            key=lambda ij: ij[1],
        )
        edges.append((mu.numerator, mu.denominator, (ic, jc), (ie, je), on_edge))
        ic, jc = ie, je
    return edges


def _bezout(p: int, q: int) -> tuple[int, int]:
    """(a, b) with q*b + p*a == 1."""
    b = 0 if p == 1 else pow(q, -1, p)
    a = (1 - q * b) // p
    return a, b


def _ift(G: dict, fld, prec: int):
    """Solve G(v, T(v)) = 0 with T(0) = 0 when dG/dT(0,0) != 0, by Newton
    iteration doubling the number of correct terms each step."""
    dom = fld.domain
    if prec <= 1:
        return LaurentSeries.zero(max(prec, 1), dom)
    GT = {(i, j - 1): c * j for (i, j), c in G.items() if j >= 1}
    T = LaurentSeries.zero(1, dom)
    known = 1
    while known < prec:
        known = min(2 * known, prec)
        v = LaurentSeries.variable(known, dom)
        T = LaurentSeries(T.coeffs, T.valuation, known, dom) if not T.is_zero() else LaurentSeries.zero(known, dom)
        val = germ_eval(G, v, T)
        der = germ_eval(GT, v, T)
        if not isinstance(val, LaurentSeries):
            val = LaurentSeries.constant(val, known, dom)
        if not isinstance(der, LaurentSeries):
            der = LaurentSeries.constant(der, known, dom)
        T = (T - val / der).truncate(known)
    return T


def _finish(state: _State, T: LaurentSeries, order: int, fld, flavor: str, germ) -> PuiseuxBranch:
    dom = fld.domain
    if state.Q == 1 and state.beta != 1:
        # reparametrize v -> v / beta so that s = v
        inv = 1 / state.beta
        state = _State(state.beta / state.beta, 1, {e: c * inv ** e for e, c in state.t_poly.items()},
                       state.E, state.lam * inv ** state.E)
        T = LaurentSeries.from_dict({k: c * inv ** k for k, c in T.terms().items()}, T.order, dom)
    s = LaurentSeries.monomial(state.Q, state.beta, dom)
    tp = LaurentSeries.from_dict(state.t_poly, order, dom) if state.t_poly else LaurentSeries.zero(order, dom)
    tail = T.shift(state.E) * state.lam if not T.is_zero() else LaurentSeries.zero(order, dom)
    t = (tp + tail).truncate(order)
    if t.order < order:
        t = t.truncate(t.order)
    return PuiseuxBranch(state.Q, s, t, flavor, germ)


def _expand(G: dict, fld, state: _State, order: int, depth: int, germ, flavor: str) -> Expansion:
    if depth > MAX_DEPTH:
        raise RuntimeError("Newton-Puiseux recursion too deep; germ may not be reduced")
    res = Expansion([])
    G = _clean(G, fld)
    if not G:
        raise ValueError("germ is identically zero")
    # T divides G: the branch T == 0
    jmin = min(j for (_, j) in G)
    if jmin >= 1:
        if jmin > 1:
            raise ValueError("germ is not reduced (repeated branch)")
        res.branches.append(_finish(state, LaurentSeries.zero(order, fld.domain), order, fld, flavor, germ))
        G = {(i, j - 1): c for (i, j), c in G.items()}
    if not any(i == 0 for (i, _) in G):
        raise NonIsolatedComponent("germ vanishes identically on {s = 0}; divide out the factor s first")
    j0 = min(j for (i, j) in G if i == 0)
    if j0 == 0:
        return res
    if j0 == 1:
        prec = max(order - state.E, 1) + 1
        T = _ift(G, fld, prec)
        res.branches.append(_finish(state, T, order, fld, flavor, germ))
        return res
    for p, q, (ic, jc), (ie, je), pts in _newton_edges(G):
        L = (jc - je) // q
        phi = [0] * (L + 1)
        for (i, j) in pts:
            phi[(j - je) // q] = G[(i, j)]
        found, complete = fld.roots(phi)
        a, b = _bezout(p, q)
        shift = q * ic + p * jc
        for xi, mult in found:
            b_scale = xi ** (-a)
            g_root = xi ** b
            G1 = _substitute(G, p, q, b_scale, g_root, shift, fld)
            if not fld.exact:
                G1 = {k: c for k, c in G1.items() if not (k[0] <= 0 and k[1] < mult)}
            sub = _expand(G1, fld, state.refine(p, q, b_scale, g_root), order, depth + 1, germ, flavor)
            res.branches.extend(sub.branches)
            res.unresolved += sub.unresolved
        if complete:
            continue
        missing = L - sum(m for _, m in found)
        if isinstance(fld, FunctionField):
            res.unresolved += missing * q * state.Q
            continue
        # fall back to floating point for the roots not found exactly
        cf = ComplexField()
        croots = cf.roots([complex(c) for c in phi])[0]
        exact_c = [complex(x) for x, m in found for _ in range(m)]
        left = []
        for r, m in croots:
            for _ in range(m):
                hit = next((k for k, e in enumerate(exact_c) if abs(e - r) < 1e-6 * max(1, abs(r))), None)
                if hit is None:
                    left.append(r)
                else:
                    exact_c.pop(hit)
        Gc = {k: complex(c) for k, c in G.items()}
        from .puiseux_fields import cluster_roots
        for xi, mult in cluster_roots(left, cf.cluster_tol):
            b_scale = xi ** (-a)
            g_root = xi ** b
            G1 = _substitute(Gc, p, q, b_scale, g_root, shift, cf)
            G1 = {k: c for k, c in G1.items() if not (k[0] <= 0 and k[1] < mult)}
            sub = _expand(G1, cf, state.complexify().refine(p, q, b_scale, g_root), order, depth + 1,
                          germ, "float")
            res.branches.extend(sub.branches)
            res.unresolved += sub.unresolved
    return res


def _field_for(G: dict):
    vals = list(G.values())
    if any(isinstance(c, complex) or isinstance(c, float) for c in vals):
        return ComplexField()
    from .algebra.univariate import UniRat

    if any(isinstance(c, UniRat) for c in vals):
        gauss = any(any(isinstance(x, GaussianRational) for x in c.num.c + c.den.c)
                    for c in vals if isinstance(c, UniRat))
        return FunctionField(gauss)
    return ExactField(any(isinstance(c, GaussianRational) for c in vals))


def expand_germ(G: dict, order: int = 8, fld=None) -> Expansion:
    """All branches through the origin of a germ given as {(i, j): coeff}."""
    if order < 2:
        raise ValueError("order must be >= 2")
    G = {k: c for k, c in G.items() if c != 0}
    if G.get((0, 0), 0) != 0:
        raise ValueError("germ does not vanish at the origin")
    weierstrass_degree(G)
    fld = fld or _field_for(G)
    one = 1.0 + 0j if not fld.exact else (Fraction(1) if fld.domain != "function" else _unirat_one())
    state = _State(one, 1, {}, 0, one)
    flavor = "exact" if fld.exact else "float"
    return _expand(G, fld, state, order, 0, G, flavor)


def _unirat_one():
    from .algebra.univariate import UniRat

    return UniRat(1)


def expand_branches(germ: Polynomial, order: int = 8) -> list[PuiseuxBranch]:
    """Branches t(s) at s = 0 of a germ in two variables (s, t).

    Branches whose data is rational come back exact (including ramified ones,
    normalised so the coefficients stay rational); the rest are computed in
    complex floating point.
    """
    G = germ_from_polynomial(germ)
    exp = expand_germ(G, order)
    deg = weierstrass_degree(G)
    total = sum(b.multiplicity for b in exp.branches) + exp.unresolved
    if total != deg:
        raise RuntimeError(f"branch count {total} does not match Weierstrass degree {deg}")
    return exp.branches


def branch_residual(branch: PuiseuxBranch, G: dict | None = None):
    """G(s(v), t(v)) as a series; zero to truncation for a correct branch."""
    G = G if G is not None else branch.germ
    if branch.flavor == "float" and branch.s.domain != "complex":
        raise ValueError("float branch must carry complex series")
    if branch.s.domain == "complex":
        G = {k: complex(c) for k, c in G.items()}
    return germ_eval(G, branch.s, branch.t)


@dataclass(frozen=True)
class MonodromyPermutation:
    """Permutation of transverse branch points after one loop in u1."""

    count: int
    perm: tuple
    orbits: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(self.count)):
            raise ValueError("not a permutation")
        flat = sorted(k for o in self.orbits for k in o)
        if flat != list(range(self.count)):
            raise ValueError("orbits do not partition the branch indices")

    def compose(self, other: MonodromyPermutation) -> MonodromyPermutation:
        """self after other."""
        perm = tuple(self.perm[k] for k in other.perm)
        return MonodromyPermutation.from_perm(perm)

    @classmethod
    def from_perm(cls, perm) -> MonodromyPermutation:
        from .numeric.torus import _orbits

        perm = tuple(int(k) for k in perm)
        return cls(len(perm), perm, tuple(_orbits([perm], len(perm))))

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.count))

    def cycle_notation(self) -> str:
        from .numeric.torus import cycles

        cs = [c for c in cycles(self.perm) if len(c) > 1]
        if not cs:
            return "identity"
        return "".join("(" + " ".join(str(k + 1) for k in c) + ")" for c in cs)


def monodromy_along_loop(problem, delta1: float, delta2: float | None = None, samples: int = 64, laps: int = 1):
    """Continue the transverse branch points of an n = 2 flag around
    u1 = delta1 * exp(i theta), theta from 0 to 2 pi * laps.

    The transverse circle |u2| = delta2 fixes the base points; when delta2
    is not given it is halved from delta1 until the points can be located
    and tracked.
    """
    from .numeric.system import ContinuationError, NumericSystem
    from .numeric.torus import InadmissibleRadii, local_points, loop_permutation

    if samples < 16:
        raise ValueError("samples must be at least 16")
    if problem.n != 2:
        raise ValueError("monodromy along a loop needs an n = 2 flag")
    system = NumericSystem.of(problem)
    tries = [delta2] if delta2 is not None else [delta1 * 0.5**k for k in range(21)]
    last = None
    for d2 in tries:
        radii = (delta1, d2)
        try:
            loc = local_points(problem, radii)
            perm = loop_permutation(system, loc.X, radii, 0, samples, laps)
        except (InadmissibleRadii, ContinuationError) as exc:
            last = exc
            continue
        return MonodromyPermutation.from_perm(perm)
    raise ContinuationError(f"monodromy loop failed: {last}")
