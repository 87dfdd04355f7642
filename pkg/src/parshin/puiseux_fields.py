"""Coefficient fields for the Newton-Puiseux engine.

Each field knows how to find the roots of an edge polynomial that lie in
the field itself. Exact fields may fail to find every root; the caller then
falls back to floating point (or records the roots as unresolved).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .algebra.scalars import GaussianRational
from .algebra.univariate import UniPoly, UniRat


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, r):
    """Divide by (x - r); coeffs low->high. Returns quotient, remainder."""
    n = len(coeffs) - 1
    q = [0] * n
    acc = 0
    for k in range(n, 0, -1):
        acc = acc * r + coeffs[k]
        q[k - 1] = acc
    rem = acc * r + coeffs[0]
    return q, rem


def rational_roots(coeffs) -> list[tuple[Fraction, int]]:
    """Rational roots with multiplicity of a polynomial with rational coeffs."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    out = []
    zero_mult = 0
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        zero_mult += 1
    if zero_mult:
        out.append((Fraction(0), zero_mult))
    if len(coeffs) <= 1:
        return out
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    cands = set()
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    for r in sorted(cands):
        mult = 0
        while len(coeffs) > 1:
            q, rem = _deflate(coeffs, r)
            if rem != 0:
                break
            coeffs = q
            mult += 1
        if mult:
            out.append((r, mult))
    return out


class ExactField:
    """Q, or Q(i) when ``gaussian``."""

    def __init__(self, gaussian: bool = False):
        self.gaussian = gaussian
        self.domain = "gaussian" if gaussian else "exact"
        self.exact = True

    def is_zero(self, c) -> bool:
        return c == 0

    def roots(self, coeffs):
        deg = len(coeffs) - 1
        if deg == 1:
            return [(-coeffs[0] / coeffs[1], 1)], True
        if all(not isinstance(c, GaussianRational) for c in coeffs):
            found = rational_roots(coeffs)
            return found, sum(m for _, m in found) == deg
        return [], False

    def to_complex(self, c) -> complex:
        return complex(c)


def fraction_sqrt(q):
    """Exact square root of a rational square, else None."""
    if isinstance(q, GaussianRational):
        if q.im != 0:
            return None
        q = q.re
    q = Fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None


def unipoly_sqrt(p: UniPoly):
    """Exact square root of a polynomial over Q, else None."""
    if p.is_zero():
        return UniPoly()
    d = p.degree
    if d % 2:
        return None
    n = d // 2
    top = fraction_sqrt(p.c[-1])
    if top is None or top == 0:
        return None
    r = [Fraction(0)] * (n + 1)
    r[n] = top
    for k in range(n - 1, -1, -1):
        acc = p.c[n + k]
        for i in range(k + 1, n + 1):
            j = n + k - i
            if k < j <= n:
                acc -= r[i] * r[j]
        r[k] = acc / (2 * top)
    root = UniPoly(r)
    return root if root * root == p else None


def unirat_sqrt(x: UniRat):
    a = unipoly_sqrt(x.num)
    b = unipoly_sqrt(x.den)
    return None if a is None or b is None else UniRat(a, b)


class FunctionField:
    """K(t): linear and quadratic edge polynomials (the latter when the
    discriminant is a square in K(t)), and constant-coefficient ones."""

    domain = "function"
    exact = True

    def __init__(self, gaussian: bool = False):
        self.base = ExactField(gaussian)

    def is_zero(self, c) -> bool:
        return c == 0

    def roots(self, coeffs):
        deg = len(coeffs) - 1
        coeffs = [c if isinstance(c, UniRat) else UniRat(c) for c in coeffs]
        if deg == 1:
            return [(-coeffs[0] / coeffs[1], 1)], True
        if all(c.is_constant() for c in coeffs):
            found, complete = self.base.roots([c.constant_value() for c in coeffs])
            return [(UniRat(r), m) for r, m in found], complete
        if deg == 2:
            a0, a1, a2 = coeffs
            disc = a1 * a1 - a0 * a2 * 4
            if disc == 0:
                return [(-a1 / (a2 * 2), 2)], True
            root = unirat_sqrt(disc)
            if root is not None:
                return [((-a1 + root) / (a2 * 2), 1), ((-a1 - root) / (a2 * 2), 1)], True
        return [], False


class ComplexField:
    domain = "complex"
    exact = False

    def __init__(self, cluster_tol: float = 1e-5, zero_tol: float = 1e-12):
        self.cluster_tol = cluster_tol
        self.zero_tol = zero_tol

    def is_zero(self, c) -> bool:
        return c == 0

    def roots(self, coeffs):
        c = np.array([complex(x) for x in coeffs][::-1])
        raw = np.roots(c) if len(c) > 1 else np.array([])
        return cluster_roots(raw, self.cluster_tol), True


def cluster_roots(raw, tol: float) -> list[tuple[complex, int]]:
    remaining = [complex(r) for r in raw]
    out = []
    while remaining:
        r0 = remaining.pop(0)
        group = [r0]
        keep = []
        for r in remaining:
            if abs(r - r0) <= tol * max(1.0, abs(r0)):
                group.append(r)
            else:
                keep.append(r)
        remaining = keep
        out.append((complex(np.mean(group)), len(group)))
    return out
