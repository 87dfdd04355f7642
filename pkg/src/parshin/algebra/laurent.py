"""Truncated univariate Laurent series with explicit truncation order.

A series ``s`` knows its coefficients exactly for exponents below
``s.order``; everything from ``order`` on is unknown (``O(x^order)``).
Coefficient domains form a closed tag set; mixing domains raises.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .scalars import GaussianRational, is_exact_scalar
from .univariate import UniRat

__all__ = [
    "LaurentSeries",
    "InsufficientPrecision",
    "DomainMismatch",
    "DOMAINS",
    "laurent_arith",
    "laurent_coeff",
    "compose_series",
]

DOMAINS = ("exact", "gaussian", "complex", "function", "nested")

# order of exactly known finite objects (scalars, monomials)
EXACT = 10**9


class InsufficientPrecision(ArithmeticError):
    """A coefficient outside the resolved window was requested."""


class DomainMismatch(TypeError):
    pass


def _zero(domain: str):
    if domain == "complex":
        return 0j
    if domain == "function":
        return UniRat(0)
    return Fraction(0)


def _scalar_ok(domain: str, c) -> bool:
    if domain == "exact":
        return isinstance(c, (int, Fraction))
    if domain == "gaussian":
        return is_exact_scalar(c)
    if domain == "complex":
        return isinstance(c, (int, float, complex, Fraction, GaussianRational))
    if domain == "function":
        return isinstance(c, UniRat) or is_exact_scalar(c)
    return isinstance(c, LaurentSeries) or is_exact_scalar(c)


class LaurentSeries:
    __slots__ = ("coeffs", "valuation", "order", "domain")

    def __init__(self, coeffs: Sequence, valuation: int, order: int, domain: str = "exact"):
        if domain not in DOMAINS:
            raise ValueError(f"unknown coefficient domain {domain!r}")
        coeffs = list(coeffs)[: max(order - valuation, 0)]
        lead = 0
        while lead < len(coeffs) and coeffs[lead] == 0:
            lead += 1
        coeffs = coeffs[lead:]
        valuation += lead
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            valuation = order
        if domain == "complex":
            coeffs = [complex(c) for c in coeffs]
        self.coeffs = tuple(coeffs)
        self.valuation = valuation
        self.order = order
        self.domain = domain

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, order: int, domain: str = "exact") -> LaurentSeries:
        return cls((), order, order, domain)

    @classmethod
    def constant(cls, c, order: int, domain: str = "exact") -> LaurentSeries:
        return cls((c,), 0, order, domain)

    @classmethod
    def variable(cls, order: int, domain: str = "exact") -> LaurentSeries:
        one = 1.0 + 0j if domain == "complex" else (UniRat(1) if domain == "function" else Fraction(1))
        return cls((one,), 1, order, domain)

    @classmethod
    def monomial(cls, k: int, c=1, domain: str = "exact") -> LaurentSeries:
        """The exact term ``c*x^k``; multiplying by it preserves relative precision."""
        return cls((c,), k, EXACT, domain)

    def is_exact_monomial(self) -> bool:
        return self.order >= EXACT and len(self.coeffs) <= 1

    @classmethod
    def from_dict(cls, terms: dict, order: int, domain: str = "exact") -> LaurentSeries:
        if not terms:
            return cls.zero(order, domain)
        lo = min(terms)
        hi = max(terms)
        z = _zero(domain)
        return cls([terms.get(k, z) for k in range(lo, hi + 1)], lo, order, domain)

    # queries ---------------------------------------------------------------
    def is_zero(self) -> bool:
        """True when the series vanishes to its truncation order."""
        return not self.coeffs

    def __getitem__(self, k: int):
        return self.coeff(k)

    def coeff(self, k: int):
        if k >= self.order:
            raise InsufficientPrecision(
                f"coefficient of x^{k} requested but series is only known below x^{self.order}"
            )
        i = k - self.valuation
        if i < 0 or i >= len(self.coeffs):
            return _zero(self.domain)
        return self.coeffs[i]

    def terms(self) -> dict:
        return {self.valuation + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def lead(self):
        if not self.coeffs:
            raise InsufficientPrecision("series is zero to its truncation order")
        return self.coeffs[0]

    # arithmetic --------------------------------------------------------------
    def _same(self, other: LaurentSeries):
        if other.domain != self.domain:
            raise DomainMismatch(f"cannot combine {self.domain} and {other.domain} series")

    def _lift(self, other):
        if isinstance(other, LaurentSeries) and self.domain != "nested":
            self._same(other)
            return other
        if isinstance(other, LaurentSeries) and other.domain == "nested":
            return other
        if _scalar_ok(self.domain, other):
            # scalars are exact constants: infinite precision
            if self.domain == "complex":
                other = complex(other)
            return LaurentSeries((other,), 0, EXACT, self.domain)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        lo = min(self.valuation, o.valuation)
        z = _zero(self.domain)
        if order >= EXACT:
            order = EXACT
            hi = max(s.valuation + len(s.coeffs) for s in (self, o) if s.coeffs) if (self.coeffs or o.coeffs) else lo
            n = max(hi - lo, 0)
        else:
            n = max(order - lo, 0)
        out = [z] * n
        for src in (self, o):
            for i, c in enumerate(src.coeffs):
                k = src.valuation + i - lo
                if k < n:
                    out[k] = out[k] + c
        return LaurentSeries(out, lo, order, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries([-c for c in self.coeffs], self.valuation, self.order, self.domain)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.is_exact_monomial() and not o.is_exact_monomial():
            return o._times_monomial(self)
        if o.is_exact_monomial():
            return self._times_monomial(o)
        order = min(self.valuation + o.order, o.valuation + self.order)
        val = self.valuation + o.valuation
        if order >= EXACT // 2:
            order = EXACT
            n = max(len(self.coeffs) + len(o.coeffs) - 1, 0)
        else:
            n = max(order - val, 0)
        z = _zero(self.domain)
        out = [z] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs[: n - i]):
                out[i + j] = out[i + j] + a * b
        return LaurentSeries(out, val, order, self.domain)

    __rmul__ = __mul__

    def _times_monomial(self, m: LaurentSeries) -> LaurentSeries:
        if not m.coeffs:
            return LaurentSeries.zero(self.order, self.domain)
        c = m.coeffs[0]
        k = m.valuation
        order = self.order + k if self.order < EXACT else EXACT
        return LaurentSeries([x * c for x in self.coeffs], self.valuation + k, order, self.domain)

    def inverse(self) -> LaurentSeries:
        if self.is_zero():
            raise ZeroDivisionError("series is zero to its truncation order")
        if self.is_exact_monomial():
            c = self.coeffs[0]
            inv = Fraction(1) / c if isinstance(c, (int, Fraction)) else 1 / c
            return LaurentSeries((inv,), -self.valuation, EXACT, self.domain)
        if self.order >= EXACT:
            raise InsufficientPrecision("inverting an exact polynomial needs a truncation order")
        prec = self.order - self.valuation
        u = self.coeffs
        inv0 = 1 / u[0] if not isinstance(u[0], (Fraction, int)) else Fraction(1) / u[0]
        out = [inv0]
        for k in range(1, prec):
            acc = _zero(self.domain)
            for j in range(1, min(k, len(u) - 1) + 1):
                acc = acc + u[j] * out[k - j]
            out.append(-(acc * inv0))
        return LaurentSeries(out, -self.valuation, -self.valuation + prec, self.domain)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            if self.domain != "nested":
                self._same(other)
            return self * other.inverse()
        if _scalar_ok(self.domain, other):
            if other == 0:
                raise ZeroDivisionError("division by zero scalar")
            inv = 1 / other if not isinstance(other, (int, Fraction)) else Fraction(1) / other
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return LaurentSeries.constant(self._one(), self.order - self.valuation, self.domain)
        out, base = None, self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def _one(self):
        if self.domain == "complex":
            return 1 + 0j
        if self.domain == "function":
            return UniRat(1)
        return Fraction(1)

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            return (self.domain == other.domain and self.order == other.order
                    and self.valuation == other.valuation and self.coeffs == other.coeffs)
        if is_exact_scalar(other) and other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.valuation, self.order, self.domain))

    # transforms ----------------------------------------------------------------
    def truncate(self, order: int) -> LaurentSeries:
        return LaurentSeries(self.coeffs, self.valuation, min(order, self.order), self.domain)

    def derivative(self) -> LaurentSeries:
        out = [c * (self.valuation + i) for i, c in enumerate(self.coeffs)]
        return LaurentSeries(out, self.valuation - 1, self.order - 1, self.domain)

    def map_coeffs(self, f: Callable, domain: str | None = None) -> LaurentSeries:
        return LaurentSeries([f(c) for c in self.coeffs], self.valuation, self.order, domain or self.domain)

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by x^k."""
        return LaurentSeries(self.coeffs, self.valuation + k, self.order + k, self.domain)

    def to_complex(self) -> LaurentSeries:
        if self.domain not in ("exact", "gaussian", "complex"):
            raise DomainMismatch(f"no float conversion for {self.domain} series")
        return self.map_coeffs(complex, "complex")

    def __call__(self, x):
        """Evaluate the known part at a point (numeric helper)."""
        acc = 0
        for i, c in enumerate(self.coeffs):
            acc = acc + c * x ** (self.valuation + i)
        return acc

    def __repr__(self):
        parts = []
        for k, c in self.terms().items():
            parts.append(f"({c})*x^{k}")
        body = " + ".join(parts) if parts else "0"
        return f"LaurentSeries[{self.domain}]({body} + O(x^{self.order}))"


def laurent_arith(a: LaurentSeries, b: LaurentSeries, op: str) -> LaurentSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def laurent_coeff(s: LaurentSeries, k: int):
    return s.coeff(k)


def compose_series(outer: LaurentSeries, inner: LaurentSeries) -> LaurentSeries:
    """``outer(inner(s))`` for ``inner`` of valuation >= 1."""
    if inner.is_zero() or inner.valuation < 1:
        raise ValueError("inner series must have valuation >= 1")
    v = inner.valuation
    # unknown tail of outer contributes O(inner^outer.order)
    tail_order = v * outer.order
    acc = LaurentSeries.zero(min(tail_order, EXACT), inner.domain)
    if not outer.coeffs:
        return acc
    lo = outer.valuation
    if lo < 0:
        base_inv = inner.inverse()
        pw = base_inv ** (-lo)
    else:
        pw = inner ** lo if lo > 0 else None
    for i, c in enumerate(outer.coeffs):
        k = lo + i
        if k == 0:
            term = LaurentSeries.constant(c, acc.order, inner.domain)
        else:
            term = pw * c
        if c != 0:
            acc = acc + term
        pw = inner if (pw is None) else pw * inner
        if k + 1 == 0:
            pw = None
    return acc
